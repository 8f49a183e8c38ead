#pragma once

#include <string>
#include <vector>

namespace cocte::util {

// Child process with line-oriented stdin/stdout, used for the external
// scorer / completion generator protocol. Spawns lazily on first use.
class LineProcess {
public:
  explicit LineProcess(std::vector<std::string> argv);
  ~LineProcess();
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Writes one line and reads one line back. Throws std::runtime_error on
  // spawn failure, broken pipes or EOF.
  std::string round_trip(const std::string& line);

  bool running() const { return pid_ > 0; }

private:
  void spawn();
  void shutdown();

  std::vector<std::string> argv_;
  int pid_ = -1;
  int in_fd_ = -1;   // child's stdin (we write)
  int out_fd_ = -1;  // child's stdout (we read)
  std::string buffer_;
};

}  // namespace cocte::util
