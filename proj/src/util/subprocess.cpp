#include "cocte/util/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace cocte::util {

LineProcess::LineProcess(std::vector<std::string> argv) : argv_(std::move(argv)) {
  if (argv_.empty()) throw std::runtime_error("empty argv for child process");
}

LineProcess::~LineProcess() { shutdown(); }

void LineProcess::spawn() {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw std::runtime_error("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  pid_ = pid;
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
}

void LineProcess::shutdown() {
  if (in_fd_ >= 0) close(in_fd_);
  if (out_fd_ >= 0) close(out_fd_);
  in_fd_ = out_fd_ = -1;
  if (pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == 0) {
      kill(pid_, SIGTERM);
      waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
}

std::string LineProcess::round_trip(const std::string& line) {
  if (pid_ <= 0) spawn();
  std::string msg = line;
  msg.push_back('\n');
  size_t off = 0;
  while (off < msg.size()) {
    ssize_t n = write(in_fd_, msg.data() + off, msg.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw std::runtime_error("write to child failed: " + std::string(strerror(errno)));
    }
    off += static_cast<size_t>(n);
  }
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string out = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return out;
    }
    char chunk[4096];
    ssize_t n = read(out_fd_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      shutdown();
      throw std::runtime_error("read from child failed: " + std::string(strerror(errno)));
    }
    if (n == 0) {
      shutdown();
      throw std::runtime_error("child closed its stdout");
    }
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

}  // namespace cocte::util
