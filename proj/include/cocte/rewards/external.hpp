#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cocte/rewards/scorer.hpp"
#include "cocte/util/subprocess.hpp"

namespace cocte::rewards {

// Wire format shared by both transports:
//   request  {"id": ..., "question": ..., "steps": [{"sql", "exec_columns",
//             "exec_rows_sample", "exec_status"}]}
//   response {"id": ..., "scores": [...]}   with |scores| == |steps|
std::string encode_score_request(const ChainContext& ctx, size_t rows_sample_limit = 5);
std::vector<double> decode_score_response(const std::string& body,
                                          const std::string& expected_id,
                                          size_t expected_steps);

// Scores via a child process speaking line-delimited JSON on stdin/stdout.
class ProcessScorer : public StepScorer {
public:
  explicit ProcessScorer(std::vector<std::string> argv);

  std::vector<double> score(const ChainContext& ctx) override;
  std::string name() const override { return "process-scorer"; }

private:
  util::LineProcess proc_;
};

// Scores via HTTP POST /score with the same JSON bodies.
class HttpScorer : public StepScorer {
public:
  // endpoint like "http://127.0.0.1:8133"
  explicit HttpScorer(std::string endpoint);

  std::vector<double> score(const ChainContext& ctx) override;
  std::string name() const override { return "http-scorer"; }

private:
  std::string host_;
  int port_ = 80;
  std::string path_ = "/score";
};

}  // namespace cocte::rewards
