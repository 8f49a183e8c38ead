#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cocte/exec/executor.hpp"
#include "cocte/sql/chain.hpp"

namespace cocte::lab {

inline constexpr size_t kTemplatesPerStep = 6;
inline constexpr size_t kStopAction = 5;

// A deterministic micro-environment for the optimization kernel: a small
// sales database, 12 aggregate questions, and an action alphabet of CTE step
// templates. Each (question, position, template) expands to a concrete step
// body; template 5 ends the chain (at position 1 it degrades to a trivial
// wrong step so that every action is always legal).
class ToyWorld {
public:
  struct Question {
    std::string id;
    std::string text;
    std::vector<size_t> gold_actions;  // template ids ending the gold chain
    std::string gt_sql;
  };

  // max_steps 4 is the default world; the reward-hacking variant uses 3.
  explicit ToyWorld(const std::filesystem::path& dir, size_t max_steps = 4);

  size_t question_count() const { return questions_.size(); }
  size_t max_steps() const { return max_steps_; }
  const Question& question(size_t q) const { return questions_[q]; }
  const std::vector<size_t>& train_questions() const { return train_; }
  const std::vector<size_t>& holdout_questions() const { return holdout_; }

  exec::QuestionInstance instance(size_t q) const;

  // Step body for (question, 1-based position, template id); empty string
  // means "stop here".
  std::string step_body(size_t q, size_t position, size_t action) const;

  // Fraction of the question's content words appearing in the template text.
  // Drives the warm-start prior; deliberately blind to the aggregate choice.
  double hint_overlap(size_t q, size_t position, size_t action) const;

  // Assembles the chain produced by an action sequence. Actions after a stop
  // are ignored; the final query is SELECT * FROM the last step.
  sql::CocteChain build_chain(size_t q, const std::vector<size_t>& actions) const;

  // Ground-truth success of an action sequence (cached execution).
  bool sequence_succeeds(size_t q, const std::vector<size_t>& actions) const;

  // Cached read-only execution against the world database.
  const exec::ExecOutcome& run_cached(const std::string& sql) const;
  int outcome(size_t q, const sql::CocteChain& chain) const;
  std::vector<exec::ExecOutcome> step_outcomes(const sql::CocteChain& chain) const;

  const exec::Registry& registry() const { return *registry_; }
  static constexpr const char* db_id() { return "labtoy"; }

private:
  void build_questions();

  size_t max_steps_;
  std::vector<Question> questions_;
  std::vector<size_t> train_, holdout_;
  std::unique_ptr<exec::Registry> registry_;
  std::unique_ptr<exec::Connection> conn_;
  mutable std::map<std::string, exec::ExecOutcome> exec_cache_;
  mutable std::map<std::string, exec::ResultTable> gold_cache_;
};

}  // namespace cocte::lab
