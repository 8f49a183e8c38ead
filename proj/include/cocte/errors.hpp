#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cocte {

// Base of all toolkit errors. `code()` is a stable machine-readable name
// used by the CLI when rendering errors as JSON.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

// --- parsing ---

class SyntaxError : public Error {
public:
  SyntaxError(size_t pos, const std::string& message)
      : Error("SyntaxError",
              message + " (at offset " + std::to_string(pos) + ")"),
        pos(pos) {}
  size_t pos;
};

class UnsupportedConstruct : public Error {
public:
  UnsupportedConstruct(size_t pos, const std::string& message)
      : Error("UnsupportedConstruct",
              message + " (at offset " + std::to_string(pos) + ")"),
        pos(pos) {}
  size_t pos;
};

class IndexOutOfRange : public Error {
public:
  explicit IndexOutOfRange(const std::string& message)
      : Error("IndexOutOfRange", message) {}
};

// --- execution ---

class UnknownDatabase : public Error {
public:
  explicit UnknownDatabase(const std::string& db_id)
      : Error("UnknownDatabase", "no database registered under id '" + db_id + "'") {}
};

class WriteRejected : public Error {
public:
  explicit WriteRejected(const std::string& message)
      : Error("WriteRejected", message) {}
};

class GoldExecutionFailed : public Error {
public:
  explicit GoldExecutionFailed(const std::string& message)
      : Error("GoldExecutionFailed", message) {}
};

// --- rewards / scoring ---

class EmptyChain : public Error {
public:
  explicit EmptyChain(const std::string& message) : Error("EmptyChain", message) {}
};

class ScorerUnavailable : public Error {
public:
  explicit ScorerUnavailable(const std::string& message)
      : Error("ScorerUnavailable", message) {}
};

class FeatureExtractionFailure : public Error {
public:
  explicit FeatureExtractionFailure(const std::string& message)
      : Error("FeatureExtractionFailure", message) {}
};

// --- labeling ---

class GeneratorFailure : public Error {
public:
  explicit GeneratorFailure(const std::string& message)
      : Error("GeneratorFailure", message) {}
};

// --- optimization kernel ---

class GroupTooSmall : public Error {
public:
  explicit GroupTooSmall(const std::string& message)
      : Error("GroupTooSmall", message) {}
};

class NonFiniteRatio : public Error {
public:
  explicit NonFiniteRatio(const std::string& message)
      : Error("NonFiniteRatio", message) {}
};

class NonPositiveRatio : public Error {
public:
  explicit NonPositiveRatio(const std::string& message)
      : Error("NonPositiveRatio", message) {}
};

class DivergenceDetected : public Error {
public:
  explicit DivergenceDetected(const std::string& message)
      : Error("DivergenceDetected", message) {}
};

// --- selection ---

class InsufficientCandidates : public Error {
public:
  explicit InsufficientCandidates(const std::string& message)
      : Error("InsufficientCandidates", message) {}
};

// --- pipeline ---

class MalformedDataset : public Error {
public:
  explicit MalformedDataset(const std::string& message)
      : Error("MalformedDataset", message) {}
};

class NoInstances : public Error {
public:
  explicit NoInstances(const std::string& message)
      : Error("NoInstances", message) {}
};

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& message)
      : Error("ConfigError", message) {}
};

class StageError : public Error {
public:
  StageError(const std::string& stage, const std::string& message)
      : Error("StageError", "[" + stage + "] " + message), stage(stage) {}
  std::string stage;
};

}  // namespace cocte
