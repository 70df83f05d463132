#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fsrec {

/// Base of every error raised by the library. `category()` is a stable,
/// machine-parsable token; the CLI prints it as the first word of its
/// single-line failure message.
class Error : public std::runtime_error {
 public:
  Error(std::string_view category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("parse-error", "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyCorpusError : public Error {
 public:
  explicit EmptyCorpusError(const std::string& message) : Error("empty-corpus", message) {}
};

class UnknownUserError : public Error {
 public:
  explicit UnknownUserError(const std::string& key)
      : Error("unknown-user", "user key '" + key + "' is not present in the interaction id map") {}
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error("config-error", key.empty() ? message : key + ": " + message), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& message) : Error("index-error", message) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message) : Error("empty-input", message) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& message) : Error("shape-error", message) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t epoch, const std::string& message)
      : Error("divergence",
              "loss became non-finite at epoch " + std::to_string(epoch) + ": " + message +
                  " (try a smaller learning rate eta)"),
        epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& message) : Error("invariant-violation", message) {}
};

class EvaluationError : public Error {
 public:
  explicit EvaluationError(const std::string& message) : Error("evaluation-error", message) {}
};

class StaleCheckpointError : public Error {
 public:
  explicit StaleCheckpointError(const std::string& message) : Error("stale-checkpoint", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io-error", message) {}
};

}  // namespace fsrec
