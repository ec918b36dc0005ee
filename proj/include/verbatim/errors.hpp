#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace verbatim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input document could not be mapped onto a domain type. `path` is a
/// JSON-pointer-like location ("/speakers/2/start_s"), empty for whole-document errors.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ConflictError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class TagError : public Error {
 public:
  using Error::Error;
};

class AlignerContractError : public Error {
 public:
  using Error::Error;
};

enum class EngineErrorKind { unavailable, timeout, schema_violation, rejected, fixture };

class EngineError : public Error {
 public:
  EngineError(EngineErrorKind kind, const std::string& message)
      : Error(message), kind_(kind) {}

  EngineErrorKind kind() const noexcept { return kind_; }

 private:
  EngineErrorKind kind_;
};

/// A translation job failed on a specific source utterance.
class TranslationError : public Error {
 public:
  TranslationError(std::size_t utterance, const std::string& message)
      : Error("utterance " + std::to_string(utterance) + ": " + message), utterance_(utterance) {}

  std::size_t utterance() const noexcept { return utterance_; }

 private:
  std::size_t utterance_;
};

}  // namespace verbatim
