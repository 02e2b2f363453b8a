#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace incongruity {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed embedding, stopword, lexicon or model file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class EmptyIntersectionError : public Error {
 public:
  using Error::Error;
};

class EmptySentenceError : public Error {
 public:
  using Error::Error;
};

// Fewer than two in-vocabulary content words; callers substitute defaults.
class InsufficientContentError : public Error {
 public:
  using Error::Error;
};

class DegenerateTrainingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class IncompleteMatrixError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside one cross-validation fold.
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : Error("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}
  std::size_t fold() const { return fold_; }

 private:
  std::size_t fold_;
};

}  // namespace incongruity
