#pragma once

#include <stdexcept>
#include <string>

namespace l1stream {

struct SingularGramError : std::runtime_error {
  explicit SingularGramError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexNotActiveError : std::runtime_error {
  explicit IndexNotActiveError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatchError : std::invalid_argument {
  explicit DimensionMismatchError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct MaxStepsExceededError : std::runtime_error {
  explicit MaxStepsExceededError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CoverageError : std::invalid_argument {
  explicit CoverageError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct AlignmentError : std::invalid_argument {
  explicit AlignmentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct NotSolvedError : std::logic_error {
  explicit NotSolvedError(const std::string& msg) : std::logic_error(msg) {}
};

struct ZeroReferenceError : std::invalid_argument {
  explicit ZeroReferenceError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace l1stream
