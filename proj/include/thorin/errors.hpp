#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace thorin {

// Bad numeric parameters (alpha outside (0,2), negative rates, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mathematical hypothesis of a transform does not hold. `condition` names it.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string condition, const std::string& detail)
      : std::invalid_argument(condition + ": " + detail), condition_(std::move(condition)) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

// Quadrature or series failed to reach its target; carries what was achieved.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

// The requested quantity has no implementation for this input (e.g. no closed form).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Every schema violation found in a document, not only the first.
class SchemaError : public std::invalid_argument {
 public:
  explicit SchemaError(std::vector<std::string> issues)
      : std::invalid_argument(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

}  // namespace thorin
