#pragma once

#include <stdexcept>
#include <string>

namespace twoline {

// Precondition violated by a caller-supplied value (a <= 0, bad ordering, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed external input (JSON shape, unknown names, bad numbers).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidAtlas : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chart presentations that do not satisfy the transition identity.
// The residual is a human-readable description of the failing germ.
class IncompatiblePresentations : public std::runtime_error {
 public:
  IncompatiblePresentations(const std::string& what, std::string residual)
      : std::runtime_error(what), residual_(std::move(residual)) {}
  const std::string& residual() const noexcept { return residual_; }

 private:
  std::string residual_;
};

class GlueInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotJoinable : public std::runtime_error {
 public:
  NotJoinable(const std::string& what, int index = -1)
      : std::runtime_error(what), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace twoline
