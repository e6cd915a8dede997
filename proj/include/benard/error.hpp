#pragma once

#include <stdexcept>
#include <string>

namespace benard {

/// Invalid run configuration: bad key, out-of-range value, grid too coarse for the cutoffs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or grid dimensions that do not match the basis they are used with.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EigenSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A control has a component on a mode that carries no noise (|h|_0 would be infinite).
class InvalidControlError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trajectory left the finite range; carries the step at which it was detected.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(int step, double time, const std::string& what)
      : std::runtime_error(what), step_(step), time_(time) {}
  int step() const { return step_; }
  double time() const { return time_; }

 private:
  int step_;
  double time_;
};

}  // namespace benard
