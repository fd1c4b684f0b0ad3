#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

/// Linear solve or time-stepping failure.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what, long step = -1)
      : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
        step_(step) {}
  long step() const { return step_; }

private:
  long step_;
};

/// Non-finite or runaway potential. Carries the max|u| history up to the failure.
class BlowUpError : public SolverError {
public:
  BlowUpError(const std::string& what, long step, std::vector<double> max_trace)
      : SolverError(what, step), trace_(std::move(max_trace)) {}
  const std::vector<double>& max_norm_trace() const { return trace_; }

private:
  std::vector<double> trace_;
};

}  // namespace polydg
