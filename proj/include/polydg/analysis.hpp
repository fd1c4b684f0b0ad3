#pragma once

#include "polydg/config.hpp"
#include "polydg/norms.hpp"
#include "polydg/run.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ErrorValue {
  double absolute = 0.0;
  double relative = 0.0;
};

struct ErrorReport {
  ErrorValue l2, l4, dg;
  std::optional<ErrorValue> energy;
};

/// Errors of u_h(t) against an exact field. The energy error needs the
/// accumulated histories of the error and of the exact field; pass
/// `energy_weights` to request it.
ErrorReport error_norms(const DGSpace& space, const FieldCoeffs& U, const ExactField& exact, double t,
                        const Eigen::VectorXd& eta, const NormHistory* error_history = nullptr,
                        const NormHistory* exact_history = nullptr,
                        const std::optional<EnergyWeights>& energy_weights = std::nullopt);

// ---------------------------------------------------------------------------
// Conduction velocity

struct ProbeSeries {
  Point2 position = Point2::Zero();
  std::vector<double> t;
  std::vector<double> u;
};

ProbeSeries probe_series(const ProbeTrace& trace);

/// Upward threshold crossing by linear interpolation. Throws "front did not
/// arrive" without a crossing and "re-entrant trace" with more than one.
double crossing_time(const ProbeSeries& s, double threshold);

struct VelocityEstimate {
  std::vector<Point2> positions;
  double threshold = 0.0;
  std::vector<double> crossing_times;
  double cv = 0.0;
};

/// Least-squares speed of arrival along a line of colinear probes.
VelocityEstimate estimate_cv(const std::vector<ProbeSeries>& probes, double threshold);

// ---------------------------------------------------------------------------
// Overshoot / undershoot

/// min and max of u_h over quadrature points and element vertices.
std::pair<double, double> field_range(const DGSpace& space, const FieldCoeffs& U);

struct ShootMetrics {
  double overshoot = 0.0;   // percent of V_depol - V_rest
  double undershoot = 0.0;
};

/// Largest excursions beyond [V_rest, V_depol] over the given samples, rounded
/// to 1e-4 percent. Pass one sample for the value at a single time.
ShootMetrics shoot_metrics(const std::vector<double>& minima, const std::vector<double>& maxima, double V_depol,
                           double V_rest);
ShootMetrics shoot_metrics(const DGSpace& space, const std::vector<FieldCoeffs>& snapshots, double V_depol,
                           double V_rest);

// ---------------------------------------------------------------------------
// Convergence studies

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct ConvergenceRow {
  double h = 0.0;
  int p = 0;
  long dofs = 0;
  int n_elements = 0;
  double error = 0.0;     // relative energy error
  double l2_error = 0.0;  // relative L2 error at T
  double rate = std::numeric_limits<double>::quiet_NaN();  // against the previous row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;

  /// Fills `rate` with log(e_{i-1}/e_i) / log(h_{i-1}/h_i) between consecutive
  /// rows of equal degree; other rows get NaN.
  void compute_rates();
  /// Least-squares slope of log e against log h.
  LinearFit fit_h() const;
  /// Least-squares fit of log e against p.
  LinearFit fit_p() const;
};

/// Observed rate between consecutive entries.
double observed_rate(double e0, double e1, double h0, double h1);

struct StudyMember {
  int n_elements = 0;
  int degree = 1;
};

/// A run failure inside a study, with the rows completed before it.
class StudyError : public std::runtime_error {
public:
  StudyError(const std::string& what, ConvergenceTable partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const ConvergenceTable& partial() const { return partial_; }

private:
  ConvergenceTable partial_;
};

using StudyRunner = std::function<RunArtifacts(const SimulationConfig&)>;

/// Runs the template config once per member (mesh size and degree
/// substituted) and tabulates errors against the exact front. Rows keep
/// ladder order.
ConvergenceTable convergence_study(const SimulationConfig& base, const std::vector<StudyMember>& ladder,
                                   const StudyRunner& runner = {});

/// One (mesh, degree) member of a travelling-front study.
struct WaveRow {
  double h = 0.0;
  int p = 0;
  long dofs = 0;
  int n_elements = 0;
  double cv = std::numeric_limits<double>::quiet_NaN();  // NaN when estimation failed
  std::string cv_error;
  ShootMetrics final_shoot;  // at the final time
  ShootMetrics peak_shoot;   // largest over the run
};

/// Runs the template config once per member and measures the conduction
/// velocity at the config probes and the excursions beyond [V_rest, V_depol].
std::vector<WaveRow> wave_study(const SimulationConfig& base, const std::vector<StudyMember>& ladder,
                                double threshold, const StudyRunner& runner = {});

}  // namespace polydg
