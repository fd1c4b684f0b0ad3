#pragma once

#include "polydg/dgspace.hpp"

#include <stdexcept>
#include <vector>

namespace polydg {

class NormError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Squared pieces of the DG norms of one field at one time.
struct NormSample {
  double t = 0.0;
  double l2_sq = 0.0;    // ||v||^2
  double grad_sq = 0.0;  // ||grad_h v||^2
  double jump_sq = 0.0;  // sum_F int_F eta [[v]]^2
  double l4_4 = 0.0;     // ||v||_{L4}^4
  double flux_sq = 0.0;  // sum_F int_F eta^{-1} |{Sigma grad v}|^2

  double dg_sq() const { return grad_sq + jump_sq; }
};

/// Weights of the energy norm
///   ||v||_e^2 = ||v(t)||^2 + int 2 mu/(C_m chi_m) ||v||_DG^2 + int a/C_m ||v||_L4^4.
struct EnergyWeights {
  double mu = 1.0;
  double C_m = 0.01;
  double chi_m = 140.0;
  double a = 1.4e-5;
};

/// Time history of norm samples with trapezoidal accumulation of the
/// DG and L4 integrals.
class NormHistory {
public:
  void push(const NormSample& s);

  bool empty() const { return samples_.empty(); }
  const std::vector<NormSample>& samples() const { return samples_; }
  const NormSample& latest() const;

  double integral_dg_sq() const { return int_dg_; }
  double integral_l4_4() const { return int_l4_; }

  /// Energy norm squared at the latest sample. Throws NormError if empty.
  double energy_sq(const EnergyWeights& w) const;
  /// Energy norm squared at every sample, same accumulation.
  std::vector<double> energy_sq_trace(const EnergyWeights& w) const;

private:
  std::vector<NormSample> samples_;
  double int_dg_ = 0.0;
  double int_l4_ = 0.0;
};

/// Exact field with its gradient, for error norms.
struct ExactField {
  std::function<double(const Point2&, double)> value;
  std::function<Point2(const Point2&, double)> gradient;
};

double l2_norm(const DGSpace& space, const FieldCoeffs& u);
double l4_norm(const DGSpace& space, const FieldCoeffs& u);
/// ||v||_DG with face weight eta (per face, zero on the boundary).
double dg_norm(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta);

/// Norm pieces of u_h.
NormSample sample_norms(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta,
                        double t = 0.0);
/// Norm pieces of u_h - u_ex(t).
NormSample sample_error_norms(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta,
                              const ExactField& exact, double t);
/// Norm pieces of u_ex(t) itself (continuous, so no jump term).
NormSample sample_exact_norms(const DGSpace& space, const ExactField& exact, double t);

}  // namespace polydg
