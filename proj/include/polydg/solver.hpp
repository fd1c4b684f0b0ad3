#pragma once

#include "polydg/assembly.hpp"
#include "polydg/errors.hpp"
#include "polydg/exact_wave.hpp"
#include "polydg/ionic.hpp"
#include "polydg/norms.hpp"

#include <memory>
#include <vector>

namespace polydg {

/// Uniform time grid of N = T/dt steps.
struct TimeGrid {
  double dt = 1e-3;
  double T = 0.0;

  void validate() const;
  long n_steps() const;
  double time(long n) const { return static_cast<double>(n) * dt; }
};

/// Discrete state at t_n. Y holds one coefficient vector per ionic state component.
struct SimState {
  FieldCoeffs U;
  std::vector<FieldCoeffs> Y;
  long step = 0;
  double t0 = 0.0;
  FieldCoeffs I_prev;  // I^{n-1}; empty until bootstrapped
  double max_abs_u = 0.0;

  double time(double dt) const { return t0 + static_cast<double>(step) * dt; }
};

/// I_stim^{n+1} = 3/2 I^n - 1/2 I^{n-1}
inline Eigen::VectorXd extrapolate_ionic(const Eigen::VectorXd& I_n, const Eigen::VectorXd& I_prev) {
  return 1.5 * I_n - 0.5 * I_prev;
}

/// Ionic model attached to each mesh region (indexed like PolyMesh::regions()).
using RegionModels = std::vector<std::shared_ptr<const IonicModel>>;

/// Semi-implicit Crank-Nicolson stepper:
///   (chi C M + dt/2 A) U^{n+1} = (chi C M - dt/2 A) U^n + dt F^{n+1/2} - chi dt I_stim^{n+1}
///   Y^{n+1} = Y^n - dt G^n   (pointwise at quadrature points, clamped, re-projected)
class Integrator {
public:
  Integrator(const DGSpace& space, const SystemMatrices& matrices, RegionModels models,
             const PhysicalParams& phys, ElementSpaceTimeField forcing = {});

  int n_state() const { return n_state_; }
  double dt() const { return matrices_.dt(); }

  /// State from U^0 and pointwise-constant ionic state per region.
  SimState initial_state(FieldCoeffs U0, std::vector<FieldCoeffs> Y0) const;

  /// [I]_j = (f(u_h, y_h), phi_j), evaluated at quadrature points.
  Eigen::VectorXd ionic_vector(const SimState& s) const;

  /// Sets I^{-1} := I^0.
  void bootstrap_first_step(SimState& s) const;

  /// Advances s by one step. Throws SolverError / BlowUpError.
  void step(SimState& s) const;

  /// Abort threshold on max |u| at quadrature points.
  static constexpr double kBlowUpLimit = 500.0;

  /// max |u_h| over quadrature points
  double max_abs(const FieldCoeffs& U) const;

private:
  const IonicModel& model_of(std::size_t k) const;
  void update_state(const SimState& s, std::vector<FieldCoeffs>& Y_new) const;

  const DGSpace& space_;
  const SystemMatrices& matrices_;
  RegionModels models_;
  PhysicalParams phys_;
  ElementSpaceTimeField forcing_;
  int n_state_ = 0;
};

/// I_ext = chi C u_t - div(Sigma grad u) + chi f(u) for the exact front and
/// the cubic reaction, with the conductivity of each element's region.
ElementSpaceTimeField manufactured_forcing(const ExactWave<double>& exact, const PhysicalParams& phys,
                                           const CubicReactionParams& cubic, const PolyMesh& mesh);

/// The front as an ExactField for error norms.
ExactField exact_field(const ExactWave<double>& exact);

}  // namespace polydg
