#include "polydg/solver.hpp"

#include <cmath>
#include <exception>

namespace polydg {

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("final time T must be nonnegative");
  const double n = std::round(T / dt);
  if (std::abs(n * dt - T) > 1e-12 * std::max(1.0, T))
    throw std::invalid_argument("final time T must be an integer multiple of dt");
}

long TimeGrid::n_steps() const { return static_cast<long>(std::llround(T / dt)); }

Integrator::Integrator(const DGSpace& space, const SystemMatrices& matrices, RegionModels models,
                       const PhysicalParams& phys, ElementSpaceTimeField forcing)
    : space_(space), matrices_(matrices), models_(std::move(models)), phys_(phys), forcing_(std::move(forcing)) {
  phys_.validate();
  if (models_.size() != space_.mesh().regions().size())
    throw std::invalid_argument("one ionic model per mesh region is required");
  for (const auto& m : models_)
    if (!m) throw std::invalid_argument("missing ionic model");
  n_state_ = models_.front()->n_state();
  for (const auto& m : models_)
    if (m->n_state() != n_state_) throw std::invalid_argument("region models disagree on the state size");
}

const IonicModel& Integrator::model_of(std::size_t k) const {
  return *models_[static_cast<std::size_t>(space_.mesh().region_index()[k])];
}

SimState Integrator::initial_state(FieldCoeffs U0, std::vector<FieldCoeffs> Y0) const {
  if (U0.size() != space_.n_dofs()) throw std::invalid_argument("initial U has the wrong size");
  if (static_cast<int>(Y0.size()) != n_state_) throw std::invalid_argument("initial Y has the wrong size");
  for (const auto& y : Y0)
    if (y.size() != space_.n_dofs()) throw std::invalid_argument("initial Y component has the wrong size");
  SimState s;
  s.U = std::move(U0);
  s.Y = std::move(Y0);
  s.max_abs_u = max_abs(s.U);
  return s;
}

double Integrator::max_abs(const FieldCoeffs& U) const {
  double m = 0.0;
  for (std::size_t k = 0; k < space_.mesh().n_elements(); ++k) {
    const Eigen::VectorXd v = space_.volume(k).phi * space_.local(U, k);
    const double e = v.cwiseAbs().maxCoeff();
    if (!(e <= m)) m = e;  // propagates NaN
  }
  return m;
}

Eigen::VectorXd Integrator::ionic_vector(const SimState& s) const {
  const std::size_t ne = space_.mesh().n_elements();
  Eigen::VectorXd out(space_.n_dofs());
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long kk = 0; kk < static_cast<long>(ne); ++kk) {
    const std::size_t k = static_cast<std::size_t>(kk);
    try {
      const ElementQuadrature& q = space_.volume(k);
      const Eigen::VectorXd u = q.phi * space_.local(s.U, k);
      Eigen::MatrixXd y(q.weights.size(), n_state_);
      for (int j = 0; j < n_state_; ++j) y.col(j) = q.phi * space_.local(s.Y[j], k);
      const IonicModel& model = model_of(k);
      Eigen::VectorXd f(q.weights.size());
      std::vector<double> yp(static_cast<std::size_t>(n_state_));
      for (Eigen::Index r = 0; r < f.size(); ++r) {
        for (int j = 0; j < n_state_; ++j) yp[j] = y(r, j);
        f(r) = model.current(u(r), yp);
      }
      out.segment(space_.offset(k), space_.n_local()) = q.phi.transpose() * q.weights.cwiseProduct(f);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void Integrator::bootstrap_first_step(SimState& s) const { s.I_prev = ionic_vector(s); }

void Integrator::update_state(const SimState& s, std::vector<FieldCoeffs>& Y_new) const {
  const double dt = matrices_.dt();
  const std::size_t ne = space_.mesh().n_elements();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long kk = 0; kk < static_cast<long>(ne); ++kk) {
    const std::size_t k = static_cast<std::size_t>(kk);
    try {
      const ElementQuadrature& q = space_.volume(k);
      const Eigen::Index nq = q.weights.size();
      const Eigen::VectorXd u = q.phi * space_.local(s.U, k);
      Eigen::MatrixXd y(nq, n_state_);
      for (int j = 0; j < n_state_; ++j) y.col(j) = q.phi * space_.local(s.Y[j], k);
      const IonicModel& model = model_of(k);
      std::vector<double> yp(static_cast<std::size_t>(n_state_)), m(static_cast<std::size_t>(n_state_));
      for (Eigen::Index r = 0; r < nq; ++r) {
        for (int j = 0; j < n_state_; ++j) yp[j] = y(r, j);
        model.rates(u(r), yp, m);
        for (int j = 0; j < n_state_; ++j) yp[j] -= dt * m[j];
        model.clamp(yp);
        for (int j = 0; j < n_state_; ++j) y(r, j) = yp[j];
      }
      for (int j = 0; j < n_state_; ++j)
        Y_new[j].segment(space_.offset(k), space_.n_local()) =
            q.phi.transpose() * q.weights.cwiseProduct(y.col(j));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void Integrator::step(SimState& s) const {
  const double dt = matrices_.dt();
  const Eigen::VectorXd I_n = ionic_vector(s);
  if (s.I_prev.size() == 0) {
    if (s.step != 0) throw SolverError("ionic history missing after the first step", s.step);
    s.I_prev = I_n;
  }
  Eigen::VectorXd rhs = matrices_.rhs_operator() * s.U - phys_.chi_m * dt * extrapolate_ionic(I_n, s.I_prev);
  // Forcing at the midpoint, where the extrapolated ionic term is second-order accurate.
  if (forcing_) rhs += dt * assemble_load(space_, forcing_, s.time(dt) + 0.5 * dt);

  Eigen::VectorXd U_new;
  try {
    U_new = matrices_.solve(rhs);
  } catch (const SolverError& e) {
    throw SolverError(e.what(), s.step);
  }

  std::vector<FieldCoeffs> Y_new(static_cast<std::size_t>(n_state_), FieldCoeffs(space_.n_dofs()));
  if (n_state_ > 0) update_state(s, Y_new);

  const double m = max_abs(U_new);
  if (!std::isfinite(m) || m > kBlowUpLimit) {
    bool y_finite = true;
    for (const auto& y : Y_new) y_finite = y_finite && y.allFinite();
    throw BlowUpError(std::string("blow-up: max|u| = ") + std::to_string(m) + " mV" +
                          (y_finite ? "" : ", non-finite ionic state"),
                      s.step + 1, {s.max_abs_u, m});
  }
  for (const auto& y : Y_new)
    if (!y.allFinite()) throw BlowUpError("blow-up: non-finite ionic state", s.step + 1, {s.max_abs_u, m});

  s.U = std::move(U_new);
  s.Y = std::move(Y_new);
  s.I_prev = I_n;
  s.max_abs_u = m;
  ++s.step;
}

ElementSpaceTimeField manufactured_forcing(const ExactWave<double>& exact, const PhysicalParams& phys,
                                           const CubicReactionParams& cubic, const PolyMesh& mesh) {
  exact.validate();
  std::vector<Matrix2> sigma;
  for (const auto& r : mesh.regions()) sigma.push_back(r.conductivity());
  std::vector<int> region = mesh.region_index();
  const double cap = phys.chi_m * phys.C_m;
  const double chi = phys.chi_m;
  return [exact, sigma, region, cap, chi, cubic](const Point2& x, double t, std::size_t k) {
    const double u = exact.value(x, t);
    return cap * exact.time_derivative(x, t) -
           exact.diffusion(x, t, sigma[static_cast<std::size_t>(region[k])]) + chi * cubic_f(u, cubic);
  };
}

ExactField exact_field(const ExactWave<double>& exact) {
  return {[exact](const Point2& x, double t) { return exact.value(x, t); },
          [exact](const Point2& x, double t) -> Point2 { return exact.gradient(x, t); }};
}

}  // namespace polydg
