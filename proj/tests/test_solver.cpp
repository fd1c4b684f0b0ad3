#include "helpers.hpp"
#include "polydg/checkpoint.hpp"
#include "polydg/config.hpp"
#include "polydg/run.hpp"
#include "polydg/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace polydg;
using namespace polydg::testing;

namespace {

class InertModel final : public IonicModel {
public:
  std::string name() const override { return "inert"; }
  int n_state() const override { return 0; }
  std::vector<std::string> state_names() const override { return {}; }
  std::vector<double> initial_state() const override { return {}; }
  double current(double, std::span<const double>) const override { return 0.0; }
  void rates(double, std::span<const double>, std::span<double>) const override {}
};

SimulationConfig small_front(double T = 0.2) {
  SimulationConfig c = config_from_json(nlohmann::json::parse(R"({
    "name": "small_front",
    "units": "mm",
    "mesh": {"source": "generate", "domain": [-3, 3, -3, 3], "n_elements": 60, "lloyd_iters": 20},
    "regions": [{"name": "tissue", "sigma_t": 0.62, "sigma_n": 0.17, "direction": [1, 0]}],
    "space": {"degree": 2},
    "model": {"type": "cubic"},
    "forcing": "manufactured",
    "time": {"dt": 0.01, "T": 0.2},
    "initial": {"type": "exact_wave"},
    "outputs": {"vtk": false, "probes": [[0, 0]]}
  })"));
  c.time.T = T;
  return c;
}

/// Constant-in-space cubic on one element: the scheme reduces to a two-step
/// explicit method for chi C u' = -chi f(u).
double single_element_final(double dt, double T, double u0) {
  const PhysicalParams phys = units_preset("mm");
  const DGSpace space(unit_square(), 1);
  const SystemMatrices mats(assemble_mass(space), assemble_stiffness(space, {}), phys, dt);
  const CubicReactionParams cubic;
  Integrator integ(space, mats, {std::make_shared<const CubicModel>(cubic)}, phys);
  SimState s = integ.initial_state(space.project([u0](const Point2&) { return u0; }), {});
  integ.bootstrap_first_step(s);
  const long n = std::lround(T / dt);
  for (long i = 0; i < n; ++i) integ.step(s);
  return space.evaluate(s.U, 0, Point2(0.5, 0.5));
}

double rk4_reference(double T, double u0) {
  const CubicReactionParams p;
  const double C = units_preset("mm").C_m;
  auto rhs = [&](double u) { return -cubic_f(u, p) / C; };
  const long n = 200000;
  const double h = T / n;
  double u = u0;
  for (long i = 0; i < n; ++i) {
    const double k1 = rhs(u), k2 = rhs(u + 0.5 * h * k1), k3 = rhs(u + 0.5 * h * k2), k4 = rhs(u + h * k3);
    u += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("ionic extrapolation") {
  Eigen::VectorXd a(1), b(1);
  a << 2.0;
  b << 1.0;
  CHECK(extrapolate_ionic(a, b)(0) == doctest::Approx(2.5));
}

TEST_CASE("time grid validation") {
  CHECK_THROWS_AS((TimeGrid{0.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TimeGrid{-1e-3, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TimeGrid{0.3, 1.0}.validate()), std::invalid_argument);
  CHECK_NOTHROW((TimeGrid{0.1, 1.0}.validate()));
  CHECK((TimeGrid{0.1, 1.0}.n_steps()) == 10);
  CHECK((TimeGrid{0.1, 0.0}.n_steps()) == 0);
}

TEST_CASE("no diffusion, no reaction, no forcing leaves U unchanged") {
  const auto mesh = voronoi(40);
  const DGSpace space(mesh, 2);
  const PhysicalParams phys = units_preset("mm");
  const SystemMatrices mats(assemble_mass(space), SparseMatrix(space.n_dofs(), space.n_dofs()), phys, 0.05);
  Integrator integ(space, mats, {std::make_shared<const InertModel>()}, phys);
  SimState s = integ.initial_state(space.project([](const Point2& x) { return std::sin(x.x()) * x.y(); }), {});
  const FieldCoeffs U0 = s.U;
  integ.bootstrap_first_step(s);
  for (int i = 0; i < 20; ++i) integ.step(s);
  CHECK((s.U - U0).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(s.step == 20);
}

TEST_CASE("second order in time for the reaction") {
  const double T = 0.5, u0 = -50.0;
  const double ref = rk4_reference(T, u0);
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) err.push_back(std::abs(single_element_final(dt, T, u0) - ref));
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double order = std::log2(err[i - 1] / err[i]);
    INFO("order " << order);
    CHECK(order >= 1.85);
  }
}

TEST_CASE("blow-up is detected and carries the max-norm trace") {
  const PhysicalParams phys = units_preset("mm");
  const DGSpace space(unit_square(), 1);
  const SystemMatrices mats(assemble_mass(space), assemble_stiffness(space, {}), phys, 0.5);
  CubicReactionParams hot;
  hot.a = 1e-3;
  Integrator integ(space, mats, {std::make_shared<const CubicModel>(hot)}, phys);
  SimState s = integ.initial_state(space.project([](const Point2&) { return 100.0; }), {});
  integ.bootstrap_first_step(s);
  try {
    for (int i = 0; i < 100; ++i) integ.step(s);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() >= 1);
    REQUIRE(!e.max_norm_trace().empty());
    CHECK(!(e.max_norm_trace().back() <= Integrator::kBlowUpLimit));
  }
}

TEST_CASE("wrong model count is rejected") {
  const PhysicalParams phys = units_preset("mm");
  const DGSpace space(unit_square(), 1);
  const SystemMatrices mats(assemble_mass(space), assemble_stiffness(space, {}), phys, 0.1);
  CHECK_THROWS_AS(Integrator(space, mats, {}, phys), std::invalid_argument);
}

TEST_CASE("runs are bitwise deterministic") {
  const RunArtifacts a = run_simulation(small_front());
  const RunArtifacts b = run_simulation(small_front());
  CHECK(a.final_state.U == b.final_state.U);
  CHECK(a.probes[0].values == b.probes[0].values);
  CHECK(a.metadata["config_hash"] == b.metadata["config_hash"]);
}

TEST_CASE("zero final time yields the initial state only") {
  const RunArtifacts a = run_simulation(small_front(0.0));
  CHECK(a.snapshots.size() == 1);
  CHECK(a.final_state.step == 0);
  CHECK(a.probes[0].t.size() == 1);
}

TEST_CASE("restart from a checkpoint is bitwise") {
  const RunArtifacts full = run_simulation(small_front(0.2));
  const RunArtifacts half = run_simulation(small_front(0.1));

  std::stringstream ss;
  write_checkpoint(ss, half.final_state, half.dt);
  const Checkpoint c = read_checkpoint(ss);
  CHECK(c.state.U == half.final_state.U);
  CHECK(c.state.I_prev == half.final_state.I_prev);
  CHECK(c.state.step == 10);

  const auto path = std::filesystem::temp_directory_path() / "polydg_restart_test.chk";
  save_checkpoint(path, half.final_state, half.dt);
  SimulationConfig cfg = small_front(0.2);
  cfg.restart = path.string();
  const RunArtifacts resumed = run_simulation(cfg);
  std::filesystem::remove(path);
  CHECK(resumed.final_state.step == 20);
  CHECK(resumed.final_state.U == full.final_state.U);
}

TEST_CASE("restart with a mismatched dt is rejected") {
  const RunArtifacts half = run_simulation(small_front(0.1));
  const auto path = std::filesystem::temp_directory_path() / "polydg_restart_bad.chk";
  save_checkpoint(path, half.final_state, 0.02);
  SimulationConfig cfg = small_front(0.2);
  cfg.restart = path.string();
  CHECK_THROWS_AS(run_simulation(cfg), ConfigError);
  std::filesystem::remove(path);
}

}  // TEST_SUITE
