#include "helpers.hpp"
#include "polydg/checkpoint.hpp"
#include "polydg/output.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace polydg;
using namespace polydg::testing;

namespace {

std::string golden(const std::string& name) {
  std::ifstream in(std::string(POLYDG_SOURCE_DIR "/tests/golden/") + name);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("output") {

TEST_CASE("convergence table CSV") {
  ConvergenceTable t;
  t.rows = {{1.0, 1, 30, 10, 0.1, 0.05}, {0.5, 1, 120, 40, 0.025, 0.0125}};
  t.compute_rates();
  std::ostringstream out;
  write_convergence_csv(out, t);
  CHECK(out.str() == golden("convergence.csv"));
}

TEST_CASE("wave study CSV") {
  WaveRow a;
  a.h = 0.35;
  a.p = 3;
  a.dofs = 7400;
  a.n_elements = 740;
  a.cv = 0.5;
  a.final_shoot = {0.0041, 0.0008};
  a.peak_shoot = {0.25, 0.5};
  WaveRow b;
  b.h = 1.84;
  b.p = 1;
  b.dofs = 75;
  b.n_elements = 25;
  b.cv_error = "front did not arrive, probe 1";
  b.final_shoot = {8.37, 0.0};
  b.peak_shoot = {9.0, 1.5};
  std::ostringstream out;
  write_wave_csv(out, {a, b});
  CHECK(out.str() == golden("wave.csv"));
}

TEST_CASE("probe CSV") {
  ProbeTrace tr;
  tr.columns = {"u", "c", "k"};
  tr.t = {0.0, 0.5};
  tr.values = {{-50.0, 0.0, 7.8}, {-49.25, 1e-5, 7.8125}};
  std::ostringstream out;
  write_probe_csv(out, tr);
  CHECK(out.str() == golden("probe.csv"));
}

TEST_CASE("velocity CSV") {
  VelocityEstimate v;
  v.positions = {Point2(-0.5, 0.0), Point2(1.0, 0.0)};
  v.threshold = -27.5;
  v.crossing_times = {2.0, 5.0};
  v.cv = 0.5;
  std::ostringstream out;
  write_velocity_csv(out, v);
  CHECK(out.str() == golden("velocity.csv"));
}

TEST_CASE("norms CSV header") {
  std::ostringstream out;
  write_norms_csv(out, NormHistory{});
  CHECK(out.str() == "t,l2_sq,grad_sq,jump_sq,l4_4,flux_sq\n");
}

TEST_CASE("VTK layout") {
  const DGSpace space(two_squares(), 1);
  const FieldCoeffs U = space.project([](const Point2& x) { return x.x(); });
  std::ostringstream out;
  write_vtk(out, space, U);
  const std::string s = out.str();
  CHECK(s.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(s.find("POINTS 8 double") != std::string::npos);
  CHECK(s.find("CELLS 2 10") != std::string::npos);
  CHECK(s.find("CELL_TYPES 2\n7\n7\n") != std::string::npos);
  CHECK(s.find("POINT_DATA 8") != std::string::npos);
}

TEST_CASE("checkpoint round trip is bitwise") {
  SimState s;
  s.U = Eigen::VectorXd::Random(7);
  s.U(3) = 1.0 / 3.0;
  s.Y = {Eigen::VectorXd::Random(7), Eigen::VectorXd::Random(7)};
  s.I_prev = Eigen::VectorXd::Random(7);
  s.step = 12;
  s.t0 = 0.1;
  std::stringstream ss;
  write_checkpoint(ss, s, 1e-3 / 3.0);
  const Checkpoint c = read_checkpoint(ss);
  CHECK(c.dt == 1e-3 / 3.0);
  CHECK(c.state.U == s.U);
  CHECK(c.state.Y[1] == s.Y[1]);
  CHECK(c.state.I_prev == s.I_prev);
  CHECK(c.state.step == 12);
  CHECK(c.state.t0 == 0.1);
}

TEST_CASE("corrupt checkpoints are rejected") {
  std::istringstream bad("polydg-checkpoint 1\nstep x\n");
  CHECK_THROWS(read_checkpoint(bad));
  std::istringstream wrong("not a checkpoint\n");
  CHECK_THROWS(read_checkpoint(wrong));
}

}  // TEST_SUITE
