#include "helpers.hpp"
#include "polydg/assembly.hpp"
#include "polydg/errors.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace polydg;
using namespace polydg::testing;

namespace {

std::shared_ptr<const PolyMesh> heterogeneous(int n) {
  const PolyMesh base = generate_voronoi_mesh(Box{}, n, 30, 9);
  return std::make_shared<const PolyMesh>(
      tag_regions(base,
                  {{in_rectangle(0, 0.5, 0, 0.4), RegionTag{"wmv", 0.139, 0.557, Point2(0, 1)}},
                   {in_rectangle(0.5, 1, 0, 0.4), RegionTag{"wmh", 0.139, 0.557, Point2(1, 0)}}},
                  RegionTag{"grey", 0.735, 0.735, Point2(1, 0)}));
}

double max_abs(const SparseMatrix& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_SUITE("assembly") {

TEST_CASE("penalty on two unit squares at p = 2") {
  const DGSpace s(two_squares(), 2);
  const Eigen::VectorXd eta = face_penalties(s, PenaltyParams{10.0});
  int interior = 0;
  for (std::size_t f = 0; f < s.mesh().faces().size(); ++f) {
    if (s.mesh().faces()[f].is_boundary()) {
      CHECK(eta(f) == 0.0);
    } else {
      ++interior;
      CHECK(eta(f) == doctest::Approx(40.0 / std::sqrt(2.0)).epsilon(1e-12));
      CHECK(eta(f) == doctest::Approx(28.28).epsilon(1e-3));
    }
  }
  CHECK(interior == 1);
}

TEST_CASE("mass matrix is the identity and SPD") {
  const auto m = voronoi(50);
  const DGSpace s(m, 3);
  const SparseMatrix M = assemble_mass(s);
  const Eigen::MatrixXd D = Eigen::MatrixXd(M) - Eigen::MatrixXd::Identity(s.n_dofs(), s.n_dofs());
  CHECK(D.cwiseAbs().maxCoeff() < 1e-10);
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(M)};
  CHECK(llt.info() == Eigen::Success);
  const FieldCoeffs one = s.project([](const Point2&) { return 1.0; });
  CHECK(one.dot(M * one) == doctest::Approx(36.0).epsilon(1e-12));
}

TEST_CASE("stiffness is symmetric with constants in the kernel") {
  const auto m = heterogeneous(80);
  for (int p : {1, 2, 4}) {
    const DGSpace s(m, p);
    const SparseMatrix A = assemble_stiffness(s, PenaltyParams{});
    const SparseMatrix At = A.transpose();
    CHECK(max_abs(SparseMatrix(A - At)) <= 1e-12 * max_abs(A));
    const FieldCoeffs one = s.project([](const Point2&) { return 1.0; });
    CHECK((A * one).cwiseAbs().maxCoeff() < 1e-10 * max_abs(A));
  }
}

TEST_CASE("single element: volume stiffness only") {
  const DGSpace s(unit_square(), 2);
  const SparseMatrix A = assemble_stiffness(s, PenaltyParams{});
  const FieldCoeffs one = s.project([](const Point2&) { return 1.0; });
  CHECK((A * one).norm() < 1e-12);
  const FieldCoeffs x = s.project([](const Point2& p) { return p.x(); });
  CHECK(x.dot(A * x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coercivity surrogate on random vectors") {
  const auto m = heterogeneous(120);
  const DGSpace s(m, 2);
  const SparseMatrix A = assemble_stiffness(s, PenaltyParams{10.0});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  int negative = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd v(s.n_dofs());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = n01(rng);
    if (v.dot(A * v) < 0.0) ++negative;
  }
  CHECK(negative == 0);
}

TEST_CASE("blocks couple only face neighbours") {
  const auto m = voronoi(40);
  const DGSpace s(m, 1);
  const SparseMatrix A = assemble_stiffness(s, PenaltyParams{});
  std::set<std::pair<int, int>> adj;
  for (const Face& f : m->faces())
    if (!f.is_boundary()) {
      adj.insert({f.plus, f.minus});
      adj.insert({f.minus, f.plus});
    }
  const int nl = s.n_local();
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      const int a = static_cast<int>(it.row()) / nl, b = static_cast<int>(it.col()) / nl;
      if (a != b && it.value() != 0.0) CHECK(adj.count({a, b}) == 1);
    }
}

TEST_CASE("patch test: linear solution") {
  const RegionTag tag{"aniso", 0.62, 0.17, Point2(0.6, 0.8)};
  const auto base = generate_voronoi_mesh(Box{}, 60, 30, 4);
  const auto m = std::make_shared<const PolyMesh>(base.with_regions({tag}, std::vector<int>(base.n_elements(), 0)));
  const Matrix2 sigma = tag.conductivity();
  const Point2 grad(2.0, -1.0);
  for (int p : {1, 2, 3}) {
    const DGSpace s(m, p);
    const SparseMatrix A = assemble_stiffness(s, PenaltyParams{});
    const FieldCoeffs U = s.project([&](const Point2& x) { return grad.dot(x) + 1.0; });
    const Eigen::VectorXd B = assemble_boundary_flux(s, [&](const Point2&, const Point2& n) { return (sigma * grad).dot(n); });
    CHECK((A * U - B).norm() <= 1e-10 * B.norm());

    // Minimum-norm solve; the difference to U is a constant field.
    const Eigen::VectorXd x = Eigen::MatrixXd(A).completeOrthogonalDecomposition().solve(B);
    const FieldCoeffs diff = x - U;
    const double c = s.evaluate(diff, 0, m->element(0).centroid);
    for (std::size_t k = 0; k < m->n_elements(); ++k) {
      const Eigen::VectorXd v = s.evaluate(diff, k, s.volume(k).points);
      CHECK((v.array() - c).abs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("patch test: quadratic solution with a source") {
  const RegionTag tag{"aniso", 0.62, 0.17, Point2(1, 0)};
  const auto base = generate_voronoi_mesh(Box{}, 40, 30, 8);
  const auto m = std::make_shared<const PolyMesh>(base.with_regions({tag}, std::vector<int>(base.n_elements(), 0)));
  const Matrix2 sigma = tag.conductivity();
  // u = x^2 + x y, grad = (2x + y, x), -div(Sigma grad u) = -(2 s00 + s01 + s10)
  const double f = -(2.0 * sigma(0, 0) + sigma(0, 1) + sigma(1, 0));
  const DGSpace s(m, 2);
  const SparseMatrix A = assemble_stiffness(s, PenaltyParams{});
  const FieldCoeffs U = s.project([](const Point2& x) { return x.x() * x.x() + x.x() * x.y(); });
  const Eigen::VectorXd F = assemble_load(s, [f](const Point2&, double) { return f; }, 0.0);
  const Eigen::VectorXd B = assemble_boundary_flux(s, [&](const Point2& x, const Point2& n) {
    return (sigma * Point2(2 * x.x() + x.y(), x.x())).dot(n);
  });
  CHECK((A * U - F - B).norm() <= 1e-10 * (F + B).norm());
}

TEST_CASE("load vector") {
  const auto m = voronoi(30);
  const DGSpace s(m, 1);
  CHECK(assemble_load(s, [](const Point2&, double) { return 0.0; }, 0.0).norm() == 0.0);
  const Eigen::VectorXd F = assemble_load(s, [](const Point2&, double) { return 1.0; }, 0.0);
  for (std::size_t k = 0; k < m->n_elements(); ++k) {
    // phi_0 = 1/sqrt(|K|), so (1, phi_0) = sqrt(|K|)
    CHECK(std::abs(F(s.offset(k))) == doctest::Approx(std::sqrt(m->element(k).area)).epsilon(1e-12));
  }
}

TEST_CASE("system operators and solve") {
  const auto m = voronoi(40);
  const DGSpace s(m, 2);
  const PhysicalParams phys{140.0, 0.01};
  const double dt = 0.01;
  for (auto kind : {SystemMatrices::LinearSolver::Direct, SystemMatrices::LinearSolver::ConjugateGradient}) {
    SystemMatrices sys(assemble_mass(s), assemble_stiffness(s, PenaltyParams{}), phys, dt, kind);
    const SparseMatrix expect = phys.chi_m * phys.C_m * sys.mass() + 0.5 * dt * sys.stiffness();
    CHECK(max_abs(SparseMatrix(sys.lhs() - expect)) < 1e-12);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(s.n_dofs(), -1.0, 2.0);
    const Eigen::VectorXd x = sys.solve(b);
    CHECK((sys.lhs() * x - b).norm() <= 1e-10 * b.norm());
  }
  CHECK_THROWS_AS(SystemMatrices(assemble_mass(s), assemble_stiffness(s, {}), phys, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((PhysicalParams{0.0, 1.0}.validate()), std::invalid_argument);
}

TEST_CASE("triplet dump") {
  SparseMatrix a(2, 2);
  a.insert(0, 1) = 2.5;
  a.insert(1, 0) = -1.0;
  std::ostringstream out;
  write_triplets(out, a);
  CHECK(out.str() == "1 0 -1\n0 1 2.5\n");
}

}  // TEST_SUITE
