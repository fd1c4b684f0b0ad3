#include "polydg/assembly.hpp"

#include "polydg/errors.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cstdio>
#include <ostream>

namespace polydg {

void PhysicalParams::validate() const {
  if (!(chi_m > 0.0)) throw std::invalid_argument("chi_m must be positive");
  if (!(C_m > 0.0)) throw std::invalid_argument("C_m must be positive");
}

Eigen::VectorXd face_penalties(const DGSpace& space, const PenaltyParams& penalty) {
  const PolyMesh& mesh = space.mesh();
  const double p2 = static_cast<double>(space.degree()) * space.degree();
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.faces().size()));
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.is_boundary()) continue;
    const double s_avg =
        0.5 * (mesh.region_of(face.plus).spectral_norm() + mesh.region_of(face.minus).spectral_norm());
    const double hp = mesh.element(face.plus).diameter;
    const double hm = mesh.element(face.minus).diameter;
    const double h_harm = 2.0 * hp * hm / (hp + hm);
    eta(static_cast<Eigen::Index>(f)) = penalty.eta0 * s_avg * p2 / h_harm;
  }
  return eta;
}

SparseMatrix assemble_mass(const DGSpace& space) {
  const int n = space.n_local();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(space.mesh().n_elements() * n * n);
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    const ElementQuadrature& q = space.volume(k);
    const Eigen::MatrixXd loc = q.phi.transpose() * q.weights.asDiagonal() * q.phi;
    const Eigen::Index o = space.offset(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) trip.emplace_back(o + i, o + j, loc(i, j));
  }
  SparseMatrix m(space.n_dofs(), space.n_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix assemble_stiffness(const DGSpace& space, const PenaltyParams& penalty) {
  const PolyMesh& mesh = space.mesh();
  const int n = space.n_local();
  const auto& region_index = mesh.region_index();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.n_elements() * n * n * 5);

  auto scatter = [&](Eigen::Index ro, Eigen::Index co, const Eigen::MatrixXd& blk) {
    for (Eigen::Index i = 0; i < blk.rows(); ++i)
      for (Eigen::Index j = 0; j < blk.cols(); ++j) trip.emplace_back(ro + i, co + j, blk(i, j));
  };

  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    if (region_index[k] < 0 || region_index[k] >= static_cast<int>(mesh.regions().size()))
      throw std::invalid_argument("element " + std::to_string(k) + " has no region tag");
    const Matrix2 sigma = mesh.region_of(k).conductivity();
    const ElementQuadrature& q = space.volume(k);
    const auto g = space.basis_gradients(k, q.points);
    const Eigen::MatrixXd fx = sigma(0, 0) * g[0] + sigma(0, 1) * g[1];
    const Eigen::MatrixXd fy = sigma(1, 0) * g[0] + sigma(1, 1) * g[1];
    const Eigen::MatrixXd loc =
        g[0].transpose() * q.weights.asDiagonal() * fx + g[1].transpose() * q.weights.asDiagonal() * fy;
    scatter(space.offset(k), space.offset(k), loc);
  }

  const Eigen::VectorXd eta = face_penalties(space, penalty);
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.is_boundary()) continue;
    const FaceQuadrature& fq = space.face_rule(f);
    const Eigen::Index nq = fq.weights.size();

    Eigen::MatrixXd jump(nq, 2 * n), flux(nq, 2 * n);
    const int elems[2] = {face.plus, face.minus};
    for (int s = 0; s < 2; ++s) {
      const std::size_t k = static_cast<std::size_t>(elems[s]);
      const Matrix2 sigma = mesh.region_of(k).conductivity();
      const Point2 sn = sigma * face.normal;
      const auto g = space.basis_gradients(k, fq.points);
      jump.middleCols(s * n, n) = (s == 0 ? 1.0 : -1.0) * space.basis_values(k, fq.points);
      flux.middleCols(s * n, n) = 0.5 * (sn.x() * g[0] + sn.y() * g[1]);
    }
    const Eigen::VectorXd w = fq.weights;
    const Eigen::MatrixXd consistency = jump.transpose() * w.asDiagonal() * flux;
    const Eigen::MatrixXd loc = eta(static_cast<Eigen::Index>(f)) * jump.transpose() * w.asDiagonal() * jump -
                                consistency - consistency.transpose();
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        scatter(space.offset(elems[a]), space.offset(elems[b]), loc.block(a * n, b * n, n, n));
  }
  SparseMatrix a(space.n_dofs(), space.n_dofs());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

Eigen::VectorXd assemble_load(const DGSpace& space, const SpaceTimeField& f, double t) {
  return assemble_load(space, [&f](const Point2& x, double tt, std::size_t) { return f(x, tt); }, t);
}

Eigen::VectorXd assemble_load(const DGSpace& space, const ElementSpaceTimeField& f, double t) {
  Eigen::VectorXd out(space.n_dofs());
  for (std::size_t k = 0; k < space.mesh().n_elements(); ++k) {
    const ElementQuadrature& q = space.volume(k);
    Eigen::VectorXd vals(q.weights.size());
    for (Eigen::Index r = 0; r < vals.size(); ++r) vals(r) = f(q.points.row(r).transpose(), t, k);
    space.local(out, k) = q.phi.transpose() * q.weights.cwiseProduct(vals);
  }
  return out;
}

Eigen::VectorXd assemble_boundary_flux(const DGSpace& space,
                                       const std::function<double(const Point2&, const Point2&)>& g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dofs());
  const auto& faces = space.mesh().faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!faces[f].is_boundary()) continue;
    const FaceQuadrature& fq = space.face_rule(f);
    Eigen::VectorXd vals(fq.weights.size());
    for (Eigen::Index r = 0; r < vals.size(); ++r) vals(r) = g(fq.points.row(r).transpose(), faces[f].normal);
    const Eigen::MatrixXd phi = space.basis_values(faces[f].plus, fq.points);
    space.local(out, faces[f].plus) += phi.transpose() * fq.weights.cwiseProduct(vals);
  }
  return out;
}

SystemMatrices::SystemMatrices(SparseMatrix mass, SparseMatrix stiffness, const PhysicalParams& phys,
                               double dt, LinearSolver solver, double tolerance)
    : mass_(std::move(mass)), stiffness_(std::move(stiffness)), dt_(dt), kind_(solver), tolerance_(tolerance) {
  phys.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double cap = phys.chi_m * phys.C_m;
  lhs_ = cap * mass_ + 0.5 * dt * stiffness_;
  rhs_op_ = cap * mass_ - 0.5 * dt * stiffness_;
  lhs_.makeCompressed();
  rhs_op_.makeCompressed();
  if (kind_ == LinearSolver::Direct) {
    direct_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>();
    direct_->compute(lhs_);
    if (direct_->info() != Eigen::Success) throw SolverError("factorization of the system matrix failed", 0);
  }
}

Eigen::VectorXd SystemMatrices::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x;
  if (kind_ == LinearSolver::Direct) {
    x = direct_->solve(b);
    if (direct_->info() != Eigen::Success) throw SolverError("direct solve failed");
  } else {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tolerance_);
    cg.compute(lhs_);
    x = cg.solve(b);
    if (cg.info() != Eigen::Success) throw SolverError("conjugate gradient did not converge");
  }
  const double bn = b.norm();
  if (bn > 0.0 && (lhs_ * x - b).norm() > std::max(tolerance_, 1e-10) * bn * 10.0)
    throw SolverError("linear solve residual above tolerance");
  return x;
}

void write_triplets(std::ostream& out, const SparseMatrix& m) {
  char buf[64];
  for (int c = 0; c < m.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf;
    }
}

}  // namespace polydg
