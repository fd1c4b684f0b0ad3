#include "polydg/dgspace.hpp"

#include "polydg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace polydg {

DGSpace::DGSpace(std::shared_ptr<const PolyMesh> mesh, int degree, int quad_order)
    : mesh_(std::move(mesh)), degree_(degree), quad_order_(quad_order > 0 ? quad_order : 2 * degree + 2) {
  if (!mesh_) throw std::invalid_argument("DGSpace needs a mesh");
  if (degree_ < 1) throw std::invalid_argument("polynomial degree must be at least 1");
  if (quad_order_ < 2 * degree_)
    throw std::invalid_argument("quadrature order must be at least 2p to integrate the mass matrix");
  n_local_ = local_dofs(degree_);
  for (int d = 0; d <= degree_; ++d)
    for (int j = 0; j <= d; ++j) exponents_.push_back({d - j, j});

  const TriangleRule tri = triangle_rule(quad_order_);
  const auto& verts = mesh_->vertices();
  const std::size_t ne = mesh_->n_elements();
  basis_.resize(ne);
  volume_.resize(ne);

  for (std::size_t k = 0; k < ne; ++k) {
    const Element& e = mesh_->element(k);
    ElementBasis& b = basis_[k];
    b.center = 0.5 * (e.bbox.lo + e.bbox.hi);
    b.half = 0.5 * (e.bbox.hi - e.bbox.lo);
    b.coeff = Eigen::MatrixXd::Identity(n_local_, n_local_);

    // Fan sub-triangulation from the centroid.
    const std::size_t nv = e.vertices.size();
    const Eigen::Index nq = tri.weights.size();
    ElementQuadrature& q = volume_[k];
    q.points.resize(nq * static_cast<Eigen::Index>(nv), 2);
    q.weights.resize(nq * static_cast<Eigen::Index>(nv));
    for (std::size_t i = 0; i < nv; ++i) {
      const Point2 a = verts[e.vertices[i]] - e.centroid;
      const Point2 c = verts[e.vertices[(i + 1) % nv]] - e.centroid;
      const double jac = a.x() * c.y() - a.y() * c.x();
      for (Eigen::Index r = 0; r < nq; ++r) {
        const Eigen::Index row = static_cast<Eigen::Index>(i) * nq + r;
        const Point2 x = e.centroid + a * tri.points(r, 0) + c * tri.points(r, 1);
        q.points.row(row) = x.transpose();
        q.weights(row) = tri.weights(r) * jac;
      }
    }

    // Modified Gram-Schmidt with one reorthogonalization pass.
    Eigen::MatrixXd vals = monomials(k, q.points);
    Eigen::MatrixXd coeff = Eigen::MatrixXd::Identity(n_local_, n_local_);
    for (int i = 0; i < n_local_; ++i) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < i; ++j) {
          const double r = (vals.col(i).array() * vals.col(j).array() * q.weights.array()).sum();
          vals.col(i) -= r * vals.col(j);
          coeff.row(i) -= r * coeff.row(j);
        }
      }
      const double nrm = std::sqrt((vals.col(i).array().square() * q.weights.array()).sum());
      if (!(nrm > 0.0)) throw std::runtime_error("degenerate basis on element " + std::to_string(k));
      vals.col(i) /= nrm;
      coeff.row(i) /= nrm;
    }
    b.coeff = coeff;
    q.phi = vals;
    const Eigen::MatrixXd gram = vals.transpose() * q.weights.asDiagonal() * vals;
    ortho_residual_ = std::max(
        ortho_residual_, (gram - Eigen::MatrixXd::Identity(n_local_, n_local_)).cwiseAbs().maxCoeff());
  }

  const LineRule line = line_rule(quad_order_);
  faces_.resize(mesh_->faces().size());
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& face = mesh_->faces()[f];
    const Point2 a = verts[face.endpoints[0]];
    const Point2 c = verts[face.endpoints[1]];
    FaceQuadrature& fq = faces_[f];
    fq.points.resize(line.points.size(), 2);
    for (Eigen::Index r = 0; r < line.points.size(); ++r)
      fq.points.row(r) = (a + line.points(r) * (c - a)).transpose();
    fq.weights = line.weights * face.length;
  }
}

void DGSpace::check_element(std::size_t k) const {
  if (k >= basis_.size())
    throw std::out_of_range("element index " + std::to_string(k) + " out of range");
}

Eigen::MatrixXd DGSpace::monomials(std::size_t k, const PointSet& pts) const {
  const ElementBasis& b = basis_[k];
  const Eigen::Index n = pts.rows();
  const Eigen::ArrayXd xi = (pts.col(0).array() - b.center.x()) / b.half.x();
  const Eigen::ArrayXd eta = (pts.col(1).array() - b.center.y()) / b.half.y();
  Eigen::MatrixXd xp(n, degree_ + 1), yp(n, degree_ + 1);
  xp.col(0).setOnes();
  yp.col(0).setOnes();
  for (int d = 1; d <= degree_; ++d) {
    xp.col(d) = xp.col(d - 1).array() * xi;
    yp.col(d) = yp.col(d - 1).array() * eta;
  }
  Eigen::MatrixXd m(n, n_local_);
  for (int j = 0; j < n_local_; ++j)
    m.col(j) = xp.col(exponents_[j][0]).cwiseProduct(yp.col(exponents_[j][1]));
  return m;
}

Eigen::MatrixXd DGSpace::basis_values(std::size_t k, const PointSet& pts) const {
  check_element(k);
  return monomials(k, pts) * basis_[k].coeff.transpose();
}

std::array<Eigen::MatrixXd, 2> DGSpace::basis_gradients(std::size_t k, const PointSet& pts) const {
  check_element(k);
  const ElementBasis& b = basis_[k];
  const Eigen::Index n = pts.rows();
  const Eigen::ArrayXd xi = (pts.col(0).array() - b.center.x()) / b.half.x();
  const Eigen::ArrayXd eta = (pts.col(1).array() - b.center.y()) / b.half.y();
  Eigen::MatrixXd xp(n, degree_ + 1), yp(n, degree_ + 1);
  xp.col(0).setOnes();
  yp.col(0).setOnes();
  for (int d = 1; d <= degree_; ++d) {
    xp.col(d) = xp.col(d - 1).array() * xi;
    yp.col(d) = yp.col(d - 1).array() * eta;
  }
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n, n_local_);
  Eigen::MatrixXd dy = Eigen::MatrixXd::Zero(n, n_local_);
  for (int j = 0; j < n_local_; ++j) {
    const int a = exponents_[j][0];
    const int c = exponents_[j][1];
    if (a > 0) dx.col(j) = (a / b.half.x()) * xp.col(a - 1).cwiseProduct(yp.col(c));
    if (c > 0) dy.col(j) = (c / b.half.y()) * xp.col(a).cwiseProduct(yp.col(c - 1));
  }
  const Eigen::MatrixXd ct = b.coeff.transpose();
  return {dx * ct, dy * ct};
}

Eigen::VectorXd DGSpace::evaluate(const FieldCoeffs& u, std::size_t k, const PointSet& pts) const {
  return basis_values(k, pts) * local(u, k);
}

double DGSpace::evaluate(const FieldCoeffs& u, std::size_t k, const Point2& p) const {
  PointSet pts(1, 2);
  pts.row(0) = p.transpose();
  return evaluate(u, k, pts)(0);
}

double DGSpace::evaluate_at(const FieldCoeffs& u, const Point2& p) const {
  const auto k = mesh_->locate(p);
  if (!k) throw std::out_of_range("point outside the mesh");
  return evaluate(u, static_cast<std::size_t>(*k), p);
}

Eigen::MatrixXd DGSpace::gradient(const FieldCoeffs& u, std::size_t k, const PointSet& pts) const {
  const auto g = basis_gradients(k, pts);
  Eigen::MatrixXd out(pts.rows(), 2);
  out.col(0) = g[0] * local(u, k);
  out.col(1) = g[1] * local(u, k);
  return out;
}

FaceTrace DGSpace::face_trace(const FieldCoeffs& u, std::size_t f) const {
  const Face& face = mesh_->faces().at(f);
  const FaceQuadrature& fq = faces_[f];
  FaceTrace t;
  t.plus = evaluate(u, face.plus, fq.points);
  t.grad_plus = gradient(u, face.plus, fq.points);
  if (!face.is_boundary()) {
    t.minus = evaluate(u, face.minus, fq.points);
    t.grad_minus = gradient(u, face.minus, fq.points);
  }
  return t;
}

FieldCoeffs DGSpace::project(const ScalarField& f) const {
  return project([&f](const Point2& p, std::size_t) { return f(p); });
}

FieldCoeffs DGSpace::project(const std::function<double(const Point2&, std::size_t)>& f) const {
  FieldCoeffs u(n_dofs());
  for (std::size_t k = 0; k < volume_.size(); ++k) {
    const ElementQuadrature& q = volume_[k];
    Eigen::VectorXd vals(q.weights.size());
    for (Eigen::Index r = 0; r < vals.size(); ++r) vals(r) = f(q.points.row(r).transpose(), k);
    local(u, k) = q.phi.transpose() * q.weights.cwiseProduct(vals);
  }
  return u;
}

}  // namespace polydg
