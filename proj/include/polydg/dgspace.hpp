#pragma once

#include "polydg/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>

namespace polydg {

/// Coefficients of a discontinuous field over the global DOFs of a DGSpace.
using FieldCoeffs = Eigen::VectorXd;
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, 2>;
using ScalarField = std::function<double(const Point2&)>;

/// Volume quadrature and cached basis values of one element.
struct ElementQuadrature {
  PointSet points;
  Eigen::VectorXd weights;
  Eigen::MatrixXd phi;  // n_points x n_local
};

/// Gauss rule along one face, in physical coordinates.
struct FaceQuadrature {
  PointSet points;
  Eigen::VectorXd weights;  // sum to the face length
};

/// Traces of a field and its gradient at the quadrature points of a face.
struct FaceTrace {
  Eigen::VectorXd plus, minus;              // minus is empty on boundary faces
  Eigen::MatrixXd grad_plus, grad_minus;    // n_points x 2
};

/// Discontinuous P^p space on a polygonal mesh. Each element carries total
/// degree-p monomials scaled to its bounding box, orthonormalized against the
/// element mass matrix by modified Gram-Schmidt, so the global mass matrix is
/// the identity up to rounding.
class DGSpace {
public:
  /// quad_order <= 0 selects 2p+2.
  DGSpace(std::shared_ptr<const PolyMesh> mesh, int degree, int quad_order = 0);

  const PolyMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const PolyMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int quad_order() const { return quad_order_; }
  int n_local() const { return n_local_; }
  Eigen::Index n_dofs() const { return static_cast<Eigen::Index>(mesh_->n_elements()) * n_local_; }
  Eigen::Index offset(std::size_t k) const { return static_cast<Eigen::Index>(k) * n_local_; }

  /// max over elements of |M_K - I| after orthonormalization
  double orthonormality_residual() const { return ortho_residual_; }

  const ElementQuadrature& volume(std::size_t k) const { return volume_.at(k); }
  const FaceQuadrature& face_rule(std::size_t f) const { return faces_.at(f); }

  Eigen::MatrixXd basis_values(std::size_t k, const PointSet& pts) const;
  /// {d/dx, d/dy}, each n_points x n_local
  std::array<Eigen::MatrixXd, 2> basis_gradients(std::size_t k, const PointSet& pts) const;

  Eigen::VectorXd evaluate(const FieldCoeffs& u, std::size_t k, const PointSet& pts) const;
  double evaluate(const FieldCoeffs& u, std::size_t k, const Point2& p) const;
  /// Value at a point anywhere in the mesh; throws if the point is outside.
  double evaluate_at(const FieldCoeffs& u, const Point2& p) const;
  Eigen::MatrixXd gradient(const FieldCoeffs& u, std::size_t k, const PointSet& pts) const;

  FaceTrace face_trace(const FieldCoeffs& u, std::size_t f) const;

  /// Element-wise L2 projection.
  FieldCoeffs project(const ScalarField& f) const;
  /// Same, with the element index available to the callback.
  FieldCoeffs project(const std::function<double(const Point2&, std::size_t)>& f) const;

  auto local(FieldCoeffs& u, std::size_t k) const { return u.segment(offset(k), n_local_); }
  auto local(const FieldCoeffs& u, std::size_t k) const { return u.segment(offset(k), n_local_); }

private:
  struct ElementBasis {
    Point2 center;
    Point2 half;
    Eigen::MatrixXd coeff;  // phi_i = sum_j coeff(i, j) m_j
  };

  Eigen::MatrixXd monomials(std::size_t k, const PointSet& pts) const;
  void check_element(std::size_t k) const;

  std::shared_ptr<const PolyMesh> mesh_;
  int degree_;
  int quad_order_;
  int n_local_;
  double ortho_residual_ = 0.0;
  std::vector<std::array<int, 2>> exponents_;
  std::vector<ElementBasis> basis_;
  std::vector<ElementQuadrature> volume_;
  std::vector<FaceQuadrature> faces_;
};

/// Number of P^p polynomials in two variables.
constexpr int local_dofs(int p) { return (p + 1) * (p + 2) / 2; }

}  // namespace polydg
