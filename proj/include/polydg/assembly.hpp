#pragma once

#include "polydg/dgspace.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <functional>
#include <iosfwd>
#include <memory>

namespace polydg {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Interior-penalty weight: eta = eta0 {Sigma_K}_A p^2 / {h}_H per interior face.
struct PenaltyParams {
  double eta0 = 10.0;
};

/// Surface-to-volume ratio and membrane capacitance.
struct PhysicalParams {
  double chi_m = 140.0;
  double C_m = 0.01;

  void validate() const;
};

/// Penalty of each face; zero on boundary faces.
Eigen::VectorXd face_penalties(const DGSpace& space, const PenaltyParams& penalty);

SparseMatrix assemble_mass(const DGSpace& space);

/// SIP stiffness with the element conductivities of the mesh regions.
/// Boundary faces contribute nothing (homogeneous Neumann).
SparseMatrix assemble_stiffness(const DGSpace& space, const PenaltyParams& penalty);

using SpaceTimeField = std::function<double(const Point2&, double t)>;
using ElementSpaceTimeField = std::function<double(const Point2&, double t, std::size_t element)>;

/// [F]_j = (f(., t), phi_j)
Eigen::VectorXd assemble_load(const DGSpace& space, const SpaceTimeField& f, double t);
Eigen::VectorXd assemble_load(const DGSpace& space, const ElementSpaceTimeField& f, double t);

/// Boundary flux term int_{dOmega} g(x, n) phi_j ds.
Eigen::VectorXd assemble_boundary_flux(const DGSpace& space,
                                       const std::function<double(const Point2&, const Point2&)>& g);

/// Operators of the Crank-Nicolson step:
///   lhs = chi_m C_m M + dt/2 A,  rhs_op = chi_m C_m M - dt/2 A.
/// The lhs is factored once.
class SystemMatrices {
public:
  enum class LinearSolver { Direct, ConjugateGradient };

  SystemMatrices(SparseMatrix mass, SparseMatrix stiffness, const PhysicalParams& phys, double dt,
                 LinearSolver solver = LinearSolver::Direct, double tolerance = 1e-10);

  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& lhs() const { return lhs_; }
  const SparseMatrix& rhs_operator() const { return rhs_op_; }
  double dt() const { return dt_; }

  /// Solves lhs x = b. Throws SolverError when the relative residual exceeds the tolerance.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

private:
  SparseMatrix mass_, stiffness_, lhs_, rhs_op_;
  double dt_;
  LinearSolver kind_;
  double tolerance_;
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> direct_;
};

/// ASCII triplet dump: one "row col value" line per stored entry.
void write_triplets(std::ostream& out, const SparseMatrix& m);

}  // namespace polydg
