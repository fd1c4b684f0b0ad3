#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace polydg {

/// Highest polynomial order for which rules are generated.
inline constexpr int kMaxQuadratureOrder = 60;

class QuadratureError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Gauss-Legendre rule with n points on [0, 1].
struct LineRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

LineRule gauss_legendre(int n);

/// Rule on the segment [0, 1] exact for polynomials up to `order`.
LineRule line_rule(int order);

/// Rule on the reference triangle (0,0), (1,0), (0,1), weights summing to 1/2.
/// Collapsed (Duffy) tensor Gauss rule; all weights positive.
struct TriangleRule {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
};

TriangleRule triangle_rule(int order);

}  // namespace polydg
