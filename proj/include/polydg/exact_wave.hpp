#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace polydg {

/// Planar travelling front
///   u(x, t) = V_rest + (V_depol - V_rest)/2 (1 - tanh((x.d - x0 - c t)/eps)).
template <typename Scalar = double>
struct ExactWave {
  using Vec = Eigen::Matrix<Scalar, 2, 1>;

  Scalar V_rest = Scalar(-85);
  Scalar V_depol = Scalar(30);
  Scalar eps = Scalar(0.2);
  Scalar c = Scalar(0.5);
  Vec direction = Vec(Scalar(1), Scalar(0));
  Scalar x0 = Scalar(0);

  void validate() const {
    using std::abs;
    if (!(eps > Scalar(0))) throw std::invalid_argument("front thickness eps must be positive");
    if (abs(direction.norm() - Scalar(1)) > Scalar(1e-12))
      throw std::invalid_argument("wave direction must be a unit vector");
  }

  Scalar amplitude() const { return (V_depol - V_rest) / Scalar(2); }
  Scalar phase(const Vec& x, Scalar t) const { return (x.dot(direction) - x0 - c * t) / eps; }

  Scalar value(const Vec& x, Scalar t) const {
    using std::tanh;
    return V_rest + amplitude() * (Scalar(1) - tanh(phase(x, t)));
  }

  Vec gradient(const Vec& x, Scalar t) const {
    return -amplitude() * sech2(phase(x, t)) / eps * direction;
  }

  Scalar time_derivative(const Vec& x, Scalar t) const {
    return amplitude() * c / eps * sech2(phase(x, t));
  }

  /// div(Sigma grad u) for a constant conductivity.
  Scalar diffusion(const Vec& x, Scalar t, const Eigen::Matrix<Scalar, 2, 2>& sigma) const {
    using std::tanh;
    const Scalar xi = phase(x, t);
    return Scalar(2) * amplitude() * sech2(xi) * tanh(xi) * direction.dot(sigma * direction) / (eps * eps);
  }

  static Scalar sech2(Scalar xi) {
    using std::cosh;
    using std::abs;
    if (abs(xi) > Scalar(350)) return Scalar(0);
    const Scalar ch = cosh(xi);
    return Scalar(1) / (ch * ch);
  }
};

}  // namespace polydg
