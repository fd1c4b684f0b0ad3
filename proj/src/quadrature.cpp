#include "polydg/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace polydg {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxQuadratureOrder)
    throw QuadratureError("quadrature order " + std::to_string(order) +
                          " unavailable; supported orders are 0.." +
                          std::to_string(kMaxQuadratureOrder));
}

}  // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw QuadratureError("Gauss-Legendre rule needs at least one point");
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // map [-1, 1] -> [0, 1]
    rule.points(n - 1 - i) = 0.5 * (x + 1.0);
    rule.weights(n - 1 - i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

LineRule line_rule(int order) {
  check_order(order);
  return gauss_legendre(order / 2 + 1);
}

TriangleRule triangle_rule(int order) {
  check_order(order);
  static std::mutex guard;
  static std::map<int, TriangleRule> cache;
  std::lock_guard lock(guard);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  const int n = (order + 3) / 2;
  const LineRule g = gauss_legendre(n);
  TriangleRule rule;
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = g.points(i);
      const double v = g.points(j);
      rule.points(i * n + j, 0) = u;
      rule.points(i * n + j, 1) = v * (1.0 - u);
      rule.weights(i * n + j) = g.weights(i) * g.weights(j) * (1.0 - u);
    }
  }
  cache.emplace(order, rule);
  return rule;
}

}  // namespace polydg
