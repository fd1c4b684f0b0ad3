#include "polydg/ionic.hpp"

#include <algorithm>

namespace polydg {

void CubicReactionParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("cubic reaction scale a must be positive");
  if (!(V_rest <= V_thres && V_thres <= V_depol))
    throw std::invalid_argument("cubic reaction needs V_rest <= V_thres <= V_depol");
}

CubicModel::CubicModel(CubicReactionParams p) : p_(p) { p_.validate(); }

void BarretoCressmanParams::validate() const {
  const double g[] = {G_AHP, G_KL, G_Na, G_ClL, G_NaL, G_Ca, G_K, G_glia, rho, eps_diff, gamma};
  for (double v : g)
    if (!(v >= 0.0)) throw std::invalid_argument("ionic conductances and rates must be nonnegative");
  if (!(K_bath > 0.0)) throw std::invalid_argument("K_bath must be positive");
  if (!(beta > 0.0) || !(tau_slow > 0.0) || !(gate_rate > 0.0))
    throw std::invalid_argument("beta, tau_slow and gate_rate must be positive");
  if (!(cl_ratio > 0.0)) throw std::invalid_argument("chloride ratio must be positive");
}

BarretoCressmanModel::BarretoCressmanModel(BarretoCressmanParams p, BCInitialState init)
    : p_(p), init_(init) {
  p_.validate();
}

void BarretoCressmanModel::clamp(std::span<double> y) const {
  for (int j : {kCa, kKo, kNai}) y[j] = std::max(y[j], 1e-9);
  for (int j : {kGs, kGk, kGc}) y[j] = std::clamp(y[j], 0.0, 1.0);
}

}  // namespace polydg
