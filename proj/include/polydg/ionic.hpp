#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

/// Raised when a model input leaves its domain of definition.
class IonicError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Pointwise ionic model: reaction current f(u, y) and state dynamics
/// dy/dt = -m(u, y). Implementations are pure.
class IonicModel {
public:
  virtual ~IonicModel() = default;

  virtual std::string name() const = 0;
  virtual int n_state() const = 0;
  virtual std::vector<std::string> state_names() const = 0;
  /// Default initial state (unstable region selection is done by the caller).
  virtual std::vector<double> initial_state() const = 0;

  virtual double current(double u, std::span<const double> y) const = 0;
  virtual void rates(double u, std::span<const double> y, std::span<double> m) const = 0;
  /// Projects a state back onto its admissible set.
  virtual void clamp(std::span<double> y) const { (void)y; }
};

// ---------------------------------------------------------------------------
// Cubic reaction

struct CubicReactionParams {
  double a = 1.4e-5;
  double V_rest = -85.0;
  double V_thres = -57.6;
  double V_depol = 30.0;

  double phi() const { return V_thres + V_depol + V_rest; }
  double theta() const { return V_thres * V_depol + V_thres * V_rest + V_depol * V_rest; }
  double omega() const { return V_thres * V_depol * V_rest; }
  void validate() const;
};

template <typename T>
T cubic_f(T u, const CubicReactionParams& p) {
  return T(p.a) * (u - T(p.V_rest)) * (u - T(p.V_thres)) * (u - T(p.V_depol));
}

/// a (u^3 - phi u^2 + theta u - omega)
template <typename T>
T cubic_f_expanded(T u, const CubicReactionParams& p) {
  return T(p.a) * (((u - T(p.phi())) * u + T(p.theta())) * u - T(p.omega()));
}

template <typename T>
T cubic_df(T u, const CubicReactionParams& p) {
  return T(p.a) * ((T(3) * u - T(2) * T(p.phi())) * u + T(p.theta()));
}

class CubicModel final : public IonicModel {
public:
  explicit CubicModel(CubicReactionParams p = {});

  std::string name() const override { return "cubic"; }
  int n_state() const override { return 0; }
  std::vector<std::string> state_names() const override { return {}; }
  std::vector<double> initial_state() const override { return {}; }
  double current(double u, std::span<const double>) const override { return cubic_f(u, p_); }
  void rates(double, std::span<const double>, std::span<double>) const override {}

  const CubicReactionParams& params() const { return p_; }

private:
  CubicReactionParams p_;
};

// ---------------------------------------------------------------------------
// Barreto-Cressman

struct BarretoCressmanParams {
  // conductances, mS/cm^2
  double G_AHP = 0.01;
  double G_KL = 0.05;
  double G_Na = 100.0;
  double G_ClL = 0.05;
  double G_NaL = 0.0175;
  double G_Ca = 0.1;
  double G_K = 40.0;
  double G_glia = 66.66;  // mM/s
  double K_bath = 8.0;    // mM

  double rho = 1.25;       // mM/s
  double eps_diff = 1.2;   // 1/s
  double gamma = 0.044;    // mM cm^2 / uC
  double beta = 7.0;
  double tau_slow = 1000.0;
  double gate_rate = 3.0;  // temperature factor of the gate rows
  double E_Ca = 120.0;     // mV
  double cl_ratio = 6.0 / 130.0;  // [Cl]_i / [Cl]_o
  double rt_over_f = 26.64;       // mV

  bool legacy_signs = false;          // flip k/s rows to the source-model sign convention
  bool literal_gate_pairing = false;  // g^s uses tau_c and g^c uses tau_s

  void validate() const;
};

/// State layout: y = [c, k, s, g^s, g^k, g^c].
enum BCState : int { kCa = 0, kKo = 1, kNai = 2, kGs = 3, kGk = 4, kGc = 5 };

template <typename T>
struct GatingRates {
  T a_s, b_s, a_k, b_k, a_c, b_c;
  T tau_s, tau_k, tau_c;
  T inf_s, inf_k, inf_c;
};

namespace detail {
/// x / (1 - exp(-x)) with its limit 1 at x = 0.
template <typename T>
T exprel_inv(T x) {
  using std::abs;
  using std::expm1;
  if (abs(x) < T(1e-6)) return T(1) + x / T(2) + x * x / T(12);
  return x / -expm1(-x);
}
}  // namespace detail

template <typename T>
GatingRates<T> gating_rates(T u) {
  using std::exp;
  GatingRates<T> r;
  r.a_s = detail::exprel_inv(T(0.1) * (u + T(30)));
  r.b_s = T(4) * exp(-(u + T(55)) / T(18));
  r.a_k = T(0.07) * exp(T(-0.2) * (u + T(44)));
  r.b_k = T(1) / (T(1) + exp(T(-0.1) * (u + T(14))));
  r.a_c = T(0.1) * detail::exprel_inv(T(0.1) * (u + T(34)));
  r.b_c = T(0.125) * exp(-(u + T(44)) / T(80));
  r.tau_s = T(1) / (r.a_s + r.b_s);
  r.tau_k = T(1) / (r.a_k + r.b_k);
  r.tau_c = T(1) / (r.a_c + r.b_c);
  r.inf_s = r.a_s * r.tau_s;
  r.inf_k = r.a_k * r.tau_k;
  r.inf_c = r.a_c * r.tau_c;
  return r;
}

template <typename T>
struct BCCurrents {
  T I_Na, I_K, I_Cl, I_pump, I_glia, I_diff;
  T E_Na, E_K, E_Cl;
};

template <typename T>
BCCurrents<T> currents(T u, std::span<const T> y, const BarretoCressmanParams& p) {
  using std::exp;
  using std::log;
  const T c = y[kCa], k = y[kKo], s = y[kNai];
  const T gs = y[kGs], gk = y[kGk], gc = y[kGc];
  const T na_arg = (T(270) - s) / s;
  if (!(s > T(0)) || !(na_arg > T(0)))
    throw IonicError("sodium Nernst argument (270 - s)/s is not positive for s = " +
                     std::to_string(static_cast<double>(s)));
  const T k_arg = k / (T(158) - s);
  if (!(k_arg > T(0)))
    throw IonicError("potassium Nernst argument k/(158 - s) is not positive for k = " +
                     std::to_string(static_cast<double>(k)) + ", s = " + std::to_string(static_cast<double>(s)));
  BCCurrents<T> out;
  const T rtf = T(p.rt_over_f);
  out.E_Na = rtf * log(na_arg);
  out.E_K = rtf * log(k_arg);
  out.E_Cl = rtf * log(T(p.cl_ratio));
  out.I_Na = (T(p.G_NaL) + T(p.G_Na) * gs * gs * gs * gk) * (u - out.E_Na);
  const T gc2 = gc * gc;
  out.I_K = (T(p.G_K) * gc2 * gc2 + T(p.G_AHP) * c / (T(1) + c) + T(p.G_KL)) * (u - out.E_K);
  out.I_Cl = T(p.G_ClL) * (u - out.E_Cl);
  out.I_pump = T(p.rho) / (T(1) + exp(T(5.5) - k)) / (T(1) + exp((T(25) - s) / T(3)));
  out.I_glia = T(p.G_glia) / (T(1) + exp((T(18) - k) / T(2.5)));
  out.I_diff = T(p.eps_diff) * (k - T(p.K_bath));
  return out;
}

template <typename T>
T bc_f(T u, std::span<const T> y, const BarretoCressmanParams& p) {
  const BCCurrents<T> i = currents(u, y, p);
  return i.I_Na + i.I_K + i.I_Cl;
}

template <typename T>
void bc_m(T u, std::span<const T> y, const BarretoCressmanParams& p, std::span<T> m) {
  using std::exp;
  const BCCurrents<T> i = currents(u, y, p);
  const GatingRates<T> g = gating_rates(u);
  const T inv_tau = T(1) / T(p.tau_slow);
  const T beta = T(p.beta), gamma = T(p.gamma);
  m[kCa] = y[kCa] / T(80) + T(p.G_Ca) * T(0.002) * (u - T(p.E_Ca)) / (T(1) + exp(-(T(25) + u) / T(2.5)));
  if (p.legacy_signs) {
    m[kKo] = inv_tau * (i.I_diff + T(2) * beta * i.I_pump + i.I_glia - beta * gamma * i.I_K);
    m[kNai] = inv_tau * (gamma * i.I_Na + T(3) * i.I_pump);
  } else {
    m[kKo] = inv_tau * (i.I_diff - T(2) * beta * i.I_pump - i.I_glia + beta * gamma * i.I_K);
    m[kNai] = inv_tau * (gamma * i.I_Na - T(3) * i.I_pump);
  }
  const T tau_for_s = p.literal_gate_pairing ? g.tau_c : g.tau_s;
  const T tau_for_c = p.literal_gate_pairing ? g.tau_s : g.tau_c;
  const T rate = T(p.gate_rate);
  m[kGs] = rate * (y[kGs] - g.inf_s) / tau_for_s;
  m[kGk] = rate * (y[kGk] - g.inf_k) / g.tau_k;
  m[kGc] = rate * (y[kGc] - g.inf_c) / tau_for_c;
}

/// Initial ionic state; u0 is -50 mV in unstable tissue and -67 mV elsewhere.
struct BCInitialState {
  double u_unstable = -50.0;
  double u_stable = -67.0;
  double c = 0.0;
  double k = 7.8;
  double s = 15.5;
  double g_s = 0.0936;
  double g_k = 0.96859;
  double g_c = 0.08553;

  std::vector<double> state() const { return {c, k, s, g_s, g_k, g_c}; }
};

class BarretoCressmanModel final : public IonicModel {
public:
  explicit BarretoCressmanModel(BarretoCressmanParams p = {}, BCInitialState init = {});

  std::string name() const override { return "barreto_cressman"; }
  int n_state() const override { return 6; }
  std::vector<std::string> state_names() const override { return {"c", "k", "s", "g_s", "g_k", "g_c"}; }
  std::vector<double> initial_state() const override { return init_.state(); }
  double current(double u, std::span<const double> y) const override { return bc_f(u, y, p_); }
  void rates(double u, std::span<const double> y, std::span<double> m) const override { bc_m(u, y, p_, m); }
  /// Gates into [0, 1]; concentrations floored at 1e-9 mM.
  void clamp(std::span<double> y) const override;

  const BarretoCressmanParams& params() const { return p_; }
  const BCInitialState& initial() const { return init_; }

private:
  BarretoCressmanParams p_;
  BCInitialState init_;
};

}  // namespace polydg
