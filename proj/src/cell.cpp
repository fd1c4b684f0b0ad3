#include "polydg/cell.hpp"

#include "polydg/errors.hpp"
#include "polydg/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace polydg {

std::vector<double> CellTrace::column(std::size_t j) const {
  if (j >= columns.size()) throw std::out_of_range("cell trace column out of range");
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[j]);
  return out;
}

void CellRun::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be positive");
  if (!(C_m > 0.0)) throw std::invalid_argument("C_m must be positive");
  if (sample_every < 1) throw std::invalid_argument("sample_every must be at least 1");
}

CellTrace simulate_cell(const IonicModel& model, const CellRun& run) {
  run.validate();
  const long n_steps = std::lround(run.T / run.dt);
  std::vector<double> y = model.initial_state();
  std::vector<double> m(y.size());
  double u = run.u0;

  CellTrace tr;
  tr.columns.push_back("u");
  for (auto& s : model.state_names()) tr.columns.push_back(s);
  auto record = [&](double t) {
    tr.t.push_back(t);
    std::vector<double> row{u};
    row.insert(row.end(), y.begin(), y.end());
    tr.values.push_back(std::move(row));
  };
  record(0.0);

  std::vector<double> max_trace;
  for (long n = 0; n < n_steps; ++n) {
    const double f = model.current(u, y);
    model.rates(u, y, m);
    u -= run.dt * f / run.C_m;
    for (std::size_t j = 0; j < y.size(); ++j) y[j] -= run.dt * m[j];
    model.clamp(y);
    max_trace.push_back(std::abs(u));
    if (!std::isfinite(u) || std::abs(u) > Integrator::kBlowUpLimit)
      throw BlowUpError("cell potential left the admissible range at step " + std::to_string(n + 1), n + 1,
                        std::move(max_trace));
    if ((n + 1) % run.sample_every == 0) record(static_cast<double>(n + 1) * run.dt);
  }
  return tr;
}

std::string to_string(BurstClass c) {
  switch (c) {
    case BurstClass::Quiescent: return "quiescent";
    case BurstClass::SingleBurst: return "single-burst";
    case BurstClass::RecurrentBursting: return "recurrent-bursting";
  }
  return "unknown";
}

BurstSummary classify_bursting(const CellTrace& trace, double threshold, double tail) {
  if (trace.t.size() < 2) throw std::invalid_argument("trace too short to classify");
  BurstSummary s;
  const double t_end = trace.t.back();
  for (std::size_t i = 1; i < trace.t.size(); ++i) {
    const double a = trace.values[i - 1][0];
    const double b = trace.values[i][0];
    if (a < threshold && b >= threshold) {
      const double t = trace.t[i - 1] + (threshold - a) / (b - a) * (trace.t[i] - trace.t[i - 1]);
      s.crossings.push_back(t);
      if (t > t_end - tail) ++s.tail_crossings;
    }
  }
  if (s.crossings.empty())
    s.kind = BurstClass::Quiescent;
  else if (s.tail_crossings > 0 && s.crossings.size() >= 3)
    s.kind = BurstClass::RecurrentBursting;
  else
    s.kind = BurstClass::SingleBurst;
  return s;
}

}  // namespace polydg
