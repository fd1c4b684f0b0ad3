#include "polydg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace polydg {

ErrorReport error_norms(const DGSpace& space, const FieldCoeffs& U, const ExactField& exact, double t,
                        const Eigen::VectorXd& eta, const NormHistory* error_history,
                        const NormHistory* exact_history, const std::optional<EnergyWeights>& energy_weights) {
  const NormSample e = sample_error_norms(space, U, eta, exact, t);
  const NormSample x = sample_exact_norms(space, exact, t);
  auto rel = [](double num_sq, double den_sq) { return den_sq > 0.0 ? std::sqrt(num_sq / den_sq) : 0.0; };
  ErrorReport r;
  r.l2 = {std::sqrt(e.l2_sq), rel(e.l2_sq, x.l2_sq)};
  r.l4 = {std::pow(e.l4_4, 0.25), x.l4_4 > 0.0 ? std::pow(e.l4_4 / x.l4_4, 0.25) : 0.0};
  r.dg = {std::sqrt(e.dg_sq()), rel(e.dg_sq(), x.dg_sq())};
  if (energy_weights) {
    if (!error_history || !exact_history || error_history->empty() || exact_history->empty())
      throw NormError("energy norm requested without an accumulated norm history");
    const double num = error_history->energy_sq(*energy_weights);
    r.energy = ErrorValue{std::sqrt(num), rel(num, exact_history->energy_sq(*energy_weights))};
  }
  return r;
}

ProbeSeries probe_series(const ProbeTrace& trace) { return {trace.position, trace.t, trace.column(0)}; }

double crossing_time(const ProbeSeries& s, double threshold) {
  if (s.t.size() != s.u.size()) throw AnalysisError("probe trace has mismatched time and value columns");
  std::vector<double> hits;
  for (std::size_t i = 1; i < s.u.size(); ++i) {
    const double a = s.u[i - 1], b = s.u[i];
    if (a < threshold && b >= threshold) hits.push_back(s.t[i - 1] + (threshold - a) / (b - a) * (s.t[i] - s.t[i - 1]));
  }
  std::ostringstream where;
  where << "probe (" << s.position.x() << ", " << s.position.y() << ")";
  if (hits.empty()) throw AnalysisError("front did not arrive at " + where.str());
  if (hits.size() > 1) {
    std::ostringstream msg;
    msg << "re-entrant trace at " << where.str() << ": crossings at";
    for (double h : hits) msg << ' ' << h;
    throw AnalysisError(msg.str());
  }
  return hits.front();
}

VelocityEstimate estimate_cv(const std::vector<ProbeSeries>& probes, double threshold) {
  if (probes.size() < 2) throw AnalysisError("conduction velocity needs at least two probes");
  VelocityEstimate v;
  v.threshold = threshold;
  for (const auto& p : probes) {
    v.positions.push_back(p.position);
    v.crossing_times.push_back(crossing_time(p, threshold));
  }
  // Line through the two farthest probes.
  std::size_t ia = 0, ib = 1;
  double dmax = -1.0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = i + 1; j < probes.size(); ++j) {
      const double d = (v.positions[i] - v.positions[j]).norm();
      if (d > dmax) dmax = d, ia = i, ib = j;
    }
  if (!(dmax > 0.0)) throw AnalysisError("probes coincide");
  const Point2 dir = (v.positions[ib] - v.positions[ia]) / dmax;
  std::vector<double> s, t;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const Point2 r = v.positions[i] - v.positions[ia];
    if (std::abs(r.x() * dir.y() - r.y() * dir.x()) > 1e-9 * dmax) throw AnalysisError("probes are not colinear");
    s.push_back(r.dot(dir));
    t.push_back(v.crossing_times[i]);
  }
  std::vector<double> sorted = t;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw AnalysisError("probe crossing times are not strictly ordered");
  const LinearFit fit = least_squares(t, s);
  v.cv = std::abs(fit.slope);
  if (!(v.cv > 0.0)) throw AnalysisError("front does not advance between probes");
  return v;
}

std::pair<double, double> field_range(const DGSpace& space, const FieldCoeffs& U) {
  const PolyMesh& mesh = space.mesh();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    const Element& e = mesh.element(k);
    PointSet v(static_cast<Eigen::Index>(e.vertices.size()), 2);
    for (std::size_t i = 0; i < e.vertices.size(); ++i)
      v.row(static_cast<Eigen::Index>(i)) = mesh.vertices()[e.vertices[i]].transpose();
    const Eigen::VectorXd a = space.volume(k).phi * space.local(U, k);
    const Eigen::VectorXd b = space.evaluate(U, k, v);
    lo = std::min({lo, a.minCoeff(), b.minCoeff()});
    hi = std::max({hi, a.maxCoeff(), b.maxCoeff()});
  }
  return {lo, hi};
}

ShootMetrics shoot_metrics(const std::vector<double>& minima, const std::vector<double>& maxima, double V_depol,
                           double V_rest) {
  const double span = V_depol - V_rest;
  if (!(span > 0.0)) throw AnalysisError("V_depol must exceed V_rest");
  double over = 0.0, under = 0.0;
  for (double m : maxima) over = std::max(over, m - V_depol);
  for (double m : minima) under = std::max(under, V_rest - m);
  auto pct = [span](double x) { return std::round(x / span * 100.0 * 1e4) / 1e4; };
  return {pct(over), pct(under)};
}

ShootMetrics shoot_metrics(const DGSpace& space, const std::vector<FieldCoeffs>& snapshots, double V_depol,
                           double V_rest) {
  std::vector<double> lo, hi;
  for (const auto& U : snapshots) {
    const auto [a, b] = field_range(space, U);
    lo.push_back(a);
    hi.push_back(b);
  }
  return shoot_metrics(lo, hi, V_depol, V_rest);
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw AnalysisError("least squares needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw AnalysisError("least squares needs distinct abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

double observed_rate(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

void ConvergenceTable::compute_rates() {
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i].rate = i > 0 && rows[i - 1].p == rows[i].p && rows[i - 1].h != rows[i].h
                       ? observed_rate(rows[i - 1].error, rows[i].error, rows[i - 1].h, rows[i].h)
                       : std::numeric_limits<double>::quiet_NaN();
}

LinearFit ConvergenceTable::fit_h() const {
  std::vector<double> x, y;
  for (const auto& r : rows) x.push_back(std::log(r.h)), y.push_back(std::log(r.error));
  return least_squares(x, y);
}

LinearFit ConvergenceTable::fit_p() const {
  std::vector<double> x, y;
  for (const auto& r : rows) x.push_back(r.p), y.push_back(std::log(r.error));
  return least_squares(x, y);
}

ConvergenceTable convergence_study(const SimulationConfig& base, const std::vector<StudyMember>& ladder,
                                   const StudyRunner& runner) {
  if (ladder.empty()) throw ConfigError({"study ladder is empty"});
  if (base.initial.type != "exact_wave") throw ConfigError({"convergence studies need initial.type 'exact_wave'"});
  ConvergenceTable table;
  std::map<int, std::shared_ptr<const PolyMesh>> meshes;
  for (const StudyMember& m : ladder) {
    SimulationConfig cfg = base;
    cfg.mesh.n_elements = m.n_elements;
    cfg.space.degree = m.degree;
    cfg.outputs.errors = true;
    cfg.outputs.vtk = false;
    try {
      RunArtifacts art;
      if (runner) {
        art = runner(cfg);
      } else {
        auto& mesh = meshes[m.n_elements];
        if (!mesh) mesh = build_mesh(cfg);
        art = run_simulation(cfg, mesh);
      }
      ConvergenceRow row;
      row.h = art.mesh->mesh_size();
      row.p = m.degree;
      row.dofs = static_cast<long>(art.space->n_dofs());
      row.n_elements = static_cast<int>(art.mesh->n_elements());
      row.error = art.relative_energy_error();
      const NormSample& e = art.error_norms.latest();
      const NormSample& x = art.exact_norms.latest();
      row.l2_error = std::sqrt(e.l2_sq / x.l2_sq);
      table.rows.push_back(row);
    } catch (const std::exception& e) {
      table.compute_rates();
      throw StudyError("study member (n_elements " + std::to_string(m.n_elements) + ", p " +
                           std::to_string(m.degree) + ") failed: " + e.what(),
                       table);
    }
  }
  table.compute_rates();
  return table;
}

std::vector<WaveRow> wave_study(const SimulationConfig& base, const std::vector<StudyMember>& ladder,
                                double threshold, const StudyRunner& runner) {
  if (ladder.empty()) throw ConfigError({"study ladder is empty"});
  if (base.outputs.probes.size() < 2) throw ConfigError({"wave studies need at least two probes"});
  const double V_depol = base.exact.V_depol;
  const double V_rest = base.exact.V_rest;
  std::vector<WaveRow> rows;
  std::map<int, std::shared_ptr<const PolyMesh>> meshes;
  for (const StudyMember& m : ladder) {
    SimulationConfig cfg = base;
    cfg.mesh.n_elements = m.n_elements;
    cfg.space.degree = m.degree;
    cfg.outputs.vtk = false;
    cfg.outputs.norms = false;
    cfg.outputs.field_range = true;
    RunArtifacts art;
    try {
      if (runner) {
        art = runner(cfg);
      } else {
        auto& mesh = meshes[m.n_elements];
        if (!mesh) mesh = build_mesh(cfg);
        art = run_simulation(cfg, mesh);
      }
    } catch (const std::exception& e) {
      throw AnalysisError("study member (n_elements " + std::to_string(m.n_elements) + ", p " +
                          std::to_string(m.degree) + ") failed: " + e.what());
    }
    WaveRow row;
    row.h = art.mesh->mesh_size();
    row.p = m.degree;
    row.dofs = static_cast<long>(art.space->n_dofs());
    row.n_elements = static_cast<int>(art.mesh->n_elements());
    std::vector<ProbeSeries> series;
    for (const auto& tr : art.probes) series.push_back(probe_series(tr));
    try {
      row.cv = estimate_cv(series, threshold).cv;
    } catch (const AnalysisError& e) {
      row.cv_error = e.what();
    }
    if (art.range_min.empty()) throw AnalysisError("run produced no field range samples");
    row.final_shoot = shoot_metrics({art.range_min.back()}, {art.range_max.back()}, V_depol, V_rest);
    row.peak_shoot = shoot_metrics(art.range_min, art.range_max, V_depol, V_rest);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace polydg
