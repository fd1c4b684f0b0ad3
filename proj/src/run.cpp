#include "polydg/run.hpp"

#include "polydg/checkpoint.hpp"
#include "polydg/mesh_io.hpp"
#include "polydg/voronoi.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace polydg {

namespace {

std::string region_list(const PolyMesh& mesh) {
  std::string s;
  for (const auto& r : mesh.regions()) s += (s.empty() ? "" : ", ") + r.name;
  return s;
}

int find_region(const PolyMesh& mesh, const std::string& name) {
  for (std::size_t i = 0; i < mesh.regions().size(); ++i)
    if (mesh.regions()[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> resolve_regions(const PolyMesh& mesh, const std::vector<std::string>& names,
                                 const std::string& what, std::vector<std::string>& issues) {
  std::vector<int> ids;
  for (const auto& n : names) {
    const int id = find_region(mesh, n);
    if (id < 0)
      issues.push_back(what + ": unknown region '" + n + "' (valid regions: " + region_list(mesh) + ")");
    else
      ids.push_back(id);
  }
  return ids;
}

// Sample points for the field range: quadrature points and element vertices.
struct RangeSampler {
  std::vector<Eigen::MatrixXd> phi;

  RangeSampler(const DGSpace& space) {
    const PolyMesh& mesh = space.mesh();
    phi.resize(mesh.n_elements());
    for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
      const Element& e = mesh.element(k);
      PointSet v(static_cast<Eigen::Index>(e.vertices.size()), 2);
      for (std::size_t i = 0; i < e.vertices.size(); ++i)
        v.row(static_cast<Eigen::Index>(i)) = mesh.vertices()[e.vertices[i]].transpose();
      const Eigen::MatrixXd& q = space.volume(k).phi;
      phi[k].resize(q.rows() + v.rows(), space.n_local());
      phi[k] << q, space.basis_values(k, v);
    }
  }

  std::pair<double, double> range(const DGSpace& space, const FieldCoeffs& U) const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < phi.size(); ++k) {
      const Eigen::VectorXd v = phi[k] * space.local(U, k);
      lo = std::min(lo, v.minCoeff());
      hi = std::max(hi, v.maxCoeff());
    }
    return {lo, hi};
  }
};

}  // namespace

std::vector<double> ProbeTrace::column(std::size_t j) const {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row.at(j));
  return out;
}

double RunArtifacts::relative_energy_error() const {
  const double den = exact_norms.energy_sq(energy);
  return std::sqrt(error_norms.energy_sq(energy) / den);
}

std::shared_ptr<const PolyMesh> apply_regions(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh) {
  if (cfg.regions.empty()) return mesh;
  std::vector<RegionTag> regions = mesh->regions();
  std::vector<std::string> issues;
  for (const auto& rc : cfg.regions) {
    const int id = find_region(*mesh, rc.tag.name);
    if (id < 0)
      issues.push_back("regions: unknown region '" + rc.tag.name + "' (valid regions: " + region_list(*mesh) + ")");
    else
      regions[static_cast<std::size_t>(id)] = rc.tag;
  }
  if (!issues.empty()) throw ConfigError(issues);
  return std::make_shared<const PolyMesh>(mesh->with_regions(regions, mesh->region_index()));
}

std::shared_ptr<const PolyMesh> build_mesh(const SimulationConfig& cfg) {
  if (cfg.mesh.source == "file") return apply_regions(cfg, std::make_shared<const PolyMesh>(import_mesh(cfg.mesh.path)));
  PolyMesh m = generate_voronoi_mesh(cfg.mesh.domain, cfg.mesh.n_elements, cfg.mesh.lloyd_iters, cfg.seed);
  if (cfg.regions.empty()) return std::make_shared<const PolyMesh>(std::move(m));
  std::vector<RegionRule> rules;
  RegionTag fallback;
  for (const auto& rc : cfg.regions) {
    if (rc.rect) {
      const auto& r = *rc.rect;
      rules.push_back({in_rectangle(r[0], r[1], r[2], r[3]), rc.tag});
    } else {
      fallback = rc.tag;
    }
  }
  PolyMesh tagged = tag_regions(m, rules, fallback);
  // Keep every configured region addressable even when no element landed in it.
  std::vector<RegionTag> all;
  for (const auto& rc : cfg.regions) all.push_back(rc.tag);
  std::vector<int> idx;
  for (int r : tagged.region_index()) {
    const std::string& name = tagged.regions()[static_cast<std::size_t>(r)].name;
    const auto it = std::find_if(all.begin(), all.end(), [&name](const RegionTag& t) { return t.name == name; });
    idx.push_back(static_cast<int>(it - all.begin()));
  }
  return std::make_shared<const PolyMesh>(tagged.with_regions(all, idx));
}

RunSetup prepare_run(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh) {
  cfg.validate();
  RunSetup rs;
  rs.mesh = mesh ? apply_regions(cfg, std::move(mesh)) : build_mesh(cfg);
  const PolyMesh& m = *rs.mesh;

  std::vector<std::string> issues;
  const std::vector<int> unstable = resolve_regions(m, cfg.initial.regions, "initial.regions", issues);
  std::vector<std::string> kb_names;
  for (const auto& [n, _] : cfg.model.k_bath_regions) kb_names.push_back(n);
  resolve_regions(m, kb_names, "model.k_bath_regions", issues);
  if (!issues.empty()) throw ConfigError(issues);

  // Ionic models per region.
  if (cfg.model.type == "cubic") {
    auto model = std::make_shared<const CubicModel>(cfg.model.cubic);
    rs.models.assign(m.regions().size(), model);
  } else {
    for (const auto& r : m.regions()) {
      BarretoCressmanParams p = cfg.model.bc;
      if (auto it = cfg.model.k_bath_regions.find(r.name); it != cfg.model.k_bath_regions.end()) p.K_bath = it->second;
      rs.models.push_back(std::make_shared<const BarretoCressmanModel>(p, cfg.model.bc_initial));
    }
  }

  rs.space = std::make_shared<const DGSpace>(rs.mesh, cfg.space.degree, cfg.space.quad_order);
  const DGSpace& space = *rs.space;
  rs.eta = face_penalties(space, cfg.penalty);
  rs.matrices = std::make_unique<SystemMatrices>(
      assemble_mass(space), assemble_stiffness(space, cfg.penalty), cfg.phys, cfg.time.dt,
      cfg.solver.linear == "cg" ? SystemMatrices::LinearSolver::ConjugateGradient
                                : SystemMatrices::LinearSolver::Direct,
      cfg.solver.tolerance);
  if (cfg.forcing == "manufactured") rs.forcing = manufactured_forcing(cfg.exact, cfg.phys, cfg.model.cubic, m);

  // Initial data by L2 projection.
  const std::set<int> unstable_set(unstable.begin(), unstable.end());
  const auto& region_of = m.region_index();
  std::function<double(const Point2&, std::size_t)> u0;
  const InitialConfig& ic = cfg.initial;
  if (ic.type == "exact_wave") {
    u0 = [&cfg](const Point2& x, std::size_t) { return cfg.exact.value(x, 0.0); };
  } else if (ic.type == "constant") {
    u0 = [v = ic.value](const Point2&, std::size_t) { return v; };
  } else if (ic.type == "regions") {
    const double hi = ic.u_unstable.value_or(cfg.model.bc_initial.u_unstable);
    const double lo = ic.u_stable.value_or(cfg.model.bc_initial.u_stable);
    u0 = [&, hi, lo](const Point2&, std::size_t k) { return unstable_set.count(region_of[k]) ? hi : lo; };
  } else {
    u0 = [&](const Point2& x, std::size_t k) {
      if (!unstable_set.count(region_of[k])) return ic.base;
      return ic.base + ic.amplitude * std::exp(-ic.width * (x - ic.center).squaredNorm());
    };
  }
  FieldCoeffs U0 = space.project(u0);
  std::vector<FieldCoeffs> Y0;
  const std::vector<double> y0 = rs.models.front()->initial_state();
  for (double v : y0) Y0.push_back(space.project([v](const Point2&) { return v; }));

  Integrator integ(space, *rs.matrices, rs.models, cfg.phys, rs.forcing);
  rs.initial = integ.initial_state(std::move(U0), std::move(Y0));

  if (!cfg.restart.empty()) {
    Checkpoint c = load_checkpoint(cfg.restart);
    if (c.state.U.size() != space.n_dofs() || static_cast<int>(c.state.Y.size()) != integ.n_state())
      throw ConfigError({"restart: checkpoint does not match the configured space and model"});
    if (c.dt != cfg.time.dt) throw ConfigError({"restart: checkpoint dt differs from time.dt"});
    c.state.max_abs_u = integ.max_abs(c.state.U);
    rs.initial = std::move(c.state);
  }
  return rs;
}

RunArtifacts run_simulation(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh,
                            const StepObserver& observer) {
  RunSetup rs = prepare_run(cfg, std::move(mesh));
  const DGSpace& space = *rs.space;
  const PolyMesh& m = *rs.mesh;
  Integrator integ(space, *rs.matrices, rs.models, cfg.phys, rs.forcing);

  RunArtifacts art;
  art.mesh = rs.mesh;
  art.space = rs.space;
  art.dt = cfg.time.dt;
  art.energy = EnergyWeights{cfg.energy_mu, cfg.phys.C_m, cfg.phys.chi_m,
                             cfg.model.type == "cubic" ? cfg.model.cubic.a : 0.0};

  SimState s = std::move(rs.initial);
  const double dt = cfg.time.dt;
  const long n_total = cfg.time.n_steps();
  const ExactField exact = exact_field(cfg.exact);

  // Probes: element lookup and basis row computed once.
  std::vector<Eigen::RowVectorXd> probe_phi;
  const std::vector<std::string> names = rs.models.front()->state_names();
  for (const Point2& p : cfg.outputs.probes) {
    const auto k = m.locate(p);
    if (!k) throw ConfigError({"outputs.probes: point (" + std::to_string(p.x()) + ", " + std::to_string(p.y()) +
                               ") is outside the mesh"});
    ProbeTrace tr;
    tr.position = p;
    tr.element = *k;
    tr.columns.push_back("u");
    tr.columns.insert(tr.columns.end(), names.begin(), names.end());
    art.probes.push_back(tr);
    PointSet ps(1, 2);
    ps.row(0) = p.transpose();
    probe_phi.push_back(space.basis_values(static_cast<std::size_t>(*k), ps).row(0));
  }

  std::vector<long> snap_steps;
  for (double ts : cfg.outputs.snapshot_times) snap_steps.push_back(std::llround(ts / dt));
  const RangeSampler sampler(space);

  auto record = [&](const SimState& st) {
    const double t = st.time(dt);
    for (std::size_t i = 0; i < art.probes.size(); ++i) {
      ProbeTrace& tr = art.probes[i];
      const std::size_t k = static_cast<std::size_t>(tr.element);
      std::vector<double> row{probe_phi[i].dot(space.local(st.U, k))};
      for (const auto& y : st.Y) row.push_back(probe_phi[i].dot(space.local(y, k)));
      tr.t.push_back(t);
      tr.values.push_back(std::move(row));
    }
    if (cfg.outputs.norms) art.norms.push(sample_norms(space, st.U, rs.eta, t));
    if (cfg.outputs.errors) {
      art.error_norms.push(sample_error_norms(space, st.U, rs.eta, exact, t));
      art.exact_norms.push(sample_exact_norms(space, exact, t));
    }
    if (cfg.outputs.field_range) {
      const auto [lo, hi] = sampler.range(space, st.U);
      art.range_t.push_back(t);
      art.range_min.push_back(lo);
      art.range_max.push_back(hi);
    }
    art.max_abs_trace.push_back(st.max_abs_u);
    if (std::find(snap_steps.begin(), snap_steps.end(), st.step) != snap_steps.end() &&
        (art.snapshots.empty() || art.snapshots.back().step != st.step))
      art.snapshots.push_back({t, st.step, st.U, st.Y});
  };

  art.snapshots.push_back({s.time(dt), s.step, s.U, s.Y});
  record(s);
  if (s.I_prev.size() == 0 && n_total > s.step) integ.bootstrap_first_step(s);
  while (s.step < n_total) {
    try {
      integ.step(s);
    } catch (const BlowUpError& e) {
      std::vector<double> trace = art.max_abs_trace;
      trace.push_back(e.max_norm_trace().back());
      throw BlowUpError(std::string(e.what()), e.step(), std::move(trace));
    }
    record(s);
    if (observer) observer(s, s.time(dt));
  }

  art.metadata = {
      {"name", cfg.name},
      {"config_hash", config_hash(cfg)},
      {"version", "polydg 0.1.0"},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"n_elements", m.n_elements()},
      {"n_dofs", space.n_dofs()},
      {"mesh_size", m.mesh_size()},
      {"degree", space.degree()},
      {"quad_order", space.quad_order()},
      {"steps", s.step},
      {"final_time", s.time(dt)},
      {"forcing", cfg.forcing},
      {"decisions",
       {"first step: I^{-1} := I^0 (first-order kick-off)",
        "ionic state advanced pointwise at quadrature points, clamped, L2 re-projected",
        "external forcing evaluated at t_{n+1/2}", "initial data by element-wise L2 projection",
        "energy-norm time integrals by the trapezoidal rule, mu = " + std::to_string(cfg.energy_mu)}}};
  art.final_state = std::move(s);
  return art;
}

}  // namespace polydg
