#include "polydg/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace polydg {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

// Reads optional keys from one JSON object, collecting type errors and
// unknown keys into a shared issue list.
class Reader {
public:
  Reader(const json* j, std::string path, std::vector<std::string>& issues)
      : j_(j), path_(std::move(path)), issues_(issues) {
    if (j_ && !j_->is_object()) {
      issues_.push_back(where() + " must be an object");
      j_ = nullptr;
    }
  }
  Reader(const Reader&) = delete;
  ~Reader() {
    if (!j_) return;
    for (const auto& [key, _] : j_->items())
      if (!used_.count(key)) issues_.push_back("unknown key '" + qualified(key) + "'");
  }

  bool has(const char* key) {
    used_.insert(key);
    return j_ && j_->contains(key);
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!has(key)) return;
    try {
      out = (*j_)[key].template get<T>();
    } catch (const json::exception&) {
      issues_.push_back("'" + qualified(key) + "' has the wrong type");
    }
  }

  void get_point(const char* key, Point2& out) {
    std::vector<double> v;
    if (!has(key)) return;
    get(key, v);
    if (v.size() != 2) {
      issues_.push_back("'" + qualified(key) + "' must be a 2-vector");
      return;
    }
    out = Point2(v[0], v[1]);
  }

  const json* child(const char* key) {
    if (!has(key)) return nullptr;
    return &(*j_)[key];
  }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::vector<std::string>& issues() { return issues_; }

private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const json* j_;
  std::string path_;
  std::vector<std::string>& issues_;
  std::set<std::string> used_;
};

void read_cubic(Reader& r, CubicReactionParams& p) {
  r.get("a", p.a);
  r.get("V_rest", p.V_rest);
  r.get("V_thres", p.V_thres);
  r.get("V_depol", p.V_depol);
}

void read_bc(Reader& r, BarretoCressmanParams& p) {
  r.get("G_AHP", p.G_AHP);
  r.get("G_KL", p.G_KL);
  r.get("G_Na", p.G_Na);
  r.get("G_ClL", p.G_ClL);
  r.get("G_NaL", p.G_NaL);
  r.get("G_Ca", p.G_Ca);
  r.get("G_K", p.G_K);
  r.get("G_glia", p.G_glia);
  r.get("K_bath", p.K_bath);
  r.get("rho", p.rho);
  r.get("eps_diff", p.eps_diff);
  r.get("gamma", p.gamma);
  r.get("beta", p.beta);
  r.get("tau_slow", p.tau_slow);
  r.get("gate_rate", p.gate_rate);
  r.get("E_Ca", p.E_Ca);
  r.get("cl_ratio", p.cl_ratio);
  r.get("rt_over_f", p.rt_over_f);
  r.get("legacy_signs", p.legacy_signs);
  r.get("literal_gate_pairing", p.literal_gate_pairing);
}

void read_bc_initial(Reader& r, BCInitialState& s) {
  r.get("u_unstable", s.u_unstable);
  r.get("u_stable", s.u_stable);
  r.get("c", s.c);
  r.get("k", s.k);
  r.get("s", s.s);
  r.get("g_s", s.g_s);
  r.get("g_k", s.g_k);
  r.get("g_c", s.g_c);
}

json cubic_json(const CubicReactionParams& p) {
  return {{"a", p.a}, {"V_rest", p.V_rest}, {"V_thres", p.V_thres}, {"V_depol", p.V_depol}};
}

json bc_json(const BarretoCressmanParams& p) {
  return {{"G_AHP", p.G_AHP}, {"G_KL", p.G_KL},         {"G_Na", p.G_Na},
          {"G_ClL", p.G_ClL}, {"G_NaL", p.G_NaL},       {"G_Ca", p.G_Ca},
          {"G_K", p.G_K},     {"G_glia", p.G_glia},     {"K_bath", p.K_bath},
          {"rho", p.rho},     {"eps_diff", p.eps_diff}, {"gamma", p.gamma},
          {"beta", p.beta},   {"tau_slow", p.tau_slow}, {"gate_rate", p.gate_rate},
          {"E_Ca", p.E_Ca},   {"cl_ratio", p.cl_ratio}, {"rt_over_f", p.rt_over_f},
          {"legacy_signs", p.legacy_signs}, {"literal_gate_pairing", p.literal_gate_pairing}};
}

json bc_initial_json(const BCInitialState& s) {
  return {{"u_unstable", s.u_unstable}, {"u_stable", s.u_stable}, {"c", s.c},     {"k", s.k},
          {"s", s.s},                   {"g_s", s.g_s},           {"g_k", s.g_k}, {"g_c", s.g_c}};
}

json point_json(const Point2& p) { return json::array({p.x(), p.y()}); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error("invalid configuration:\n  " + join(issues, "\n  ")), issues_(std::move(issues)) {}

PhysicalParams units_preset(const std::string& units) {
  if (units == "mm") return PhysicalParams{140.0, 0.01};
  if (units == "cm") return PhysicalParams{1400.0, 1.0};
  throw ConfigError({"units must be 'mm' or 'cm', got '" + units + "'"});
}

void SimulationConfig::validate() const {
  std::vector<std::string> issues;
  auto check = [&issues](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  check(units == "mm" || units == "cm", "units must be 'mm' or 'cm'");
  check(mesh.source == "generate" || mesh.source == "file", "mesh.source must be 'generate' or 'file'");
  if (mesh.source == "generate") {
    check(mesh.n_elements >= 1, "mesh.n_elements must be at least 1");
    check(mesh.lloyd_iters >= 0, "mesh.lloyd_iters must be nonnegative");
    check(mesh.domain.width() > 0.0 && mesh.domain.height() > 0.0, "mesh.domain must have positive extent");
    int fallback = 0;
    for (const auto& r : regions) fallback += r.rect ? 0 : 1;
    check(regions.empty() || fallback == 1,
          "generated meshes need exactly one region without 'rect' (the default tag)");
  } else {
    check(!mesh.path.empty(), "mesh.path is required when mesh.source is 'file'");
  }
  std::set<std::string> names;
  for (const auto& r : regions) {
    check(names.insert(r.tag.name).second, "duplicate region '" + r.tag.name + "'");
    try {
      r.tag.validate();
    } catch (const std::exception& e) {
      issues.push_back("region '" + r.tag.name + "': " + e.what());
    }
    if (r.rect) check((*r.rect)[0] < (*r.rect)[1] && (*r.rect)[2] < (*r.rect)[3],
                      "region '" + r.tag.name + "': rect must be [x0, x1, y0, y1] with x0 < x1, y0 < y1");
  }
  check(space.degree >= 1, "space.degree must be at least 1");
  check(space.quad_order == 0 || space.quad_order >= 2 * space.degree,
        "space.quad_order must be 0 (default 2p+2) or at least 2p");
  check(model.type == "cubic" || model.type == "barreto_cressman",
        "model.type must be 'cubic' or 'barreto_cressman'");
  try {
    if (model.type == "cubic") model.cubic.validate();
    if (model.type == "barreto_cressman") model.bc.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("model.params: ") + e.what());
  }
  for (const auto& [name, kb] : model.k_bath_regions) check(kb > 0.0, "K_bath of region '" + name + "' must be positive");
  check(model.k_bath_regions.empty() || model.type == "barreto_cressman",
        "model.k_bath_regions needs the barreto_cressman model");
  check(phys.chi_m > 0.0, "physics.chi_m must be positive");
  check(phys.C_m > 0.0, "physics.C_m must be positive");
  check(penalty.eta0 > 0.0, "penalty.eta0 must be positive");
  try {
    time.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("time: ") + e.what());
  }
  check(initial.type == "exact_wave" || initial.type == "constant" || initial.type == "regions" ||
            initial.type == "gaussian",
        "initial.type must be one of exact_wave, constant, regions, gaussian");
  check(forcing == "none" || forcing == "manufactured", "forcing must be 'none' or 'manufactured'");
  check(forcing == "none" || model.type == "cubic", "manufactured forcing needs the cubic model");
  check(!outputs.errors || initial.type == "exact_wave", "outputs.errors needs initial.type 'exact_wave'");
  try {
    exact.validate();
  } catch (const std::exception& e) {
    issues.push_back(std::string("exact: ") + e.what());
  }
  check(energy_mu > 0.0, "energy.mu must be positive");
  for (double t : outputs.snapshot_times)
    check(t >= 0.0 && t <= time.T + 1e-12, "snapshot time " + std::to_string(t) + " is outside [0, T]");
  check(solver.linear == "direct" || solver.linear == "cg", "solver.linear must be 'direct' or 'cg'");
  check(solver.tolerance > 0.0, "solver.tolerance must be positive");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

SimulationConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  SimulationConfig cfg;
  std::vector<std::string> issues;
  {
    Reader top(&j, "", issues);
    top.get("name", cfg.name);
    top.get("units", cfg.units);
    top.get("seed", cfg.seed);
    top.get("forcing", cfg.forcing);
    top.get("restart", cfg.restart);
    if (cfg.units == "mm" || cfg.units == "cm") cfg.phys = units_preset(cfg.units);

    if (const json* m = top.child("mesh")) {
      Reader r(m, "mesh", issues);
      r.get("source", cfg.mesh.source);
      r.get("n_elements", cfg.mesh.n_elements);
      r.get("lloyd_iters", cfg.mesh.lloyd_iters);
      r.get("path", cfg.mesh.path);
      std::vector<double> d;
      if (r.has("domain")) {
        r.get("domain", d);
        if (d.size() == 4)
          cfg.mesh.domain = Box{Point2(d[0], d[2]), Point2(d[1], d[3])};
        else
          issues.push_back("'mesh.domain' must be [x0, x1, y0, y1]");
      }
      if (!cfg.mesh.path.empty() && std::filesystem::path(cfg.mesh.path).is_relative() && !base_dir.empty())
        cfg.mesh.path = (base_dir / cfg.mesh.path).lexically_normal().string();
    }
    if (const json* regs = top.child("regions")) {
      if (!regs->is_array()) {
        issues.push_back("'regions' must be an array");
      } else {
        for (std::size_t i = 0; i < regs->size(); ++i) {
          Reader r(&(*regs)[i], "regions[" + std::to_string(i) + "]", issues);
          RegionConfig rc;
          r.get("name", rc.tag.name);
          r.get("sigma_t", rc.tag.sigma_t);
          r.get("sigma_n", rc.tag.sigma_n);
          r.get_point("direction", rc.tag.direction);
          if (r.has("rect")) {
            std::vector<double> v;
            r.get("rect", v);
            if (v.size() == 4)
              rc.rect = std::array<double, 4>{v[0], v[1], v[2], v[3]};
            else
              issues.push_back("'" + r.qualified("rect") + "' must be [x0, x1, y0, y1]");
          }
          cfg.regions.push_back(rc);
        }
      }
    }
    if (const json* s = top.child("space")) {
      Reader r(s, "space", issues);
      r.get("degree", cfg.space.degree);
      r.get("quad_order", cfg.space.quad_order);
    }
    if (const json* m = top.child("model")) {
      Reader r(m, "model", issues);
      r.get("type", cfg.model.type);
      if (const json* p = r.child("params")) {
        Reader pr(p, "model.params", issues);
        if (cfg.model.type == "barreto_cressman")
          read_bc(pr, cfg.model.bc);
        else
          read_cubic(pr, cfg.model.cubic);
      }
      if (const json* s = r.child("initial_state")) {
        Reader sr(s, "model.initial_state", issues);
        read_bc_initial(sr, cfg.model.bc_initial);
      }
      r.get("k_bath_regions", cfg.model.k_bath_regions);
    }
    if (const json* p = top.child("physics")) {
      Reader r(p, "physics", issues);
      r.get("chi_m", cfg.phys.chi_m);
      r.get("C_m", cfg.phys.C_m);
    }
    if (const json* p = top.child("penalty")) {
      Reader r(p, "penalty", issues);
      r.get("eta0", cfg.penalty.eta0);
    }
    if (const json* t = top.child("time")) {
      Reader r(t, "time", issues);
      r.get("dt", cfg.time.dt);
      r.get("T", cfg.time.T);
    }
    if (const json* i = top.child("initial")) {
      Reader r(i, "initial", issues);
      r.get("type", cfg.initial.type);
      r.get("value", cfg.initial.value);
      r.get("regions", cfg.initial.regions);
      if (r.has("u_unstable")) {
        double v = 0.0;
        r.get("u_unstable", v);
        cfg.initial.u_unstable = v;
      }
      if (r.has("u_stable")) {
        double v = 0.0;
        r.get("u_stable", v);
        cfg.initial.u_stable = v;
      }
      r.get_point("center", cfg.initial.center);
      r.get("base", cfg.initial.base);
      r.get("amplitude", cfg.initial.amplitude);
      r.get("width", cfg.initial.width);
    }
    if (const json* e = top.child("exact")) {
      Reader r(e, "exact", issues);
      r.get("V_rest", cfg.exact.V_rest);
      r.get("V_depol", cfg.exact.V_depol);
      r.get("eps", cfg.exact.eps);
      r.get("c", cfg.exact.c);
      r.get("x0", cfg.exact.x0);
      r.get_point("direction", cfg.exact.direction);
    }
    if (const json* e = top.child("energy")) {
      Reader r(e, "energy", issues);
      r.get("mu", cfg.energy_mu);
    }
    if (const json* o = top.child("outputs")) {
      Reader r(o, "outputs", issues);
      r.get("snapshot_times", cfg.outputs.snapshot_times);
      if (r.has("probes")) {
        std::vector<std::vector<double>> pts;
        r.get("probes", pts);
        for (const auto& p : pts) {
          if (p.size() != 2) {
            issues.push_back("'outputs.probes' entries must be [x, y]");
            continue;
          }
          cfg.outputs.probes.emplace_back(p[0], p[1]);
        }
      }
      r.get("vtk", cfg.outputs.vtk);
      r.get("norms", cfg.outputs.norms);
      r.get("errors", cfg.outputs.errors);
      r.get("checkpoint", cfg.outputs.checkpoint);
      r.get("field_range", cfg.outputs.field_range);
    }
    if (const json* s = top.child("solver")) {
      Reader r(s, "solver", issues);
      r.get("linear", cfg.solver.linear);
      r.get("tolerance", cfg.solver.tolerance);
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return config_from_json(j, path.parent_path());
}

json config_to_json(const SimulationConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["units"] = cfg.units;
  j["seed"] = cfg.seed;
  j["forcing"] = cfg.forcing;
  if (!cfg.restart.empty()) j["restart"] = cfg.restart;
  json mesh = {{"source", cfg.mesh.source}};
  if (cfg.mesh.source == "generate") {
    mesh["domain"] = {cfg.mesh.domain.lo.x(), cfg.mesh.domain.hi.x(), cfg.mesh.domain.lo.y(), cfg.mesh.domain.hi.y()};
    mesh["n_elements"] = cfg.mesh.n_elements;
    mesh["lloyd_iters"] = cfg.mesh.lloyd_iters;
  } else {
    mesh["path"] = cfg.mesh.path;
  }
  j["mesh"] = mesh;
  json regs = json::array();
  for (const auto& r : cfg.regions) {
    json e = {{"name", r.tag.name},
              {"sigma_t", r.tag.sigma_t},
              {"sigma_n", r.tag.sigma_n},
              {"direction", point_json(r.tag.direction)}};
    if (r.rect) e["rect"] = *r.rect;
    regs.push_back(e);
  }
  j["regions"] = regs;
  j["space"] = {{"degree", cfg.space.degree}, {"quad_order", cfg.space.quad_order}};
  json model = {{"type", cfg.model.type}};
  if (cfg.model.type == "barreto_cressman") {
    model["params"] = bc_json(cfg.model.bc);
    model["initial_state"] = bc_initial_json(cfg.model.bc_initial);
    model["k_bath_regions"] = cfg.model.k_bath_regions;
  } else {
    model["params"] = cubic_json(cfg.model.cubic);
  }
  j["model"] = model;
  j["physics"] = {{"chi_m", cfg.phys.chi_m}, {"C_m", cfg.phys.C_m}};
  j["penalty"] = {{"eta0", cfg.penalty.eta0}};
  j["time"] = {{"dt", cfg.time.dt}, {"T", cfg.time.T}};
  json init = {{"type", cfg.initial.type}};
  if (cfg.initial.type == "constant") init["value"] = cfg.initial.value;
  if (cfg.initial.type == "regions" || cfg.initial.type == "gaussian") init["regions"] = cfg.initial.regions;
  if (cfg.initial.u_unstable) init["u_unstable"] = *cfg.initial.u_unstable;
  if (cfg.initial.u_stable) init["u_stable"] = *cfg.initial.u_stable;
  if (cfg.initial.type == "gaussian") {
    init["center"] = point_json(cfg.initial.center);
    init["base"] = cfg.initial.base;
    init["amplitude"] = cfg.initial.amplitude;
    init["width"] = cfg.initial.width;
  }
  j["initial"] = init;
  j["exact"] = {{"V_rest", cfg.exact.V_rest}, {"V_depol", cfg.exact.V_depol}, {"eps", cfg.exact.eps},
                {"c", cfg.exact.c},           {"x0", cfg.exact.x0},           {"direction", point_json(cfg.exact.direction)}};
  j["energy"] = {{"mu", cfg.energy_mu}};
  json probes = json::array();
  for (const auto& p : cfg.outputs.probes) probes.push_back(point_json(p));
  j["outputs"] = {{"snapshot_times", cfg.outputs.snapshot_times},
                  {"probes", probes},
                  {"vtk", cfg.outputs.vtk},
                  {"norms", cfg.outputs.norms},
                  {"errors", cfg.outputs.errors},
                  {"checkpoint", cfg.outputs.checkpoint},
                  {"field_range", cfg.outputs.field_range}};
  j["solver"] = {{"linear", cfg.solver.linear}, {"tolerance", cfg.solver.tolerance}};
  return j;
}

json annotated_config(const SimulationConfig& cfg) {
  const std::string table = "model parameter table";
  const std::string source = "single-cell model reference values";
  const std::string choice = "implementation default";
  json prov;
  for (const char* k : {"G_AHP", "G_KL", "G_Na", "G_ClL", "G_NaL", "G_Ca", "G_K", "G_glia", "K_bath"})
    prov[std::string("model.params.") + k] = table;
  for (const char* k : {"rho", "eps_diff", "gamma", "beta", "tau_slow", "gate_rate", "cl_ratio"})
    prov[std::string("model.params.") + k] = source;
  prov["model.params.E_Ca"] = "Nernst block";
  prov["model.params.rt_over_f"] = "Nernst block (natural log)";
  prov["model.params.legacy_signs"] = choice + ": literal m-vector signs reproduce quiescence/bursting";
  prov["model.params.literal_gate_pairing"] = choice + ": gate j relaxes with tau_j";
  prov["model.initial_state"] = "initial-condition table";
  for (const char* k : {"a", "V_rest", "V_thres", "V_depol"}) prov[std::string("cubic.") + k] = table;
  prov["physics"] = cfg.units == "mm" ? "mm preset: chi_m = 140 1/mm, C_m = 0.01 uF/mm^2"
                                      : "cm preset: chi_m = 1400 1/cm, C_m = 1 uF/cm^2";
  prov["penalty.eta0"] = "standard penalty choice";
  prov["space.quad_order"] = choice + ": 0 selects 2p+2";
  prov["energy.mu"] = choice + ": coercivity constant is not computable, mu = 1";
  prov["exact"] = "travelling-front reference parameters";
  prov["bootstrap"] = choice + ": I^{-1} := I^0 on the first step";
  prov["state_update"] = choice + ": pointwise at quadrature points, clamped, L2 re-projected";
  prov["forcing_time"] = choice + ": external forcing evaluated at t_{n+1/2}";
  return {{"config", config_to_json(cfg)}, {"provenance", prov}};
}

std::string config_hash(const SimulationConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace polydg
