// polydg: run | study | cell0d | mesh-gen | mesh-check
//
// Exit codes: 0 ok, 2 invalid input, 3 runtime failure (blow-up, solver), 4 I/O.

#include "polydg/analysis.hpp"
#include "polydg/cell.hpp"
#include "polydg/config.hpp"
#include "polydg/errors.hpp"
#include "polydg/mesh_io.hpp"
#include "polydg/output.hpp"
#include "polydg/run.hpp"
#include "polydg/study.hpp"
#include "polydg/voronoi.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace polydg;

namespace {

enum Exit { kOk = 0, kInvalid = 2, kRuntime = 3, kIo = 4 };

fs::path output_root() {
  const char* env = std::getenv("POLYDG_OUTPUT_ROOT");
  return env && *env ? fs::path(env) : fs::path("runs");
}

std::ofstream open_file(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::ios_base::failure("cannot write " + p.string());
  return out;
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
  bool dump_config = false;
  int threads = 0;
};

void add_common(CLI::App* app, Common& c, bool config_required = true) {
  auto* opt = app->add_option("-c,--config", c.config, "JSON configuration file");
  if (config_required) opt->required();
  app->add_option("-o,--out", c.out, "output directory (default: $POLYDG_OUTPUT_ROOT/<name>)");
  app->add_option("--seed", c.seed, "override the mesh seed");
  app->add_flag("--dry-run", c.dry_run, "validate and print the resolved config");
  app->add_flag("--dump-config", c.dump_config, "print the resolved config with provenance notes");
  app->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
}

fs::path out_dir(const Common& c, const std::string& name) { return c.out.empty() ? output_root() / name : fs::path(c.out); }

int cmd_run(const Common& c) {
  SimulationConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  if (c.dump_config) {
    std::cout << annotated_config(cfg).dump(2) << '\n';
    return kOk;
  }
  if (c.dry_run) {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return kOk;
  }
  const fs::path dir = out_dir(c, cfg.name);
  fs::create_directories(dir);
  std::cout << "running " << cfg.name << " -> " << dir.string() << std::endl;
  const RunArtifacts art = run_simulation(cfg);
  write_artifacts(dir, cfg, art);
  std::cout << "done: " << art.final_state.step << " steps, " << art.space->n_dofs() << " dofs, t = "
            << art.final_state.time(art.dt) << '\n';
  if (!art.error_norms.empty()) std::cout << "relative energy error " << art.relative_energy_error() << '\n';
  return kOk;
}

void print_convergence(const ConvergenceTable& table) {
  std::cout << "h\tp\tdofs\terror\trate\n";
  for (const auto& r : table.rows)
    std::cout << r.h << '\t' << r.p << '\t' << r.dofs << '\t' << r.error << '\t' << r.rate << '\n';
  std::map<int, ConvergenceTable> by_p;
  std::map<int, ConvergenceTable> by_n;
  for (const auto& r : table.rows) {
    by_p[r.p].rows.push_back(r);
    by_n[r.n_elements].rows.push_back(r);
  }
  for (const auto& [p, t] : by_p)
    if (t.rows.size() > 1) std::cout << "p = " << p << ": fitted h-rate " << t.fit_h().slope << '\n';
  for (const auto& [n, t] : by_n)
    if (t.rows.size() > 1) {
      const LinearFit f = t.fit_p();
      std::cout << n << " elements: log-error vs p slope " << f.slope << ", R^2 " << f.r2 << '\n';
    }
}

int cmd_study(const Common& c) {
  StudyConfig study = load_study(c.config);
  if (c.seed) study.base.seed = *c.seed;
  study.validate();
  if (c.dump_config || c.dry_run) {
    nlohmann::json j = c.dump_config ? annotated_config(study.base) : config_to_json(study.base);
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : study.ladder) members.push_back({m.n_elements, m.degree});
    std::cout << nlohmann::json{{"kind", study.kind}, {"threshold", study.threshold}, {"members", members},
                                {"base", j}}
                     .dump(2)
              << '\n';
    return kOk;
  }
  const fs::path dir = out_dir(c, study.base.name);
  fs::create_directories(dir);
  std::map<int, std::shared_ptr<const PolyMesh>> meshes;
  auto runner = [&](const SimulationConfig& cfg) {
    auto& mesh = meshes[cfg.mesh.n_elements];
    if (!mesh) mesh = build_mesh(cfg);
    std::cout << "  n_elements " << cfg.mesh.n_elements << ", p " << cfg.space.degree << std::endl;
    RunArtifacts art = run_simulation(cfg, mesh);
    write_artifacts(dir / "runs" / ("n" + std::to_string(cfg.mesh.n_elements) + "_p" + std::to_string(cfg.space.degree)),
                    cfg, art);
    return art;
  };
  std::cout << study.kind << " study " << study.base.name << " (" << study.ladder.size() << " runs) -> "
            << dir.string() << std::endl;
  if (study.kind == "convergence") {
    try {
      const ConvergenceTable table = convergence_study(study.base, study.ladder, runner);
      auto out = open_file(dir / "convergence.csv");
      write_convergence_csv(out, table);
      print_convergence(table);
    } catch (const StudyError& e) {
      auto out = open_file(dir / "convergence.partial.csv");
      write_convergence_csv(out, e.partial());
      throw;
    }
  } else {
    const auto rows = wave_study(study.base, study.ladder, study.threshold, runner);
    auto out = open_file(dir / "wave.csv");
    write_wave_csv(out, rows);
    std::cout << "h\tp\tcv\tover%\tunder%\n";
    for (const auto& r : rows)
      std::cout << r.h << '\t' << r.p << '\t' << (r.cv_error.empty() ? std::to_string(r.cv) : r.cv_error) << '\t'
                << r.final_shoot.overshoot << '\t' << r.final_shoot.undershoot << '\n';
  }
  return kOk;
}

struct CellOptions {
  std::optional<double> k_bath;
  double T = 500.0;
  double dt = 0.01;
  double u0 = -50.0;
  int sample_every = 10;
};

int cmd_cell0d(const Common& c, const CellOptions& o) {
  BarretoCressmanParams params;
  BCInitialState init;
  double C_m = units_preset("cm").C_m;
  if (!c.config.empty()) {
    const SimulationConfig cfg = load_config(c.config);
    if (cfg.model.type != "barreto_cressman") throw ConfigError({"cell0d needs model.type 'barreto_cressman'"});
    params = cfg.model.bc;
    init = cfg.model.bc_initial;
    C_m = cfg.phys.C_m;
  }
  if (o.k_bath) params.K_bath = *o.k_bath;
  params.validate();
  CellRun run{o.u0, C_m, o.dt, o.T, o.sample_every};
  run.validate();
  if (c.dry_run) {
    std::cout << "K_bath " << params.K_bath << ", T " << run.T << ", dt " << run.dt << ", C_m " << run.C_m << '\n';
    return kOk;
  }
  const BarretoCressmanModel model(params, init);
  const CellTrace trace = simulate_cell(model, run);
  const BurstSummary s = classify_bursting(trace);

  const fs::path dir = out_dir(c, "cell0d");
  auto out = open_file(dir / "cell0d.csv");
  out.precision(10);
  for (std::size_t j = 0; j < trace.columns.size(); ++j) out << (j ? "," : "t,") << trace.columns[j];
  out << '\n';
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    out << trace.t[i];
    for (double v : trace.values[i]) out << ',' << v;
    out << '\n';
  }
  std::cout << "K_bath " << params.K_bath << ": " << to_string(s.kind) << " (" << s.crossings.size()
            << " crossings, " << s.tail_crossings << " in the final 100 ms)\n";
  return kOk;
}

int cmd_mesh_gen(const Common& c) {
  SimulationConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  if (c.dry_run) {
    std::cout << config_to_json(cfg)["mesh"].dump(2) << '\n';
    return kOk;
  }
  const auto mesh = build_mesh(cfg);
  const fs::path path = c.out.empty() ? output_root() / (cfg.name + ".polymesh") : fs::path(c.out);
  auto out = open_file(path);
  write_mesh(out, *mesh);
  std::cout << mesh->n_elements() << " elements, h = " << mesh->mesh_size() << " -> " << path.string() << '\n';
  return kOk;
}

int cmd_mesh_check(const std::string& path, double shape) {
  const PolyMesh mesh = import_mesh(path);
  RegularityThresholds th;
  th.shape = shape;
  const RegularityReport rep = check_regularity(mesh, th);
  std::cout << "elements " << mesh.n_elements() << "\nfaces " << mesh.faces().size() << "\nvertices "
            << mesh.vertices().size() << "\nh " << mesh.mesh_size() << "\narea " << mesh.total_area() << '\n';
  std::vector<int> counts(mesh.regions().size(), 0);
  for (int r : mesh.region_index()) ++counts[r];
  for (std::size_t r = 0; r < counts.size(); ++r)
    std::cout << "region " << mesh.regions()[r].name << ' ' << counts[r] << '\n';
  std::cout << "shape [" << rep.min_shape << ", " << rep.max_shape << "]\nmin contact " << rep.min_contact
            << "\nfan " << (rep.fan_valid ? "valid" : "INVALID") << '\n';
  if (!rep.ok()) {
    std::cout << rep.flagged.size() << " elements violate the regularity thresholds\n";
    return kInvalid;
  }
  std::cout << "ok\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polygonal DG monodomain solver"};
  app.require_subcommand(1);

  Common run_opts, study_opts, cell_opts, gen_opts;
  CellOptions cell;
  std::string check_path;
  double check_shape = RegularityThresholds{}.shape;

  auto* run = app.add_subcommand("run", "run one simulation");
  add_common(run, run_opts);
  auto* study = app.add_subcommand("study", "run a convergence or wave-speed study");
  add_common(study, study_opts);
  auto* c0 = app.add_subcommand("cell0d", "single-cell Barreto-Cressman dynamics");
  add_common(c0, cell_opts, false);
  c0->add_option("--k-bath", cell.k_bath, "bath potassium [mM]");
  c0->add_option("--T", cell.T, "final time [ms]");
  c0->add_option("--dt", cell.dt, "time step [ms]");
  c0->add_option("--u0", cell.u0, "initial potential [mV]");
  c0->add_option("--sample-every", cell.sample_every, "steps between written samples");
  auto* gen = app.add_subcommand("mesh-gen", "write the mesh described by a config");
  add_common(gen, gen_opts);
  auto* check = app.add_subcommand("mesh-check", "report size and regularity of a mesh file");
  check->add_option("mesh", check_path, "mesh file")->required();
  check->add_option("--shape", check_shape, "minimum |K|/h_K^2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*run) {
      set_threads(run_opts.threads);
      return cmd_run(run_opts);
    }
    if (*study) {
      set_threads(study_opts.threads);
      return cmd_study(study_opts);
    }
    if (*c0) return cmd_cell0d(cell_opts, cell);
    if (*gen) return cmd_mesh_gen(gen_opts);
    if (*check) return cmd_mesh_check(check_path, check_shape);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration:\n";
    for (const auto& i : e.issues()) std::cerr << "  - " << i << '\n';
    return kInvalid;
  } catch (const MeshError& e) {
    std::cerr << "invalid mesh: " << e.what() << '\n';
    return kInvalid;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up at step " << e.step() << ": " << e.what() << '\n';
    return kRuntime;
  } catch (const SolverError& e) {
    std::cerr << "solver failure";
    if (e.step() >= 0) std::cerr << " at step " << e.step();
    std::cerr << ": " << e.what() << '\n';
    return kRuntime;
  } catch (const StudyError& e) {
    std::cerr << e.what() << " (" << e.partial().rows.size() << " rows kept)\n";
    return kRuntime;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
