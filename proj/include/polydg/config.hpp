#pragma once

#include "polydg/assembly.hpp"
#include "polydg/exact_wave.hpp"
#include "polydg/ionic.hpp"
#include "polydg/mesh.hpp"
#include "polydg/solver.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

/// Validation failure listing every problem found.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

private:
  std::vector<std::string> issues_;
};

struct RegionConfig {
  RegionTag tag;
  std::optional<std::array<double, 4>> rect;  // x0 x1 y0 y1; absent = fallback region
};

struct MeshConfig {
  std::string source = "generate";  // generate | file
  Box domain{Point2(-3.0, -3.0), Point2(3.0, 3.0)};
  int n_elements = 300;
  int lloyd_iters = 100;
  std::string path;
};

struct SpaceConfig {
  int degree = 1;
  int quad_order = 0;  // 0 = 2p+2
};

struct ModelConfig {
  std::string type = "cubic";  // cubic | barreto_cressman
  CubicReactionParams cubic;
  BarretoCressmanParams bc;
  BCInitialState bc_initial;
  std::map<std::string, double> k_bath_regions;  // per-region K_bath override
};

struct InitialConfig {
  std::string type = "exact_wave";  // exact_wave | constant | regions | gaussian
  double value = -85.0;
  std::vector<std::string> regions;  // unstable regions
  std::optional<double> u_unstable;
  std::optional<double> u_stable;
  Point2 center = Point2::Zero();
  double base = -67.0;
  double amplitude = 17.0;
  double width = 2.0;  // exponent factor
};

struct OutputConfig {
  std::vector<double> snapshot_times;
  std::vector<Point2> probes;
  bool vtk = true;
  bool norms = true;
  bool errors = false;
  bool checkpoint = false;
  bool field_range = true;
};

struct SolverConfig {
  std::string linear = "direct";  // direct | cg
  double tolerance = 1e-10;
};

struct SimulationConfig {
  std::string name = "run";
  std::string units = "mm";  // mm | cm
  std::uint64_t seed = 42;
  MeshConfig mesh;
  std::vector<RegionConfig> regions;
  SpaceConfig space;
  ModelConfig model;
  PhysicalParams phys;
  PenaltyParams penalty;
  TimeGrid time;
  InitialConfig initial;
  std::string forcing = "none";  // none | manufactured
  ExactWave<double> exact;
  double energy_mu = 1.0;
  OutputConfig outputs;
  SolverConfig solver;
  std::string restart;  // checkpoint to resume from

  /// Semantic checks on a parsed config; throws ConfigError listing every issue.
  void validate() const;
};

/// chi_m and C_m of a unit preset.
PhysicalParams units_preset(const std::string& units);

/// Parses and validates. Unknown keys are errors. Relative mesh paths
/// resolve against `base_dir`.
SimulationConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
SimulationConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const SimulationConfig& cfg);

/// Resolved config plus a provenance note for each model default.
nlohmann::json annotated_config(const SimulationConfig& cfg);

/// FNV-1a of the canonical JSON dump, hex.
std::string config_hash(const SimulationConfig& cfg);

}  // namespace polydg
