#pragma once

#include "polydg/config.hpp"
#include "polydg/dgspace.hpp"
#include "polydg/norms.hpp"
#include "polydg/solver.hpp"

#include <json.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace polydg {

struct Snapshot {
  double t = 0.0;
  long step = 0;
  FieldCoeffs U;
  std::vector<FieldCoeffs> Y;
};

/// Time series of (u, y...) at a fixed point.
struct ProbeTrace {
  Point2 position = Point2::Zero();
  int element = -1;
  std::vector<std::string> columns;  // "u", then the ionic state names
  std::vector<double> t;
  std::vector<std::vector<double>> values;

  std::vector<double> column(std::size_t j) const;
};

/// Everything a run produces.
struct RunArtifacts {
  std::shared_ptr<const PolyMesh> mesh;
  std::shared_ptr<const DGSpace> space;
  std::vector<Snapshot> snapshots;  // the initial state first
  std::vector<ProbeTrace> probes;
  NormHistory norms;        // of u_h
  NormHistory error_norms;  // of u_h - u_ex (when requested)
  NormHistory exact_norms;  // of u_ex (when requested)
  EnergyWeights energy;
  std::vector<double> range_t, range_min, range_max;  // field extrema per step
  std::vector<double> max_abs_trace;
  SimState final_state;
  double dt = 0.0;
  nlohmann::json metadata;

  /// sqrt(||u_h - u_ex||_e^2 / ||u_ex||_e^2) at the final time.
  double relative_energy_error() const;
};

/// Objects assembled from a config before time stepping.
struct RunSetup {
  std::shared_ptr<const PolyMesh> mesh;
  std::shared_ptr<const DGSpace> space;
  std::unique_ptr<SystemMatrices> matrices;
  RegionModels models;
  ElementSpaceTimeField forcing;
  Eigen::VectorXd eta;
  SimState initial;
};

/// Mesh described by the config, with region tags applied.
std::shared_ptr<const PolyMesh> build_mesh(const SimulationConfig& cfg);

/// Applies config region overrides to an existing mesh; errors name the valid regions.
std::shared_ptr<const PolyMesh> apply_regions(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh);

RunSetup prepare_run(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh = nullptr);

/// Called after every step with the current state.
using StepObserver = std::function<void(const SimState&, double t)>;

/// Runs a full simulation. Blow-up propagates as BlowUpError carrying the max|u| trace.
RunArtifacts run_simulation(const SimulationConfig& cfg, std::shared_ptr<const PolyMesh> mesh = nullptr,
                            const StepObserver& observer = {});

}  // namespace polydg
