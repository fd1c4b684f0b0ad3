#pragma once

#include "polydg/analysis.hpp"
#include "polydg/config.hpp"

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace polydg {

/// A batch of runs over (mesh size, degree) sharing one template config.
///
///   {
///     "kind": "convergence" | "wave",
///     "base": "template.json" | { ...simulation config... },
///     "members": [[n_elements, degree], ...],
///     "grid": {"n_elements": [...], "degrees": [...]},
///     "threshold": -27.5
///   }
///
/// `members` and `grid` may be combined; grid members are ordered by degree,
/// then by n_elements, and follow the explicit members.
struct StudyConfig {
  std::string kind = "convergence";
  SimulationConfig base;
  std::vector<StudyMember> ladder;
  double threshold = -27.5;  // mV, activation level for arrival times (wave studies)

  void validate() const;
};

StudyConfig study_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
StudyConfig load_study(const std::filesystem::path& path);

}  // namespace polydg
