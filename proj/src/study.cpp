#include "polydg/study.hpp"

#include <fstream>
#include <set>

namespace polydg {

using nlohmann::json;

void StudyConfig::validate() const {
  std::vector<std::string> issues;
  if (kind != "convergence" && kind != "wave") issues.push_back("study kind must be 'convergence' or 'wave'");
  if (ladder.empty()) issues.push_back("study ladder is empty");
  for (const auto& m : ladder) {
    if (m.n_elements < 1) issues.push_back("study member n_elements must be at least 1");
    if (m.degree < 1) issues.push_back("study member degree must be at least 1");
  }
  if (kind == "convergence" && base.initial.type != "exact_wave")
    issues.push_back("convergence studies need initial.type 'exact_wave'");
  if (kind == "wave" && base.outputs.probes.size() < 2) issues.push_back("wave studies need at least two probes");
  if (!issues.empty()) throw ConfigError(issues);
}

StudyConfig study_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError({"study config must be an object"});
  std::vector<std::string> issues;
  static const std::set<std::string> known{"kind", "base", "members", "grid", "threshold"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) issues.push_back("unknown key '" + key + "'");

  StudyConfig s;
  try {
    if (j.contains("kind")) s.kind = j.at("kind").get<std::string>();
    if (j.contains("threshold")) s.threshold = j.at("threshold").get<double>();
    if (j.contains("members"))
      for (const auto& m : j.at("members")) {
        const auto v = m.get<std::vector<int>>();
        if (v.size() != 2) {
          issues.push_back("each study member is [n_elements, degree]");
          continue;
        }
        s.ladder.push_back({v[0], v[1]});
      }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      for (const auto& [key, _] : g.items())
        if (key != "n_elements" && key != "degrees") issues.push_back("unknown key 'grid." + key + "'");
      const auto ns = g.value("n_elements", std::vector<int>{});
      const auto ps = g.value("degrees", std::vector<int>{});
      for (int p : ps)
        for (int n : ns) s.ladder.push_back({n, p});
    }
  } catch (const json::exception& e) {
    issues.push_back(std::string("malformed study config: ") + e.what());
  }

  if (!j.contains("base")) {
    issues.push_back("study config needs 'base'");
  } else if (j.at("base").is_string()) {
    std::filesystem::path p = j.at("base").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    try {
      s.base = load_config(p);
    } catch (const ConfigError& e) {
      for (const auto& i : e.issues()) issues.push_back("base: " + i);
    }
  } else {
    try {
      s.base = config_from_json(j.at("base"), base_dir);
    } catch (const ConfigError& e) {
      for (const auto& i : e.issues()) issues.push_back("base: " + i);
    }
  }
  if (!issues.empty()) throw ConfigError(issues);
  s.validate();
  return s;
}

StudyConfig load_study(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open study config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return study_from_json(j, path.parent_path());
}

}  // namespace polydg
