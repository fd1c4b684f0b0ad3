#include "polydg/mesh_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace polydg {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw MeshError("mesh line " + std::to_string(line) + ": " + what);
}

double to_double(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    parse_fail(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) parse_fail(line, "expected a number, got '" + tok + "'");
  return v;
}

int to_index(const std::string& tok, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0)
    parse_fail(line, "expected a vertex index, got '" + tok + "'");
  return v;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

PolyMesh read_mesh(std::istream& in) {
  struct PendingElement {
    int line;
    std::string region;
    std::vector<int> ids;
  };
  std::vector<Point2> vertices;
  std::vector<PendingElement> pending;
  std::vector<RegionTag> regions;
  std::map<std::string, int> region_index;
  bool header = false;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!header) {
      if (tok.size() != 2 || tok[0] != "polymesh" || tok[1] != "1")
        parse_fail(line_no, "expected header 'polymesh 1'");
      header = true;
      continue;
    }
    if (tok[0] == "v") {
      if (tok.size() != 3) parse_fail(line_no, "vertex record needs 2 coordinates");
      vertices.emplace_back(to_double(tok[1], line_no), to_double(tok[2], line_no));
    } else if (tok[0] == "e") {
      if (tok.size() < 5) parse_fail(line_no, "element record needs a region and at least 3 vertices");
      PendingElement e{line_no, tok[1], {}};
      for (std::size_t i = 2; i < tok.size(); ++i) e.ids.push_back(to_index(tok[i], line_no));
      pending.push_back(std::move(e));
    } else if (tok[0] == "region") {
      if (tok.size() != 6) parse_fail(line_no, "region record is 'region name sigma_t sigma_n dir_x dir_y'");
      RegionTag r;
      r.name = tok[1];
      r.sigma_t = to_double(tok[2], line_no);
      r.sigma_n = to_double(tok[3], line_no);
      r.direction = Point2(to_double(tok[4], line_no), to_double(tok[5], line_no));
      try {
        r.validate();
      } catch (const MeshError& err) {
        parse_fail(line_no, err.what());
      }
      if (region_index.count(r.name)) parse_fail(line_no, "duplicate region '" + r.name + "'");
      region_index[r.name] = static_cast<int>(regions.size());
      regions.push_back(r);
    } else {
      parse_fail(line_no, "unknown record '" + tok[0] + "'");
    }
  }
  if (!header) throw MeshError("empty mesh file");
  if (pending.empty()) throw MeshError("mesh has no elements");

  std::vector<std::vector<int>> elements;
  std::vector<int> region_of;
  for (auto& e : pending) {
    auto it = region_index.find(e.region);
    if (it == region_index.end()) parse_fail(e.line, "undeclared region '" + e.region + "'");
    for (int v : e.ids)
      if (v >= static_cast<int>(vertices.size()))
        parse_fail(e.line, "element references missing vertex " + std::to_string(v));
    elements.push_back(std::move(e.ids));
    region_of.push_back(it->second);
  }
  return PolyMesh::build(std::move(vertices), std::move(elements), std::move(regions),
                         std::move(region_of));
}

PolyMesh import_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(std::ostream& out, const PolyMesh& mesh) {
  out << "polymesh 1\n";
  for (const auto& r : mesh.regions())
    out << "region " << r.name << ' ' << fmt(r.sigma_t) << ' ' << fmt(r.sigma_n) << ' '
        << fmt(r.direction.x()) << ' ' << fmt(r.direction.y()) << '\n';
  for (const auto& v : mesh.vertices()) out << "v " << fmt(v.x()) << ' ' << fmt(v.y()) << '\n';
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    out << "e " << mesh.region_of(k).name;
    for (int v : mesh.element(k).vertices) out << ' ' << v;
    out << '\n';
  }
}

void export_mesh(const std::filesystem::path& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError("cannot write mesh file " + path.string());
  write_mesh(out, mesh);
}

}  // namespace polydg
