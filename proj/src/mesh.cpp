#include "polydg/mesh.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace polydg {

Matrix2 RegionTag::conductivity() const {
  const Point2 d = direction.normalized();
  Matrix2 rot;
  rot << d.x(), -d.y(), d.y(), d.x();
  return rot * Eigen::Vector2d(sigma_t, sigma_n).asDiagonal() * rot.transpose();
}

void RegionTag::validate() const {
  if (!(sigma_t > 0.0) || !(sigma_n > 0.0))
    throw MeshError("region '" + name + "': conductivities must be positive");
  if (!(direction.norm() > 0.0))
    throw MeshError("region '" + name + "': anisotropy direction must be nonzero");
}

double signed_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Point2 polygon_centroid(const std::vector<Point2>& poly) {
  double a = 0.0;
  Point2 c = Point2::Zero();
  const std::size_t n = poly.size();
  // shift to the first vertex for better cancellation
  const Point2 o = poly.front();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = poly[i] - o;
    const Point2 q = poly[(i + 1) % n] - o;
    const double cross = p.x() * q.y() - q.x() * p.y();
    a += cross;
    c += cross * (p + q);
  }
  return o + c / (3.0 * a);
}

bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  if (inside) return true;
  // points on an edge count as inside
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 e = poly[i] - poly[j];
    const Point2 r = p - poly[j];
    const double len2 = e.squaredNorm();
    const double cross = e.x() * r.y() - e.y() * r.x();
    if (std::abs(cross) <= 1e-12 * len2) {
      const double t = e.dot(r) / len2;
      if (t >= -1e-12 && t <= 1.0 + 1e-12) return true;
    }
  }
  return false;
}

namespace {

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  auto orient = [](const Point2& p, const Point2& q, const Point2& r) {
    return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
  };
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool is_simple(const std::vector<Point2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace

PolyMesh PolyMesh::build(std::vector<Point2> vertices, std::vector<std::vector<int>> elements,
                         std::vector<RegionTag> regions, std::vector<int> region_of) {
  if (regions.empty()) regions.push_back(RegionTag{});
  if (region_of.empty()) region_of.assign(elements.size(), 0);
  if (region_of.size() != elements.size())
    throw MeshError("region assignment size does not match element count");
  for (const auto& r : regions) r.validate();

  PolyMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.regions_ = std::move(regions);
  mesh.region_of_ = std::move(region_of);
  mesh.elements_.reserve(elements.size());

  const int nv = static_cast<int>(mesh.vertices_.size());
  for (std::size_t k = 0; k < elements.size(); ++k) {
    auto& ids = elements[k];
    if (ids.size() < 3) throw MeshError("element " + std::to_string(k) + " has fewer than 3 vertices");
    if (mesh.region_of_[k] < 0 || mesh.region_of_[k] >= static_cast<int>(mesh.regions_.size()))
      throw MeshError("element " + std::to_string(k) + " has an invalid region index");
    std::vector<Point2> poly;
    poly.reserve(ids.size());
    for (int v : ids) {
      if (v < 0 || v >= nv)
        throw MeshError("element " + std::to_string(k) + " references missing vertex " + std::to_string(v));
      poly.push_back(mesh.vertices_[v]);
    }
    Element e;
    e.area = signed_area(poly);
    if (!(e.area > 0.0))
      throw MeshError("element " + std::to_string(k) + " is not counterclockwise or has zero area");
    if (!is_simple(poly)) throw MeshError("element " + std::to_string(k) + " is self-intersecting");
    e.centroid = polygon_centroid(poly);
    e.bbox.lo = poly.front();
    e.bbox.hi = poly.front();
    for (const auto& p : poly) {
      e.bbox.lo = e.bbox.lo.cwiseMin(p);
      e.bbox.hi = e.bbox.hi.cwiseMax(p);
      for (const auto& q : poly) e.diameter = std::max(e.diameter, (p - q).norm());
    }
    e.vertices = std::move(ids);
    mesh.elements_.push_back(std::move(e));
  }

  // Faces from element edges, keyed by the sorted endpoint pair.
  std::map<std::pair<int, int>, int> edge_to_face;
  mesh.element_faces_.assign(mesh.elements_.size(), {});
  for (std::size_t k = 0; k < mesh.elements_.size(); ++k) {
    const auto& ids = mesh.elements_[k].vertices;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const int a = ids[i];
      const int b = ids[(i + 1) % ids.size()];
      if (a == b) throw MeshError("element " + std::to_string(k) + " has a repeated vertex");
      const auto key = std::minmax(a, b);
      auto it = edge_to_face.find(key);
      if (it == edge_to_face.end()) {
        Face f;
        f.endpoints = {a, b};
        const Point2 t = mesh.vertices_[b] - mesh.vertices_[a];
        f.length = t.norm();
        if (!(f.length > 0.0)) throw MeshError("zero-length edge in element " + std::to_string(k));
        f.normal = Point2(t.y(), -t.x()) / f.length;
        f.plus = static_cast<int>(k);
        edge_to_face.emplace(key, static_cast<int>(mesh.faces_.size()));
        mesh.element_faces_[k].push_back(static_cast<int>(mesh.faces_.size()));
        mesh.faces_.push_back(f);
      } else {
        Face& f = mesh.faces_[it->second];
        if (f.minus >= 0) {
          std::ostringstream msg;
          msg << "non-manifold face " << it->second << " (" << key.first << ", " << key.second
              << ") is shared by more than two elements";
          throw MeshError(msg.str());
        }
        if (f.plus == static_cast<int>(k))
          throw MeshError("element " + std::to_string(k) + " traverses an edge twice");
        if (f.endpoints[0] != b || f.endpoints[1] != a)
          throw MeshError("face " + std::to_string(it->second) + " has inconsistent orientation");
        f.minus = static_cast<int>(k);
        mesh.element_faces_[k].push_back(it->second);
      }
    }
  }
  return mesh;
}

double PolyMesh::mesh_size() const {
  double h = 0.0;
  for (const auto& e : elements_) h = std::max(h, e.diameter);
  return h;
}

double PolyMesh::total_area() const {
  double a = 0.0;
  for (const auto& e : elements_) a += e.area;
  return a;
}

Box PolyMesh::bounding_box() const {
  Box b;
  if (vertices_.empty()) return b;
  b.lo = b.hi = vertices_.front();
  for (const auto& v : vertices_) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  return b;
}

std::optional<int> PolyMesh::locate(const Point2& p) const {
  std::vector<Point2> poly;
  for (std::size_t k = 0; k < elements_.size(); ++k) {
    const auto& e = elements_[k];
    if (!e.bbox.contains(p)) continue;
    poly.clear();
    for (int v : e.vertices) poly.push_back(vertices_[v]);
    if (point_in_polygon(p, poly)) return static_cast<int>(k);
  }
  return std::nullopt;
}

PolyMesh PolyMesh::with_regions(std::vector<RegionTag> regions, std::vector<int> region_of) const {
  if (region_of.size() != elements_.size())
    throw MeshError("region assignment size does not match element count");
  for (const auto& r : regions) r.validate();
  for (int r : region_of)
    if (r < 0 || r >= static_cast<int>(regions.size())) throw MeshError("invalid region index");
  PolyMesh copy = *this;
  copy.regions_ = std::move(regions);
  copy.region_of_ = std::move(region_of);
  return copy;
}

RegularityReport check_regularity(const PolyMesh& mesh, RegularityThresholds thresholds) {
  RegularityReport rep;
  rep.min_shape = std::numeric_limits<double>::infinity();
  rep.min_contact = std::numeric_limits<double>::infinity();
  std::vector<char> flag(mesh.n_elements(), 0);
  const auto& verts = mesh.vertices();

  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    const auto& e = mesh.element(k);
    const double shape = e.area / (e.diameter * e.diameter);
    rep.min_shape = std::min(rep.min_shape, shape);
    rep.max_shape = std::max(rep.max_shape, shape);
    if (shape < thresholds.shape) flag[k] = 1;

    const std::size_t n = e.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = verts[e.vertices[i]] - e.centroid;
      const Point2 b = verts[e.vertices[(i + 1) % n]] - e.centroid;
      if (!(a.x() * b.y() - a.y() * b.x() > 0.0)) {
        rep.fan_valid = false;
        flag[k] = 1;
      }
    }
  }
  for (const auto& f : mesh.faces()) {
    for (int k : {f.plus, f.minus}) {
      if (k < 0) continue;
      const double contact = f.length / mesh.element(k).diameter;
      rep.min_contact = std::min(rep.min_contact, contact);
      if (contact < thresholds.contact) flag[k] = 1;
    }
  }
  for (std::size_t k = 0; k < flag.size(); ++k)
    if (flag[k]) rep.flagged.push_back(static_cast<int>(k));
  return rep;
}

PolyMesh tag_regions(const PolyMesh& mesh, const std::vector<RegionRule>& rules,
                     const RegionTag& fallback) {
  std::vector<RegionTag> regions;
  auto index_of = [&regions](const RegionTag& t) {
    for (std::size_t i = 0; i < regions.size(); ++i)
      if (regions[i] == t) return static_cast<int>(i);
    regions.push_back(t);
    return static_cast<int>(regions.size() - 1);
  };
  std::vector<int> region_of(mesh.n_elements());
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    const Point2& c = mesh.element(k).centroid;
    const RegionTag* tag = &fallback;
    for (const auto& rule : rules) {
      if (rule.contains(c)) {
        tag = &rule.tag;
        break;
      }
    }
    region_of[k] = index_of(*tag);
  }
  return mesh.with_regions(std::move(regions), std::move(region_of));
}

std::function<bool(const Point2&)> in_rectangle(double x0, double x1, double y0, double y1) {
  return [=](const Point2& p) { return p.x() > x0 && p.x() < x1 && p.y() > y0 && p.y() < y1; };
}

}  // namespace polydg
