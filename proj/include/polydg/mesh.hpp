#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

using Point2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

/// Raised for malformed or inconsistent meshes.
class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Point2 lo{0.0, 0.0};
  Point2 hi{1.0, 1.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
  bool contains(const Point2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
};

/// Tissue description attached to elements. The conductivity tensor is
/// R diag(sigma_t, sigma_n) R^T where R rotates e1 onto `direction`.
struct RegionTag {
  std::string name = "default";
  double sigma_t = 1.0;
  double sigma_n = 1.0;
  Point2 direction{1.0, 0.0};

  Matrix2 conductivity() const;
  /// Largest eigenvalue of the conductivity, i.e. ||sqrt(Sigma)||_2^2.
  double spectral_norm() const { return std::max(sigma_t, sigma_n); }
  void validate() const;

  bool operator==(const RegionTag&) const = default;
};

struct Element {
  std::vector<int> vertices;  // counterclockwise
  Point2 centroid = Point2::Zero();
  double area = 0.0;
  double diameter = 0.0;
  Box bbox;
};

/// Straight edge between two mesh vertices. `minus` is -1 on the boundary.
struct Face {
  std::array<int, 2> endpoints{-1, -1};
  double length = 0.0;
  Point2 normal = Point2::Zero();  // unit, pointing out of `plus`
  int plus = -1;
  int minus = -1;

  bool is_boundary() const { return minus < 0; }
};

/// Polygonal mesh with region tags and face connectivity. Immutable once
/// built through `PolyMesh::build`.
class PolyMesh {
public:
  PolyMesh() = default;

  /// Builds geometry caches and faces from raw vertex/element data.
  /// `region_of[k]` indexes into `regions`.
  static PolyMesh build(std::vector<Point2> vertices,
                        std::vector<std::vector<int>> elements,
                        std::vector<RegionTag> regions = {RegionTag{}},
                        std::vector<int> region_of = {});

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<RegionTag>& regions() const { return regions_; }
  const std::vector<int>& region_index() const { return region_of_; }

  std::size_t n_elements() const { return elements_.size(); }
  const Element& element(std::size_t k) const { return elements_.at(k); }
  const RegionTag& region_of(std::size_t k) const { return regions_[region_of_.at(k)]; }
  /// Face indices incident to element k.
  const std::vector<int>& element_faces(std::size_t k) const { return element_faces_.at(k); }

  /// max_K h_K
  double mesh_size() const;
  double total_area() const;
  Box bounding_box() const;

  /// Index of an element containing p, if any.
  std::optional<int> locate(const Point2& p) const;

  /// Copy with new region assignment.
  PolyMesh with_regions(std::vector<RegionTag> regions, std::vector<int> region_of) const;

private:
  std::vector<Point2> vertices_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> element_faces_;
  std::vector<RegionTag> regions_;
  std::vector<int> region_of_;
};

/// Signed area of a polygon given by its vertices in order.
double signed_area(const std::vector<Point2>& poly);
Point2 polygon_centroid(const std::vector<Point2>& poly);
bool point_in_polygon(const Point2& p, const std::vector<Point2>& poly);

/// Shape and contact regularity summary of a mesh.
struct RegularityReport {
  double min_shape = 0.0;    // min_K |K| / h_K^2
  double max_shape = 0.0;
  double min_contact = 0.0;  // min over (F, K) of |F| / h_K
  bool fan_valid = true;     // every centroid fan triangle has positive area
  std::vector<int> flagged;  // elements violating a threshold or the fan condition

  bool ok() const { return flagged.empty(); }
};

struct RegularityThresholds {
  double shape = 0.05;
  double contact = 0.0;  // disabled by default; Voronoi cells can carry short edges
};

RegularityReport check_regularity(const PolyMesh& mesh, RegularityThresholds thresholds = {});

/// First matching predicate wins; `fallback` tags everything else.
struct RegionRule {
  std::function<bool(const Point2&)> contains;
  RegionTag tag;
};

PolyMesh tag_regions(const PolyMesh& mesh, const std::vector<RegionRule>& rules,
                     const RegionTag& fallback);

/// Predicate for an open rectangle (x0,x1)x(y0,y1).
std::function<bool(const Point2&)> in_rectangle(double x0, double x1, double y0, double y1);

}  // namespace polydg
