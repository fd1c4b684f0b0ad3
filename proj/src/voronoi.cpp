#include "polydg/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace polydg {

namespace {

constexpr int kMaxReseeds = 8;

// Keeps the part of a convex polygon on the side of `p` where (x - mid).dir <= 0.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, const Point2& mid,
                                    const Point2& dir) {
  std::vector<Point2> out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = poly[i];
    const Point2& b = poly[(i + 1) % n];
    const double da = (a - mid).dot(dir);
    const double db = (b - mid).dot(dir);
    if (da <= 0.0) out.push_back(a);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

struct BucketGrid {
  Box box;
  int nx = 1, ny = 1;
  double cell = 1.0;
  std::vector<std::vector<int>> buckets;

  BucketGrid(const Box& b, const std::vector<Point2>& pts) : box(b) {
    const double n = std::max<double>(1.0, static_cast<double>(pts.size()));
    cell = std::sqrt(b.area() / n);
    nx = std::max(1, static_cast<int>(std::ceil(b.width() / cell)));
    ny = std::max(1, static_cast<int>(std::ceil(b.height() / cell)));
    buckets.assign(static_cast<std::size_t>(nx) * ny, {});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto [ix, iy] = index(pts[i]);
      buckets[static_cast<std::size_t>(iy) * nx + ix].push_back(static_cast<int>(i));
    }
  }

  std::pair<int, int> index(const Point2& p) const {
    int ix = static_cast<int>((p.x() - box.lo.x()) / cell);
    int iy = static_cast<int>((p.y() - box.lo.y()) / cell);
    return {std::clamp(ix, 0, nx - 1), std::clamp(iy, 0, ny - 1)};
  }
};

std::vector<Point2> clipped_cell(const Box& box, const std::vector<Point2>& seeds,
                                 const BucketGrid& grid, int i) {
  std::vector<Point2> poly = {box.lo, Point2(box.hi.x(), box.lo.y()), box.hi,
                              Point2(box.lo.x(), box.hi.y())};
  const Point2& p = seeds[i];
  const auto [cx, cy] = grid.index(p);
  const int max_ring = std::max(grid.nx, grid.ny);
  for (int ring = 0; ring <= max_ring; ++ring) {
    for (int iy = cy - ring; iy <= cy + ring; ++iy) {
      if (iy < 0 || iy >= grid.ny) continue;
      for (int ix = cx - ring; ix <= cx + ring; ++ix) {
        if (ix < 0 || ix >= grid.nx) continue;
        if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
        for (int j : grid.buckets[static_cast<std::size_t>(iy) * grid.nx + ix]) {
          if (j == i) continue;
          poly = clip_half_plane(poly, 0.5 * (p + seeds[j]), seeds[j] - p);
        }
      }
    }
    // Generators beyond this ring are at least ring*cell away and cannot
    // cut the cell once it fits inside a disc of radius ring*cell/2.
    double r = 0.0;
    for (const auto& v : poly) r = std::max(r, (v - p).norm());
    if (ring * grid.cell >= 2.0 * r) break;
  }
  return poly;
}

bool has_coincident(const std::vector<Point2>& seeds, double tol) {
  std::vector<std::size_t> order(seeds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return seeds[a].x() < seeds[b].x() || (seeds[a].x() == seeds[b].x() && seeds[a].y() < seeds[b].y());
  });
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (seeds[order[b]].x() - seeds[order[a]].x() > tol) break;
      if ((seeds[order[b]] - seeds[order[a]]).norm() <= tol) return true;
    }
  }
  return false;
}

double triangle_second_moment(const Point2& a, const Point2& b, const Point2& c) {
  const double area = 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
  return area / 6.0 * (a.dot(a) + b.dot(b) + c.dot(c) + a.dot(b) + b.dot(c) + c.dot(a));
}

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<std::vector<Point2>> voronoi_cells(const Box& box, const std::vector<Point2>& seeds) {
  BucketGrid grid(box, seeds);
  std::vector<std::vector<Point2>> cells(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i)
    cells[i] = clipped_cell(box, seeds, grid, static_cast<int>(i));
  return cells;
}

double cvt_energy(const Box& box, const std::vector<Point2>& seeds) {
  const auto cells = voronoi_cells(box, seeds);
  double e = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    for (std::size_t k = 1; k + 1 < c.size(); ++k)
      e += triangle_second_moment(c[0] - seeds[i], c[k] - seeds[i], c[k + 1] - seeds[i]);
  }
  return e;
}

double centroid_offset_energy(const Box& box, const std::vector<Point2>& seeds) {
  const auto cells = voronoi_cells(box, seeds);
  double e = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    e += (polygon_centroid(cells[i]) - seeds[i]).squaredNorm();
  return e;
}

std::vector<Point2> lloyd_step(const Box& box, const std::vector<Point2>& seeds) {
  const auto cells = voronoi_cells(box, seeds);
  std::vector<Point2> next(seeds.size());
  for (std::size_t i = 0; i < cells.size(); ++i) next[i] = polygon_centroid(cells[i]);
  return next;
}

std::vector<Point2> random_seeds(const Box& box, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point2> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) {
    const double u = unit_double(rng);
    const double v = unit_double(rng);
    p = Point2(box.lo.x() + u * box.width(), box.lo.y() + v * box.height());
  }
  return pts;
}

PolyMesh mesh_from_seeds(const Box& box, std::vector<Point2> seeds, int lloyd_iters) {
  if (seeds.empty()) throw MeshError("at least one generator is required");
  const double scale = std::max(box.width(), box.height());
  if (has_coincident(seeds, 1e-12 * scale)) throw MeshError("coincident Voronoi generators");
  for (int it = 0; it < lloyd_iters; ++it) seeds = lloyd_step(box, seeds);
  const auto cells = voronoi_cells(box, seeds);

  // Weld cell vertices on a hash grid.
  const double tol = 1e-9 * scale;
  std::vector<Point2> vertices;
  std::unordered_map<long long, std::vector<int>> hash;
  auto key = [&](long long ix, long long iy) { return ix * 1000003LL + iy; };
  auto weld = [&](const Point2& p) {
    const long long ix = static_cast<long long>(std::floor((p.x() - box.lo.x()) / (4 * tol)));
    const long long iy = static_cast<long long>(std::floor((p.y() - box.lo.y()) / (4 * tol)));
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = hash.find(key(ix + dx, iy + dy));
        if (it == hash.end()) continue;
        for (int v : it->second)
          if ((vertices[v] - p).norm() <= tol) return v;
      }
    vertices.push_back(p);
    hash[key(ix, iy)].push_back(static_cast<int>(vertices.size() - 1));
    return static_cast<int>(vertices.size() - 1);
  };

  std::vector<std::vector<int>> elements(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::vector<int> ids;
    for (const auto& p : cells[i]) {
      const int v = weld(p);
      if (ids.empty() || ids.back() != v) ids.push_back(v);
    }
    while (ids.size() > 1 && ids.front() == ids.back()) ids.pop_back();
    if (ids.size() < 3) throw MeshError("degenerate Voronoi cell " + std::to_string(i));
    elements[i] = std::move(ids);
  }
  PolyMesh mesh = PolyMesh::build(std::move(vertices), std::move(elements));

  // A conforming tessellation of the box has exactly the box perimeter as boundary.
  double boundary = 0.0;
  for (const auto& f : mesh.faces())
    if (f.is_boundary()) boundary += f.length;
  const double perimeter = 2.0 * (box.width() + box.height());
  if (std::abs(boundary - perimeter) > 1e-8 * perimeter)
    throw MeshError("Voronoi cells do not form a conforming tessellation");
  return mesh;
}

PolyMesh generate_voronoi_mesh(const Box& box, int n_elements, int lloyd_iters, std::uint64_t seed) {
  if (n_elements < 1) throw MeshError("n_elements must be at least 1");
  if (lloyd_iters < 0) throw MeshError("lloyd_iters must be non-negative");
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) throw MeshError("empty domain");
  std::uint64_t s = seed;
  for (int attempt = 0; attempt <= kMaxReseeds; ++attempt) {
    try {
      return mesh_from_seeds(box, random_seeds(box, n_elements, s), lloyd_iters);
    } catch (const MeshError&) {
      if (attempt == kMaxReseeds) throw;
      s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    }
  }
  throw MeshError("unreachable");
}

}  // namespace polydg
