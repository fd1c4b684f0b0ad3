#pragma once

#include "polydg/mesh.hpp"
#include "polydg/voronoi.hpp"

#include <memory>

namespace polydg::testing {

inline std::shared_ptr<const PolyMesh> unit_square(RegionTag tag = {}) {
  return std::make_shared<const PolyMesh>(PolyMesh::build(
      {Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)}, {{0, 1, 2, 3}}, {tag}, {0}));
}

/// [0,2]x[0,1] split at x = 1.
inline std::shared_ptr<const PolyMesh> two_squares(RegionTag tag = {}) {
  return std::make_shared<const PolyMesh>(
      PolyMesh::build({Point2(0, 0), Point2(1, 0), Point2(2, 0), Point2(0, 1), Point2(1, 1), Point2(2, 1)},
                      {{0, 1, 4, 3}, {1, 2, 5, 4}}, {tag}, {0, 0}));
}

inline std::shared_ptr<const PolyMesh> voronoi(int n, Box box = Box{Point2(-3, -3), Point2(3, 3)},
                                               std::uint64_t seed = 42, int lloyd = 50) {
  return std::make_shared<const PolyMesh>(generate_voronoi_mesh(box, n, lloyd, seed));
}

}  // namespace polydg::testing
