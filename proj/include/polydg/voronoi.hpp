#pragma once

#include "polydg/mesh.hpp"

#include <cstdint>
#include <vector>

namespace polydg {

/// Clipped Voronoi cell of every generator, as CCW polygons. Cell i belongs
/// to seeds[i]. Generators must be distinct and inside the box.
std::vector<std::vector<Point2>> voronoi_cells(const Box& box, const std::vector<Point2>& seeds);

/// Sum over cells of the second moment of the cell about its generator.
/// Lloyd iteration never increases this quantity.
double cvt_energy(const Box& box, const std::vector<Point2>& seeds);

/// Sum of squared generator-to-centroid distances.
double centroid_offset_energy(const Box& box, const std::vector<Point2>& seeds);

/// One Lloyd update: every generator moves to the centroid of its cell.
std::vector<Point2> lloyd_step(const Box& box, const std::vector<Point2>& seeds);

/// Uniform random generators drawn from a seeded mt19937_64 stream.
std::vector<Point2> random_seeds(const Box& box, int n, std::uint64_t seed);

/// Welds the clipped cells of `seeds` into a conforming polygonal mesh.
PolyMesh mesh_from_seeds(const Box& box, std::vector<Point2> seeds, int lloyd_iters);

/// Lloyd-relaxed clipped Voronoi mesh with exactly n_elements cells.
/// Identical arguments give a bitwise-identical mesh.
PolyMesh generate_voronoi_mesh(const Box& box, int n_elements, int lloyd_iters, std::uint64_t seed);

}  // namespace polydg
