#pragma once

#include "polydg/mesh.hpp"

#include <filesystem>
#include <iosfwd>

namespace polydg {

// Text mesh format, whitespace-delimited, '#' starts a comment:
//
//   polymesh 1
//   region <name> <sigma_t> <sigma_n> <dir_x> <dir_y>
//   v <x> <y>
//   e <region_name> <i0> <i1> ... <ik>      (0-based, counterclockwise)
//
// Region lines may appear anywhere; vertex indices refer to the order of `v` lines.

PolyMesh read_mesh(std::istream& in);
PolyMesh import_mesh(const std::filesystem::path& path);

void write_mesh(std::ostream& out, const PolyMesh& mesh);
void export_mesh(const std::filesystem::path& path, const PolyMesh& mesh);

}  // namespace polydg
