// Synthetic brain-section mesh: an elliptic slice, 7.5 x 7 cm, with a grey
// matter rim, a vertically oriented white matter core and an unstable grey
// patch on the left. Writes the polymesh text format.

#include "polydg/mesh_io.hpp"
#include "polydg/voronoi.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

using namespace polydg;

int main(int argc, char** argv) {
  CLI::App app{"Generate the brain-section mesh asset"};
  std::string out = "brain_section.polymesh";
  int n = 2600;
  int lloyd = 60;
  std::uint64_t seed = 2024;
  app.add_option("-o,--out", out, "output mesh file");
  app.add_option("-n,--n-cells", n, "Voronoi cells in the bounding box");
  app.add_option("--lloyd", lloyd, "Lloyd iterations");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  const Box box{Point2(0.0, 0.0), Point2(7.5, 7.0)};
  const PolyMesh full = generate_voronoi_mesh(box, n, lloyd, seed);

  const Point2 c(3.75, 3.5);
  auto inside = [&](const Point2& p, double ax, double ay) {
    const double dx = (p.x() - c.x()) / ax, dy = (p.y() - c.y()) / ay;
    return dx * dx + dy * dy < 1.0;
  };

  // grey 0.735 mS/cm isotropic; white 0.139 along the fibres, 0.557 across
  const std::vector<RegionTag> regions{{"grey", 0.735, 0.735, Point2(1.0, 0.0)},
                                       {"white", 0.139, 0.557, Point2(0.0, 1.0)},
                                       {"unstable", 0.735, 0.735, Point2(1.0, 0.0)}};
  std::vector<Point2> verts;
  std::map<int, int> remap;
  std::vector<std::vector<int>> elems;
  std::vector<int> region_of;
  for (std::size_t k = 0; k < full.n_elements(); ++k) {
    const Element& e = full.element(k);
    if (!inside(e.centroid, 3.75, 3.5)) continue;
    std::vector<int> ids;
    for (int v : e.vertices) {
      auto [it, fresh] = remap.try_emplace(v, static_cast<int>(verts.size()));
      if (fresh) verts.push_back(full.vertices()[v]);
      ids.push_back(it->second);
    }
    elems.push_back(std::move(ids));
    int r = 0;
    if (inside(e.centroid, 2.6, 2.3))
      r = 1;
    else if ((e.centroid - Point2(1.0, 3.5)).norm() < 0.6)
      r = 2;
    region_of.push_back(r);
  }

  const PolyMesh mesh = PolyMesh::build(std::move(verts), std::move(elems), regions, std::move(region_of));
  export_mesh(out, mesh);
  std::cout << mesh.n_elements() << " elements, h = " << mesh.mesh_size() << " -> " << out << '\n';
}
