#include "helpers.hpp"
#include "polydg/mesh_io.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace polydg;
using namespace polydg::testing;

TEST_SUITE("mesh") {

TEST_CASE("unit square element geometry") {
  const auto m = unit_square();
  REQUIRE(m->n_elements() == 1);
  CHECK(m->element(0).area == doctest::Approx(1.0));
  CHECK(m->element(0).diameter == doctest::Approx(std::sqrt(2.0)));
  CHECK(m->faces().size() == 4);
  for (const Face& f : m->faces()) CHECK(f.is_boundary());
  const RegularityReport r = check_regularity(*m);
  CHECK(r.min_shape == doctest::Approx(0.5));
  CHECK(r.ok());
}

TEST_CASE("two triangles share one interior face") {
  std::istringstream in(R"(polymesh 1
region tissue 1 1 1 0
v 0 0
v 1 0
v 1 1
v 0 1
e tissue 0 1 2
e tissue 0 2 3
)");
  const PolyMesh m = read_mesh(in);
  int interior = 0;
  for (const Face& f : m.faces()) interior += f.is_boundary() ? 0 : 1;
  CHECK(interior == 1);
  CHECK(m.total_area() == doctest::Approx(1.0));
}

TEST_CASE("interior face normal points from plus to minus") {
  const auto m = two_squares();
  for (const Face& f : m->faces()) {
    if (f.is_boundary()) continue;
    const Point2 d = m->element(f.minus).centroid - m->element(f.plus).centroid;
    CHECK(f.normal.dot(d) > 0.0);
    CHECK(f.length == doctest::Approx(1.0));
  }
}

TEST_CASE("one-cell Voronoi of the unit square") {
  const PolyMesh m = generate_voronoi_mesh(Box{}, 1, 0, 7);
  REQUIRE(m.n_elements() == 1);
  CHECK(m.element(0).area == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("2x2 grid seeds give four congruent squares") {
  const PolyMesh m =
      mesh_from_seeds(Box{}, {Point2(0.25, 0.25), Point2(0.75, 0.25), Point2(0.25, 0.75), Point2(0.75, 0.75)}, 0);
  REQUIRE(m.n_elements() == 4);
  for (const Element& e : m.elements()) {
    CHECK(e.area == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(e.vertices.size() == 4);
  }
}

TEST_CASE("300-cell Lloyd mesh matches the reference size and is regular") {
  const PolyMesh m = generate_voronoi_mesh(Box{Point2(-3, -3), Point2(3, 3)}, 300, 100, 42);
  CHECK(m.n_elements() == 300);
  CHECK(m.mesh_size() == doctest::Approx(0.6169).epsilon(0.15));
  CHECK(m.total_area() == doctest::Approx(36.0).epsilon(1e-10));
  const RegularityReport r = check_regularity(m);
  CHECK(r.fan_valid);
  CHECK(r.flagged.empty());
}

TEST_CASE("faces are shared by at most two elements and elements are counterclockwise") {
  const auto m = voronoi(120);
  std::vector<int> count(m->faces().size(), 0);
  for (std::size_t k = 0; k < m->n_elements(); ++k) {
    for (int f : m->element_faces(k)) ++count[f];
    std::vector<Point2> poly;
    for (int v : m->element(k).vertices) poly.push_back(m->vertices()[v]);
    CHECK(signed_area(poly) > 0.0);
  }
  for (std::size_t f = 0; f < count.size(); ++f) CHECK(count[f] == (m->faces()[f].is_boundary() ? 1 : 2));
}

TEST_CASE("generation is bitwise deterministic") {
  const PolyMesh a = generate_voronoi_mesh(Box{}, 50, 20, 3);
  const PolyMesh b = generate_voronoi_mesh(Box{}, 50, 20, 3);
  REQUIRE(a.vertices().size() == b.vertices().size());
  for (std::size_t i = 0; i < a.vertices().size(); ++i) {
    CHECK(a.vertices()[i].x() == b.vertices()[i].x());
    CHECK(a.vertices()[i].y() == b.vertices()[i].y());
  }
  const PolyMesh c = generate_voronoi_mesh(Box{}, 50, 20, 4);
  CHECK(c.vertices() != a.vertices());
}

TEST_CASE("Lloyd iteration never increases the CVT energy") {
  const Box box{Point2(0, 0), Point2(2, 1)};
  auto seeds = random_seeds(box, 40, 11);
  double e = cvt_energy(box, seeds);
  for (int i = 0; i < 15; ++i) {
    seeds = lloyd_step(box, seeds);
    const double next = cvt_energy(box, seeds);
    CHECK(next <= e * (1.0 + 1e-12));
    e = next;
  }
}

TEST_CASE("sliver is flagged") {
  const PolyMesh m =
      PolyMesh::build({Point2(0, 0), Point2(1, 0), Point2(1, 0.01), Point2(0, 0.01)}, {{0, 1, 2, 3}});
  RegularityThresholds th;
  th.shape = 0.01;
  const RegularityReport r = check_regularity(m, th);
  CHECK_FALSE(r.ok());
  CHECK(r.min_shape < 0.01);
}

TEST_CASE("region tagging of the heterogeneous square") {
  const PolyMesh base = generate_voronoi_mesh(Box{}, 200, 30, 42);
  const RegionTag grey{"grey", 0.735, 0.735, Point2(1, 0)};
  const RegionTag unstable{"unstable", 0.735, 0.735, Point2(1, 0)};
  const RegionTag wmv{"wm_vertical", 0.139, 0.557, Point2(0, 1)};
  const RegionTag wmh{"wm_horizontal", 0.139, 0.557, Point2(1, 0)};
  const PolyMesh m = tag_regions(base,
                                 {{in_rectangle(0, 1, 0.4, 0.6), unstable},
                                  {in_rectangle(0, 0.5, 0, 0.4), wmv},
                                  {in_rectangle(0.5, 1, 0, 0.4), wmh}},
                                 grey);
  for (std::size_t k = 0; k < m.n_elements(); ++k) {
    const Point2 c = m.element(k).centroid;
    const std::string& name = m.region_of(k).name;
    if (c.y() > 0.4 && c.y() < 0.6)
      CHECK(name == "unstable");
    else if (c.y() < 0.4)
      CHECK(name == (c.x() < 0.5 ? "wm_vertical" : "wm_horizontal"));
    else
      CHECK(name == "grey");
  }
  const PolyMesh all = tag_regions(base, {}, grey);
  for (std::size_t k = 0; k < all.n_elements(); ++k) CHECK(all.region_of(k) == grey);
}

TEST_CASE("conductivity tensor follows the fibre direction") {
  const RegionTag t{"wm", 0.139, 0.557, Point2(0, 1)};
  const Matrix2 s = t.conductivity();
  CHECK(s(1, 1) == doctest::Approx(0.139));
  CHECK(s(0, 0) == doctest::Approx(0.557));
  CHECK(std::abs(s(0, 1)) < 1e-15);
  CHECK(t.spectral_norm() == doctest::Approx(0.557));
  CHECK(RegionTag{"grey", 0.0735, 0.0735, Point2(1, 0)}.spectral_norm() == doctest::Approx(0.0735));
}

TEST_CASE("locate finds the containing element") {
  const auto m = voronoi(60);
  for (std::size_t k = 0; k < m->n_elements(); ++k) {
    const auto hit = m->locate(m->element(k).centroid);
    REQUIRE(hit);
    CHECK(*hit == static_cast<int>(k));
  }
  CHECK_FALSE(m->locate(Point2(10, 10)));
}

TEST_CASE("mesh file round trip") {
  const PolyMesh m = tag_regions(generate_voronoi_mesh(Box{}, 40, 10, 5),
                                 {{in_rectangle(0, 0.5, 0, 1), RegionTag{"left", 2, 1, Point2(0, 1)}}}, RegionTag{});
  std::stringstream ss;
  write_mesh(ss, m);
  const PolyMesh r = read_mesh(ss);
  CHECK(r.vertices() == m.vertices());
  REQUIRE(r.n_elements() == m.n_elements());
  for (std::size_t k = 0; k < m.n_elements(); ++k) {
    CHECK(r.element(k).vertices == m.element(k).vertices);
    CHECK(r.region_of(k) == m.region_of(k));
  }
  std::stringstream again;
  write_mesh(again, r);
  std::stringstream first;
  write_mesh(first, m);
  CHECK(again.str() == first.str());
}

TEST_CASE("malformed mesh files report the line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      (void)read_mesh(in);
    } catch (const MeshError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("polymesh 1\nregion a 1 1 1 0\nv 0 0\nv 1 0\nv 0 1\ne a 0 1 7\n", "line 6"));
  CHECK(fails_with("polymesh 1\nregion a 1 1 1 0\nv 0 0\nv 1 0\nv 0 1\ne a 0 1 7\n", "missing vertex 7"));
  CHECK(fails_with("polymesh 1\nv 0 x\n", "line 2"));
  CHECK(fails_with("polymesh 1\nregion a 1 1 1 0\nv 0 0\nv 1 0\nv 0 1\ne b 0 1 2\n", "undeclared region 'b'"));
  CHECK(fails_with("mesh 2\n", "line 1"));
}

TEST_CASE("non-manifold face is rejected") {
  // three triangles on the edge (0,1)
  std::vector<Point2> v{Point2(0, 0), Point2(1, 0), Point2(0.5, 1), Point2(0.5, -1), Point2(0.5, 0.5)};
  CHECK_THROWS_AS(PolyMesh::build(v, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}), MeshError);
}

}  // TEST_SUITE
