#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "tdg/geometry.hpp"

using namespace tdg;

namespace {

ProblemConfig two_layer_config() {
  ProblemConfig c;
  c.L = 2 * kPi;
  c.H = 3;
  c.k = 5;
  c.theta = -kPi / 3;
  c.eps_minus = 1.5;
  return c;
}

Mesh two_layer_mesh() {
  StructuredMeshSpec ms;
  ms.h = 1.5;
  ms.cells_x = {3};
  ms.cells_y = {3, 3};
  return generate_structured_mesh(two_layer_config(), ms);
}

double total_area(const Mesh& m) {
  double a = 0;
  for (int e = 0; e < m.num_elements(); ++e) a += m.element_area(e);
  return a;
}

// unit square cell split into two triangles, as a mesh file
std::string two_triangle_file(const std::string& second = "1 2 3") {
  return "tdgmesh 1\nvertices 4\n0 -1\n1 -1\n1 1\n0 1\nelements 2\n3 0 1 3 0\n3 " + second + " 0\nregions 1\n0 1 0\n";
}

ProblemConfig unit_cell() {
  ProblemConfig c;
  c.L = 1;
  c.H = 1;
  c.k = 2;
  c.theta = -kPi / 4;
  return c;
}

}  // namespace

TEST_CASE("structured two-layer mesh has 36 triangles and tiles the cell") {
  const Mesh m = two_layer_mesh();
  CHECK(m.num_elements() == 36);
  CHECK(total_area(m) == doctest::Approx(2 * kPi * 6).epsilon(1e-13));
  CHECK(m.max_diameter() == doctest::Approx(std::hypot(2 * kPi / 3, 1.0)).epsilon(1e-14));
  for (int e = 0; e < m.num_elements(); ++e) {
    const Complex want = m.centroid(e).y() > 0 ? Complex(1.0) : Complex(1.5);
    CHECK(m.element(e).eps == want);
    CHECK(std::abs(m.element(e).kappa - 5.0 * std::sqrt(want)) < 1e-14);
  }
}

TEST_CASE("faces partition the element boundaries") {
  const Mesh m = two_layer_mesh();
  std::map<int, int> uses;
  for (int e = 0; e < m.num_elements(); ++e) {
    CHECK(m.element(e).faces.size() == m.element(e).vertices.size());
    for (int f : m.element(e).faces) uses[f]++;
  }
  for (int f = 0; f < m.num_faces(); ++f) {
    const Face& face = m.face(f);
    const int expected = (face.kind == FaceKind::Interior || face.kind == FaceKind::PeriodicPair) ? 2 : 1;
    CHECK(uses[f] == expected);
    const FaceGeometry g = m.face_geometry(f);
    CHECK(g.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g.length == doctest::Approx((g.b - g.a).norm()).epsilon(1e-15));
    // the normal points out of elements[0]
    CHECK(g.normal.dot(0.5 * (g.a + g.b) - m.centroid(face.elements[0])) > 0);
  }
  double top = 0, bottom = 0;
  for (int f : m.faces_of_kind(FaceKind::Top)) top += m.face_geometry(f).length;
  for (int f : m.faces_of_kind(FaceKind::Bottom)) bottom += m.face_geometry(f).length;
  CHECK(top == doctest::Approx(2 * kPi).epsilon(1e-13));
  CHECK(bottom == doctest::Approx(2 * kPi).epsilon(1e-13));
  CHECK(m.faces_of_kind(FaceKind::Dirichlet).empty());
}

TEST_CASE("periodic pairs match left and right copies") {
  const Mesh m = two_layer_mesh();
  const auto pairs = m.periodic_pairs();
  CHECK(pairs.size() == 6);
  for (int f : pairs) {
    const FaceGeometry l = m.face_geometry(f);
    const FaceGeometry r = m.right_face_geometry(f);
    CHECK(l.a.x() == doctest::Approx(0.0));
    CHECK(r.a.x() == doctest::Approx(2 * kPi));
    CHECK(l.a.y() == doctest::Approx(r.a.y()).epsilon(1e-14));
    CHECK(l.b.y() == doctest::Approx(r.b.y()).epsilon(1e-14));
    CHECK(l.normal.x() == doctest::Approx(-1.0));
    CHECK(m.centroid(m.face(f).elements[0]).x() < kPi);
    CHECK(m.centroid(m.face(f).elements[1]).x() > kPi);
  }
}

TEST_CASE("diagonal patterns") {
  ProblemConfig c = two_layer_config();
  StructuredMeshSpec ms;
  ms.cells_x = {4};
  ms.cells_y = {2, 2};
  for (auto pat : {DiagonalPattern::Alternating, DiagonalPattern::Forward, DiagonalPattern::Backward}) {
    ms.diagonals = pat;
    const Mesh m = generate_structured_mesh(c, ms);
    CHECK(m.num_elements() == 32);
    CHECK(total_area(m) == doctest::Approx(2 * kPi * 6).epsilon(1e-13));
  }
  ms.diagonals = DiagonalPattern::Crossed;
  const Mesh m = generate_structured_mesh(c, ms);
  CHECK(m.num_elements() == 64);
  CHECK(total_area(m) == doctest::Approx(2 * kPi * 6).epsilon(1e-13));
}

TEST_CASE("obstacle cells are removed and their edges become Dirichlet faces") {
  ProblemConfig c;
  c.L = 2 * kPi;
  c.H = 5;
  c.k = 5;
  c.theta = -kPi / 4;
  c.obstacles.push_back(Polygon::box(2 * kPi / 3, 4 * kPi / 3, -1, 1));
  StructuredMeshSpec ms;
  ms.h = 0.75 * std::sqrt(2.0);
  ms.diagonals = DiagonalPattern::Crossed;
  const Mesh m = generate_structured_mesh(c, ms);
  CHECK(m.num_elements() == 224);
  CHECK(total_area(m) == doctest::Approx(2 * kPi * 10 - 2 * kPi / 3 * 2).epsilon(1e-12));
  double perimeter = 0;
  for (int f : m.faces_of_kind(FaceKind::Dirichlet)) {
    perimeter += m.face_geometry(f).length;
    // outward normal of the domain points into the obstacle
    const FaceGeometry g = m.face_geometry(f);
    CHECK(c.in_obstacle(0.5 * (g.a + g.b) + 1e-6 * g.normal, 0.0));
  }
  CHECK(perimeter == doctest::Approx(2 * (2 * kPi / 3) + 4).epsilon(1e-12));
  for (int e = 0; e < m.num_elements(); ++e) CHECK_FALSE(c.in_obstacle(m.centroid(e)));
}

TEST_CASE("point location") {
  const Mesh m = two_layer_mesh();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> X(0, 2 * kPi), Y(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 x(X(rng), Y(rng));
    const int e = m.locate(x);
    REQUIRE(e >= 0);
    CHECK(m.element_contains(e, x));
  }
  CHECK(m.locate(Vec2(-0.1, 0)) == -1);
  CHECK(m.locate(Vec2(1, 3.1)) == -1);
  // a shared vertex belongs to several elements; the lowest id wins
  const Vec2 v = m.vertex(m.element(5).vertices[0]);
  int lowest = -1;
  for (int e = 0; e < m.num_elements() && lowest < 0; ++e)
    if (m.element_contains(e, v)) lowest = e;
  CHECK(m.locate(v) == lowest);
}

TEST_CASE("mesh file round trip") {
  const ProblemConfig c = two_layer_config();
  const Mesh m = two_layer_mesh();
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = ingest_mesh(ss, c);
  REQUIRE(r.num_elements() == m.num_elements());
  CHECK(r.num_faces() == m.num_faces());
  CHECK(r.periodic_pairs().size() == m.periodic_pairs().size());
  for (int e = 0; e < m.num_elements(); ++e) {
    CHECK(r.element(e).eps == m.element(e).eps);
    CHECK((r.centroid(e) - m.centroid(e)).norm() < 1e-14);
  }
}

TEST_CASE("ingest accepts clockwise elements and convex polygons") {
  std::stringstream cw(two_triangle_file("3 2 1"));
  const Mesh m = ingest_mesh(cw, unit_cell());
  CHECK(m.num_elements() == 2);
  CHECK(m.element_area(1) > 0);

  std::stringstream quad("tdgmesh 1\nvertices 4\n0 -1\n1 -1\n1 1\n0 1\nelements 1\n4 0 1 2 3 0\nregions 1\n0 1 0\n");
  const Mesh q = ingest_mesh(quad, unit_cell());
  CHECK(q.num_elements() == 1);
  CHECK(q.element_area(0) == doctest::Approx(2.0));
  CHECK(q.periodic_pairs().size() == 1);
}

TEST_CASE("ingest errors") {
  SUBCASE("bad header") {
    std::stringstream s("mesh 2\n");
    CHECK_THROWS_AS(ingest_mesh(s, unit_cell()), ParseError);
  }
  SUBCASE("truncated") {
    std::stringstream s("tdgmesh 1\nvertices 4\n0 -1\n1 -1\n");
    CHECK_THROWS_AS(ingest_mesh(s, unit_cell()), ParseError);
  }
  SUBCASE("non-convex element") {
    std::stringstream s(
        "tdgmesh 1\nvertices 5\n0 -1\n1 -1\n1 1\n0.5 -0.5\n0 1\nelements 1\n5 0 1 2 3 4 0\nregions 1\n0 1 0\n");
    CHECK_THROWS_AS(ingest_mesh(s, unit_cell()), GeometryError);
  }
  SUBCASE("unpaired lateral face") {
    std::stringstream s(
        "tdgmesh 1\nvertices 5\n0 -1\n1 -1\n1 1\n0 1\n1 0\nelements 3\n3 0 1 4 0\n3 0 4 3 0\n3 4 2 3 0\nregions 1\n0 1 "
        "0\n");
    CHECK_THROWS_AS(ingest_mesh(s, unit_cell()), PeriodicityViolation);
  }
  SUBCASE("element straddling a material interface") {
    ProblemConfig c = unit_cell();
    c.regions.push_back({Polygon::box(0, 1, -1, 0), 2.0});
    c.eps_minus = 2.0;
    std::stringstream s(two_triangle_file());
    CHECK_THROWS_AS(ingest_mesh(s, c), MaterialStraddle);
  }
  SUBCASE("wrong material on the artificial boundary") {
    ProblemConfig c = unit_cell();
    c.eps_minus = 2.0;
    std::stringstream s(two_triangle_file());
    CHECK_THROWS_AS(ingest_mesh(s, c), GeometryError);
  }
}

TEST_CASE("replicated mesh") {
  const Mesh m = two_layer_mesh();
  const Mesh r = replicate_periodic(m, 2);
  CHECK(r.num_elements() == 72);
  CHECK(r.L() == doctest::Approx(4 * kPi));
  CHECK(total_area(r) == doctest::Approx(2 * total_area(m)).epsilon(1e-13));
  CHECK(r.periodic_pairs().size() == m.periodic_pairs().size());
  for (int e = 0; e < m.num_elements(); ++e) {
    CHECK((r.centroid(e + 36) - r.centroid(e) - Vec2(2 * kPi, 0)).norm() < 1e-13);
    CHECK(r.element(e + 36).eps == m.element(e).eps);
  }
}

TEST_CASE("non-trapping diagnostic") {
  SUBCASE("flat interface with denser lower medium") {
    const auto rep = check_non_trapping(two_layer_config());
    CHECK(rep.satisfied);
    CHECK(rep.violations.empty());
  }
  SUBCASE("slab denser than its surroundings") {
    ProblemConfig c = two_layer_config();
    c.H = 5;
    c.eps_minus = 1;
    c.regions.push_back({Polygon::box(0, c.L, -2, 2), 2.0});
    const auto rep = check_non_trapping(c);
    CHECK_FALSE(rep.satisfied);
    CHECK_FALSE(rep.violations.empty());
  }
  SUBCASE("obstacle centred on the axis") {
    ProblemConfig c = two_layer_config();
    c.H = 5;
    c.eps_minus = 1;
    c.obstacles.push_back(Polygon::box(2, 4, -1, 1));
    CHECK(check_non_trapping(c).satisfied);
  }
  SUBCASE("obstacle floating above the axis") {
    ProblemConfig c = two_layer_config();
    c.H = 5;
    c.eps_minus = 1;
    c.obstacles.push_back(Polygon::box(2, 4, 1, 2));
    const auto rep = check_non_trapping(c);
    CHECK_FALSE(rep.satisfied);
  }
  SUBCASE("complex permittivity") {
    ProblemConfig c = two_layer_config();
    c.eps_minus = Complex(1.6, 0.25);
    const auto rep = check_non_trapping(c);
    CHECK_FALSE(rep.monotonicity_applicable);
  }
  SUBCASE("trivial problem") {
    ProblemConfig c = two_layer_config();
    c.eps_minus = 1;
    CHECK_FALSE(check_non_trapping(c).warnings.empty());
  }
}
