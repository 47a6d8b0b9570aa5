#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdg/common.hpp"
#include "tdg/problem.hpp"

namespace tdg {

enum class FaceKind { Interior, PeriodicPair, Dirichlet, Top, Bottom };

const char* to_string(FaceKind kind);

struct Element {
  std::vector<int> vertices;  // counter-clockwise
  Complex eps;
  Complex kappa;  // k * sqrt(eps), principal branch
  int region_id = 0;
  std::vector<int> faces;
};

/// A mesh face. For interior faces `elements = {K1, K2}`; for boundary faces
/// `elements[1] == -1`. A PeriodicPair face stores the left copy (x1 = 0) in
/// `vertices` with `elements[0]` the element touching x1 = 0, and the right
/// copy (x1 = L) in `right_vertices` with `elements[1]` the element touching
/// x1 = L. Endpoints of both copies are listed with increasing x2.
struct Face {
  FaceKind kind = FaceKind::Interior;
  std::array<int, 2> elements{-1, -1};
  std::array<int, 2> vertices{-1, -1};
  std::array<int, 2> right_vertices{-1, -1};
};

struct FaceGeometry {
  Vec2 a;
  Vec2 b;
  double length = 0.0;
  /// Unit normal pointing out of elements[0]; outward on the boundary.
  Vec2 normal;
};

struct MeshOptions {
  /// Pairing tolerance is `pairing_tolerance * L` on endpoint coordinates.
  double pairing_tolerance = 1e-9;
};

/// Convex polygonal mesh of the periodic cell with classified faces.
/// Immutable after construction.
class Mesh {
 public:
  struct ElementInput {
    std::vector<int> vertices;
    Complex eps;
    int region_id = 0;
  };

  /// Builds faces, classifies them and pairs the periodic sides. Throws
  /// GeometryError (non-convex or degenerate element, non-conforming face)
  /// or PeriodicityViolation (unpaired lateral face).
  Mesh(std::vector<Vec2> vertices, std::vector<ElementInput> elements, double L, double H,
       double k, MeshOptions options = {});

  double L() const { return L_; }
  double H() const { return H_; }
  double k() const { return k_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Vec2& vertex(int i) const { return vertices_[i]; }
  const Element& element(int e) const { return elements_[e]; }
  const Face& face(int f) const { return faces_[f]; }

  /// Face ids of the given kind, in increasing order.
  std::vector<int> faces_of_kind(FaceKind kind) const;
  /// Ids of faces that are PeriodicPair; each entry pairs a left and a right face.
  std::vector<int> periodic_pairs() const { return faces_of_kind(FaceKind::PeriodicPair); }

  /// Geometry of a face. For PeriodicPair faces this is the left copy, with
  /// normal (-1, 0); `right_face_geometry` returns the copy at x1 = L.
  FaceGeometry face_geometry(int f) const;
  FaceGeometry right_face_geometry(int f) const;

  double element_area(int e) const;
  Vec2 centroid(int e) const;
  double diameter(int e) const;
  double max_diameter() const;
  std::vector<Vec2> element_points(int e) const;

  /// Contains test with absolute tolerance.
  bool element_contains(int e, const Vec2& x, double tol = 1e-12) const;
  /// Lowest element id containing x (within tol), or -1.
  int locate(const Vec2& x, double tol = 1e-12) const;

  /// True if element e has a face of the given kind.
  bool touches(int e, FaceKind kind) const;

 private:
  void build_faces(const MeshOptions& options);
  void build_locator();

  double L_;
  double H_;
  double k_;
  std::vector<Vec2> vertices_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;

  // uniform bucket grid for point location
  int bx_ = 1;
  int by_ = 1;
  std::vector<std::vector<int>> buckets_;
};

/// Reads a mesh file ("tdgmesh 1" format) and attaches it to `config`.
/// Elements whose centroid lies inside an obstacle are dropped. When the
/// config defines regions, each element must lie in a single region
/// (MaterialStraddle otherwise). Elements touching x2 = H (resp. -H) must
/// carry eps_plus (resp. eps_minus).
Mesh ingest_mesh(std::istream& in, const ProblemConfig& config, MeshOptions options = {});
Mesh ingest_mesh_file(const std::string& path, const ProblemConfig& config,
                      MeshOptions options = {});

/// Writes the mesh in the "tdgmesh 1" format (one region per distinct eps).
void write_mesh(std::ostream& out, const Mesh& mesh);

/// Tensor-grid triangulation honouring every horizontal and vertical line
/// through region/obstacle polygon vertices and the extra breaks given here.
/// Each band between consecutive breaks is split into ceil(length / h) cells
/// unless `cells_x` / `cells_y` (one entry per band) override it. Each cell
/// is cut into two triangles; cells inside obstacles are removed.
enum class DiagonalPattern { Alternating, Forward, Backward, Crossed };

struct StructuredMeshSpec {
  double h = 1.0;
  /// Forward cuts every cell from its lower-left to upper-right corner,
  /// Backward from lower-right to upper-left; Alternating switches by parity.
  /// Crossed splits each cell into four triangles around its centre.
  DiagonalPattern diagonals = DiagonalPattern::Alternating;
  std::vector<double> x_breaks;
  std::vector<double> y_breaks;
  std::vector<int> cells_x;
  std::vector<int> cells_y;
};

Mesh generate_structured_mesh(const ProblemConfig& config, const StructuredMeshSpec& spec,
                              MeshOptions options = {});

/// Copies the cell `factor` times along x1, producing a mesh of
/// (0, factor L) x (-H, H). Element e of copy c gets id c * n + e.
Mesh replicate_periodic(const Mesh& mesh, int factor);

/// Checks the cross-section consistency of the mesh against the config:
/// top/bottom elements must carry eps_plus / eps_minus. Throws GeometryError.
void check_boundary_materials(const Mesh& mesh, const ProblemConfig& config);

struct NonTrappingReport {
  bool satisfied = true;
  bool monotonicity_applicable = true;
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
};

/// Non-trapping diagnostic: x2 n2 <= 0 on obstacle boundaries (n pointing
/// into the obstacle) and eps non-decreasing along every vertical half-line
/// leaving x2 = 0. Monotonicity is reported "not applicable" for complex eps.
NonTrappingReport check_non_trapping(const ProblemConfig& config);

}  // namespace tdg
