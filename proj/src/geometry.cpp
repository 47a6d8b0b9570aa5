#include "tdg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace tdg {

const char* to_string(FaceKind kind) {
  switch (kind) {
    case FaceKind::Interior: return "interior";
    case FaceKind::PeriodicPair: return "periodic";
    case FaceKind::Dirichlet: return "dirichlet";
    case FaceKind::Top: return "top";
    case FaceKind::Bottom: return "bottom";
  }
  return "?";
}

namespace {

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<ElementInput> elements, double L, double H,
           double k, MeshOptions options)
    : L_(L), H_(H), k_(k), vertices_(std::move(vertices)) {
  elements_.reserve(elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    auto& in = elements[e];
    const int n = static_cast<int>(in.vertices.size());
    if (n < 3) throw GeometryError("element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int v : in.vertices) {
      if (v < 0 || v >= static_cast<int>(vertices_.size()))
        throw GeometryError("element " + std::to_string(e) + " references unknown vertex " +
                            std::to_string(v));
    }
    Polygon poly;
    for (int v : in.vertices) poly.vertices.push_back(vertices_[v]);
    const double area = poly.signed_area();
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
      scale = std::max(scale, (poly.vertices[(i + 1) % n] - poly.vertices[i]).norm());
    if (std::abs(area) <= 1e-14 * scale * scale)
      throw GeometryError("element " + std::to_string(e) + " is degenerate");
    if (area < 0.0) std::reverse(in.vertices.begin(), in.vertices.end());
    for (int i = 0; i < n; ++i) {
      const Vec2& a = vertices_[in.vertices[i]];
      const Vec2& b = vertices_[in.vertices[(i + 1) % n]];
      const Vec2& c = vertices_[in.vertices[(i + 2) % n]];
      if (cross(b - a, c - b) < -1e-12 * scale * scale)
        throw GeometryError("element " + std::to_string(e) + " is not convex");
    }
    Element el;
    el.vertices = in.vertices;
    el.eps = in.eps;
    el.kappa = k * std::sqrt(in.eps);
    el.region_id = in.region_id;
    elements_.push_back(std::move(el));
  }
  build_faces(options);
  build_locator();
}

void Mesh::build_faces(const MeshOptions& options) {
  struct Use {
    int element;
    int a;
    int b;
  };
  std::map<std::pair<int, int>, std::vector<Use>> edges;
  for (int e = 0; e < num_elements(); ++e) {
    const auto& vs = elements_[e].vertices;
    const int n = static_cast<int>(vs.size());
    for (int i = 0; i < n; ++i) {
      const int a = vs[i];
      const int b = vs[(i + 1) % n];
      edges[{std::min(a, b), std::max(a, b)}].push_back({e, a, b});
    }
  }

  const double tol = options.pairing_tolerance * L_;
  std::vector<Face> left;
  std::vector<Face> right;
  for (auto& [key, uses] : edges) {
    if (uses.size() > 2)
      throw GeometryError("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                          ") shared by more than two elements");
    std::sort(uses.begin(), uses.end(), [](const Use& x, const Use& y) { return x.element < y.element; });
    Face f;
    f.vertices = {uses[0].a, uses[0].b};
    f.elements[0] = uses[0].element;
    if (uses.size() == 2) {
      f.kind = FaceKind::Interior;
      f.elements[1] = uses[1].element;
      faces_.push_back(f);
      continue;
    }
    const Vec2& pa = vertices_[f.vertices[0]];
    const Vec2& pb = vertices_[f.vertices[1]];
    auto near = [tol](double u, double v) { return std::abs(u - v) <= tol; };
    if (near(pa.x(), 0.0) && near(pb.x(), 0.0)) {
      if (pa.y() > pb.y()) std::swap(f.vertices[0], f.vertices[1]);
      left.push_back(f);
    } else if (near(pa.x(), L_) && near(pb.x(), L_)) {
      if (pa.y() > pb.y()) std::swap(f.vertices[0], f.vertices[1]);
      right.push_back(f);
    } else if (near(pa.y(), H_) && near(pb.y(), H_)) {
      f.kind = FaceKind::Top;
      faces_.push_back(f);
    } else if (near(pa.y(), -H_) && near(pb.y(), -H_)) {
      f.kind = FaceKind::Bottom;
      faces_.push_back(f);
    } else {
      f.kind = FaceKind::Dirichlet;
      faces_.push_back(f);
    }
  }

  std::vector<bool> used(right.size(), false);
  for (const Face& lf : left) {
    const Vec2& l0 = vertices_[lf.vertices[0]];
    const Vec2& l1 = vertices_[lf.vertices[1]];
    int match = -1;
    for (std::size_t r = 0; r < right.size(); ++r) {
      if (used[r]) continue;
      const Vec2& r0 = vertices_[right[r].vertices[0]];
      const Vec2& r1 = vertices_[right[r].vertices[1]];
      if (std::abs(r0.y() - l0.y()) <= tol && std::abs(r1.y() - l1.y()) <= tol) {
        match = static_cast<int>(r);
        break;
      }
    }
    if (match < 0) {
      std::ostringstream os;
      os << "left face (0," << l0.y() << ")-(0," << l1.y() << ") has no matching right face";
      throw PeriodicityViolation(os.str());
    }
    used[match] = true;
    Face f;
    f.kind = FaceKind::PeriodicPair;
    f.elements = {lf.elements[0], right[match].elements[0]};
    f.vertices = lf.vertices;
    f.right_vertices = right[match].vertices;
    faces_.push_back(f);
  }
  for (std::size_t r = 0; r < right.size(); ++r) {
    if (!used[r]) {
      const Vec2& r0 = vertices_[right[r].vertices[0]];
      const Vec2& r1 = vertices_[right[r].vertices[1]];
      std::ostringstream os;
      os << "right face (L," << r0.y() << ")-(L," << r1.y() << ") has no matching left face";
      throw PeriodicityViolation(os.str());
    }
  }

  // deterministic order: by kind, then by first element, then by vertices
  std::stable_sort(faces_.begin(), faces_.end(), [](const Face& x, const Face& y) {
    if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    if (x.elements != y.elements) return x.elements < y.elements;
    return x.vertices < y.vertices;
  });
  for (int f = 0; f < num_faces(); ++f) {
    for (int e : faces_[f].elements) {
      if (e >= 0) elements_[e].faces.push_back(f);
    }
  }
}

void Mesh::build_locator() {
  const int n = std::max(1, num_elements());
  const double aspect = L_ / (2.0 * H_);
  bx_ = std::max(1, static_cast<int>(std::ceil(std::sqrt(n * aspect))));
  by_ = std::max(1, static_cast<int>(std::ceil(std::sqrt(n / aspect))));
  buckets_.assign(static_cast<std::size_t>(bx_) * by_, {});
  const double dx = L_ / bx_;
  const double dy = 2.0 * H_ / by_;
  for (int e = 0; e < num_elements(); ++e) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (int v : elements_[e].vertices) {
      x0 = std::min(x0, vertices_[v].x());
      x1 = std::max(x1, vertices_[v].x());
      y0 = std::min(y0, vertices_[v].y());
      y1 = std::max(y1, vertices_[v].y());
    }
    const int i0 = std::clamp(static_cast<int>(std::floor(x0 / dx)) - 1, 0, bx_ - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor(x1 / dx)) + 1, 0, bx_ - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((y0 + H_) / dy)) - 1, 0, by_ - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((y1 + H_) / dy)) + 1, 0, by_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) buckets_[static_cast<std::size_t>(j) * bx_ + i].push_back(e);
  }
}

std::vector<int> Mesh::faces_of_kind(FaceKind kind) const {
  std::vector<int> out;
  for (int f = 0; f < num_faces(); ++f)
    if (faces_[f].kind == kind) out.push_back(f);
  return out;
}

FaceGeometry Mesh::face_geometry(int f) const {
  const Face& face = faces_[f];
  FaceGeometry g;
  g.a = vertices_[face.vertices[0]];
  g.b = vertices_[face.vertices[1]];
  const Vec2 t = g.b - g.a;
  g.length = t.norm();
  if (face.kind == FaceKind::PeriodicPair) {
    g.normal = Vec2(-1.0, 0.0);
  } else {
    g.normal = Vec2(t.y(), -t.x()) / g.length;
  }
  return g;
}

FaceGeometry Mesh::right_face_geometry(int f) const {
  const Face& face = faces_[f];
  if (face.kind != FaceKind::PeriodicPair) return face_geometry(f);
  FaceGeometry g;
  g.a = vertices_[face.right_vertices[0]];
  g.b = vertices_[face.right_vertices[1]];
  g.length = (g.b - g.a).norm();
  g.normal = Vec2(-1.0, 0.0);
  return g;
}

double Mesh::element_area(int e) const {
  Polygon p{element_points(e)};
  return p.area();
}

Vec2 Mesh::centroid(int e) const {
  const auto pts = element_points(e);
  // area-weighted centroid of a convex polygon
  Vec2 c = Vec2::Zero();
  double a = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

double Mesh::diameter(int e) const {
  const auto pts = element_points(e);
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
  return d;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int e = 0; e < num_elements(); ++e) h = std::max(h, diameter(e));
  return h;
}

std::vector<Vec2> Mesh::element_points(int e) const {
  std::vector<Vec2> pts;
  pts.reserve(elements_[e].vertices.size());
  for (int v : elements_[e].vertices) pts.push_back(vertices_[v]);
  return pts;
}

bool Mesh::element_contains(int e, const Vec2& x, double tol) const {
  const auto& vs = elements_[e].vertices;
  const std::size_t n = vs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[vs[i]];
    const Vec2& b = vertices_[vs[(i + 1) % n]];
    const Vec2 t = b - a;
    if (cross(t, x - a) < -tol * t.norm()) return false;
  }
  return true;
}

int Mesh::locate(const Vec2& x, double tol) const {
  if (x.x() < -tol || x.x() > L_ + tol || x.y() < -H_ - tol || x.y() > H_ + tol) return -1;
  const double dx = L_ / bx_;
  const double dy = 2.0 * H_ / by_;
  const int i = std::clamp(static_cast<int>(std::floor(x.x() / dx)), 0, bx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor((x.y() + H_) / dy)), 0, by_ - 1);
  int best = -1;
  for (int e : buckets_[static_cast<std::size_t>(j) * bx_ + i]) {
    if ((best < 0 || e < best) && element_contains(e, x, tol)) best = e;
  }
  return best;
}

bool Mesh::touches(int e, FaceKind kind) const {
  for (int f : elements_[e].faces)
    if (faces_[f].kind == kind) return true;
  return false;
}

// ---------------------------------------------------------------------------

namespace {

void check_straddle(const ProblemConfig& config, const std::vector<Vec2>& pts, int index) {
  Vec2 c = Vec2::Zero();
  for (const Vec2& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  const Complex ec = config.eps_at(c);
  constexpr double shrink = 1.0 - 1e-6;
  auto probe = [&](const Vec2& target) {
    const Vec2 q = c + shrink * (target - c);
    if (config.eps_at(q) != ec)
      throw MaterialStraddle("element " + std::to_string(index) + " straddles a material interface");
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    probe(pts[i]);
    probe(0.5 * (pts[i] + pts[(i + 1) % pts.size()]));
  }
}

std::string next_token(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) throw ParseError(std::string("unexpected end of mesh file while reading ") + what);
  return tok;
}

long parse_int(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'");
  }
}

double parse_double(std::istream& in, const char* what) {
  const std::string tok = next_token(in, what);
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'");
  }
}

void expect(std::istream& in, const std::string& word) {
  const std::string tok = next_token(in, word.c_str());
  if (tok != word) throw ParseError("expected '" + word + "', got '" + tok + "'");
}

}  // namespace

void check_boundary_materials(const Mesh& mesh, const ProblemConfig& config) {
  const Complex ep(config.eps_plus, 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Complex eps = mesh.element(e).eps;
    if (mesh.touches(e, FaceKind::Top) && std::abs(eps - ep) > 1e-12 * std::abs(ep))
      throw GeometryError("element " + std::to_string(e) + " touches x2 = H but eps != eps_plus");
    if (mesh.touches(e, FaceKind::Bottom) &&
        std::abs(eps - config.eps_minus) > 1e-12 * std::abs(config.eps_minus))
      throw GeometryError("element " + std::to_string(e) + " touches x2 = -H but eps != eps_minus");
  }
}

Mesh ingest_mesh(std::istream& in, const ProblemConfig& config, MeshOptions options) {
  expect(in, "tdgmesh");
  if (parse_int(in, "format version") != 1) throw ParseError("unsupported tdgmesh version");
  expect(in, "vertices");
  const long nv = parse_int(in, "vertex count");
  if (nv < 3) throw ParseError("vertex count must be at least 3");
  std::vector<Vec2> verts(nv);
  for (long i = 0; i < nv; ++i) {
    const double x = parse_double(in, "vertex x1");
    const double y = parse_double(in, "vertex x2");
    verts[i] = Vec2(x, y);
  }
  expect(in, "elements");
  const long ne = parse_int(in, "element count");
  struct Raw {
    std::vector<int> vs;
    int region;
  };
  std::vector<Raw> raw(ne);
  for (long e = 0; e < ne; ++e) {
    const long n = parse_int(in, "element vertex count");
    if (n < 3) throw ParseError("element with fewer than 3 vertices");
    raw[e].vs.resize(n);
    for (long i = 0; i < n; ++i) {
      const long v = parse_int(in, "element vertex index");
      if (v < 0 || v >= nv) throw ParseError("vertex index out of range in element " + std::to_string(e));
      raw[e].vs[i] = static_cast<int>(v);
    }
    raw[e].region = static_cast<int>(parse_int(in, "element region id"));
  }
  expect(in, "regions");
  const long nr = parse_int(in, "region count");
  std::map<int, Complex> eps_of;
  for (long r = 0; r < nr; ++r) {
    const int id = static_cast<int>(parse_int(in, "region id"));
    const double re = parse_double(in, "region eps_re");
    const double im = parse_double(in, "region eps_im");
    eps_of[id] = Complex(re, im);
  }

  std::vector<Mesh::ElementInput> elements;
  for (long e = 0; e < ne; ++e) {
    std::vector<Vec2> pts;
    for (int v : raw[e].vs) pts.push_back(verts[v]);
    Vec2 c = Vec2::Zero();
    for (const Vec2& p : pts) c += p;
    c /= static_cast<double>(pts.size());
    if (config.in_obstacle(c, 0.0)) continue;
    auto it = eps_of.find(raw[e].region);
    if (it == eps_of.end())
      throw ParseError("element " + std::to_string(e) + " references undefined region " +
                       std::to_string(raw[e].region));
    if (!config.regions.empty()) check_straddle(config, pts, static_cast<int>(e));
    elements.push_back({raw[e].vs, it->second, raw[e].region});
  }
  Mesh mesh(std::move(verts), std::move(elements), config.L, config.H, config.k, options);
  check_boundary_materials(mesh, config);
  return mesh;
}

Mesh ingest_mesh_file(const std::string& path, const ProblemConfig& config, MeshOptions options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  return ingest_mesh(in, config, options);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  std::vector<Complex> eps_list;
  std::vector<int> region(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const Complex eps = mesh.element(e).eps;
    auto it = std::find(eps_list.begin(), eps_list.end(), eps);
    if (it == eps_list.end()) {
      eps_list.push_back(eps);
      region[e] = static_cast<int>(eps_list.size()) - 1;
    } else {
      region[e] = static_cast<int>(it - eps_list.begin());
    }
  }
  out << std::setprecision(17);
  out << "tdgmesh 1\n";
  out << "vertices " << mesh.num_vertices() << "\n";
  for (const Vec2& v : mesh.vertices()) out << v.x() << " " << v.y() << "\n";
  out << "elements " << mesh.num_elements() << "\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& vs = mesh.element(e).vertices;
    out << vs.size();
    for (int v : vs) out << " " << v;
    out << " " << region[e] << "\n";
  }
  out << "regions " << eps_list.size() << "\n";
  for (std::size_t r = 0; r < eps_list.size(); ++r)
    out << r << " " << eps_list[r].real() << " " << eps_list[r].imag() << "\n";
}

namespace {

std::vector<double> band_points(std::vector<double> breaks, double lo, double hi, double h,
                                const std::vector<int>& cells, const char* axis) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> uniq;
  const double tol = 1e-12 * (hi - lo);
  for (double b : breaks) {
    if (b < lo - tol || b > hi + tol) continue;
    b = std::clamp(b, lo, hi);
    if (uniq.empty() || b - uniq.back() > tol) uniq.push_back(b);
  }
  const std::size_t nb = uniq.size() - 1;
  if (!cells.empty() && cells.size() != nb)
    throw ConfigError(std::string("cells_") + axis + ": expected " + std::to_string(nb) +
                      " entries, one per band");
  std::vector<double> pts{uniq.front()};
  for (std::size_t i = 0; i < nb; ++i) {
    const double len = uniq[i + 1] - uniq[i];
    int n = cells.empty() ? static_cast<int>(std::ceil(len / h - 1e-9)) : cells[i];
    n = std::max(n, 1);
    for (int j = 1; j <= n; ++j) pts.push_back(j == n ? uniq[i + 1] : uniq[i] + len * j / n);
  }
  return pts;
}

}  // namespace

Mesh generate_structured_mesh(const ProblemConfig& config, const StructuredMeshSpec& spec,
                              MeshOptions options) {
  if (!(spec.h > 0.0)) throw ConfigError("h: mesh width must be positive");
  std::vector<double> xb = spec.x_breaks;
  std::vector<double> yb = spec.y_breaks;
  auto collect = [&](const Polygon& p) {
    for (const Vec2& v : p.vertices) {
      if (v.x() > 0.0 && v.x() < config.L) xb.push_back(v.x());
      if (v.y() > -config.H && v.y() < config.H) yb.push_back(v.y());
    }
  };
  for (const auto& r : config.regions) collect(r.polygon);
  for (const auto& o : config.obstacles) collect(o);
  if (config.regions.empty() && Complex(config.eps_plus, 0.0) != config.eps_minus) yb.push_back(0.0);

  const auto xs = band_points(xb, 0.0, config.L, spec.h, spec.cells_x, "x");
  const auto ys = band_points(yb, -config.H, config.H, spec.h, spec.cells_y, "y");
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());

  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) verts.emplace_back(xs[i], ys[j]);
  auto id = [nx](int i, int j) { return j * nx + i; };

  std::vector<Mesh::ElementInput> elements;
  int index = 0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const Vec2 center(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
      if (config.in_obstacle(center, 0.0)) continue;
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      std::vector<std::array<int, 3>> tris;
      if (spec.diagonals == DiagonalPattern::Crossed) {
        const int vc = static_cast<int>(verts.size());
        verts.push_back(center);
        tris = {{v00, v10, vc}, {v10, v11, vc}, {v11, v01, vc}, {v01, v00, vc}};
      } else {
        bool forward = (i + j) % 2 == 0;
        if (spec.diagonals == DiagonalPattern::Forward) forward = true;
        if (spec.diagonals == DiagonalPattern::Backward) forward = false;
        if (forward)
          tris = {{v00, v10, v11}, {v00, v11, v01}};
        else
          tris = {{v00, v10, v01}, {v10, v11, v01}};
      }
      for (const auto& t : tris) {
        std::vector<Vec2> pts{verts[t[0]], verts[t[1]], verts[t[2]]};
        check_straddle(config, pts, index);
        const Vec2 c = (pts[0] + pts[1] + pts[2]) / 3.0;
        elements.push_back({{t[0], t[1], t[2]}, config.eps_at(c), 0});
        ++index;
      }
    }
  }

  // drop vertices that only belonged to removed cells
  std::vector<int> remap(verts.size(), -1);
  std::vector<Vec2> kept;
  for (auto& el : elements) {
    for (int& v : el.vertices) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(kept.size());
        kept.push_back(verts[v]);
      }
      v = remap[v];
    }
  }
  Mesh mesh(std::move(kept), std::move(elements), config.L, config.H, config.k, options);
  check_boundary_materials(mesh, config);
  return mesh;
}

Mesh replicate_periodic(const Mesh& mesh, int factor) {
  if (factor < 1) throw DomainError("replication factor must be >= 1");
  const double L = mesh.L();
  const double tol = 1e-9 * L;
  std::vector<Vec2> verts;
  std::vector<Mesh::ElementInput> elements;
  std::vector<int> prev_right;  // vertex ids on x1 = c L of the previous copy
  const int nv = mesh.num_vertices();
  std::vector<int> left_ids;
  for (int v = 0; v < nv; ++v)
    if (std::abs(mesh.vertex(v).x()) <= tol) left_ids.push_back(v);

  std::vector<int> map_prev;  // copy c-1 global ids
  for (int c = 0; c < factor; ++c) {
    std::vector<int> map(nv, -1);
    const Vec2 shift(c * L, 0.0);
    if (c > 0) {
      // glue left vertices of this copy to right vertices of the previous copy
      for (int v : left_ids) {
        const double y = mesh.vertex(v).y();
        for (int w = 0; w < nv; ++w) {
          if (std::abs(mesh.vertex(w).x() - L) <= tol && std::abs(mesh.vertex(w).y() - y) <= tol) {
            map[v] = map_prev[w];
            break;
          }
        }
      }
    }
    for (int v = 0; v < nv; ++v) {
      if (map[v] < 0) {
        map[v] = static_cast<int>(verts.size());
        verts.push_back(mesh.vertex(v) + shift);
      }
    }
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const auto& el = mesh.element(e);
      Mesh::ElementInput in;
      for (int v : el.vertices) in.vertices.push_back(map[v]);
      in.eps = el.eps;
      in.region_id = el.region_id;
      elements.push_back(std::move(in));
    }
    map_prev = std::move(map);
  }
  return Mesh(std::move(verts), std::move(elements), factor * L, mesh.H(), mesh.k());
}

NonTrappingReport check_non_trapping(const ProblemConfig& config) {
  NonTrappingReport rep;
  constexpr double tol = 1e-12;

  for (std::size_t o = 0; o < config.obstacles.size(); ++o) {
    const auto& vs = config.obstacles[o].vertices;
    const double orient = config.obstacles[o].signed_area() > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Vec2& a = vs[i];
      const Vec2& b = vs[(i + 1) % vs.size()];
      const Vec2 t = b - a;
      // outward normal of the obstacle for CCW is (t.y, -t.x); into D is its negative
      const Vec2 n_into = -orient * Vec2(t.y(), -t.x()) / t.norm();
      for (const Vec2& p : {a, b}) {
        if (p.y() * n_into.y() > tol) {
          std::ostringstream os;
          os << "obstacle " << o << " edge " << i << ": x2*n2 = " << p.y() * n_into.y() << " > 0 at ("
             << p.x() << "," << p.y() << ")";
          rep.violations.push_back(os.str());
          break;
        }
      }
    }
  }

  if (!config.lossless()) {
    rep.monotonicity_applicable = false;
    rep.warnings.push_back("permittivity is complex: monotonicity condition not applicable");
  } else {
    std::vector<double> xs{0.0, config.L};
    std::vector<double> ys{-config.H, 0.0, config.H};
    auto collect = [&](const Polygon& p) {
      for (const Vec2& v : p.vertices) {
        if (v.x() > 0.0 && v.x() < config.L) xs.push_back(v.x());
        if (v.y() > -config.H && v.y() < config.H) ys.push_back(v.y());
      }
    };
    for (const auto& r : config.regions) collect(r.polygon);
    for (const auto& ob : config.obstacles) collect(ob);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<double> up;    // sample heights above 0, increasing
    std::vector<double> down;  // sample heights below 0, decreasing
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      for (double t : {0.25, 0.5, 0.75}) {
        const double y = ys[j] + t * (ys[j + 1] - ys[j]);
        (y > 0.0 ? up : down).push_back(y);
      }
    }
    std::reverse(down.begin(), down.end());

    bool all_equal = config.obstacles.empty() && Complex(config.eps_plus, 0.0) == config.eps_minus;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double x = 0.5 * (xs[i] + xs[i + 1]);
      auto scan = [&](const std::vector<double>& heights, double far_eps, const char* dir) {
        double prev = -1.0;
        double prev_y = 0.0;
        auto visit = [&](double y, double e) {
          if (prev >= 0.0 && e < prev - tol * std::max(1.0, prev)) {
            std::ostringstream os;
            os << "eps decreases " << dir << " along x1 = " << x << ": " << prev << " at x2 = " << prev_y
               << " -> " << e << " at x2 = " << y;
            rep.violations.push_back(os.str());
          }
          prev = e;
          prev_y = y;
        };
        for (double y : heights) {
          const Vec2 pt(x, y);
          if (config.in_obstacle(pt, 0.0)) continue;
          const double e = config.eps_at(pt).real();
          if (e != config.eps_plus) all_equal = false;
          visit(y, e);
        }
        visit(dir[0] == 'u' ? config.H + 1.0 : -config.H - 1.0, far_eps);
      };
      const std::size_t before = rep.violations.size();
      scan(up, config.eps_plus, "upward");
      scan(down, config.eps_minus.real(), "downward");
      if (rep.violations.size() > before + 4) break;
    }
    if (all_equal) rep.warnings.push_back("trivial scattering: constant eps and no obstacle");
  }
  rep.satisfied = rep.violations.empty();
  return rep;
}

}  // namespace tdg
