#include "tdg/run_config.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tdg/spectral.hpp"

namespace tdg {

using nlohmann::json;

namespace {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s_ + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  double power() {
    const double b = atom();
    if (eat('^')) return std::pow(b, unary());
    return b;
  }
  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return kPi;
    }
    if (s_.compare(pos_, 4, "sqrt") == 0) {
      pos_ += 4;
      if (!eat('(')) fail("sqrt needs '('");
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return std::sqrt(v);
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double number(const json& v, const std::string& field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return eval_expression(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(field + ": " + e.what());
    }
  }
  throw ConfigError(field + ": expected a number or an expression string");
}

Complex complex_value(const json& v, const std::string& field) {
  if (v.is_array()) {
    if (v.size() != 2) throw ConfigError(field + ": complex values are [re, im]");
    return {number(v[0], field + "[0]"), number(v[1], field + "[1]")};
  }
  return {number(v, field), 0.0};
}

int integer(const json& v, const std::string& field) {
  const double x = number(v, field);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError(field + ": expected an integer");
  return static_cast<int>(x);
}

std::vector<double> number_list(const json& v, const std::string& field) {
  if (!v.is_array()) throw ConfigError(field + ": expected a list");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Polygon polygon_of(const json& v, const std::string& field) {
  if (v.contains("box")) {
    const auto b = number_list(v.at("box"), field + ".box");
    if (b.size() != 4) throw ConfigError(field + ".box: expected [x0, x1, y0, y1]");
    if (!(b[1] > b[0] && b[3] > b[2])) throw ConfigError(field + ".box: empty box");
    return Polygon::box(b[0], b[1], b[2], b[3]);
  }
  if (v.contains("polygon")) {
    Polygon p;
    const auto& pts = v.at("polygon");
    if (!pts.is_array() || pts.size() < 3) throw ConfigError(field + ".polygon: needs >= 3 points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto xy = number_list(pts[i], field + ".polygon[" + std::to_string(i) + "]");
      if (xy.size() != 2) throw ConfigError(field + ".polygon: points are [x1, x2]");
      p.vertices.emplace_back(xy[0], xy[1]);
    }
    return p;
  }
  throw ConfigError(field + ": expected 'box' or 'polygon'");
}

void check_keys(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(section + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(section + "." + it.key() + ": unknown key");
  }
}

}  // namespace

double eval_expression(const std::string& text) { return ExprParser(text).parse(); }

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set: expected key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  if (key == "k" || key == "theta" || key == "eps_plus" || key == "eps_minus") key = "physics." + key;
  else if (key == "p" || key == "M" || key == "rotation") key = "discretization." + key;
  else if (key == "h" || key == "H" || key == "L") key = "geometry." + key;
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: malformed key '" + key + "'");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    start = dot + 1;
  }
}

RunConfig parse_run_config(const json& doc, const std::string& base_dir) {
  RunConfig rc;
  rc.base_dir = base_dir;
  check_keys(doc, "config", {"geometry", "physics", "discretization", "reference", "study", "output", "name", "description"});
  ProblemConfig& pc = rc.problem;

  const json geo = doc.value("geometry", json::object());
  check_keys(geo, "geometry", {"L", "H", "h", "cells_x", "cells_y", "x_breaks", "y_breaks", "regions", "layers",
                               "obstacles", "mesh_file", "diagonals"});
  if (geo.contains("L")) pc.L = number(geo["L"], "geometry.L");
  if (!geo.contains("H")) throw ConfigError("geometry.H: required");
  pc.H = number(geo["H"], "geometry.H");
  if (geo.contains("h")) rc.mesh.h = number(geo["h"], "geometry.h");
  if (geo.contains("diagonals")) {
    const auto& dg = geo["diagonals"];
    const std::string name = dg.is_string() ? dg.get<std::string>() : "";
    if (name == "alternating") rc.mesh.diagonals = DiagonalPattern::Alternating;
    else if (name == "forward") rc.mesh.diagonals = DiagonalPattern::Forward;
    else if (name == "backward") rc.mesh.diagonals = DiagonalPattern::Backward;
    else if (name == "crossed") rc.mesh.diagonals = DiagonalPattern::Crossed;
    else throw ConfigError("geometry.diagonals: expected alternating, forward, backward or crossed");
  }
  if (geo.contains("x_breaks")) rc.mesh.x_breaks = number_list(geo["x_breaks"], "geometry.x_breaks");
  if (geo.contains("y_breaks")) rc.mesh.y_breaks = number_list(geo["y_breaks"], "geometry.y_breaks");
  auto int_list = [&](const char* key) {
    std::vector<int> out;
    const auto& v = geo.at(key);
    if (!v.is_array()) throw ConfigError(std::string("geometry.") + key + ": expected a list");
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(integer(v[i], std::string("geometry.") + key + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (geo.contains("cells_x")) rc.mesh.cells_x = int_list("cells_x");
  if (geo.contains("cells_y")) rc.mesh.cells_y = int_list("cells_y");
  if (geo.contains("layers")) {
    const auto& layers = geo["layers"];
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string f = "geometry.layers[" + std::to_string(i) + "]";
      check_keys(layers[i], f, {"y0", "y1", "eps"});
      const double y0 = number(layers[i].at("y0"), f + ".y0");
      const double y1 = number(layers[i].at("y1"), f + ".y1");
      if (!(y1 > y0)) throw ConfigError(f + ": needs y1 > y0");
      pc.regions.push_back({Polygon::box(0.0, pc.L, y0, y1), complex_value(layers[i].at("eps"), f + ".eps")});
    }
  }
  if (geo.contains("regions")) {
    const auto& regions = geo["regions"];
    for (std::size_t i = 0; i < regions.size(); ++i) {
      const std::string f = "geometry.regions[" + std::to_string(i) + "]";
      check_keys(regions[i], f, {"box", "polygon", "eps"});
      if (!regions[i].contains("eps")) throw ConfigError(f + ".eps: required");
      pc.regions.push_back({polygon_of(regions[i], f), complex_value(regions[i]["eps"], f + ".eps")});
    }
  }
  if (geo.contains("obstacles")) {
    const auto& obs = geo["obstacles"];
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string f = "geometry.obstacles[" + std::to_string(i) + "]";
      check_keys(obs[i], f, {"box", "polygon"});
      pc.obstacles.push_back(polygon_of(obs[i], f));
    }
  }
  if (geo.contains("mesh_file")) {
    if (!geo["mesh_file"].is_string()) throw ConfigError("geometry.mesh_file: expected a path");
    std::filesystem::path mp = geo["mesh_file"].get<std::string>();
    if (mp.is_relative()) mp = std::filesystem::path(base_dir) / mp;
    rc.mesh_file = mp.string();
  }

  const json phys = doc.value("physics", json::object());
  check_keys(phys, "physics", {"k", "theta", "eps_plus", "eps_minus"});
  if (!phys.contains("k")) throw ConfigError("physics.k: required");
  if (!phys.contains("theta")) throw ConfigError("physics.theta: required");
  pc.k = number(phys["k"], "physics.k");
  pc.theta = number(phys["theta"], "physics.theta");
  if (phys.contains("eps_plus")) {
    const Complex e = complex_value(phys["eps_plus"], "physics.eps_plus");
    if (e.imag() != 0.0) throw ConfigError("physics.eps_plus: must be real");
    pc.eps_plus = e.real();
  }
  if (phys.contains("eps_minus")) pc.eps_minus = complex_value(phys["eps_minus"], "physics.eps_minus");

  const json disc = doc.value("discretization", json::object());
  check_keys(disc, "discretization", {"p", "M", "rotation", "flux", "dense_threshold"});
  if (disc.contains("p")) rc.p = integer(disc["p"], "discretization.p");
  if (rc.p < 1) throw ConfigError("discretization.p: must be >= 1");
  if (disc.contains("M")) {
    const auto& m = disc["M"];
    if (m.is_string() && m.get<std::string>() == "auto") rc.M.reset();
    else {
      rc.M = integer(m, "discretization.M");
      if (*rc.M < 0) throw ConfigError("discretization.M: must be >= 0");
    }
  }
  if (disc.contains("rotation")) rc.rotation = number(disc["rotation"], "discretization.rotation");
  if (disc.contains("dense_threshold"))
    rc.dense_threshold = integer(disc["dense_threshold"], "discretization.dense_threshold");
  if (disc.contains("flux")) {
    const auto& f = disc["flux"];
    check_keys(f, "discretization.flux", {"a", "b", "d"});
    if (f.contains("a")) pc.flux.a = number(f["a"], "discretization.flux.a");
    if (f.contains("b")) pc.flux.b = number(f["b"], "discretization.flux.b");
    if (f.contains("d")) pc.flux.d = number(f["d"], "discretization.flux.d");
  }

  const json ref = doc.value("reference", json::object());
  check_keys(ref, "reference", {"type", "eps_in", "d", "p", "file"});
  if (ref.contains("type")) {
    if (!ref["type"].is_string()) throw ConfigError("reference.type: expected a string");
    rc.reference.type = ref["type"].get<std::string>();
    const auto& t = rc.reference.type;
    if (t != "none" && t != "incident" && t != "two_layer" && t != "three_layer" && t != "refined")
      throw ConfigError("reference.type: unknown reference '" + t + "'");
  }
  if (ref.contains("eps_in")) rc.reference.eps_in = complex_value(ref["eps_in"], "reference.eps_in");
  if (ref.contains("d")) rc.reference.d = number(ref["d"], "reference.d");
  if (ref.contains("p")) rc.reference.p_ref = integer(ref["p"], "reference.p");
  if (ref.contains("file")) {
    if (!ref["file"].is_string()) throw ConfigError("reference.file: expected a path");
    rc.reference.file = ref["file"].get<std::string>();
  }
  if (rc.reference.type == "three_layer" && !(rc.reference.d > 0.0))
    throw ConfigError("reference.d: three_layer needs a positive half-thickness");

  const json st = doc.value("study", json::object());
  check_keys(st, "study", {"sweep", "values", "range"});
  if (st.contains("sweep")) {
    rc.study.sweep = st["sweep"].get<std::string>();
    const auto& s = rc.study.sweep;
    if (s != "p" && s != "M" && s != "h" && s != "theta")
      throw ConfigError("study.sweep: must be one of p, M, h, theta");
  }
  if (st.contains("values")) rc.study.values = number_list(st["values"], "study.values");
  if (st.contains("range")) {
    const auto r = number_list(st["range"], "study.range");
    if (r.size() != 3 || !(r[2] != 0.0)) throw ConfigError("study.range: expected [first, last, step]");
    const int n = static_cast<int>(std::floor((r[1] - r[0]) / r[2] + 1e-9)) + 1;
    if (n < 1 || n > 100000) throw ConfigError("study.range: empty or too long");
    for (int i = 0; i < n; ++i) rc.study.values.push_back(r[0] + i * r[2]);
  }

  const json out = doc.value("output", json::object());
  check_keys(out, "output", {"grid", "quad_order", "coefficients", "matrix"});
  if (out.contains("grid")) {
    const auto g = number_list(out["grid"], "output.grid");
    if (g.size() != 2) throw ConfigError("output.grid: expected [nx, ny]");
    rc.output.grid_nx = static_cast<int>(g[0]);
    rc.output.grid_ny = static_cast<int>(g[1]);
  }
  if (out.contains("quad_order")) rc.output.quad_order = integer(out["quad_order"], "output.quad_order");
  if (rc.output.quad_order < 1) throw ConfigError("output.quad_order: must be >= 1");
  if (out.contains("coefficients")) rc.output.coefficients = out["coefficients"].get<bool>();
  if (out.contains("matrix")) rc.output.matrix = out["matrix"].get<bool>();

  pc.validate();
  return rc;
}

std::shared_ptr<const Mesh> build_mesh(const RunConfig& rc) {
  if (!rc.mesh_file.empty()) return std::make_shared<const Mesh>(ingest_mesh_file(rc.mesh_file, rc.problem));
  return std::make_shared<const Mesh>(generate_structured_mesh(rc.problem, rc.mesh));
}

int resolve_truncation(const RunConfig& rc) {
  if (rc.M) return *rc.M;
  try {
    return auto_truncation(rc.problem);
  } catch (const NotApplicable&) {
    throw ConfigError("discretization.M: \"auto\" needs a real eps_minus; give M explicitly");
  }
}

Discretization make_discretization(const RunConfig& rc) {
  Discretization d;
  d.config = rc.problem;
  d.mesh = build_mesh(rc);
  d.p = rc.p;
  d.M = resolve_truncation(rc);
  d.rotation = rc.rotation;
  d.solve_options.dense_threshold = rc.dense_threshold;
  return d;
}

FieldEvaluator oracle_for(const RunConfig& rc, const ProblemConfig& problem) {
  const auto& t = rc.reference.type;
  if (t == "incident") return incident_wave_evaluator(problem);
  if (t == "two_layer") return two_layer_evaluator(problem);
  if (t == "three_layer") return three_layer_evaluator(problem, rc.reference.eps_in, rc.reference.d);
  return nullptr;
}

}  // namespace tdg
