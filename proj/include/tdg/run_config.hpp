#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdg/analysis.hpp"
#include "tdg/geometry.hpp"
#include "tdg/problem.hpp"

namespace tdg {

/// Evaluates "-pi/3", "2*pi", "1.49^2", "3.5e-2" and plain numbers.
double eval_expression(const std::string& text);

struct ReferenceSpec {
  std::string type = "none";  // none | incident | two_layer | three_layer | refined
  Complex eps_in{1.0, 0.0};   // three_layer / modes
  double d = 0.0;             // three_layer / modes
  int p_ref = 0;              // refined: 0 selects max(sweep) + 1
  std::string file;           // refined: coefficient file to load or create, relative to the output directory
};

struct StudySpec {
  std::string sweep;  // p | M | h | theta
  std::vector<double> values;
};

struct OutputSpec {
  int grid_nx = 0;
  int grid_ny = 0;
  int quad_order = 15;
  bool coefficients = true;
  bool matrix = false;
};

struct RunConfig {
  ProblemConfig problem;
  StructuredMeshSpec mesh;
  std::string mesh_file;
  int p = 10;
  std::optional<int> M;  // empty means "auto"
  double rotation = 0.0;
  int dense_threshold = kDefaultDenseThreshold;
  ReferenceSpec reference;
  StudySpec study;
  OutputSpec output;
  std::string base_dir;  // directory of the config file, for relative paths
};

/// Parses the JSON document. Throws ConfigError naming the offending field.
RunConfig parse_run_config(const nlohmann::json& doc, const std::string& base_dir = ".");
nlohmann::json load_json_file(const std::string& path);

/// Applies "a.b.c=value"; value is parsed as JSON when possible, else kept as
/// a string. Short keys k, theta, p, M, h map to their sections.
void apply_override(nlohmann::json& doc, const std::string& assignment);

std::shared_ptr<const Mesh> build_mesh(const RunConfig& rc);
/// Explicit M, or ceil(M*) + 1 (ConfigError for complex eps- without M).
int resolve_truncation(const RunConfig& rc);
Discretization make_discretization(const RunConfig& rc);
/// Oracle evaluator for the configured reference, or nullptr for none/refined.
FieldEvaluator oracle_for(const RunConfig& rc, const ProblemConfig& problem);

}  // namespace tdg
