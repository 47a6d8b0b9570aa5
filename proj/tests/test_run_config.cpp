#include <doctest.h>

#include <filesystem>

#include "tdg/run_config.hpp"

using namespace tdg;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "geometry": { "L": "2*pi", "H": 3, "h": 1.5 },
    "physics": { "k": 5, "theta": "-pi/3", "eps_minus": 1.5 },
    "discretization": { "p": 5, "M": 9 }
  })");
}

std::string config_path(const std::string& name) { return std::string(TDG_CONFIG_DIR) + "/" + name + ".json"; }

RunConfig load(const std::string& name) {
  return parse_run_config(load_json_file(config_path(name)), TDG_CONFIG_DIR);
}

}  // namespace

TEST_CASE("expressions") {
  CHECK(eval_expression("-pi/3") == doctest::Approx(-kPi / 3).epsilon(1e-15));
  CHECK(eval_expression("2*pi") == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(eval_expression("1.49^2") == doctest::Approx(2.2201).epsilon(1e-15));
  CHECK(eval_expression("3.5e-2") == doctest::Approx(0.035).epsilon(1e-15));
  CHECK(eval_expression("0.75*sqrt(2)") == doctest::Approx(0.75 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(eval_expression(" 4 ") == 4.0);
  CHECK_THROWS_AS(eval_expression("2*"), ConfigError);
  CHECK_THROWS_AS(eval_expression("pi)"), ConfigError);
  CHECK_THROWS_AS(eval_expression("x"), ConfigError);
}

TEST_CASE("parsing errors name the field") {
  auto message = [](const json& doc) {
    try {
      parse_run_config(doc);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  json d = minimal();
  d["physics"].erase("k");
  CHECK(message(d).find("physics.k") != std::string::npos);

  d = minimal();
  d["physics"]["k"] = -1;
  CHECK(message(d).find("k") != std::string::npos);

  d = minimal();
  d["geometry"]["colour"] = 1;
  CHECK(message(d).find("geometry.colour") != std::string::npos);

  d = minimal();
  d["geometry"]["diagonals"] = "zigzag";
  CHECK(message(d).find("geometry.diagonals") != std::string::npos);

  d = minimal();
  d["study"] = {{"sweep", "q"}, {"values", {1, 2}}};
  CHECK(message(d).find("study.sweep") != std::string::npos);

  d = minimal();
  d["physics"]["eps_minus"] = {1.6, 0.25};
  d["discretization"]["M"] = "auto";
  const RunConfig rc = parse_run_config(d);
  CHECK_THROWS_AS(resolve_truncation(rc), ConfigError);
}

TEST_CASE("values and defaults") {
  json d = minimal();
  d["discretization"]["M"] = "auto";
  d["geometry"]["diagonals"] = "crossed";
  d["study"] = {{"sweep", "p"}, {"range", {3, 9, 2}}};
  const RunConfig rc = parse_run_config(d);
  CHECK(rc.problem.L == doctest::Approx(2 * kPi));
  CHECK(rc.problem.theta == doctest::Approx(-kPi / 3));
  CHECK(rc.problem.eps_plus == 1.0);
  CHECK(rc.problem.eps_minus == Complex(1.5));
  CHECK_FALSE(rc.M.has_value());
  CHECK(resolve_truncation(rc) == 10);
  CHECK(rc.mesh.diagonals == DiagonalPattern::Crossed);
  CHECK(rc.study.values == std::vector<double>{3, 5, 7, 9});
}

TEST_CASE("overrides") {
  json d = minimal();
  apply_override(d, "k=7");
  apply_override(d, "theta=-pi/4");
  apply_override(d, "p=12");
  apply_override(d, "geometry.h=0.5");
  apply_override(d, "discretization.flux.a=2");
  const RunConfig rc = parse_run_config(d);
  CHECK(rc.problem.k == 7.0);
  CHECK(rc.problem.theta == doctest::Approx(-kPi / 4));
  CHECK(rc.p == 12);
  CHECK(rc.mesh.h == 0.5);
  CHECK(rc.problem.flux.a == 2.0);
  CHECK_THROWS_AS(apply_override(d, "novalue"), ConfigError);
}

TEST_CASE("shipped configurations") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(TDG_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    CAPTURE(entry.path().string());
    const RunConfig rc = parse_run_config(load_json_file(entry.path().string()), TDG_CONFIG_DIR);
    const auto mesh = build_mesh(rc);
    CHECK(mesh->num_elements() > 0);
    CHECK_NOTHROW(check_boundary_materials(*mesh, rc.problem));
    CHECK_NOTHROW(check_non_trapping(rc.problem));
  }
  CHECK(count >= 10);
}

TEST_CASE("non-trapping verdicts") {
  auto verdict = [](const std::string& name) {
    const RunConfig rc = load(name);
    return check_non_trapping(rc.problem).satisfied;
  };
  CHECK(verdict("two_layer_lossless"));
  CHECK(verdict("obstacle_dirichlet"));
  // a slab denser than its surroundings guides waves
  CHECK_FALSE(verdict("three_layer_eps2"));
  CHECK_FALSE(verdict("three_layer_eps10"));
}
