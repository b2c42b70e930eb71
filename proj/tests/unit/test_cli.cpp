#include <cstdlib>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"
#include "report.hpp"

using namespace fraclab;
using namespace fraclab::cli;
using nlohmann::json;

namespace {

RunConfig eigen_config() {
  return parse_config(json::parse(R"({"domain": {"intervals": [[-1, 1]]}, "s": 0.5, "n": 16, "k_max": 2})"), "eigen");
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(json::parse(R"({
    "domain": {"intervals": [[-1, 1]]},
    "s": [0.3, 0.7], "n": [64, 128],
    "field": {"components": ["x + 0.25*x^2"], "box": [[-2, 2]]},
    "identity": "pohozaev", "nonlinearity": {"kind": "power", "p": 4},
    "window": [2, 30], "seed": 9})"),
                                "verify");
  CHECK(cfg.s == std::vector<double>{0.3, 0.7});
  CHECK(cfg.n == std::vector<int>{64, 128});
  CHECK(cfg.identity == "pohozaev");
  CHECK(cfg.nonlinearity.p == 4.0);
  CHECK(cfg.window.hi == 30.0);
  CHECK(cfg.seed == 9);
  CHECK(cfg.make_field(1).value1(1.0) == doctest::Approx(1.25));
  CHECK_NOTHROW(validate(cfg));
}

TEST_CASE("config validation") {
  auto cfg = eigen_config();
  cfg.n = {100};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.n = {4096};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.n = {8};
  cfg.s = {1.0};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"s": "half"})"), "eigen"), ConfigError);
  CHECK_THROWS_AS(parse_config(json::parse("[1, 2]"), "eigen"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json", "eigen"), ConfigError);
  auto v = eigen_config();
  v.command = "verify";
  v.identity = "unknown";
  CHECK_THROWS_AS(validate(v), ConfigError);
}

TEST_CASE("overrides and seed environment variable") {
  auto cfg = eigen_config();
  Overrides ov;
  ov.n = 32;
  ov.s = 0.25;
  ::setenv("FRACLAB_SEED", "1234", 1);
  finalize(cfg, ov);
  ::unsetenv("FRACLAB_SEED");
  CHECK(cfg.n == std::vector<int>{32});
  CHECK(cfg.s == std::vector<double>{0.25});
  CHECK(cfg.seed == 1234);
  ::setenv("FRACLAB_SEED", "abc", 1);
  CHECK_THROWS_AS(finalize(cfg, {}), ConfigError);
  ::unsetenv("FRACLAB_SEED");
}

TEST_CASE("number formatting keeps 17 significant digits") {
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(1.0) == "1");
  const std::string d = dump(json{{"a", 0.1}, {"b", {1, 2.5}}});
  CHECK(d.find("0.10000000000000001") != std::string::npos);
  CHECK(json::parse(d)["b"][1] == 2.5);
}

TEST_CASE("tagged output paths") {
  CHECK(tagged_path("out/run.csv", "s0.5_n64") == "out/run_s0.5_n64.csv");
  CHECK(tagged_path("out.d/run", "x") == "out.d/run_x");
  CHECK(tagged_path("", "x").empty());
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(RangeError("x")) == 2);
  CHECK(exit_code_for(SupportError("x")) == 2);
  CHECK(exit_code_for(ConvergenceError("x")) == 1);
  CHECK(exit_code_for(ToleranceError("x")) == 1);
}

TEST_CASE("eigen command output is deterministic") {
  const auto cfg = eigen_config();
  std::ostringstream a, b;
  CHECK(run_eigen(cfg, a) == 0);
  CHECK(run_eigen(cfg, b) == 0);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("k lambda gap") != std::string::npos);
}
