#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <fraclab/analysis.hpp>
#include <fraclab/domain.hpp>
#include <fraclab/errors.hpp>
#include <fraclab/fields.hpp>

#include "json.hpp"

namespace fraclab::cli {

/// Raised for anything wrong with the configuration itself; maps to exit 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct FieldSpec {
  std::vector<std::string> components;
  std::optional<std::string> divergence;
  Box box;
};

struct NonlinearitySpec {
  std::string kind = "linear";  // "linear" (eigenpair) or "power"
  double p = 0.0;
};

struct LemmaSpec {
  Interval support{-0.5, 0.5};
  double quad_tol = 1e-6;
};

struct HadamardSpec {
  double h = 1e-3;
  std::string endpoint = "right";
};

struct CertifySpec {
  std::vector<std::string> kinds = {"c", "c1c2", "flux"};
  int samples = 2000;
  int boundary_grid = 200;
  double flux_tol = 1e-6;
  std::vector<double> s;
};

struct FracLapSpec {
  std::string function;
  std::vector<double> points;
  double R = 20.0;
  double tol = 1e-8;
  std::optional<Interval> support;
};

struct OutputSpec {
  std::string json;
  std::string csv;
};

struct RunConfig {
  std::string command;
  std::vector<std::pair<double, double>> intervals;
  std::optional<ImplicitDomain2D> implicit;
  std::vector<double> s;
  std::vector<int> n;
  double beta = 2.0;
  int k_max = 4;
  bool even_only = false;
  std::optional<FieldSpec> field;
  NonlinearitySpec nonlinearity;
  std::string identity = "ros-oton-serra";
  int k = 1;
  int second = 2;  // second eigenpair index for the two-function identity
  double tol = 0.05;
  LemmaSpec lemma;
  HadamardSpec hadamard;
  CertifySpec certify;
  FracLapSpec fraclap;
  TraceWindow window;
  OutputSpec output;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 0;  // 0: one worker per hardware thread

  Domain1D domain() const;
  VectorField make_field(int dim) const;
};

/// Command-line overrides applied after the file is read.
struct Overrides {
  std::optional<double> s;
  std::optional<int> n;
  std::optional<double> tol;
  std::optional<int> jobs;
  std::optional<std::string> json;
  std::optional<std::string> csv;
};

RunConfig parse_config(const nlohmann::json& j, const std::string& command);
RunConfig load_config(const std::string& path, const std::string& command);

/// Applies overrides, then FRACLAB_SEED, then validates.
void finalize(RunConfig& cfg, const Overrides& ov);

void validate(const RunConfig& cfg);

}  // namespace fraclab::cli
