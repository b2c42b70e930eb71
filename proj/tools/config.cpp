#include "config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace fraclab::cli {

using nlohmann::json;

namespace {

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

Interval interval_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be a [a, b] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

void read_domain(const json& d, RunConfig& cfg) {
  if (d.contains("intervals")) {
    for (const auto& iv : d.at("intervals")) {
      const Interval i = interval_from(iv, "domain interval");
      cfg.intervals.emplace_back(i.a, i.b);
    }
  }
  if (d.contains("implicit")) {
    const auto& b = d.at("box");
    if (!b.is_array() || b.size() != 4) throw ConfigError("implicit domain box must be [xmin, xmax, ymin, ymax]");
    cfg.implicit = ImplicitDomain2D{Expression::parse(d.at("implicit").get<std::string>()),
                                    {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                                     b[3].get<double>()}};
  }
}

FieldSpec read_field(const json& f) {
  FieldSpec spec;
  if (f.is_string()) {
    if (f.get<std::string>() != "identity") throw ConfigError("unknown field shorthand '" + f.get<std::string>() + "'");
    return spec;
  }
  spec.components = f.at("components").get<std::vector<std::string>>();
  if (f.contains("divergence")) spec.divergence = f.at("divergence").get<std::string>();
  if (f.contains("box")) {
    for (const auto& r : f.at("box")) {
      const Interval i = interval_from(r, "field box range");
      spec.box.ranges.emplace_back(i.a, i.b);
    }
  }
  return spec;
}

}  // namespace

Domain1D RunConfig::domain() const {
  if (intervals.empty()) throw ConfigError("command needs domain.intervals");
  return Domain1D::make(intervals);
}

VectorField RunConfig::make_field(int dim) const {
  Box box;
  if (field && !field->box.ranges.empty()) {
    box = field->box;
  } else if (dim == 1 && !intervals.empty()) {
    // Default box: the domain hull padded by its own diameter.
    const double lo = intervals.front().first;
    const double hi = intervals.back().second;
    box.ranges = {{lo - (hi - lo), hi + (hi - lo)}};
  } else if (dim == 2 && implicit) {
    box.ranges = {{implicit->box.xmin, implicit->box.xmax}, {implicit->box.ymin, implicit->box.ymax}};
  } else {
    throw ConfigError("cannot infer a box for the vector field");
  }
  if (box.dim() != dim) throw ConfigError("field box dimension does not match the domain");
  if (!field || field->components.empty()) return VectorField::identity(dim, box);
  if (static_cast<int>(field->components.size()) != dim) {
    throw ConfigError("field has " + std::to_string(field->components.size()) + " components, expected " +
                      std::to_string(dim));
  }
  std::vector<Expression> comps;
  for (const auto& c : field->components) comps.push_back(Expression::parse(c));
  std::optional<Expression> div;
  if (field->divergence) div = Expression::parse(*field->divergence);
  return VectorField::make(dim, std::move(comps), box, div);
}

RunConfig parse_config(const json& j, const std::string& command) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  cfg.command = command;
  try {
    if (j.contains("domain")) read_domain(j.at("domain"), cfg);
    if (j.contains("s")) cfg.s = scalar_or_list<double>(j, "s");
    if (j.contains("n")) cfg.n = scalar_or_list<int>(j, "n");
    cfg.beta = j.value("beta", cfg.beta);
    cfg.k_max = j.value("k_max", cfg.k_max);
    cfg.even_only = j.value("even_only", cfg.even_only);
    if (j.contains("field")) cfg.field = read_field(j.at("field"));
    if (j.contains("nonlinearity")) {
      const auto& nl = j.at("nonlinearity");
      cfg.nonlinearity.kind = nl.value("kind", cfg.nonlinearity.kind);
      cfg.nonlinearity.p = nl.value("p", cfg.nonlinearity.p);
    }
    cfg.identity = j.value("identity", cfg.identity);
    cfg.k = j.value("k", cfg.k);
    cfg.second = j.value("second", cfg.second);
    cfg.tol = j.value("tol", cfg.tol);
    if (j.contains("lemma21")) {
      const auto& l = j.at("lemma21");
      if (l.contains("support")) cfg.lemma.support = interval_from(l.at("support"), "lemma21.support");
      cfg.lemma.quad_tol = l.value("quad_tol", cfg.lemma.quad_tol);
    }
    if (j.contains("hadamard")) {
      const auto& h = j.at("hadamard");
      cfg.hadamard.h = h.value("h", cfg.hadamard.h);
      cfg.hadamard.endpoint = h.value("endpoint", cfg.hadamard.endpoint);
    }
    if (j.contains("certify")) {
      const auto& c = j.at("certify");
      if (c.contains("kinds")) cfg.certify.kinds = c.at("kinds").get<std::vector<std::string>>();
      cfg.certify.samples = c.value("samples", cfg.certify.samples);
      cfg.certify.boundary_grid = c.value("boundary_grid", cfg.certify.boundary_grid);
      cfg.certify.flux_tol = c.value("flux_tol", cfg.certify.flux_tol);
      if (c.contains("s")) cfg.certify.s = scalar_or_list<double>(c, "s");
    }
    if (j.contains("fraclap")) {
      const auto& f = j.at("fraclap");
      cfg.fraclap.function = f.value("function", cfg.fraclap.function);
      if (f.contains("points")) cfg.fraclap.points = scalar_or_list<double>(f, "points");
      cfg.fraclap.R = f.value("R", cfg.fraclap.R);
      cfg.fraclap.tol = f.value("tol", cfg.fraclap.tol);
      if (f.contains("support")) cfg.fraclap.support = interval_from(f.at("support"), "fraclap.support");
    }
    if (j.contains("window")) {
      const auto& w = j.at("window");
      if (w.is_array() && w.size() == 2) cfg.window = {w[0].get<double>(), w[1].get<double>()};
      else throw ConfigError("window must be a [lo, hi] pair");
    }
    if (j.contains("output")) {
      cfg.output.json = j.at("output").value("json", "");
      cfg.output.csv = j.at("output").value("csv", "");
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, command);
}

void finalize(RunConfig& cfg, const Overrides& ov) {
  if (ov.s) cfg.s = {*ov.s};
  if (ov.n) cfg.n = {*ov.n};
  if (ov.tol) cfg.tol = *ov.tol;
  if (ov.jobs) cfg.jobs = *ov.jobs;
  if (ov.json) cfg.output.json = *ov.json;
  if (ov.csv) cfg.output.csv = *ov.csv;
  if (const char* env = std::getenv("FRACLAB_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError("FRACLAB_SEED must be a non-negative integer");
    cfg.seed = v;
  }
  validate(cfg);
}

void validate(const RunConfig& cfg) {
  for (double s : cfg.s) {
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("s must lie in (0, 1)");
  }
  for (int n : cfg.n) {
    if (n < 8 || n > 2048 || (n & (n - 1)) != 0) {
      throw ConfigError("n = " + std::to_string(n) + " must be a power of two between 8 and 2048");
    }
  }
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.jobs < 0) throw ConfigError("jobs must be non-negative");
  if (!(cfg.beta >= 1.0)) throw ConfigError("beta must be at least 1");
  if (cfg.k_max < 1 || cfg.k < 1 || cfg.second < 1) throw ConfigError("eigenpair indices start at 1");

  const bool needs_1d = cfg.command == "eigen" || cfg.command == "verify" || cfg.command == "semilinear";
  if (needs_1d) {
    if (cfg.intervals.empty()) throw ConfigError(cfg.command + " needs domain.intervals");
    if (cfg.s.empty()) throw ConfigError(cfg.command + " needs s");
    if (cfg.n.empty()) throw ConfigError(cfg.command + " needs n");
  }
  if (cfg.command == "verify") {
    static const std::vector<std::string> known = {"pohozaev", "ros-oton-serra", "ibp",
                                                   "l2-radial", "lemma21",        "hadamard"};
    if (std::find(known.begin(), known.end(), cfg.identity) == known.end()) {
      throw ConfigError("unknown identity '" + cfg.identity + "'");
    }
    if (cfg.identity == "hadamard" && cfg.hadamard.endpoint != "left" && cfg.hadamard.endpoint != "right") {
      throw ConfigError("hadamard.endpoint must be 'left' or 'right'");
    }
  }
  if (cfg.command == "semilinear" || (cfg.command == "verify" && cfg.identity == "pohozaev")) {
    if (cfg.nonlinearity.kind != "linear" && cfg.nonlinearity.kind != "power") {
      throw ConfigError("nonlinearity.kind must be 'linear' or 'power'");
    }
    if (cfg.command == "semilinear" && cfg.nonlinearity.kind != "power") {
      throw ConfigError("semilinear needs a power nonlinearity");
    }
    if (cfg.nonlinearity.kind == "power" && !(cfg.nonlinearity.p > 2.0)) {
      throw ConfigError("power nonlinearity needs p > 2");
    }
  }
  if (cfg.command == "certify") {
    if (!cfg.field || cfg.field->components.size() != 2) throw ConfigError("certify needs a planar field");
    for (const auto& k : cfg.certify.kinds) {
      if (k != "c" && k != "c1c2" && k != "flux") throw ConfigError("unknown certificate kind '" + k + "'");
      if (k == "flux" && !cfg.implicit) throw ConfigError("flux certificate needs domain.implicit");
    }
    if (cfg.certify.samples < 2) throw ConfigError("certify.samples must be at least 2");
  }
  if (cfg.command == "fraclap") {
    if (cfg.fraclap.function.empty()) throw ConfigError("fraclap needs fraclap.function");
    if (cfg.fraclap.points.empty()) throw ConfigError("fraclap needs fraclap.points");
    if (cfg.s.empty()) throw ConfigError("fraclap needs s");
  }
}

}  // namespace fraclab::cli
