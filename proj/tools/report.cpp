#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace fraclab::cli {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const TraceEstimate& t) {
  return {{"x", t.point.x},         {"normal", t.point.normal},   {"psi", t.psi},
          {"c1", t.c1},             {"delta_min", t.delta_min},   {"delta_max", t.delta_max},
          {"residual", t.residual}, {"nodes_used", t.nodes_used}};
}

json to_json(const PohozaevReport& r) {
  json j = {{"identity", to_string(r.identity)},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"abs_residual", r.abs_residual},
            {"rel_residual", r.rel_residual},
            {"n", r.n},
            {"s", r.s}};
  j["history"] = json::array();
  for (const auto& [n, res] : r.history) j["history"].push_back({{"n", n}, {"rel_residual", res}});
  j["traces"] = json::array();
  for (const auto& t : r.traces) j["traces"].push_back(to_json(t));
  j["terms"] = json::object();
  for (const auto& [name, v] : r.terms) j["terms"][name] = v;
  return j;
}

json to_json(const HadamardReport& r) {
  return {{"k", r.k},
          {"point", {{"x", r.point.x}, {"normal", r.point.normal}}},
          {"lambda", r.lambda},
          {"psi", r.psi},
          {"fd_slope", r.fd_slope},
          {"formula", r.formula},
          {"rel_error", r.rel_error},
          {"h", r.h},
          {"even_only", r.even_only},
          {"full_index", r.full_index}};
}

json to_json(const ConditionCertificate& c) {
  json j = {{"kind", to_string(c.kind)},
            {"constants", c.constants},
            {"samples", c.samples},
            {"seed", c.seed},
            {"pass", c.pass},
            {"divergence_source", to_string(c.divergence_source)},
            {"note", c.note}};
  j["min_flux"] = c.min_flux ? json(*c.min_flux) : json(nullptr);
  return j;
}

json to_json(const SpectrumReport& r) {
  return {{"lambdas", r.lambdas},           {"gaps", r.gaps},
          {"cluster_sizes", r.cluster_sizes}, {"max_cluster", r.max_cluster},
          {"components", r.components},     {"even_only", r.even_only},
          {"note", r.note}};
}

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string Csv::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

namespace {

void emit(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        emit(it.value(), out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump(const json& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

}  // namespace fraclab::cli
