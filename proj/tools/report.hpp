#pragma once

#include <string>
#include <vector>

#include <fraclab/analysis.hpp>
#include <fraclab/errors.hpp>
#include <fraclab/fields.hpp>
#include <fraclab/solve.hpp>

#include "json.hpp"

namespace fraclab::cli {

/// %.17g; every number leaving the tool goes through this.
std::string fmt(double v);

nlohmann::json to_json(const TraceEstimate& t);
nlohmann::json to_json(const PohozaevReport& r);
nlohmann::json to_json(const HadamardReport& r);
nlohmann::json to_json(const ConditionCertificate& c);
nlohmann::json to_json(const SpectrumReport& r);
nlohmann::json to_json(const Vector& v);

/// Plain CSV table; cells are written verbatim.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// Writes text to `path` (no-op for an empty path).
void write_file(const std::string& path, const std::string& text);

/// Serializes with 17-digit numbers and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace fraclab::cli
