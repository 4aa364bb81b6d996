#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spide/spectral_grid.hpp"

namespace filterlab {

// One measured quantity against its tolerance. Passes when value <= tol.
struct Check {
  std::string label;
  double value = 0.0;
  double tol = 0.0;
  bool pass() const { return value <= tol; }
};

struct Table {
  std::string name;  // file stem under tables/
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct FieldDump {
  std::string name;  // file stem under fields/
  std::vector<spide::Field> slices;
};

struct CriterionResult {
  std::string id;
  std::string name;
  std::string anchor;
  std::vector<Check> checks;
  std::vector<std::string> notes;  // diagnostics that do not gate the result
  std::vector<Table> tables;
  std::vector<FieldDump> fields;

  bool pass() const;
  // The check closest to (or furthest past) its tolerance.
  const Check* worst() const;
  void scale_tolerances(double factor);
};

struct SuiteReport {
  std::vector<CriterionResult> criteria;
  nlohmann::json environment;

  bool pass() const;
};

// Shortest round-trip decimal text of a double.
std::string num(double v);

nlohmann::json to_json(const SuiteReport& report);

// File name (relative to the output directory) to contents, in write order.
using RenderedFiles = std::map<std::string, std::string>;
RenderedFiles render_results(const SuiteReport& report);

// Writes suite.json, tables/*.csv and fields/*.sfld. Throws spide::IoError.
void emit_results(const SuiteReport& report, const std::filesystem::path& dir);
void write_files(const RenderedFiles& files, const std::filesystem::path& dir);

}  // namespace filterlab
