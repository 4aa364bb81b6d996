#include "filterlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "spide/errors.hpp"
#include "spide/snapshot.hpp"

namespace filterlab {

using nlohmann::json;

namespace {

// Utilization of a check: value / tol, with a zero tolerance mapping any
// positive value to infinity.
double utilization(const Check& c) {
  if (c.tol > 0.0) return c.value / c.tol;
  return c.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

std::string csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

}  // namespace

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool CriterionResult::pass() const {
  if (checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass()) return false;
  return true;
}

const Check* CriterionResult::worst() const {
  const Check* w = nullptr;
  for (const auto& c : checks)
    if (!w || utilization(c) > utilization(*w)) w = &c;
  return w;
}

void CriterionResult::scale_tolerances(double factor) {
  for (auto& c : checks) c.tol *= factor;
}

bool SuiteReport::pass() const {
  for (const auto& c : criteria)
    if (!c.pass()) return false;
  return true;
}

json to_json(const SuiteReport& report) {
  json criteria = json::array();
  for (const auto& c : report.criteria) {
    json checks = json::array();
    for (const auto& k : c.checks)
      checks.push_back({{"label", k.label}, {"value", finite_or_string(k.value)}, {"tol", k.tol}, {"pass", k.pass()}});
    const Check* w = c.worst();
    criteria.push_back({{"name", c.id + " " + c.name},
                        {"anchor", c.anchor},
                        {"value", w ? finite_or_string(w->value) : json(nullptr)},
                        {"tol", w ? json(w->tol) : json(nullptr)},
                        {"pass", c.pass()},
                        {"checks", checks},
                        {"notes", c.notes}});
  }
  return {{"pass", report.pass()}, {"criteria", criteria}, {"environment", report.environment}};
}

RenderedFiles render_results(const SuiteReport& report) {
  RenderedFiles files;
  files["suite.json"] = to_json(report).dump(2) + "\n";
  for (const auto& c : report.criteria) {
    for (const auto& t : c.tables) files["tables/" + t.name + ".csv"] = csv(t);
    for (const auto& f : c.fields) {
      auto bytes = spide::encode_snapshot(f.slices, false);
      files["fields/" + f.name + ".sfld"] = std::string(bytes.begin(), bytes.end());
    }
  }
  return files;
}

void write_files(const RenderedFiles& files, const std::filesystem::path& dir) {
  std::error_code ec;
  for (const char* sub : {"", "tables", "fields"}) {
    std::filesystem::create_directories(dir / sub, ec);
    if (ec) throw spide::IoError("cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  for (const auto& [name, content] : files) {
    auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw spide::IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw spide::IoError("write failed for " + path.string());
  }
}

void emit_results(const SuiteReport& report, const std::filesystem::path& dir) {
  write_files(render_results(report), dir);
}

}  // namespace filterlab
