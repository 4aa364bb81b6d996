#include "filterlab/suite.hpp"

#include <chrono>

#include "filterlab/experiments.hpp"
#include "spide/errors.hpp"

namespace filterlab {

namespace {

using Runner = CriterionResult (*)(const ExperimentConfig&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"C1", lp_partition_check},  {"C2", kernel_law_check},     {"C3", operator_bounds_check},
      {"C4", lambda_scaling_check}, {"C5", isometry_check},       {"C6", continuity_check},
      {"C7", regularity_check},     {"C8", weak_form_check},      {"C9", reduction_check},
      {"C10", zakai_check},         {"C11", approximation_check},
  };
  return table;
}

nlohmann::json environment(const ExperimentConfig& config) {
  return {{"seed", config.seed}, {"paths", config.paths}, {"config", to_json(config)}};
}

// Everything the suite would write for C1..C11, without timing data.
SuiteReport numeric_pass(const ExperimentConfig& config, const CriterionHook& hook) {
  SuiteReport report;
  report.environment = environment(config);
  for (const auto& id : criterion_ids()) {
    if (id == "C12" || !config.selected(id)) continue;
    auto r = run_criterion(id, config);
    r.scale_tolerances(config.scale_for(id));
    if (hook) hook(r);
    report.criteria.push_back(std::move(r));
  }
  return report;
}

CriterionResult determinism(const ExperimentConfig& config, const SuiteReport& first) {
  CriterionResult r;
  r.id = "C12";
  r.name = "determinism";
  r.anchor = "identical output for identical config and seed";
  auto a = render_results(first);
  auto b = render_results(numeric_pass(config, {}));
  std::size_t differing = 0;
  for (const auto& [name, bytes] : a) {
    auto it = b.find(name);
    if (it == b.end() || it->second != bytes) {
      ++differing;
      r.notes.push_back("differs: " + name);
    }
  }
  for (const auto& [name, bytes] : b)
    if (!a.count(name)) {
      ++differing;
      r.notes.push_back("only in rerun: " + name);
    }
  r.checks.push_back({"files differing between runs", static_cast<double>(differing), 0.0});
  r.notes.push_back("compared " + std::to_string(a.size()) + " rendered files");
  r.scale_tolerances(config.scale_for("C12"));
  return r;
}

}  // namespace

CriterionResult run_criterion(const std::string& id, const ExperimentConfig& config) {
  auto it = runners().find(id);
  if (it == runners().end()) throw spide::ConfigError("criteria", "no runnable criterion named " + id);
  return it->second(config);
}

SuiteReport run_suite(const ExperimentConfig& config, const CriterionHook& hook) {
  SuiteReport report = numeric_pass(config, hook);
  if (config.selected("C12")) {
    CriterionResult r;
    if (config.determinism_rerun) {
      r = determinism(config, report);
    } else {
      r.id = "C12";
      r.name = "determinism";
      r.anchor = "identical output for identical config and seed";
      r.notes.push_back("rerun disabled by config");
    }
    if (hook) hook(r);
    report.criteria.push_back(std::move(r));
  }
  return report;
}

}  // namespace filterlab
