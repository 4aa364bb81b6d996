#pragma once

#include <functional>

#include "filterlab/config.hpp"
#include "filterlab/report.hpp"

namespace filterlab {

// Called after each criterion finishes, e.g. for progress lines.
using CriterionHook = std::function<void(const CriterionResult&)>;

// Runs the selected criteria in id order with per-criterion tolerance scaling.
// C12 reruns C1..C11 in memory and compares the rendered output byte for byte.
SuiteReport run_suite(const ExperimentConfig& config, const CriterionHook& hook = {});

// Runs one of C1..C11 by id. Throws spide::ConfigError("criteria") otherwise.
CriterionResult run_criterion(const std::string& id, const ExperimentConfig& config);

}  // namespace filterlab
