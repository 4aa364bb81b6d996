#pragma once

#include <vector>

#include "filterlab/config.hpp"
#include "filterlab/report.hpp"
#include "spide/coefficients.hpp"
#include "spide/noise.hpp"
#include "spide/spectral_grid.hpp"

namespace filterlab {

// Smallest power-of-two N >= floor_nodes with exp(-t |xi_max|^alpha) <= 1e-15
// on [-L, L), capped at 2^21.
int kernel_nodes(double alpha, double t, double half_width, int floor_nodes = 256);

// Observed jump path Y_t = -(sum of event jumps up to t) of a transport path.
double observed_shift(const spide::NoisePath& path, double t);

// (u0 * G_{0,t})(x - shift) for the jump density `m1` (time-homogeneous).
// `hidden` adds the small jumps |y| <= eps_hidden of the observation density
// that a truncated path does not record (0 disables). ConfigError("u0") when
// u0 has negative mass.
spide::Field conditional_oracle(const spide::Field& u0, const spide::CoefficientSet& m1, double shift, double t,
                                const spide::CoefficientSet* hidden = nullptr, double eps_hidden = 0.0);

struct ZakaiOutcome {
  double sup_distance = 0.0;
  double l1_distance = 0.0;
  double worst_mass_error = 0.0;
  double min_value = 0.0;
  std::size_t observed_jumps = 0;
  spide::Field filter;
  spide::Field oracle;
  Table trace;  // t, mass, min, sup distance, observed shift
};

// Filter density of the jump-observation model against the conditional oracle.
ZakaiOutcome zakai_demo(const ZakaiSpec& spec, std::uint64_t seed);

// Kernel mass, minimum and closed-form distances across the alpha sweep, and
// the LP block L1 table.
CriterionResult kernel_report(const ExperimentConfig& config);

struct RegularityRow {
  int experiment = 0;
  int nodes = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

// lhs / rhs, defined as 0 when every input vanishes.
double regularity_ratio(double lhs, double rhs);

// Ratio of the solution norm to the sum of input norms of the uncorrelated
// estimate over `experiments` randomized runs and the given grids.
std::vector<RegularityRow> regularity_sweep(const ExperimentConfig& config, int experiments,
                                            const std::vector<int>& nodes, int paths);

// Acceptance criteria.
CriterionResult lp_partition_check(const ExperimentConfig& config);    // C1
CriterionResult kernel_law_check(const ExperimentConfig& config);      // C2
CriterionResult operator_bounds_check(const ExperimentConfig& config); // C3
CriterionResult lambda_scaling_check(const ExperimentConfig& config);  // C4
CriterionResult isometry_check(const ExperimentConfig& config);        // C5
CriterionResult continuity_check(const ExperimentConfig& config);      // C6
CriterionResult regularity_check(const ExperimentConfig& config);      // C7
CriterionResult weak_form_check(const ExperimentConfig& config);       // C8
CriterionResult reduction_check(const ExperimentConfig& config);       // C9
CriterionResult zakai_check(const ExperimentConfig& config);           // C10
CriterionResult approximation_check(const ExperimentConfig& config);   // C11

}  // namespace filterlab
