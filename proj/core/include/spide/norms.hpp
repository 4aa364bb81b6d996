#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spide/spectral_grid.hpp"

namespace spide {

enum class NormFamily { H, B, Hbar, Bbar };
enum class NormDomain { space, spacetime };

struct NormSpec {
  NormFamily family = NormFamily::H;
  double beta = 0.0;
  double p = 2.0;
  double r = 0.0;  // inner integrability, mixed families only
  NormDomain domain = NormDomain::space;
  bool monte_carlo = false;
};

struct NormValue {
  NormSpec spec;
  double value = 0.0;
  std::optional<double> mc_stderr;
};

// Vector-valued slice: components g_i with inner weights w_i, reduced
// pointwise as (sum_i w_i |g_i(x)|^r)^{1/r}. Covers the Levy-weighted
// jump families (w_i = quadrature weight times l), the mark measure
// (w_i = Pi mass) and truncated Y-valued fields (w_i = 1, r = 2).
struct WeightedSlice {
  std::vector<Field> components;
  std::vector<double> weights;
};

// Lattice L_p norm with h^d weights.
double lattice_lp(const Field& field, double p);

NormValue sobolev_norm(const Field& field, double beta, double p);
NormValue besov_norm(const Field& field, double beta, double p);
NormValue equivalent_H_norm(const Field& field, double beta, double p);

// Hbar (Bessel potential per component) or Bbar (LP blocks) family.
NormValue mixed_jump_norm(const WeightedSlice& g, NormFamily family, double beta, double p, double r);

// Left-endpoint Riemann sum over the mesh of slice norms^p, p-th root.
// H and B apply to `series`; sums weight slice k by t_{k+1} - t_k.
NormValue spacetime_norm(const FieldSeries& series, const NormSpec& spec);
NormValue spacetime_mixed_norm(std::span<const double> times, std::span<const WeightedSlice> slices, const NormSpec& spec);

// p-th power of a norm value as accumulated per path.
double spacetime_norm_power(const FieldSeries& series, const NormSpec& spec);
double spacetime_mixed_norm_power(std::span<const double> times, std::span<const WeightedSlice> slices,
                                  const NormSpec& spec);

// Monte Carlo expectation: mean of per-path norm^p, p-th root, delta-method stderr.
// `powers` is summed in the given order; callers sort by seed.
NormValue monte_carlo_norm(std::span<const double> powers, const NormSpec& spec);

// Fourier transform of the standard unit-mass bump supported in |x| <= 1.
double bump_transform(double abs_xi, int dim);
Field mollify(const Field& field, double eps);
FieldSeries steklov_smooth(const FieldSeries& g, int n);

std::string family_name(NormFamily family);
std::string csv_header();
std::string csv_row(const NormValue& value, const std::string& seed_range);

}  // namespace spide
