#pragma once

#include "spide/coefficients.hpp"
#include "spide/spectral_grid.hpp"

namespace spide {

struct QuadratureOptions {
  int nodes_per_decade = 64;
  double tolerance = 1e-6;  // relative target checked against a doubled rule
  double oscillation_cutoff = 64.0;  // |a| r beyond which the asymptotic tail is used
};

// Jump part of the symbol for a density homogeneous of degree 0, evaluated by
// the closed form on the sphere (two-point sum in d = 1, aligned_sphere_rule in d = 2).
cplx homogeneous_jump_symbol(double alpha, int dim, const Point& xi, const std::function<double(const Point&)>& profile,
                             int angular_panels = 4);

// Jump part of the symbol for a general bounded density by radial-angular quadrature.
// Throws NumericError when the doubled rule disagrees by more than 10x the tolerance.
cplx quadrature_jump_symbol(double alpha, int dim, const Point& xi, const std::function<double(const Point&)>& density,
                            const QuadratureOptions& opts = {});

// Closed form of the leading symbol: jump part from m0 (alpha < 2), plus
// i(b, xi) at alpha = 1 and -1/2 xi^T B xi at alpha = 2.
cplx symbol_closed_form(double t, const Point& xi, const CoefficientSet& coeffs);

// Generator symbol with m by quadrature, plus the same drift/diffusion terms.
cplx symbol_quadrature(double t, const Point& xi, const CoefficientSet& coeffs, const QuadratureOptions& opts = {});

// Symbol of A^(alpha) as used by the solver: closed form over m when m is
// homogeneous, quadrature otherwise.
cplx generator_symbol(double t, const Point& xi, const CoefficientSet& coeffs);

enum class JumpDensity { m, l };

// Pieces of the jump symbol split at |y| = eps:
//   small       = int_{|y|<=eps} [e^{i xi y} - 1 - chi i xi y] nu
//   compensator = -int_{|y|>eps} [e^{i xi y} - 1] nu    (drift of the retained jumps)
//   centering   = -int_{|y|>eps} chi i xi y nu
// so that small - compensator + centering equals the jump symbol.
struct TruncationParts {
  cplx small;
  cplx compensator;
  cplx centering;
};

TruncationParts truncation_correction(double eps, double t, const Point& xi, const CoefficientSet& coeffs,
                                      JumpDensity which = JumpDensity::m, double r_max = 1e12);

// Lattice tables, Nyquist entries zero.
Multiplier generator_multiplier(const SpectralGrid& grid, double t, const CoefficientSet& coeffs);
Multiplier compensator_multiplier(const SpectralGrid& grid, double t, const CoefficientSet& coeffs, double eps,
                                  JumpDensity which = JumpDensity::l);

// A^(alpha) u by spectral multiplication. Throws ContractError when coeffs fail validate_A.
Field apply_generator(const Field& field, double t, const CoefficientSet& coeffs);

}  // namespace spide
