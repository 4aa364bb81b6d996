#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "spide/coefficients.hpp"
#include "spide/noise.hpp"
#include "spide/symbols.hpp"
#include "spide/spectral_grid.hpp"

namespace spide {

// Spectral table of G^lambda_{s,t}: exp(int_s^t psi(r, xi) dr - lambda (t - s)).
struct Kernel {
  SpectralGrid grid;
  double s = 0.0;
  double t = 0.0;
  double lambda = 0.0;
  Multiplier table;

  Field physical() const;
  Field apply(const Field& field) const;
};

// int_s^t psi(r, xi) dr by the midpoint rule on `cells` uniform cells of [0, T]
// (one evaluation for time-homogeneous coefficients).
Multiplier integrated_symbol(const SpectralGrid& grid, const CoefficientSet& coeffs, double s, double t,
                             int cells = 512);

// Throws ConfigError("t") unless 0 <= s < t.
Kernel fundamental_kernel(const SpectralGrid& grid, double s, double t, double lambda, const CoefficientSet& coeffs,
                          int cells = 512);

Field semigroup_T(const Field& u0, double t, double lambda, const CoefficientSet& coeffs);

// Input recipes. An empty std::function means the input is zero.
using FieldRecipe = std::function<Field(double t)>;
using WienerRecipe = std::function<std::vector<Field>(double t)>;
using JumpRecipe = std::function<Field(double t, const Point& y)>;
using MarkRecipe = std::function<Field(double t, const MarkAtom& mark)>;

struct SolverInputs {
  std::optional<Field> u0;
  FieldRecipe f;
  WienerRecipe h;
  JumpRecipe g;
  MarkRecipe phi;
  double g_support = 0.0;  // g(t, x, y) = 0 for |y| > g_support; required when g is set
  // Inputs flagged constant are evaluated once; others at the left end of
  // each base cell, or at the midpoint of each solver step when `per_step`
  // is set. Jump inputs at an event time t are always evaluated at t.
  bool f_constant = false;
  bool h_constant = false;
  bool g_constant = false;
  bool phi_constant = false;
  bool per_step = false;
};

struct SolverOptions {
  double lambda = 0.0;
  double eps_cut = 0.02;
  bool transport_at_events = true;   // u(t-, x + y) - u(t-, x) at stable events
  bool transport_compensator = true; // drift of the retained transport jumps
  bool compensate_g = true;
  bool record = true;                // keep pre/post slices for every mesh point
  int angular_nodes = 64;
  // Called with the post-event spectrum at every mesh point, including t = 0.
  std::function<void(double t, std::span<const cplx> spectrum)> observer;
};

// Everything a solve depends on besides the path; shared by bundles.
struct SolverSetup {
  SpectralGrid grid;
  CoefficientSet coeffs;
  std::vector<double> base_mesh;
  SolverInputs inputs;
  SolverOptions options;
  MarkMeasure marks;
};

struct SolutionBundle {
  std::shared_ptr<const SolverSetup> setup;
  NoisePath path;
  std::vector<double> times;
  std::vector<Field> pre;   // spectral, u(t_k-) before Wiener kicks and events
  std::vector<Field> post;  // spectral, cadlag value at t_k
  std::vector<double> slice_l2;  // lattice L2 norm of each post slice

  FieldSeries physical() const;
  Field final_spectrum() const { return post.back(); }
};

// Event-driven exponential integrator in spectral space. Tables that do not
// depend on the path are built once and shared by every solve.
class MildSolver {
 public:
  // Validates coefficients (ContractError on failure).
  MildSolver(const SpectralGrid& grid, const CoefficientSet& coeffs, std::vector<double> base_mesh,
             SolverInputs inputs, SolverOptions options = {}, MarkMeasure marks = {});

  // Throws NumericError naming the time of the first non-finite slice.
  SolutionBundle solve(const NoisePath& path) const;

  const SolverSetup& setup() const noexcept { return *setup_; }
  // psi_eff - lambda for the base cell containing t.
  std::span<const cplx> rate(double t) const;
  // Jump-measure intensity c l dy / |y|^{d+alpha} used for path sampling.
  StableIntensity jump_intensity() const;

 private:
  struct CellTables;
  std::size_t cell_of(double t) const;

  std::shared_ptr<SolverSetup> setup_;
  std::vector<std::vector<cplx>> rates_;  // one per cell, or one when time-homogeneous
  std::vector<std::vector<std::vector<cplx>>> kicks_;  // i (sigma_m(t), xi) per cell and mode
  std::shared_ptr<std::vector<CellTables>> constant_;
};

SolutionBundle solve_mild(const SpectralGrid& grid, const CoefficientSet& coeffs, const SolverInputs& inputs,
                          const NoisePath& path, const SolverOptions& options = {}, const MarkMeasure& marks = {});

// Single-input wrappers. Each input slice k applies on [t_k, t_{k+1}).
FieldSeries duhamel_R(const FieldSeries& f, double lambda, const CoefficientSet& coeffs);
// `h` holds one series per Wiener mode; ShapeError when the mode count differs from the path.
FieldSeries stoch_conv_wiener(const std::vector<FieldSeries>& h, double lambda, const CoefficientSet& coeffs,
                              const NoisePath& path);
FieldSeries stoch_conv_poisson(const MarkRecipe& phi, const MarkMeasure& marks, double lambda,
                               const CoefficientSet& coeffs, const NoisePath& path, std::span<const double> base_mesh);

// (e^{i(xi, y)} - 1) applied to the pre-jump slice.
Field jump_transport(const Field& pre, const Point& y);
// Lambda g(x) = g(x - y) for one jump size.
Field lambda_shift(const Field& g_y, const Point& y);

// Nodes for int_{eps < |y| < r_max} F(y) l(t, y) c dy / |y|^{d+alpha}.
struct WeightedJump {
  Point y;
  double weight;
};
std::vector<WeightedJump> jump_nodes(const CoefficientSet& coeffs, JumpDensity which, double t, double eps,
                                     double r_max, int angular_nodes = 64);

// I_eps g(t) = int_{|y| > eps} (Lambda g - g) l dy / |y|^{d+alpha} in spectral form.
Field truncated_I(const JumpRecipe& g, double t, double eps, double g_support, const CoefficientSet& coeffs,
                  const SpectralGrid& grid);

struct LambdaIResult {
  std::vector<double> eps;
  std::vector<Field> truncated;  // I_eps g, physical
  std::vector<double> gaps;      // H^beta_p distance between successive entries
  std::optional<Field> limit;    // last entry when the sequence is Cauchy
  bool divergent = false;
};

LambdaIResult lambda_and_I(const JumpRecipe& g, double t, std::span<const double> eps_sequence, double g_support,
                           const CoefficientSet& coeffs, const SpectralGrid& grid, double beta, double p,
                           double tolerance);

// |LHS - RHS| / max(|LHS|, |RHS|) for the integral form at the final time,
// tested against `phi`. A zero test function gives 0.
double weak_residual(const SolutionBundle& bundle, const Field& phi);

}  // namespace spide
