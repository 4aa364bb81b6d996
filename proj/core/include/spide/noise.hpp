#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "spide/coefficients.hpp"
#include "spide/spectral_grid.hpp"

namespace spide {

// Counter-based stream keyed by (seed, path, tag). Each draw hashes the key
// with an incrementing counter, so streams never share state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t tag) noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // open interval (0, 1)
  double normal() noexcept;
  double exponential() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

namespace stream_tag {
inline constexpr std::uint64_t stable = 1;
inline constexpr std::uint64_t marks = 2;
inline constexpr std::uint64_t wiener = 3;
inline constexpr std::uint64_t observation = 4;
}  // namespace stream_tag

enum class NoiseSource { stable, mark };

// Atom of a finite mark measure on U, represented as (index, value) pairs.
struct MarkAtom {
  int index = 0;
  double value = 0.0;
  double mass = 0.0;
};

struct MarkMeasure {
  std::vector<MarkAtom> atoms;
  double total_mass() const noexcept;
};

struct JumpEvent {
  double time = 0.0;
  NoiseSource source = NoiseSource::stable;
  Point y{0.0, 0.0};  // stable jumps
  MarkAtom mark;      // mark events; mass unused
};

// Jump intensity density(t, y) dy dt / |y|^{d+alpha}, density <= bound.
struct StableIntensity {
  double alpha = 1.5;
  int dim = 1;
  Density density;
  double bound = 1.0;
};

// Wiener increments on a time mesh: increments[k][i] is the mode-i increment on [t_k, t_{k+1}].
struct WienerTable {
  int modes = 0;
  std::vector<std::vector<double>> increments;
};

struct NoisePath {
  std::vector<JumpEvent> stable_events;
  std::vector<JumpEvent> mark_events;
  std::vector<double> mesh;  // base mesh with event times inserted
  WienerTable wiener;        // one row per mesh interval
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  double eps_cut = 0.02;
};

struct NoiseConfig {
  std::optional<StableIntensity> stable;
  MarkMeasure marks;  // empty: no mark events
  int wiener_modes = 0;
  double eps_cut = 0.02;
};

// Mass of dy / |y|^{d+alpha} on |y| > eps.
double stable_tail_mass(double alpha, int dim, double eps);

// Thinning from bound * dy dt / |y|^{d+alpha} on |y| > eps_cut. Throws
// ContractError when the density leaves [0, bound].
std::vector<JumpEvent> sample_stable_jumps(const StableIntensity& intensity, double eps_cut, double horizon,
                                           std::uint64_t seed, std::uint64_t path_id = 0,
                                           std::uint64_t tag = stream_tag::stable);

// Throws ConfigError("Pi") when the total mass is not positive.
std::vector<JumpEvent> sample_poisson_marks(const MarkMeasure& measure, double horizon, std::uint64_t seed,
                                            std::uint64_t path_id = 0);

WienerTable sample_wiener(int modes, std::span<const double> mesh, std::uint64_t seed, std::uint64_t path_id = 0);

// Samples both jump lists, merges their times into `base_mesh` and draws the
// Wiener increments on the merged mesh. Mark events colliding with a stable
// event time are dropped.
NoisePath sample_path(const NoiseConfig& config, std::span<const double> base_mesh, std::uint64_t seed,
                      std::uint64_t path_id = 0);

std::vector<double> uniform_mesh(double horizon, int steps);

using StableIntegrand = std::function<double(double t, const Point& y)>;
using MarkIntegrand = std::function<double(double t, const MarkAtom& mark)>;

// Sum of the integrand over the path's events up to `horizon`.
double event_sum(const StableIntegrand& integrand, const NoisePath& path, double horizon);
double event_sum(const MarkIntegrand& integrand, const NoisePath& path, double horizon);

// Realized integral against the compensated jump measure on |y| > eps_cut:
// sum over events minus the compensator by quadrature.
double compensated_integral(const StableIntegrand& integrand, const NoisePath& path, const StableIntensity& intensity,
                            double horizon);
double compensated_integral(const MarkIntegrand& integrand, const NoisePath& path, const MarkMeasure& measure,
                            double horizon);

// Compensator integrals themselves; the second moment of the compensated
// integral equals the compensator of the squared integrand.
double stable_compensator(const StableIntegrand& integrand, const StableIntensity& intensity, double eps_cut,
                          double horizon);
double mark_compensator(const MarkIntegrand& integrand, const MarkMeasure& measure, double horizon);

// Debug dump: time,source,mark1,mark2 per event, stable events first.
void write_events_csv(std::ostream& os, const NoisePath& path);

}  // namespace spide
