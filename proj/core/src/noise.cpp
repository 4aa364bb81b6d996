#include "spide/noise.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"

namespace spide {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

Point draw_direction(CounterRng& rng, int dim) {
  if (dim == 1) return {rng.uniform() < 0.5 ? -1.0 : 1.0, 0.0};
  double theta = 2.0 * kPi * rng.uniform();
  return {std::cos(theta), std::sin(theta)};
}

// Composite 8-point Gauss-Legendre nodes on [a, b].
std::vector<std::pair<double, double>> gauss_nodes(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 8>;
  std::vector<std::pair<double, double>> out;
  const auto& xs = Rule::abscissa();
  const auto& ws = Rule::weights();
  double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    double half = 0.5 * width;
    double mid = a + (k + 0.5) * width;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      out.emplace_back(mid - half * xs[i], half * ws[i]);
      if (xs[i] != 0.0) out.emplace_back(mid + half * xs[i], half * ws[i]);
    }
  }
  return out;
}

void check_density(double value, double bound, double t, const Point& y) {
  if (!(value >= 0.0) || value > bound * (1.0 + 1e-12))
    throw ContractError("jump density " + std::to_string(value) + " outside [0, " + std::to_string(bound) +
                        "] at t=" + std::to_string(t) + ", y=(" + std::to_string(y[0]) + ", " + std::to_string(y[1]) +
                        ")");
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t tag) noexcept
    : key_(mix(mix(mix(seed) ^ (path + kGolden)) ^ (tag * kGolden + 0x632BE59BD9B4E019ull))) {}

std::uint64_t CounterRng::next_u64() noexcept { return mix(key_ + (++counter_) * kGolden); }

double CounterRng::uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double r = std::sqrt(-2.0 * std::log(uniform()));
  double theta = 2.0 * kPi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double CounterRng::exponential() noexcept { return -std::log(uniform()); }

double MarkMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

double stable_tail_mass(double alpha, int dim, double eps) { return sphere_area(dim) * std::pow(eps, -alpha) / alpha; }

std::vector<JumpEvent> sample_stable_jumps(const StableIntensity& in, double eps_cut, double horizon,
                                           std::uint64_t seed, std::uint64_t path_id, std::uint64_t tag) {
  if (!(eps_cut > 0.0)) throw ConfigError("eps-cut", "small-jump cutoff must be positive");
  if (!(in.alpha > 0.0 && in.alpha < 2.0)) throw ConfigError("alpha", "stable jumps need alpha in (0, 2)");
  std::vector<JumpEvent> events;
  if (!in.density || in.bound <= 0.0) return events;
  CounterRng rng(seed, path_id, tag);
  double rate = in.bound * stable_tail_mass(in.alpha, in.dim, eps_cut);
  double t = 0.0;
  while (true) {
    t += rng.exponential() / rate;
    if (t > horizon) break;
    double r = eps_cut * std::pow(rng.uniform(), -1.0 / in.alpha);
    Point w = draw_direction(rng, in.dim);
    Point y{r * w[0], r * w[1]};
    double accept = rng.uniform();
    double value = in.density(t, y);
    check_density(value, in.bound, t, y);
    if (accept * in.bound < value) events.push_back({t, NoiseSource::stable, y, {}});
  }
  return events;
}

std::vector<JumpEvent> sample_poisson_marks(const MarkMeasure& measure, double horizon, std::uint64_t seed,
                                            std::uint64_t path_id) {
  double total = measure.total_mass();
  if (!(total > 0.0)) throw ConfigError("Pi", "mark measure must have positive finite mass");
  for (const auto& a : measure.atoms)
    if (a.mass < 0.0) throw ConfigError("Pi", "mark masses must be nonnegative");
  CounterRng rng(seed, path_id, stream_tag::marks);
  std::vector<JumpEvent> events;
  double t = 0.0;
  while (true) {
    t += rng.exponential() / total;
    if (t > horizon) break;
    double u = rng.uniform() * total;
    std::size_t k = 0;
    double acc = measure.atoms[0].mass;
    while (acc < u && k + 1 < measure.atoms.size()) acc += measure.atoms[++k].mass;
    JumpEvent e;
    e.time = t;
    e.source = NoiseSource::mark;
    e.mark = measure.atoms[k];
    events.push_back(e);
  }
  return events;
}

WienerTable sample_wiener(int modes, std::span<const double> mesh, std::uint64_t seed, std::uint64_t path_id) {
  WienerTable table;
  table.modes = modes;
  if (modes <= 0 || mesh.size() < 2) return table;
  CounterRng rng(seed, path_id, stream_tag::wiener);
  table.increments.resize(mesh.size() - 1, std::vector<double>(static_cast<std::size_t>(modes)));
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    double scale = std::sqrt(mesh[k + 1] - mesh[k]);
    for (auto& v : table.increments[k]) v = scale * rng.normal();
  }
  return table;
}

std::vector<double> uniform_mesh(double horizon, int steps) {
  if (steps < 1) throw ConfigError("steps", "time mesh needs at least one step");
  if (!(horizon > 0.0)) throw ConfigError("T", "horizon must be positive");
  std::vector<double> mesh(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) mesh[static_cast<std::size_t>(k)] = horizon * k / steps;
  mesh.back() = horizon;
  return mesh;
}

NoisePath sample_path(const NoiseConfig& config, std::span<const double> base_mesh, std::uint64_t seed,
                      std::uint64_t path_id) {
  if (base_mesh.size() < 2) throw ConfigError("steps", "time mesh needs at least one step");
  double horizon = base_mesh.back();
  NoisePath path;
  path.seed = seed;
  path.path_id = path_id;
  path.eps_cut = config.eps_cut;
  if (config.stable) path.stable_events = sample_stable_jumps(*config.stable, config.eps_cut, horizon, seed, path_id);
  if (!config.marks.atoms.empty()) {
    auto marks = sample_poisson_marks(config.marks, horizon, seed, path_id);
    std::vector<double> taken;
    for (const auto& e : path.stable_events) taken.push_back(e.time);
    for (auto& e : marks)
      if (!std::binary_search(taken.begin(), taken.end(), e.time)) path.mark_events.push_back(e);
  }
  path.mesh.assign(base_mesh.begin(), base_mesh.end());
  for (const auto* list : {&path.stable_events, &path.mark_events})
    for (const auto& e : *list) path.mesh.push_back(e.time);
  std::sort(path.mesh.begin(), path.mesh.end());
  path.mesh.erase(std::unique(path.mesh.begin(), path.mesh.end()), path.mesh.end());
  path.wiener = sample_wiener(config.wiener_modes, path.mesh, seed, path_id);
  return path;
}

double stable_compensator(const StableIntegrand& integrand, const StableIntensity& in, double eps_cut,
                          double horizon) {
  // s = r^{-alpha} maps |y| > eps onto (0, eps^{-alpha}] with dr / r^{1+alpha} = ds / alpha.
  auto times = gauss_nodes(0.0, horizon, 16);
  auto radial = gauss_nodes(0.0, std::pow(eps_cut, -in.alpha), 64);
  auto dirs = sphere_rule(in.dim);
  double total = 0.0;
  for (const auto& [t, wt] : times) {
    double inner = 0.0;
    for (const auto& [s, ws] : radial) {
      double r = std::pow(s, -1.0 / in.alpha);
      for (const auto& dir : dirs) {
        Point y{r * dir.w[0], r * dir.w[1]};
        inner += ws * dir.weight * integrand(t, y) * in.density(t, y);
      }
    }
    total += wt * inner / in.alpha;
  }
  return total;
}

double mark_compensator(const MarkIntegrand& integrand, const MarkMeasure& measure, double horizon) {
  auto times = gauss_nodes(0.0, horizon, 16);
  double total = 0.0;
  for (const auto& [t, wt] : times)
    for (const auto& a : measure.atoms) total += wt * a.mass * integrand(t, a);
  return total;
}

double event_sum(const StableIntegrand& integrand, const NoisePath& path, double horizon) {
  double sum = 0.0;
  for (const auto& e : path.stable_events)
    if (e.time <= horizon) sum += integrand(e.time, e.y);
  return sum;
}

double event_sum(const MarkIntegrand& integrand, const NoisePath& path, double horizon) {
  double sum = 0.0;
  for (const auto& e : path.mark_events)
    if (e.time <= horizon) sum += integrand(e.time, e.mark);
  return sum;
}

double compensated_integral(const StableIntegrand& integrand, const NoisePath& path, const StableIntensity& in,
                            double horizon) {
  return event_sum(integrand, path, horizon) - stable_compensator(integrand, in, path.eps_cut, horizon);
}

double compensated_integral(const MarkIntegrand& integrand, const NoisePath& path, const MarkMeasure& measure,
                            double horizon) {
  return event_sum(integrand, path, horizon) - mark_compensator(integrand, measure, horizon);
}

void write_events_csv(std::ostream& os, const NoisePath& path) {
  auto old = os.precision(17);
  os << "time,source,mark1,mark2\n";
  for (const auto& e : path.stable_events) os << e.time << ",stable," << e.y[0] << ',' << e.y[1] << '\n';
  for (const auto& e : path.mark_events) os << e.time << ",mark," << e.mark.index << ',' << e.mark.value << '\n';
  os.precision(old);
}

}  // namespace spide
