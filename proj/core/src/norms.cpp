#include "spide/norms.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "spide/errors.hpp"

namespace spide {

namespace {

void require_p(double p) {
  if (!(p >= 1.0)) throw ConfigError("p", "integrability must be >= 1");
}

double lp_power(const Field& phys, double p) {
  double s = 0.0;
  for (const auto& v : phys.values()) s += std::pow(std::abs(v), p);
  return s * phys.grid().cell_volume();
}

Multiplier bessel_table(const SpectralGrid& grid, double beta) {
  return make_multiplier(grid, [beta](const Point& xi) { return std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * beta); });
}

Field spectral_product(const Field& spec, std::span<const double> table) {
  Field out = spec;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= table[i];
  return out;
}

Field spectral_product(const Field& spec, std::span<const cplx> table) {
  Field out = spec;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= table[i];
  return out;
}

double scalar_power(const Field& field, NormFamily family, double beta, double p) {
  Field spec = to_spectral(field);
  if (family == NormFamily::H) return lp_power(inverse(spectral_product(spec, bessel_table(spec.grid(), beta))), p);
  LPFilterBank bank(spec.grid());
  double total = 0.0;
  for (int j = 0; j <= bank.max_level(); ++j)
    total += std::pow(2.0, j * beta * p) * lp_power(inverse(spectral_product(spec, bank.level(j))), p);
  return total;
}

double inner_power(const std::vector<Field>& phys, const std::vector<double>& weights, double r, double p) {
  if (phys.empty()) return 0.0;
  const auto& grid = phys.front().grid();
  double s = 0.0;
  for (std::size_t x = 0; x < grid.size(); ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < phys.size(); ++i) acc += weights[i] * std::pow(std::abs(phys[i][x]), r);
    s += std::pow(acc, p / r);
  }
  return s * grid.cell_volume();
}

double mixed_power(const WeightedSlice& g, NormFamily family, double beta, double p, double r) {
  if (g.components.size() != g.weights.size()) throw ShapeError("jump samples and weights are not aligned");
  if (!(r >= 1.0)) throw ConfigError("r", "inner integrability must be >= 1");
  if (g.components.empty()) return 0.0;
  const auto& grid = g.components.front().grid();
  std::vector<Field> spec;
  spec.reserve(g.components.size());
  for (const auto& c : g.components) spec.push_back(to_spectral(c));
  auto filtered = [&](auto table) {
    std::vector<Field> out;
    out.reserve(spec.size());
    for (const auto& s : spec) out.push_back(inverse(spectral_product(s, table)));
    return out;
  };
  if (family == NormFamily::Hbar) {
    auto table = bessel_table(grid, beta);
    return inner_power(filtered(std::span<const cplx>(table)), g.weights, r, p);
  }
  if (family != NormFamily::Bbar) throw ConfigError("family", "mixed norm needs the Hbar or Bbar family");
  LPFilterBank bank(grid);
  double total = 0.0;
  for (int j = 0; j <= bank.max_level(); ++j)
    total += std::pow(2.0, j * beta * p) * inner_power(filtered(bank.level(j)), g.weights, r, p);
  return total;
}

// Unit-mass radial bump profile and its transform by composite Gauss-Legendre on [0, 1].
struct BumpRule {
  std::vector<double> r;
  std::vector<double> w;
};

const BumpRule& bump_rule() {
  static const BumpRule rule = [] {
    using Rule = boost::math::quadrature::gauss<double, 8>;
    BumpRule out;
    const int panels = 128;
    for (int k = 0; k < panels; ++k) {
      double lo = static_cast<double>(k) / panels;
      double half = 0.5 / panels;
      double mid = lo + half;
      const auto& xs = Rule::abscissa();
      const auto& ws = Rule::weights();
      for (std::size_t i = 0; i < xs.size(); ++i) {
        out.r.push_back(mid - half * xs[i]);
        out.w.push_back(half * ws[i]);
        out.r.push_back(mid + half * xs[i]);
        out.w.push_back(half * ws[i]);
      }
    }
    return out;
  }();
  return rule;
}

double bump(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

double bump_mass(int dim) {
  static const double mass1 = [] {
    const auto& q = bump_rule();
    double s = 0.0;
    for (std::size_t i = 0; i < q.r.size(); ++i) s += 2.0 * q.w[i] * bump(q.r[i]);
    return s;
  }();
  static const double mass2 = [] {
    const auto& q = bump_rule();
    double s = 0.0;
    for (std::size_t i = 0; i < q.r.size(); ++i) s += 2.0 * kPi * q.w[i] * q.r[i] * bump(q.r[i]);
    return s;
  }();
  return dim == 1 ? mass1 : mass2;
}

}  // namespace

double lattice_lp(const Field& field, double p) {
  require_p(p);
  return std::pow(lp_power(to_physical(field), p), 1.0 / p);
}

NormValue sobolev_norm(const Field& field, double beta, double p) {
  require_p(p);
  return {{NormFamily::H, beta, p, 0.0, NormDomain::space, false},
          std::pow(scalar_power(field, NormFamily::H, beta, p), 1.0 / p),
          std::nullopt};
}

NormValue besov_norm(const Field& field, double beta, double p) {
  require_p(p);
  return {{NormFamily::B, beta, p, 0.0, NormDomain::space, false},
          std::pow(scalar_power(field, NormFamily::B, beta, p), 1.0 / p),
          std::nullopt};
}

NormValue equivalent_H_norm(const Field& field, double beta, double p) {
  require_p(p);
  Field spec = to_spectral(field);
  LPFilterBank bank(spec.grid());
  std::vector<double> square(spec.size(), 0.0);
  for (int j = 0; j <= bank.max_level(); ++j) {
    Field block = inverse(spectral_product(spec, bank.level(j)));
    double scale = std::pow(2.0, 2.0 * beta * j);
    for (std::size_t x = 0; x < square.size(); ++x) square[x] += scale * std::norm(block[x]);
  }
  double s = 0.0;
  for (double v : square) s += std::pow(v, 0.5 * p);
  s *= spec.grid().cell_volume();
  return {{NormFamily::H, beta, p, 0.0, NormDomain::space, false}, std::pow(s, 1.0 / p), std::nullopt};
}

NormValue mixed_jump_norm(const WeightedSlice& g, NormFamily family, double beta, double p, double r) {
  require_p(p);
  return {{family, beta, p, r, NormDomain::space, false}, std::pow(mixed_power(g, family, beta, p, r), 1.0 / p),
          std::nullopt};
}

double spacetime_norm_power(const FieldSeries& series, const NormSpec& spec) {
  require_p(spec.p);
  if (series.slices.empty() || series.times.size() != series.slices.size()) throw ShapeError("empty or misaligned time mesh");
  if (spec.family != NormFamily::H && spec.family != NormFamily::B)
    throw ConfigError("family", "scalar space-time norm needs the H or B family");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < series.times.size(); ++k) {
    double dt = series.times[k + 1] - series.times[k];
    if (dt > 0.0) total += dt * scalar_power(series.slices[k], spec.family, spec.beta, spec.p);
  }
  return total;
}

NormValue spacetime_norm(const FieldSeries& series, const NormSpec& spec) {
  NormSpec s = spec;
  s.domain = NormDomain::spacetime;
  return {s, std::pow(spacetime_norm_power(series, spec), 1.0 / spec.p), std::nullopt};
}

double spacetime_mixed_norm_power(std::span<const double> times, std::span<const WeightedSlice> slices,
                                  const NormSpec& spec) {
  require_p(spec.p);
  if (slices.empty() || times.size() != slices.size()) throw ShapeError("empty or misaligned time mesh");
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    double dt = times[k + 1] - times[k];
    if (dt > 0.0) total += dt * mixed_power(slices[k], spec.family, spec.beta, spec.p, spec.r);
  }
  return total;
}

NormValue spacetime_mixed_norm(std::span<const double> times, std::span<const WeightedSlice> slices,
                               const NormSpec& spec) {
  NormSpec s = spec;
  s.domain = NormDomain::spacetime;
  return {s, std::pow(spacetime_mixed_norm_power(times, slices, spec), 1.0 / spec.p), std::nullopt};
}

NormValue monte_carlo_norm(std::span<const double> powers, const NormSpec& spec) {
  if (powers.empty()) throw ShapeError("Monte Carlo norm needs at least one path");
  double n = static_cast<double>(powers.size());
  double mean = 0.0;
  for (double v : powers) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : powers) var += (v - mean) * (v - mean);
  var = powers.size() > 1 ? var / (n - 1.0) : 0.0;
  NormSpec s = spec;
  s.monte_carlo = true;
  double value = std::pow(mean, 1.0 / spec.p);
  double se_mean = std::sqrt(var / n);
  double se = mean > 0.0 ? value / (spec.p * mean) * se_mean : 0.0;
  return {s, value, se};
}

double bump_transform(double abs_xi, int dim) {
  const auto& q = bump_rule();
  double s = 0.0;
  if (dim == 1) {
    for (std::size_t i = 0; i < q.r.size(); ++i) s += 2.0 * q.w[i] * bump(q.r[i]) * std::cos(abs_xi * q.r[i]);
  } else {
    for (std::size_t i = 0; i < q.r.size(); ++i)
      s += 2.0 * kPi * q.w[i] * q.r[i] * bump(q.r[i]) * std::cyl_bessel_j(0.0, abs_xi * q.r[i]);
  }
  return s / bump_mass(dim);
}

Field mollify(const Field& field, double eps) {
  if (!(eps > 0.0)) throw ConfigError("eps", "mollifier radius must be positive");
  const auto& grid = field.grid();
  std::map<long, double> cache;
  double unit = kPi / grid.half_width();
  auto table = make_multiplier(grid, [&](const Point& xi) {
    long k0 = std::lround(xi[0] / unit);
    long k1 = std::lround(xi[1] / unit);
    long key = k0 * k0 + k1 * k1;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, bump_transform(eps * unit * std::sqrt(static_cast<double>(key)), grid.dim())).first;
    return it->second;
  });
  return apply_multiplier(field, table);
}

FieldSeries steklov_smooth(const FieldSeries& g, int n) {
  if (n < 1) throw ConfigError("n", "Steklov rate must be >= 1");
  if (g.slices.empty() || g.times.size() != g.slices.size()) throw ShapeError("empty or misaligned time mesh");
  double width = 1.0 / n;
  for (std::size_t k = 0; k + 1 < g.times.size(); ++k)
    if (g.times[k + 1] - g.times[k] > width * (1.0 + 1e-12))
      throw ConfigError("n", "time mesh is coarser than the Steklov window 1/n");
  std::vector<Field> smooth;
  smooth.reserve(g.slices.size());
  for (const auto& s : g.slices) smooth.push_back(to_physical(mollify(s, width)));

  FieldSeries out{g.grid, g.times, {}};
  out.slices.reserve(g.slices.size());
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    double t = g.times[k];
    double start = std::max(t - width, g.times.front());
    Field acc(g.grid);
    // Trapezoid over [start, t] with a linearly interpolated left end.
    std::size_t j = k;
    while (j > 0 && g.times[j - 1] >= start) --j;
    for (std::size_t i = j; i < k; ++i) {
      double dt = g.times[i + 1] - g.times[i];
      for (std::size_t x = 0; x < acc.size(); ++x) acc[x] += 0.5 * dt * (smooth[i][x] + smooth[i + 1][x]);
    }
    if (j > 0 && g.times[j] > start) {
      double t0 = g.times[j - 1];
      double t1 = g.times[j];
      double theta = (start - t0) / (t1 - t0);
      double dt = t1 - start;
      for (std::size_t x = 0; x < acc.size(); ++x) {
        cplx left = (1.0 - theta) * smooth[j - 1][x] + theta * smooth[j][x];
        acc[x] += 0.5 * dt * (left + smooth[j][x]);
      }
    }
    acc *= static_cast<double>(n);
    out.slices.push_back(std::move(acc));
  }
  return out;
}

std::string family_name(NormFamily family) {
  switch (family) {
    case NormFamily::H: return "H";
    case NormFamily::B: return "B";
    case NormFamily::Hbar: return "Hbar";
    case NormFamily::Bbar: return "Bbar";
  }
  return "?";
}

std::string csv_header() { return "family,beta,p,r,domain,value,stderr,seed-range"; }

std::string csv_row(const NormValue& v, const std::string& seed_range) {
  std::ostringstream os;
  os.precision(17);
  os << family_name(v.spec.family) << ',' << v.spec.beta << ',' << v.spec.p << ',';
  if (v.spec.r > 0.0) os << v.spec.r;
  os << ',' << (v.spec.domain == NormDomain::space ? "space" : "spacetime") << ',' << v.value << ',';
  if (v.mc_stderr) os << *v.mc_stderr;
  os << ',' << seed_range;
  return os.str();
}

}  // namespace spide
