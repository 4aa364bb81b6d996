#include "spide/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"
#include "spide/norms.hpp"
#include "spide/symbols.hpp"

namespace spide {

namespace {

using Spectrum = std::vector<cplx>;

// (e^z - 1) / z.
cplx phi1(cplx z) {
  if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return (std::exp(z) - 1.0) / z;
}

Spectrum spectrum(const Field& f, const SpectralGrid& grid) {
  if (!(f.grid() == grid)) throw ShapeError("input field lives on a different grid");
  Field s = to_spectral(f);
  Spectrum out(s.values().begin(), s.values().end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (grid.is_nyquist(i)) out[i] = 0.0;
  return out;
}

cplx inner(std::span<const cplx> a, std::span<const cplx> b, double box) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s / box;
}

double lattice_l2(std::span<const cplx> u, double box) {
  double s = 0.0;
  for (const auto& v : u) s += std::norm(v);
  return std::sqrt(s / box);
}

bool density_vanishes(const CoefficientSet& c, const Density& density) {
  SampleMesh mesh;
  for (double t : mesh.times)
    for (double r : {1e-3, 0.05, 0.3, 1.0, 3.0, 20.0, 1e3})
      for (const auto& dir : sphere_rule(c.dim, 16))
        if (density(t, Point{r * dir.w[0], r * dir.w[1]}) != 0.0) return false;
  return true;
}

Spectrum transport_factor(const SpectralGrid& grid, const Point& y, double sign = 1.0) {
  return make_multiplier(grid, [&](const Point& xi) { return std::polar(1.0, sign * (xi[0] * y[0] + xi[1] * y[1])); });
}

// Time at which an input is evaluated for the step [ta, tb]. Per-step inputs
// use the midpoint, which no event time can hit.
double input_time(const SolverSetup& s, bool constant, std::size_t cell, double ta, double tb) {
  if (constant) return s.base_mesh.front();
  if (s.inputs.per_step) return 0.5 * (ta + tb);
  return s.base_mesh[cell];
}

std::size_t locate_cell(std::span<const double> base, double t) {
  auto it = std::upper_bound(base.begin(), base.end(), t);
  std::size_t k = it == base.begin() ? 0 : static_cast<std::size_t>(it - base.begin()) - 1;
  return std::min(k, base.size() - 2);
}

// Forcing between events: f - (g compensator) - (Phi compensator).
Spectrum forcing_at(const SolverSetup& s, double tf, double tg, double tp) {
  const auto& grid = s.grid;
  Spectrum out(grid.size(), cplx{});
  if (s.inputs.f) out = spectrum(s.inputs.f(tf), grid);
  if (s.inputs.g && s.options.compensate_g && s.coeffs.has_jumps()) {
    if (!(s.inputs.g_support > 0.0)) throw ConfigError("g", "jump input needs a positive support radius");
    for (const auto& node : jump_nodes(s.coeffs, JumpDensity::l, tg, s.options.eps_cut, s.inputs.g_support,
                                       s.options.angular_nodes)) {
      Spectrum gy = spectrum(s.inputs.g(tg, node.y), grid);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= node.weight * gy[i];
    }
  }
  if (s.inputs.phi) {
    for (const auto& atom : s.marks.atoms) {
      Spectrum p = spectrum(s.inputs.phi(tp, atom), grid);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] -= atom.mass * p[i];
    }
  }
  return out;
}

std::vector<Spectrum> wiener_at(const SolverSetup& s, double t) {
  std::vector<Spectrum> out;
  if (!s.inputs.h) return out;
  for (const auto& f : s.inputs.h(t)) out.push_back(spectrum(f, s.grid));
  return out;
}

std::vector<Spectrum> kicks_at(const SolverSetup& s, double t) {
  std::vector<Spectrum> out;
  if (!s.coeffs.has_sigma()) return out;
  SigmaRows rows = s.coeffs.sigma(t);
  std::size_t modes = rows.row1.size();
  for (std::size_t m = 0; m < modes; ++m) {
    double s1 = rows.row1[m];
    double s2 = s.grid.dim() == 2 && m < rows.row2.size() ? rows.row2[m] : 0.0;
    out.push_back(make_multiplier(s.grid, [&](const Point& xi) { return cplx(0.0, s1 * xi[0] + s2 * xi[1]); }));
  }
  return out;
}

Spectrum rate_at(const SolverSetup& s, double t) {
  Spectrum a = generator_multiplier(s.grid, t, s.coeffs);
  if (s.options.transport_compensator && s.coeffs.has_jumps() && !density_vanishes(s.coeffs, s.coeffs.l)) {
    Spectrum comp = compensator_multiplier(s.grid, t, s.coeffs, s.options.eps_cut, JumpDensity::l);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += comp[i];
  }
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = s.grid.is_nyquist(i) ? cplx{} : a[i] - s.options.lambda;
  return a;
}

void check_finite(std::span<const cplx> u, double t) {
  for (const auto& v : u)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericError("non-finite solution slice at t=" + std::to_string(t));
}

}  // namespace

Field Kernel::physical() const {
  Field out = inverse(Field(grid, Domain::spectral, table));
  for (auto& v : out.values()) v = v.real();
  return out;
}

Field Kernel::apply(const Field& field) const { return apply_multiplier(field, table); }

Multiplier integrated_symbol(const SpectralGrid& grid, const CoefficientSet& coeffs, double s, double t, int cells) {
  if (coeffs.time_homogeneous) {
    auto table = generator_multiplier(grid, s, coeffs);
    for (auto& v : table) v *= (t - s);
    return table;
  }
  if (cells < 1) throw ConfigError("cells", "coefficient mesh needs at least one cell");
  double width = coeffs.T / cells;
  Multiplier total(grid.size(), cplx{});
  auto first = static_cast<long>(std::floor(s / width));
  for (long c = first; c * width < t; ++c) {
    double lo = std::max(s, c * width);
    double hi = std::min(t, (c + 1) * width);
    if (hi <= lo) continue;
    auto table = generator_multiplier(grid, (c + 0.5) * width, coeffs);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += (hi - lo) * table[i];
  }
  return total;
}

Kernel fundamental_kernel(const SpectralGrid& grid, double s, double t, double lambda, const CoefficientSet& coeffs,
                          int cells) {
  if (!(s >= 0.0 && s < t)) throw ConfigError("t", "kernel needs 0 <= s < t");
  Kernel k{grid, s, t, lambda, integrated_symbol(grid, coeffs, s, t, cells)};
  for (std::size_t i = 0; i < k.table.size(); ++i)
    k.table[i] = grid.is_nyquist(i) ? cplx{} : std::exp(k.table[i] - lambda * (t - s));
  return k;
}

Field semigroup_T(const Field& u0, double t, double lambda, const CoefficientSet& coeffs) {
  if (t < 0.0) throw ConfigError("t", "time must be nonnegative");
  if (t == 0.0) return u0;
  return fundamental_kernel(u0.grid(), 0.0, t, lambda, coeffs).apply(u0);
}

FieldSeries SolutionBundle::physical() const {
  FieldSeries out{setup->grid, times, {}};
  out.slices.reserve(post.size());
  for (const auto& s : post) out.slices.push_back(inverse(s));
  return out;
}

struct MildSolver::CellTables {
  Spectrum forcing;
  std::vector<Spectrum> h;
  std::vector<Spectrum> kicks;
};

MildSolver::MildSolver(const SpectralGrid& grid, const CoefficientSet& coeffs, std::vector<double> base_mesh,
                       SolverInputs inputs, SolverOptions options, MarkMeasure marks)
    : setup_(std::make_shared<SolverSetup>(
          SolverSetup{grid, coeffs, std::move(base_mesh), std::move(inputs), std::move(options), std::move(marks)})) {
  const auto& s = *setup_;
  if (s.base_mesh.size() < 2 || !std::is_sorted(s.base_mesh.begin(), s.base_mesh.end()))
    throw ConfigError("steps", "base mesh must be increasing with at least one step");
  if (coeffs.dim != grid.dim()) throw ConfigError("d", "coefficient and grid dimensions differ");
  if (coeffs.has_sigma() && coeffs.alpha != 2.0) throw ConfigError("sigma", "gradient noise needs alpha = 2");
  if (!(s.options.eps_cut > 0.0)) throw ConfigError("eps-cut", "small-jump cutoff must be positive");
  auto report = validate_A(coeffs);
  if (!report.passed) throw ContractError("coefficients fail " + report.violations.front().clause);
  if (s.inputs.u0 && !(s.inputs.u0->grid() == grid)) throw ShapeError("u0 lives on a different grid");

  std::size_t cells = s.base_mesh.size() - 1;
  std::size_t rate_count = coeffs.time_homogeneous ? 1 : cells;
  rates_.reserve(rate_count);
  for (std::size_t c = 0; c < rate_count; ++c)
    rates_.push_back(rate_at(s, 0.5 * (s.base_mesh[c] + s.base_mesh[c + 1])));
  if (coeffs.has_sigma()) {
    std::size_t kick_count = coeffs.time_homogeneous ? 1 : cells;
    for (std::size_t c = 0; c < kick_count; ++c) kicks_.push_back(kicks_at(s, s.base_mesh[c]));
  }

  if (s.inputs.per_step) return;
  bool all_constant = (!s.inputs.f || s.inputs.f_constant) && (!s.inputs.h || s.inputs.h_constant) &&
                      (!s.inputs.g || s.inputs.g_constant) && (!s.inputs.phi || s.inputs.phi_constant);
  std::size_t count = all_constant ? 1 : cells;
  constant_ = std::make_shared<std::vector<CellTables>>();
  constant_->reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    double ta = s.base_mesh[c];
    CellTables t;
    t.forcing = forcing_at(s, input_time(s, s.inputs.f_constant, c, ta, ta),
                           input_time(s, s.inputs.g_constant, c, ta, ta), input_time(s, s.inputs.phi_constant, c, ta, ta));
    t.h = wiener_at(s, input_time(s, s.inputs.h_constant, c, ta, ta));
    constant_->push_back(std::move(t));
  }
}

std::size_t MildSolver::cell_of(double t) const { return locate_cell(setup_->base_mesh, t); }

std::span<const cplx> MildSolver::rate(double t) const {
  return rates_.size() == 1 ? rates_.front() : rates_[cell_of(t)];
}

StableIntensity MildSolver::jump_intensity() const {
  const auto& c = setup_->coeffs;
  double norm = levy_normalization(c.alpha, c.dim);
  Density l = c.l;
  return {c.alpha, c.dim, [l, norm](double t, const Point& y) { return norm * l(t, y); }, norm * c.K};
}

SolutionBundle MildSolver::solve(const NoisePath& path) const {
  const auto& s = *setup_;
  const auto& grid = s.grid;
  const auto& mesh = path.mesh;
  if (mesh.size() < 2 || mesh.front() != s.base_mesh.front() || mesh.back() != s.base_mesh.back())
    throw ShapeError("path mesh does not span the solver mesh");
  if (s.inputs.g && !s.coeffs.has_jumps()) throw ConfigError("g", "jump input needs alpha < 2");
  const std::size_t n = grid.size();
  const double box = grid.box_volume();

  SolutionBundle out;
  out.setup = setup_;
  out.path = path;
  Spectrum u = s.inputs.u0 ? spectrum(*s.inputs.u0, grid) : Spectrum(n, cplx{});

  auto record = [&](double t, const Spectrum& pre, const Spectrum& post) {
    if (s.options.record) {
      out.times.push_back(t);
      out.pre.emplace_back(grid, Domain::spectral, pre);
      out.post.emplace_back(grid, Domain::spectral, post);
      out.slice_l2.push_back(lattice_l2(post, box));
    }
    if (s.options.observer) s.options.observer(t, post);
  };
  record(mesh.front(), u, u);

  auto stable_it = path.stable_events.begin();
  auto mark_it = path.mark_events.begin();
  const cplx* cached_rate = nullptr;
  double cached_dt = -1.0;
  Spectrum decay(n), growth(n), next(n);
  std::optional<CellTables> step_tables;

  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    double ta = mesh[k];
    double tb = mesh[k + 1];
    double dt = tb - ta;
    std::size_t cell = cell_of(ta);
    const Spectrum& a = rates_.size() == 1 ? rates_.front() : rates_[cell];
    if (a.data() != cached_rate || dt != cached_dt) {
      for (std::size_t i = 0; i < n; ++i) {
        decay[i] = std::exp(a[i] * dt);
        growth[i] = dt * phi1(a[i] * dt);
      }
      cached_rate = a.data();
      cached_dt = dt;
    }
    const CellTables* tab;
    if (s.inputs.per_step) {
      double mid = 0.5 * (ta + tb);
      step_tables = CellTables{forcing_at(s, mid, mid, mid), wiener_at(s, mid), {}};
      tab = &*step_tables;
    } else {
      tab = constant_->size() == 1 ? &constant_->front() : &(*constant_)[cell];
    }
    for (std::size_t i = 0; i < n; ++i) next[i] = decay[i] * u[i] + growth[i] * tab->forcing[i];
    Spectrum pre = next;

    int modes = path.wiener.modes;
    if (!tab->h.empty() && static_cast<int>(tab->h.size()) != modes)
      throw ShapeError("Wiener input has " + std::to_string(tab->h.size()) + " modes, path has " +
                       std::to_string(modes));
    if (modes > 0) {
      const auto& dw = path.wiener.increments[k];
      for (std::size_t m = 0; m < tab->h.size(); ++m)
        for (std::size_t i = 0; i < n; ++i) next[i] += tab->h[m][i] * dw[m];
      if (!kicks_.empty()) {
        const auto& kick = kicks_.size() == 1 ? kicks_.front() : kicks_[cell];
        if (static_cast<int>(kick.size()) != modes) throw ShapeError("sigma mode count differs from the path");
        for (std::size_t m = 0; m < kick.size(); ++m)
          for (std::size_t i = 0; i < n; ++i) next[i] += kick[m][i] * dw[m] * u[i];
      }
    }

    for (; stable_it != path.stable_events.end() && stable_it->time <= tb; ++stable_it) {
      if (stable_it->time < tb) continue;
      if (s.options.transport_at_events) {
        Spectrum shift = transport_factor(grid, stable_it->y);
        for (std::size_t i = 0; i < n; ++i) next[i] *= shift[i];
      }
      if (s.inputs.g) {
        Spectrum gy = spectrum(s.inputs.g(tb, stable_it->y), grid);
        for (std::size_t i = 0; i < n; ++i) next[i] += gy[i];
      }
    }
    for (; mark_it != path.mark_events.end() && mark_it->time <= tb; ++mark_it) {
      if (mark_it->time < tb || !s.inputs.phi) continue;
      Spectrum p = spectrum(s.inputs.phi(tb, mark_it->mark), grid);
      for (std::size_t i = 0; i < n; ++i) next[i] += p[i];
    }
    check_finite(next, tb);
    u.swap(next);
    record(tb, pre, u);
  }
  return out;
}

SolutionBundle solve_mild(const SpectralGrid& grid, const CoefficientSet& coeffs, const SolverInputs& inputs,
                          const NoisePath& path, const SolverOptions& options, const MarkMeasure& marks) {
  std::vector<double> base = path.mesh;
  return MildSolver(grid, coeffs, std::move(base), inputs, options, marks).solve(path);
}

namespace {

FieldRecipe series_recipe(const FieldSeries& series) {
  return [&series](double t) {
    std::size_t k = locate_cell(series.times, t);
    return series.slices.at(k);
  };
}

NoisePath quiet_path(std::span<const double> mesh) {
  NoisePath p;
  p.mesh.assign(mesh.begin(), mesh.end());
  return p;
}

FieldSeries physical_series(const SolutionBundle& b) { return b.physical(); }

}  // namespace

FieldSeries duhamel_R(const FieldSeries& f, double lambda, const CoefficientSet& coeffs) {
  if (f.times.size() < 2 || f.slices.size() != f.times.size()) throw ShapeError("forcing needs a mesh with slices");
  SolverInputs in;
  in.f = series_recipe(f);
  SolverOptions opt;
  opt.lambda = lambda;
  MildSolver solver(f.grid, coeffs, f.times, in, opt);
  return physical_series(solver.solve(quiet_path(f.times)));
}

FieldSeries stoch_conv_wiener(const std::vector<FieldSeries>& h, double lambda, const CoefficientSet& coeffs,
                              const NoisePath& path) {
  if (static_cast<int>(h.size()) != path.wiener.modes)
    throw ShapeError("Wiener input has " + std::to_string(h.size()) + " modes, path has " +
                     std::to_string(path.wiener.modes));
  if (h.empty()) throw ShapeError("Wiener input needs at least one mode");
  SolverInputs in;
  in.h = [&h](double t) {
    std::vector<Field> out;
    for (const auto& series : h) out.push_back(series.slices.at(locate_cell(series.times, t)));
    return out;
  };
  SolverOptions opt;
  opt.lambda = lambda;
  MildSolver solver(h.front().grid, coeffs, h.front().times, in, opt);
  return physical_series(solver.solve(path));
}

FieldSeries stoch_conv_poisson(const MarkRecipe& phi, const MarkMeasure& marks, double lambda,
                               const CoefficientSet& coeffs, const NoisePath& path, std::span<const double> base_mesh) {
  if (!(marks.total_mass() > 0.0)) throw ConfigError("Pi", "mark measure must have positive finite mass");
  if (!phi) throw ConfigError("Phi", "mark input is missing");
  SolverInputs in;
  in.phi = phi;
  SolverOptions opt;
  opt.lambda = lambda;
  Field probe = phi(base_mesh.front(), marks.atoms.front());
  MildSolver solver(probe.grid(), coeffs, {base_mesh.begin(), base_mesh.end()}, in, opt, marks);
  return physical_series(solver.solve(path));
}

Field jump_transport(const Field& pre, const Point& y) {
  auto table = make_multiplier(pre.grid(), [&](const Point& xi) { return std::polar(1.0, xi[0] * y[0] + xi[1] * y[1]) - 1.0; });
  return apply_multiplier(pre, table);
}

Field lambda_shift(const Field& g_y, const Point& y) { return shift_field(g_y, Point{-y[0], -y[1]}); }

std::vector<WeightedJump> jump_nodes(const CoefficientSet& coeffs, JumpDensity which, double t, double eps,
                                     double r_max, int angular_nodes) {
  std::vector<WeightedJump> out;
  if (!coeffs.has_jumps() || r_max <= eps) return out;
  const Density& density = which == JumpDensity::m ? coeffs.m : coeffs.l;
  for (const auto& node : levy_rule(coeffs.alpha, coeffs.dim, eps, r_max, 64, angular_nodes)) {
    double w = node.weight * density(t, node.y);
    if (w != 0.0) out.push_back({node.y, w});
  }
  return out;
}

Field truncated_I(const JumpRecipe& g, double t, double eps, double g_support, const CoefficientSet& coeffs,
                  const SpectralGrid& grid) {
  Spectrum acc(grid.size(), cplx{});
  for (const auto& node : jump_nodes(coeffs, JumpDensity::l, t, eps, g_support)) {
    Spectrum gy = spectrum(g(t, node.y), grid);
    Spectrum back = transport_factor(grid, node.y, -1.0);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += node.weight * (back[i] - 1.0) * gy[i];
  }
  return {grid, Domain::spectral, std::move(acc)};
}

LambdaIResult lambda_and_I(const JumpRecipe& g, double t, std::span<const double> eps_sequence, double g_support,
                           const CoefficientSet& coeffs, const SpectralGrid& grid, double beta, double p,
                           double tolerance) {
  LambdaIResult out;
  for (double eps : eps_sequence) {
    if (!(eps > 0.0)) throw ConfigError("eps", "truncation radii must be positive");
    out.eps.push_back(eps);
    out.truncated.push_back(inverse(truncated_I(g, t, eps, g_support, coeffs, grid)));
    if (out.truncated.size() > 1) {
      Field diff = out.truncated.back() - out.truncated[out.truncated.size() - 2];
      out.gaps.push_back(sobolev_norm(diff, beta, p).value);
    }
  }
  if (!out.gaps.empty() && out.gaps.back() <= tolerance)
    out.limit = out.truncated.back();
  else
    out.divergent = !out.gaps.empty();
  return out;
}

double weak_residual(const SolutionBundle& bundle, const Field& phi) {
  const auto& s = *bundle.setup;
  const auto& grid = s.grid;
  const double box = grid.box_volume();
  Spectrum ph = spectrum(phi, grid);
  if (std::all_of(ph.begin(), ph.end(), [](cplx v) { return v == cplx{}; })) return 0.0;
  if (bundle.post.size() != bundle.path.mesh.size())
    throw ShapeError("weak residual needs every slice recorded");

  auto ip = [&](std::span<const cplx> u) { return inner(u, ph, box); };
  const std::size_t n = grid.size();

  std::map<std::size_t, Spectrum> rates;
  auto rate_for = [&](std::size_t cell) -> const Spectrum& {
    std::size_t key = s.coeffs.time_homogeneous ? 0 : cell;
    auto it = rates.find(key);
    if (it == rates.end()) {
      Spectrum a = rate_at(s, 0.5 * (s.base_mesh[cell] + s.base_mesh[cell + 1]));
      it = rates.emplace(key, std::move(a)).first;
    }
    return it->second;
  };
  std::map<std::tuple<double, double, double>, Spectrum> forcings;
  auto forcing_for = [&](std::size_t cell, double ta, double tb) -> const Spectrum& {
    auto key = std::make_tuple(input_time(s, s.inputs.f_constant, cell, ta, tb),
                               input_time(s, s.inputs.g_constant, cell, ta, tb),
                               input_time(s, s.inputs.phi_constant, cell, ta, tb));
    auto it = forcings.find(key);
    if (it == forcings.end())
      it = forcings.emplace(key, forcing_at(s, std::get<0>(key), std::get<1>(key), std::get<2>(key))).first;
    return it->second;
  };

  cplx drift{}, stochastic{}, jumps{};
  auto stable_it = bundle.path.stable_events.begin();
  auto mark_it = bundle.path.mark_events.begin();
  Spectrum au(n), aau(n);
  for (std::size_t k = 0; k + 1 < bundle.times.size(); ++k) {
    double ta = bundle.times[k];
    double tb = bundle.times[k + 1];
    double dt = tb - ta;
    std::size_t cell = locate_cell(s.base_mesh, ta);
    const Spectrum& a = rate_for(cell);
    const Spectrum& F = forcing_for(cell, ta, tb);
    auto g_and_slope = [&](std::span<const cplx> u) {
      for (std::size_t i = 0; i < n; ++i) {
        au[i] = a[i] * u[i] + F[i];
        aau[i] = a[i] * au[i];
      }
      return std::make_pair(ip(au), ip(aau));
    };
    auto [ga, da] = g_and_slope(bundle.post[k].values());
    auto [gb, db] = g_and_slope(bundle.pre[k + 1].values());
    drift += 0.5 * dt * (ga + gb) + dt * dt / 12.0 * (da - db);

    Spectrum before(bundle.pre[k + 1].values().begin(), bundle.pre[k + 1].values().end());
    int modes = bundle.path.wiener.modes;
    if (modes > 0) {
      const auto& dw = bundle.path.wiener.increments[k];
      auto h = wiener_at(s, input_time(s, s.inputs.h_constant, cell, ta, tb));
      auto kicks = kicks_at(s, s.coeffs.time_homogeneous ? s.base_mesh.front() : s.base_mesh[cell]);
      for (std::size_t m = 0; m < static_cast<std::size_t>(modes); ++m) {
        Spectrum incr(n, cplx{});
        if (m < h.size())
          for (std::size_t i = 0; i < n; ++i) incr[i] += h[m][i] * dw[m];
        if (m < kicks.size())
          for (std::size_t i = 0; i < n; ++i) incr[i] += kicks[m][i] * dw[m] * bundle.post[k][i];
        stochastic += ip(incr);
        for (std::size_t i = 0; i < n; ++i) before[i] += incr[i];
      }
    }
    for (; stable_it != bundle.path.stable_events.end() && stable_it->time <= tb; ++stable_it) {
      if (stable_it->time < tb) continue;
      Spectrum jump(n, cplx{});
      if (s.options.transport_at_events) {
        Field moved = jump_transport(Field(grid, Domain::spectral, before), stable_it->y);
        for (std::size_t i = 0; i < n; ++i) jump[i] = moved[i];
      }
      if (s.inputs.g) {
        Spectrum gy = spectrum(s.inputs.g(tb, stable_it->y), grid);
        for (std::size_t i = 0; i < n; ++i) jump[i] += gy[i];
      }
      jumps += ip(jump);
      for (std::size_t i = 0; i < n; ++i) before[i] += jump[i];
    }
    for (; mark_it != bundle.path.mark_events.end() && mark_it->time <= tb; ++mark_it) {
      if (mark_it->time < tb || !s.inputs.phi) continue;
      jumps += ip(spectrum(s.inputs.phi(tb, mark_it->mark), grid));
    }
  }
  cplx lhs = ip(bundle.post.back().values()) - ip(bundle.post.front().values());
  cplx rhs = drift + stochastic + jumps;
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

}  // namespace spide
