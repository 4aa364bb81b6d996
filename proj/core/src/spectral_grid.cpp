#include "spide/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "spide/errors.hpp"

namespace spide {

namespace {

// FFTW plans are created once per (d, N, direction). Creation is serialized;
// execution through the new-array interface is thread safe.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                              : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const SpectralGrid& grid, int sign, const std::vector<cplx>& in, std::vector<cplx>& out) {
  fftw_plan plan = PlanCache::instance().get(grid.dim(), grid.nodes(), sign);
  // fftw_execute_dft takes a non-const input pointer but leaves it untouched for out-of-place plans.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

// (-1)^(i0 + i1): the phase e^{i xi L} from nodes starting at -L.
double parity(const SpectralGrid& grid, std::size_t flat) {
  auto n = static_cast<std::size_t>(grid.nodes());
  std::size_t s = grid.dim() == 1 ? flat : flat / n + flat % n;
  return (s % 2 == 0) ? 1.0 : -1.0;
}

double smooth_step(double s) {
  // 1 for s <= 0, 0 for s >= 1, C^infinity in between.
  auto e = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  double a = e(1.0 - s);
  double b = e(s);
  return a / (a + b);
}

}  // namespace

SpectralGrid::SpectralGrid(int dim, int nodes, double half_width)
    : dim_(dim), nodes_(nodes), half_width_(half_width) {
  if (dim != 1 && dim != 2) throw ConfigError("d", "dimension must be 1 or 2, got " + std::to_string(dim));
  if (nodes < 8 || !std::has_single_bit(static_cast<unsigned>(nodes)))
    throw ConfigError("N", "nodes per axis must be a power of two >= 8, got " + std::to_string(nodes));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ConfigError("L", "half-width must be positive and finite");
}

std::size_t SpectralGrid::size() const noexcept {
  auto n = static_cast<std::size_t>(nodes_);
  return dim_ == 1 ? n : n * n;
}

double SpectralGrid::cell_volume() const noexcept { return std::pow(spacing(), dim_); }

double SpectralGrid::box_volume() const noexcept { return std::pow(2.0 * half_width_, dim_); }

Point SpectralGrid::node(std::size_t flat) const noexcept {
  auto n = static_cast<std::size_t>(nodes_);
  double h = spacing();
  if (dim_ == 1) return {-half_width_ + h * static_cast<double>(flat), 0.0};
  return {-half_width_ + h * static_cast<double>(flat / n), -half_width_ + h * static_cast<double>(flat % n)};
}

Point SpectralGrid::wave_vector(std::size_t flat) const noexcept {
  auto n = static_cast<std::size_t>(nodes_);
  if (dim_ == 1) return {frequency(wave_number(static_cast<int>(flat))), 0.0};
  return {frequency(wave_number(static_cast<int>(flat / n))), frequency(wave_number(static_cast<int>(flat % n)))};
}

bool SpectralGrid::is_nyquist(std::size_t flat) const noexcept {
  auto n = static_cast<std::size_t>(nodes_);
  auto half = n / 2;
  if (dim_ == 1) return flat == half;
  return flat / n == half || flat % n == half;
}

double SpectralGrid::max_frequency() const noexcept {
  return std::sqrt(static_cast<double>(dim_)) * frequency(nodes_ / 2);
}

std::vector<double> SpectralGrid::axis_frequencies() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nodes_));
  for (int k = -nodes_ / 2; k < nodes_ / 2; ++k) out.push_back(frequency(k));
  return out;
}

SpectralGrid make_grid(int dim, int nodes, double half_width) { return {dim, nodes, half_width}; }

Field::Field(SpectralGrid grid, Domain domain) : grid_(grid), domain_(domain), values_(grid.size()) {}

Field::Field(SpectralGrid grid, Domain domain, std::vector<cplx> values)
    : grid_(grid), domain_(domain), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ShapeError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                     std::to_string(grid_.size()));
}

void Field::require_compatible(const Field& other) const {
  if (!(grid_ == other.grid_) || domain_ != other.domain_)
    throw ShapeError("fields live on different grids or domains");
}

Field& Field::operator+=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx factor) noexcept {
  for (auto& v : values_) v *= factor;
  return *this;
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::max_imag() const noexcept {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
  return m;
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(cplx factor, Field f) { return f *= factor; }

double max_abs_difference(const Field& a, const Field& b) { return (a - b).max_abs(); }

Field forward(const Field& field) {
  if (field.domain() != Domain::physical) throw ShapeError("forward transform expects a physical field");
  const auto& grid = field.grid();
  std::vector<cplx> in(field.values().begin(), field.values().end());
  std::vector<cplx> out(grid.size());
  execute(grid, FFTW_FORWARD, in, out);
  double scale = grid.cell_volume();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale * parity(grid, i);
  return {grid, Domain::spectral, std::move(out)};
}

Field inverse(const Field& field) {
  if (field.domain() != Domain::spectral) throw ShapeError("inverse transform expects a spectral field");
  const auto& grid = field.grid();
  std::vector<cplx> in(grid.size());
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = field[i] * parity(grid, i);
  std::vector<cplx> out(grid.size());
  execute(grid, FFTW_BACKWARD, in, out);
  double scale = 1.0 / grid.box_volume();
  for (auto& v : out) v *= scale;
  return {grid, Domain::physical, std::move(out)};
}

Field to_spectral(const Field& field) { return field.domain() == Domain::spectral ? field : forward(field); }

Field to_physical(const Field& field) { return field.domain() == Domain::physical ? field : inverse(field); }

Field apply_multiplier(const Field& field, std::span<const cplx> table) {
  if (table.size() != field.size()) throw ShapeError("multiplier size does not match field");
  Field spec = to_spectral(field);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= table[i];
  return field.domain() == Domain::physical ? inverse(spec) : spec;
}

Field bessel_potential(const Field& field, double beta) {
  if (!std::isfinite(beta)) throw ConfigError("beta", "regularity order must be finite");
  auto table = make_multiplier(field.grid(), [beta](const Point& xi) {
    return std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * beta);
  });
  return apply_multiplier(field, table);
}

Field fractional_derivative(const Field& field, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha", "order must lie in (0, 2]");
  auto table = make_multiplier(field.grid(), [alpha](const Point& xi) {
    double r2 = xi[0] * xi[0] + xi[1] * xi[1];
    return r2 == 0.0 ? 0.0 : -std::pow(r2, 0.5 * alpha);
  });
  return apply_multiplier(field, table);
}

Field shift_field(const Field& field, const Point& y) {
  int d = field.grid().dim();
  auto table = make_multiplier(field.grid(), [&](const Point& xi) {
    double phase = xi[0] * y[0] + (d == 2 ? xi[1] * y[1] : 0.0);
    return std::polar(1.0, phase);
  });
  return apply_multiplier(field, table);
}

double LPFilterBank::dyadic_profile(double abs_xi, int j) noexcept {
  if (abs_xi <= 0.0) return 0.0;
  double s = std::log2(abs_xi) - j;
  return smooth_step(s) - smooth_step(s + 1.0);
}

LPFilterBank::LPFilterBank(const SpectralGrid& grid) : grid_(grid) {
  int by_nodes = std::bit_width(static_cast<unsigned>(grid.nodes() / 4)) - 1;
  int by_reach = static_cast<int>(std::ceil(std::log2(grid.max_frequency())));
  int top = std::max({1, by_nodes, by_reach});
  bank_.assign(static_cast<std::size_t>(top) + 1, std::vector<double>(grid.size(), 0.0));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_nyquist(i)) continue;
    Point xi = grid.wave_vector(i);
    double r = std::hypot(xi[0], xi[1]);
    double rest = 0.0;
    for (int j = 1; j <= top; ++j) {
      double v = dyadic_profile(r, j);
      bank_[static_cast<std::size_t>(j)][i] = v;
      rest += v;
    }
    bank_[0][i] = 1.0 - rest;
  }
}

Field LPFilterBank::block(const Field& field, int j) const {
  if (!(field.grid() == grid_)) throw ShapeError("field grid does not match filter bank");
  auto row = level(j);
  std::vector<cplx> table(row.begin(), row.end());
  return apply_multiplier(field, table);
}

LPFilterBank lp_partition(const SpectralGrid& grid) { return LPFilterBank(grid); }

}  // namespace spide
