#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace spide {

using cplx = std::complex<double>;

// Spatial or frequency coordinate. Only the first dim() entries are used.
using Point = std::array<double, 2>;

inline constexpr double kPi = 3.14159265358979323846;

// Periodic lattice on [-L, L)^d with its discrete frequency set.
class SpectralGrid {
 public:
  // Throws ConfigError naming "d", "N" or "L".
  SpectralGrid(int dim, int nodes, double half_width);

  int dim() const noexcept { return dim_; }
  int nodes() const noexcept { return nodes_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return 2.0 * half_width_ / nodes_; }
  std::size_t size() const noexcept;
  double cell_volume() const noexcept;  // h^d
  double box_volume() const noexcept;   // (2L)^d

  // xi_k = pi k / L.
  double frequency(int k) const noexcept { return kPi * k / half_width_; }
  // Storage index along an axis (FFT order) to signed wave number in [-N/2, N/2).
  int wave_number(int index) const noexcept { return index < nodes_ / 2 ? index : index - nodes_; }

  Point node(std::size_t flat) const noexcept;
  Point wave_vector(std::size_t flat) const noexcept;
  bool is_nyquist(std::size_t flat) const noexcept;
  double max_frequency() const noexcept;  // largest |xi| on the lattice
  std::vector<double> axis_frequencies() const;  // ascending, length N

  friend bool operator==(const SpectralGrid&, const SpectralGrid&) = default;

 private:
  int dim_;
  int nodes_;
  double half_width_;
};

SpectralGrid make_grid(int dim, int nodes, double half_width);

enum class Domain { physical, spectral };

// Lattice function. Physical values are stored row-major (axis 0 slowest);
// spectral values use FFT ordering along each axis and approximate the
// continuum transform int e^{-i xi x} u(x) dx.
class Field {
 public:
  explicit Field(SpectralGrid grid, Domain domain = Domain::physical);
  Field(SpectralGrid grid, Domain domain, std::vector<cplx> values);

  template <class Fn>
  static Field sample(const SpectralGrid& grid, Fn&& fn) {
    Field out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values_[i] = fn(grid.node(i));
    return out;
  }

  const SpectralGrid& grid() const noexcept { return grid_; }
  Domain domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx factor) noexcept;

  double max_abs() const noexcept;
  double max_imag() const noexcept;

 private:
  void require_compatible(const Field& other) const;

  SpectralGrid grid_;
  Domain domain_;
  std::vector<cplx> values_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(cplx factor, Field f);
double max_abs_difference(const Field& a, const Field& b);

// Space-time field on an ordered time mesh.
struct FieldSeries {
  SpectralGrid grid;
  std::vector<double> times;
  std::vector<Field> slices;
};

Field forward(const Field& field);  // physical -> spectral
Field inverse(const Field& field);  // spectral -> physical
Field to_spectral(const Field& field);
Field to_physical(const Field& field);

// Fourier multiplier sampled in spectral storage order, Nyquist entries zero.
using Multiplier = std::vector<cplx>;

template <class Fn>
Multiplier make_multiplier(const SpectralGrid& grid, Fn&& symbol) {
  Multiplier table(grid.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    table[i] = grid.is_nyquist(i) ? cplx{} : cplx(symbol(grid.wave_vector(i)));
  return table;
}

// Multiplies the spectrum by `table`; the result keeps the input's domain.
Field apply_multiplier(const Field& field, std::span<const cplx> table);

Field bessel_potential(const Field& field, double beta);
Field fractional_derivative(const Field& field, double alpha);
// Exact periodic translate: shift_field(f, y)(x) = f(x + y).
Field shift_field(const Field& field, const Point& y);

// Dyadic partition of unity 1 = sum_{j=0}^{max_level} F phi_j on the lattice.
class LPFilterBank {
 public:
  explicit LPFilterBank(const SpectralGrid& grid);

  const SpectralGrid& grid() const noexcept { return grid_; }
  int max_level() const noexcept { return static_cast<int>(bank_.size()) - 1; }
  std::span<const double> level(int j) const { return bank_.at(static_cast<std::size_t>(j)); }
  Field block(const Field& field, int j) const;

  // F phi(2^{-j} xi) for j >= 1, supported in 2^{j-1} <= |xi| <= 2^{j+1}.
  static double dyadic_profile(double abs_xi, int j) noexcept;

 private:
  SpectralGrid grid_;
  std::vector<std::vector<double>> bank_;
};

LPFilterBank lp_partition(const SpectralGrid& grid);

}  // namespace spide
