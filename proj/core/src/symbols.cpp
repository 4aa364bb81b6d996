#include "spide/symbols.hpp"

#include <cmath>
#include <limits>

#include "spide/errors.hpp"
#include "spide/levy_quadrature.hpp"

namespace spide {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kInfiniteRadius = 1e11;

enum class Bracket { full, retained, centering };

bool centered(double alpha, double r) { return alpha > 1.0 || (alpha == 1.0 && r <= 1.0); }

// e^{iz} - 1 - chi i z (full), e^{iz} - 1 (retained), -chi i z (centering).
cplx bracket(Bracket kind, double z, bool chi) {
  if (kind == Bracket::centering) return chi ? cplx(0.0, -z) : cplx{};
  double s = std::sin(0.5 * z);
  double re = -2.0 * s * s;
  double im;
  if (kind == Bracket::full && chi) {
    double z2 = z * z;
    im = std::abs(z) < 0.1 ? -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0 * (1.0 - z2 / 72.0)))
                           : std::sin(z) - z;
  } else {
    im = std::sin(z);
  }
  return {re, im};
}

// int_lo^hi bracket(a r) f(r) r^{-1-alpha} dr along one direction, without the c(alpha,d) factor.
template <class F>
cplx radial_integral(Bracket kind, double a, double alpha, F&& f, double lo, double hi, int npd, double cutoff) {
  double aa = std::abs(a);
  if (aa == 0.0 || !(hi > lo)) return {};
  cplx total{};
  double start = lo;
  if (lo == 0.0) {
    // Leading Taylor terms on [0, r0] with f frozen at r0.
    double r0 = std::min({1e-6 / aa, 1e-6, hi});
    double fv = f(r0);
    if (kind == Bracket::full) {
      if (centered(alpha, r0)) {
        total += fv * cplx(-a * a * std::pow(r0, 2.0 - alpha) / (2.0 * (2.0 - alpha)),
                           -a * a * a * std::pow(r0, 3.0 - alpha) / (6.0 * (3.0 - alpha)));
      } else {
        total += fv * cplx(-a * a * std::pow(r0, 2.0 - alpha) / (2.0 * (2.0 - alpha)),
                           a * std::pow(r0, 1.0 - alpha) / (1.0 - alpha));
      }
    }
    start = r0;
  }
  bool infinite = hi >= kInfiniteRadius;
  double r_osc = std::max(cutoff / aa, start);
  double body_end = infinite ? r_osc : hi;
  for (const auto& node : radial_rule(start, body_end, npd, aa))
    total += node.weight * std::pow(node.r, -1.0 - alpha) * f(node.r) * bracket(kind, a * node.r, centered(alpha, node.r));
  if (!infinite) return total;

  // Non-oscillating parts on [r_osc, inf): -1 and -chi i a r.
  double r_far = std::max(r_osc, 1.0) * 1e12;
  for (const auto& node : radial_rule(r_osc, r_far, npd)) {
    double w = node.weight * std::pow(node.r, -1.0 - alpha) * f(node.r);
    if (kind != Bracket::centering) total -= w;
    if (kind != Bracket::retained && centered(alpha, node.r)) total -= cplx(0.0, w * a * node.r);
  }
  double f_far = f(r_far);
  if (kind != Bracket::centering) total -= f_far * std::pow(r_far, -alpha) / alpha;
  if (kind != Bracket::retained && alpha > 1.0) total -= cplx(0.0, a * f_far * std::pow(r_far, 1.0 - alpha) / (alpha - 1.0));

  // Oscillating part int_R^inf e^{iar} g(r) dr, g = f(R) r^{-1-alpha}, by repeated integration by parts.
  if (kind != Bracket::centering) {
    double R = r_osc;
    double fR = f(R);
    cplx ia(0.0, a);
    cplx sum{};
    cplx power = ia;
    double deriv = fR * std::pow(R, -1.0 - alpha);  // g^{(k)}(R)
    for (int k = 0; k < 8; ++k) {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      sum += sign * deriv / power;
      deriv *= -(1.0 + alpha + k) / R;
      power *= ia;
    }
    total += -std::polar(1.0, a * R) * sum;
  }
  return total;
}

cplx jump_quadrature(Bracket kind, double alpha, int dim, const Point& xi, const std::function<double(const Point&)>& density,
                     double lo, double hi, int npd, double cutoff) {
  cplx total{};
  for (const auto& dir : aligned_sphere_rule(dim, xi)) {
    double a = dir.w[0] * xi[0] + dir.w[1] * xi[1];
    auto f = [&](double r) { return density(Point{dir.w[0] * r, dir.w[1] * r}); };
    total += dir.weight * radial_integral(kind, a, alpha, f, lo, hi, npd, cutoff);
  }
  return levy_normalization(alpha, dim) * total;
}

double sphere_moment_size(int dim, const std::function<double(const Point&)>& profile) {
  Point moment{0.0, 0.0};
  for (const auto& dir : sphere_rule(dim)) {
    double v = profile(dir.w);
    moment[0] += dir.weight * dir.w[0] * v;
    moment[1] += dir.weight * dir.w[1] * v;
  }
  return std::hypot(moment[0], moment[1]);
}

cplx local_terms(double t, const Point& xi, const CoefficientSet& c) {
  cplx out{};
  if (c.alpha == 1.0) {
    Point b = c.b(t);
    out += cplx(0.0, b[0] * xi[0] + (c.dim == 2 ? b[1] * xi[1] : 0.0));
  }
  if (c.alpha == 2.0) {
    SymMatrix B = c.B(t);
    double q = B.a11 * xi[0] * xi[0];
    if (c.dim == 2) q += 2.0 * B.a12 * xi[0] * xi[1] + B.a22 * xi[1] * xi[1];
    out += -0.5 * q;
  }
  return out;
}

const Density& pick(const CoefficientSet& c, JumpDensity which) { return which == JumpDensity::m ? c.m : c.l; }

bool pick_homogeneous(const CoefficientSet& c, JumpDensity which) {
  return which == JumpDensity::m ? c.m_homogeneous : c.l_homogeneous;
}

}  // namespace

cplx homogeneous_jump_symbol(double alpha, int dim, const Point& xi, const std::function<double(const Point&)>& profile,
                             int angular_panels) {
  if (xi[0] == 0.0 && xi[1] == 0.0) return {};
  double c = levy_normalization(alpha, dim);
  cplx total{};
  if (alpha == 1.0) {
    double c0 = c * kPi / 2.0;
    for (const auto& dir : aligned_sphere_rule(dim, xi, angular_panels)) {
      double a = dir.w[0] * xi[0] + dir.w[1] * xi[1];
      double m = profile(dir.w);
      if (a == 0.0 || m == 0.0) continue;
      double sgn = a > 0.0 ? 1.0 : -1.0;
      total += -c0 * dir.weight * std::abs(a) * cplx(1.0, 2.0 / kPi * sgn * std::log(std::abs(a))) * m;
      // Vanishes when the odd moment of the profile cancels.
      total += cplx(0.0, c * dir.weight * (1.0 - kEulerGamma) * a * m);
    }
    return total;
  }
  double c0 = -c * std::tgamma(-alpha) * std::cos(0.5 * kPi * alpha);
  double tg = std::tan(0.5 * kPi * alpha);
  for (const auto& dir : aligned_sphere_rule(dim, xi, angular_panels)) {
    double a = dir.w[0] * xi[0] + dir.w[1] * xi[1];
    double m = profile(dir.w);
    if (a == 0.0 || m == 0.0) continue;
    double sgn = a > 0.0 ? 1.0 : -1.0;
    total += -c0 * dir.weight * std::pow(std::abs(a), alpha) * cplx(1.0, -tg * sgn) * m;
  }
  return total;
}

cplx quadrature_jump_symbol(double alpha, int dim, const Point& xi, const std::function<double(const Point&)>& density,
                            const QuadratureOptions& opts) {
  if (xi[0] == 0.0 && xi[1] == 0.0) return {};
  double inf = std::numeric_limits<double>::infinity();
  cplx coarse = jump_quadrature(Bracket::full, alpha, dim, xi, density, 0.0, inf, opts.nodes_per_decade,
                                opts.oscillation_cutoff);
  cplx fine = jump_quadrature(Bracket::full, alpha, dim, xi, density, 0.0, inf, 2 * opts.nodes_per_decade,
                              2.0 * opts.oscillation_cutoff);
  if (std::abs(fine - coarse) > 10.0 * opts.tolerance * std::max(1.0, std::abs(fine)))
    throw NumericError("symbol quadrature did not converge at xi=(" + std::to_string(xi[0]) + ", " +
                       std::to_string(xi[1]) + ")");
  return fine;
}

cplx symbol_closed_form(double t, const Point& xi, const CoefficientSet& c) {
  cplx out = local_terms(t, xi, c);
  if (!c.has_jumps()) return out;
  auto profile = [&](const Point& w) { return c.m0(t, w); };
  if (c.alpha == 1.0 && sphere_moment_size(c.dim, profile) > 1e-10 * std::max(1.0, c.K))
    throw ConfigError("m0", "A0(ii) violated: odd sphere moment of m0 does not vanish at alpha = 1");
  return out + homogeneous_jump_symbol(c.alpha, c.dim, xi, profile);
}

cplx symbol_quadrature(double t, const Point& xi, const CoefficientSet& c, const QuadratureOptions& opts) {
  cplx out = local_terms(t, xi, c);
  if (!c.has_jumps()) return out;
  return out + quadrature_jump_symbol(c.alpha, c.dim, xi, [&](const Point& y) { return c.m(t, y); }, opts);
}

cplx generator_symbol(double t, const Point& xi, const CoefficientSet& c) {
  cplx out = local_terms(t, xi, c);
  if (!c.has_jumps()) return out;
  auto density = [&](const Point& y) { return c.m(t, y); };
  return out + (c.m_homogeneous ? homogeneous_jump_symbol(c.alpha, c.dim, xi, density)
                                : quadrature_jump_symbol(c.alpha, c.dim, xi, density));
}

TruncationParts truncation_correction(double eps, double t, const Point& xi, const CoefficientSet& c, JumpDensity which,
                                      double r_max) {
  if (!(eps > 0.0)) throw ConfigError("eps", "jump cutoff must be positive");
  if (eps >= r_max) throw ConfigError("eps", "jump cutoff must be below the quadrature radius");
  if (!c.has_jumps() || (xi[0] == 0.0 && xi[1] == 0.0)) return {};
  const Density& dens = pick(c, which);
  auto density = [&](const Point& y) { return dens(t, y); };
  const int npd = 64;
  const double cutoff = 64.0;
  TruncationParts parts;
  parts.small = jump_quadrature(Bracket::full, c.alpha, c.dim, xi, density, 0.0, eps, npd, cutoff);
  if (pick_homogeneous(c, which)) {
    double cn = levy_normalization(c.alpha, c.dim);
    double odd = 0.0;
    for (const auto& dir : aligned_sphere_rule(c.dim, xi)) odd += dir.weight * (dir.w[0] * xi[0] + dir.w[1] * xi[1]) * density(dir.w);
    double radial = 0.0;
    if (c.alpha > 1.0) radial = std::pow(eps, 1.0 - c.alpha) / (c.alpha - 1.0);
    if (c.alpha == 1.0 && eps < 1.0) radial = -std::log(eps);
    parts.centering = cplx(0.0, -cn * odd * radial);
    cplx whole = homogeneous_jump_symbol(c.alpha, c.dim, xi, density);
    parts.compensator = -(whole - parts.small - parts.centering);
  } else {
    double hi = r_max >= kInfiniteRadius ? std::numeric_limits<double>::infinity() : r_max;
    parts.compensator = -jump_quadrature(Bracket::retained, c.alpha, c.dim, xi, density, eps, hi, npd, cutoff);
    parts.centering = jump_quadrature(Bracket::centering, c.alpha, c.dim, xi, density, eps, hi, npd, cutoff);
  }
  return parts;
}

Multiplier generator_multiplier(const SpectralGrid& grid, double t, const CoefficientSet& coeffs) {
  return make_multiplier(grid, [&](const Point& xi) { return generator_symbol(t, xi, coeffs); });
}

Multiplier compensator_multiplier(const SpectralGrid& grid, double t, const CoefficientSet& coeffs, double eps,
                                  JumpDensity which) {
  return make_multiplier(grid, [&](const Point& xi) { return truncation_correction(eps, t, xi, coeffs, which).compensator; });
}

Field apply_generator(const Field& field, double t, const CoefficientSet& coeffs) {
  auto report = validate_A(coeffs);
  if (!report.passed)
    throw ContractError("coefficients fail " + report.violations.front().clause + "; validate before applying the generator");
  return apply_multiplier(field, generator_multiplier(field.grid(), t, coeffs));
}

}  // namespace spide
