#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "spide/coefficients.hpp"
#include "spide/spectral_grid.hpp"

namespace filterlab {

struct GridSpec {
  int dim = 1;
  int nodes = 64;
  double half_width = 8.0;

  spide::SpectralGrid make() const { return spide::make_grid(dim, nodes, half_width); }
};

// Named analytic shape. "band" draws a random trigonometric polynomial with
// integer wave numbers |k| < band on the box, so it samples the same function
// on every grid of that box.
struct FieldShape {
  std::string shape = "gaussian";  // zero | gaussian | bump | tone | band
  double amplitude = 1.0;
  double width = 1.0;   // gaussian, bump
  double center = 0.0;  // gaussian, bump (first axis)
  int wave = 1;         // tone: cos(pi k x / L)
  int band = 4;         // band: cutoff wave number
  std::uint64_t seed = 1;

  spide::Field sample(const spide::SpectralGrid& grid) const;
};

// Random trigonometric polynomial with integer wave numbers |k| < band on
// the box of `grid`; the same (seed, band, box) gives the same function on
// every grid.
spide::Field band_field(const spide::SpectralGrid& grid, std::uint64_t seed, int band, double amplitude = 1.0);

struct NormTriple {
  double beta = 0.0;
  double p = 2.0;
  double r = 2.0;
};

struct ZakaiSpec {
  double alpha = 1.0;
  double m1 = 1.0;  // intensity of the unobserved jumps
  double m2 = 1.0;  // intensity of the observed jumps
  GridSpec grid{1, 256, 16.0};
  double T = 1.0;
  int steps = 512;
  double eps_cut = 1e-3;
  double u0_width = 1.0;
  double sup_tolerance = 1e-3;
  double mass_tolerance = 1e-6;
};

struct ExperimentConfig {
  std::string preset = "fractional-laplacian";
  double alpha = 1.5;
  GridSpec grid;
  int steps = 512;
  double T = 1.0;
  std::vector<double> lambdas{0.0, 1.0, 10.0, 100.0};
  std::vector<NormTriple> norms{{0.0, 2.0, 2.0}, {0.0, 4.0, 2.0}};
  std::map<std::string, FieldShape> inputs;  // keys: u0, f, h, phi
  std::uint64_t seed = 20240611;
  int paths = 10000;
  double eps_cut = 0.02;
  std::string out = "filterlab_out";
  int threads = 0;  // 0: SPIDE_THREADS or hardware concurrency
  std::vector<std::string> criteria;  // empty: all
  std::map<std::string, double> tolerance_scale;  // per criterion id
  bool determinism_rerun = true;
  ZakaiSpec zakai;

  spide::CoefficientSet coefficients() const;
  int worker_threads() const;
  double scale_for(const std::string& id) const;
  bool selected(const std::string& id) const;
};

// Ids of the acceptance criteria, in report order.
const std::vector<std::string>& criterion_ids();

// Throws spide::ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace filterlab
