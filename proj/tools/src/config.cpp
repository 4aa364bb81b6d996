#include "filterlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "spide/errors.hpp"
#include "spide/noise.hpp"
#include "spide/parallel.hpp"

namespace filterlab {

using nlohmann::json;
using spide::ConfigError;

namespace {

const std::set<std::string> kShapes{"zero", "gaussian", "bump", "tone", "band"};
const std::set<std::string> kInputs{"u0", "f", "h", "phi"};

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError(where.empty() ? key : where + "." + key, "unknown field");
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& target) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  std::string name = where.empty() ? key : where + "." + key;
  try {
    target = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(name, "wrong type");
  }
}

const json& object_at(const json& obj, const char* key, const std::string& name) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ConfigError(name, "expected an object");
  return v;
}

GridSpec parse_grid(const json& obj, const std::string& where, GridSpec g) {
  reject_unknown(obj, where, {"d", "N", "L"});
  read(obj, "d", where, g.dim);
  read(obj, "N", where, g.nodes);
  read(obj, "L", where, g.half_width);
  try {
    g.make();
  } catch (const ConfigError& e) {
    throw ConfigError(where + "." + e.field(), e.what());
  }
  return g;
}

FieldShape parse_shape(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"shape", "amplitude", "width", "center", "wave", "band", "seed"});
  FieldShape s;
  read(obj, "shape", where, s.shape);
  read(obj, "amplitude", where, s.amplitude);
  read(obj, "width", where, s.width);
  read(obj, "center", where, s.center);
  read(obj, "wave", where, s.wave);
  read(obj, "band", where, s.band);
  read(obj, "seed", where, s.seed);
  if (!kShapes.count(s.shape)) throw ConfigError(where + ".shape", "unknown recipe '" + s.shape + "'");
  if (!(s.width > 0.0)) throw ConfigError(where + ".width", "must be positive");
  if (s.band < 1) throw ConfigError(where + ".band", "must be at least 1");
  if (!std::isfinite(s.amplitude)) throw ConfigError(where + ".amplitude", "must be finite");
  return s;
}

ZakaiSpec parse_zakai(const json& obj) {
  const std::string w = "zakai";
  reject_unknown(obj, w,
                 {"alpha", "m1", "m2", "grid", "T", "steps", "eps_cut", "u0_width", "sup_tolerance", "mass_tolerance"});
  ZakaiSpec z;
  read(obj, "alpha", w, z.alpha);
  read(obj, "m1", w, z.m1);
  read(obj, "m2", w, z.m2);
  if (obj.contains("grid")) z.grid = parse_grid(object_at(obj, "grid", "zakai.grid"), "zakai.grid", z.grid);
  read(obj, "T", w, z.T);
  read(obj, "steps", w, z.steps);
  read(obj, "eps_cut", w, z.eps_cut);
  read(obj, "u0_width", w, z.u0_width);
  read(obj, "sup_tolerance", w, z.sup_tolerance);
  read(obj, "mass_tolerance", w, z.mass_tolerance);
  if (!(z.alpha > 0.0 && z.alpha < 2.0)) throw ConfigError("zakai.alpha", "observed jumps need alpha in (0, 2)");
  if (!(z.m1 >= 0.0) || !(z.m2 >= 0.0)) throw ConfigError("zakai.m1", "intensities must be nonnegative");
  if (z.steps < 1) throw ConfigError("zakai.steps", "must be at least 1");
  if (!(z.T > 0.0)) throw ConfigError("zakai.T", "must be positive");
  if (!(z.eps_cut > 0.0)) throw ConfigError("zakai.eps_cut", "must be positive");
  if (!(z.u0_width > 0.0)) throw ConfigError("zakai.u0_width", "must be positive");
  return z;
}

}  // namespace

spide::Field FieldShape::sample(const spide::SpectralGrid& grid) const {
  using spide::Point;
  const int d = grid.dim();
  const double L = grid.half_width();
  if (shape == "zero") return spide::Field(grid);
  if (shape == "gaussian")
    return spide::Field::sample(grid, [&](const Point& x) {
      double r2 = (x[0] - center) * (x[0] - center) + (d == 2 ? x[1] * x[1] : 0.0);
      return amplitude * std::exp(-0.5 * r2 / (width * width));
    });
  if (shape == "bump")
    return spide::Field::sample(grid, [&](const Point& x) {
      double r2 = ((x[0] - center) * (x[0] - center) + (d == 2 ? x[1] * x[1] : 0.0)) / (width * width);
      return r2 < 1.0 ? amplitude * std::exp(-1.0 / (1.0 - r2)) : 0.0;
    });
  if (shape == "tone")
    return spide::Field::sample(grid, [&](const Point& x) { return amplitude * std::cos(spide::kPi * wave * x[0] / L); });
  return band_field(grid, seed, band, amplitude);
}

spide::Field band_field(const spide::SpectralGrid& grid, std::uint64_t seed, int band, double amplitude) {
  using spide::Point;
  const int d = grid.dim();
  const double L = grid.half_width();
  // Sum over integer (k1, k2) with |k| < band of a_k cos + b_k sin, decaying as 1 / (1 + |k|^2).
  struct Mode {
    double k1, k2, a, b;
  };
  std::vector<Mode> modes;
  spide::CounterRng rng(seed, 0, 0x62616e64);
  int k2max = d == 2 ? band - 1 : 0;
  for (int k1 = 0; k1 < band; ++k1)
    for (int k2 = -k2max; k2 <= k2max; ++k2) {
      if (k1 * k1 + k2 * k2 >= band * band) continue;
      if (k1 == 0 && k2 < 0) continue;
      double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      double a = rng.normal() * decay;
      double b = (k1 == 0 && k2 == 0) ? 0.0 : rng.normal() * decay;
      modes.push_back({static_cast<double>(k1), static_cast<double>(k2), a, b});
    }
  return spide::Field::sample(grid, [&](const Point& x) {
    double v = 0.0;
    for (const auto& m : modes) {
      double phase = spide::kPi * (m.k1 * x[0] + m.k2 * x[1]) / L;
      v += m.a * std::cos(phase) + m.b * std::sin(phase);
    }
    return amplitude * v;
  });
}

const std::vector<std::string>& criterion_ids() {
  static const std::vector<std::string> ids{"C1", "C2", "C3", "C4", "C5", "C6",
                                            "C7", "C8", "C9", "C10", "C11", "C12"};
  return ids;
}

spide::CoefficientSet ExperimentConfig::coefficients() const {
  auto c = spide::make_preset(preset, alpha, grid.dim);
  c.T = T;
  return c;
}

int ExperimentConfig::worker_threads() const { return threads > 0 ? threads : spide::default_threads(); }

double ExperimentConfig::scale_for(const std::string& id) const {
  auto it = tolerance_scale.find(id);
  return it == tolerance_scale.end() ? 1.0 : it->second;
}

bool ExperimentConfig::selected(const std::string& id) const {
  return criteria.empty() || std::find(criteria.begin(), criteria.end(), id) != criteria.end();
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
  reject_unknown(doc, "",
                 {"preset", "alpha", "grid", "steps", "T", "lambdas", "norms", "inputs", "seed", "paths", "eps_cut",
                  "out", "threads", "criteria", "tolerance_scale", "determinism_rerun", "zakai"});
  ExperimentConfig c;
  read(doc, "preset", "", c.preset);
  read(doc, "alpha", "", c.alpha);
  if (doc.contains("grid")) c.grid = parse_grid(object_at(doc, "grid", "grid"), "grid", c.grid);
  read(doc, "steps", "", c.steps);
  read(doc, "T", "", c.T);
  read(doc, "lambdas", "", c.lambdas);
  if (doc.contains("norms")) {
    if (!doc["norms"].is_array()) throw ConfigError("norms", "expected an array");
    c.norms.clear();
    for (std::size_t i = 0; i < doc["norms"].size(); ++i) {
      std::string w = "norms[" + std::to_string(i) + "]";
      const json& n = doc["norms"][i];
      if (!n.is_object()) throw ConfigError(w, "expected an object");
      reject_unknown(n, w, {"beta", "p", "r"});
      NormTriple t;
      read(n, "beta", w, t.beta);
      read(n, "p", w, t.p);
      read(n, "r", w, t.r);
      if (!(t.p >= 2.0)) throw ConfigError(w + ".p", "must be at least 2");
      if (!(t.r >= 1.0)) throw ConfigError(w + ".r", "must be at least 1");
      c.norms.push_back(t);
    }
  }
  if (doc.contains("inputs")) {
    const json& in = object_at(doc, "inputs", "inputs");
    reject_unknown(in, "inputs", kInputs);
    for (const auto& [key, value] : in.items()) {
      if (!value.is_object()) throw ConfigError("inputs." + key, "expected an object");
      c.inputs[key] = parse_shape(value, "inputs." + key);
    }
  }
  read(doc, "seed", "", c.seed);
  read(doc, "paths", "", c.paths);
  read(doc, "eps_cut", "", c.eps_cut);
  read(doc, "out", "", c.out);
  read(doc, "threads", "", c.threads);
  read(doc, "criteria", "", c.criteria);
  read(doc, "tolerance_scale", "", c.tolerance_scale);
  read(doc, "determinism_rerun", "", c.determinism_rerun);
  if (doc.contains("zakai")) c.zakai = parse_zakai(object_at(doc, "zakai", "zakai"));

  if (c.paths < 1) throw ConfigError("paths", "path count must be at least 1");
  if (c.steps < 1) throw ConfigError("steps", "must be at least 1");
  if (!(c.T > 0.0)) throw ConfigError("T", "must be positive");
  if (!(c.eps_cut > 0.0)) throw ConfigError("eps_cut", "must be positive");
  if (c.threads < 0) throw ConfigError("threads", "must be nonnegative");
  for (double l : c.lambdas)
    if (!(l >= 0.0)) throw ConfigError("lambdas", "damping must be nonnegative");
  const auto& ids = criterion_ids();
  for (const auto& id : c.criteria)
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) throw ConfigError("criteria", "unknown criterion '" + id + "'");
  for (const auto& [id, scale] : c.tolerance_scale) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw ConfigError("tolerance_scale." + id, "unknown criterion");
    if (!(scale >= 0.0)) throw ConfigError("tolerance_scale." + id, "must be nonnegative");
  }
  // Resolves the preset name and checks alpha/d against it.
  c.coefficients();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json norms = json::array();
  for (const auto& n : c.norms) norms.push_back({{"beta", n.beta}, {"p", n.p}, {"r", n.r}});
  json inputs = json::object();
  for (const auto& [key, s] : c.inputs)
    inputs[key] = {{"shape", s.shape}, {"amplitude", s.amplitude}, {"width", s.width}, {"center", s.center},
                   {"wave", s.wave},   {"band", s.band},           {"seed", s.seed}};
  const auto& z = c.zakai;
  return {{"preset", c.preset},
          {"alpha", c.alpha},
          {"grid", {{"d", c.grid.dim}, {"N", c.grid.nodes}, {"L", c.grid.half_width}}},
          {"steps", c.steps},
          {"T", c.T},
          {"lambdas", c.lambdas},
          {"norms", norms},
          {"inputs", inputs},
          {"seed", c.seed},
          {"paths", c.paths},
          {"eps_cut", c.eps_cut},
          {"criteria", c.criteria},
          {"tolerance_scale", c.tolerance_scale},
          {"zakai",
           {{"alpha", z.alpha},
            {"m1", z.m1},
            {"m2", z.m2},
            {"grid", {{"d", z.grid.dim}, {"N", z.grid.nodes}, {"L", z.grid.half_width}}},
            {"T", z.T},
            {"steps", z.steps},
            {"eps_cut", z.eps_cut},
            {"u0_width", z.u0_width}}}};
}

}  // namespace filterlab
