// filterlab: command-line front end for the acceptance suite and single experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "filterlab/config.hpp"
#include "filterlab/experiments.hpp"
#include "filterlab/suite.hpp"
#include "spide/errors.hpp"
#include "spide/norms.hpp"
#include "spide/propagator.hpp"

namespace {

using namespace filterlab;

struct Overrides {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<int> threads;
  std::optional<double> eps_cut;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(o.config_path);
  // Flags win over the file; re-parse so the usual validation applies.
  auto doc = to_json(c);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.paths) doc["paths"] = *o.paths;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.eps_cut) doc["eps_cut"] = *o.eps_cut;
  doc["out"] = o.out ? *o.out : c.out;
  if (!o.threads) doc["threads"] = c.threads;
  return parse_config(doc);
}

void print_lines(const SuiteReport& report) {
  for (const auto& c : report.criteria) {
    const Check* w = c.worst();
    std::printf("%s %s %s", c.pass() ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str());
    if (w) std::printf("  [%s = %s, tol %s]", w->label.c_str(), num(w->value).c_str(), num(w->tol).c_str());
    std::printf("\n");
  }
  std::fflush(stdout);
}

int finish(const SuiteReport& report, const ExperimentConfig& config) {
  emit_results(report, config.out);
  print_lines(report);
  std::printf("%s (%s/suite.json)\n", report.pass() ? "all criteria passed" : "some criteria failed",
              config.out.c_str());
  return report.pass() ? 0 : 1;
}

int cmd_suite(const ExperimentConfig& config) {
  auto report = run_suite(config, [](const CriterionResult& r) {
    std::fprintf(stderr, "%s %s done\n", r.id.c_str(), r.pass() ? "pass" : "fail");
  });
  return finish(report, config);
}

int cmd_kernel(const ExperimentConfig& config) {
  SuiteReport report;
  report.environment = {{"config", to_json(config)}};
  report.criteria.push_back(kernel_report(config));
  return finish(report, config);
}

int cmd_zakai(const ExperimentConfig& config) {
  SuiteReport report;
  report.environment = {{"seed", config.seed}, {"config", to_json(config)}};
  report.criteria.push_back(zakai_check(config));
  return finish(report, config);
}

spide::Field input_or_zero(const ExperimentConfig& config, const std::string& name, const spide::SpectralGrid& grid) {
  auto it = config.inputs.find(name);
  return it == config.inputs.end() ? spide::Field(grid) : it->second.sample(grid);
}

// One path of the configured problem; the solution and the event list go to disk.
int cmd_solve(const ExperimentConfig& config) {
  auto grid = config.grid.make();
  auto coeffs = config.coefficients();
  auto mesh = spide::uniform_mesh(config.T, config.steps);
  spide::MarkMeasure marks{{{0, 1.0, 1.0}, {1, -0.5, 2.0}}};
  spide::SolverInputs in;
  in.u0 = config.inputs.count("u0") ? input_or_zero(config, "u0", grid) : FieldShape{}.sample(grid);
  if (config.inputs.count("f")) {
    in.f = [f = input_or_zero(config, "f", grid)](double) { return f; };
    in.f_constant = true;
  }
  if (config.inputs.count("h")) {
    in.h = [h = input_or_zero(config, "h", grid)](double) { return std::vector<spide::Field>{h}; };
    in.h_constant = true;
  }
  bool jumps = config.inputs.count("phi") > 0;
  if (jumps) {
    in.phi = [p = input_or_zero(config, "phi", grid)](double, const spide::MarkAtom& m) {
      return spide::cplx(m.value) * p;
    };
    in.phi_constant = true;
  }
  spide::SolverOptions opt;
  opt.lambda = config.lambdas.empty() ? 0.0 : config.lambdas.front();
  opt.eps_cut = config.eps_cut;
  spide::MildSolver solver(grid, coeffs, mesh, in, opt, jumps ? marks : spide::MarkMeasure{});
  spide::NoiseConfig nc;
  nc.stable = solver.jump_intensity();
  nc.eps_cut = config.eps_cut;
  nc.wiener_modes = in.h ? 1 : 0;
  if (jumps) nc.marks = marks;
  auto bundle = solver.solve(spide::sample_path(nc, mesh, config.seed));

  CriterionResult r;
  r.id = "solve";
  r.name = "single path";
  r.anchor = "mild solution on one noise path";
  Table t{"solve_trace", {"t", "l2"}, {}};
  for (std::size_t k = 0; k < bundle.times.size(); ++k) t.add({num(bundle.times[k]), num(bundle.slice_l2[k])});
  r.tables.push_back(std::move(t));
  r.fields.push_back({"solution", bundle.physical().slices});
  std::ostringstream events;
  spide::write_events_csv(events, bundle.path);
  SuiteReport report;
  report.environment = {{"seed", config.seed}, {"config", to_json(config)}};
  report.criteria.push_back(std::move(r));
  auto files = render_results(report);
  files["tables/events.csv"] = events.str();
  write_files(files, config.out);
  std::printf("solved %zu slices, %zu stable events, final L2 %s -> %s\n", bundle.times.size(),
              bundle.path.stable_events.size(), num(bundle.slice_l2.back()).c_str(), config.out.c_str());
  return 0;
}

// Sobolev and Besov norms of every configured input for every (beta, p, r).
int cmd_norms(const ExperimentConfig& config) {
  auto grid = config.grid.make();
  Table t{"norms", {"input", "beta", "p", "sobolev", "besov_pp"}, {}};
  for (const auto& [name, shape] : config.inputs) {
    auto u = shape.sample(grid);
    for (const auto& n : config.norms) {
      double h = spide::sobolev_norm(u, n.beta, n.p).value;
      double b = spide::besov_norm(u, n.beta, n.p).value;
      t.add({name, num(n.beta), num(n.p), num(h), num(b)});
      std::printf("%-4s beta=%s p=%s  H=%s  B_pp=%s\n", name.c_str(), num(n.beta).c_str(), num(n.p).c_str(),
                  num(h).c_str(), num(b).c_str());
    }
  }
  CriterionResult r;
  r.id = "norms";
  r.tables.push_back(std::move(t));
  SuiteReport report;
  report.environment = {{"config", to_json(config)}};
  report.criteria.push_back(std::move(r));
  write_files(render_results(report), config.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"filterlab: spectral solver experiments and acceptance suite"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "base RNG seed");
  app.add_option("--paths", o.paths, "Monte Carlo path count");
  app.add_option("--threads", o.threads, "worker threads (default: SPIDE_THREADS or cores)");
  app.add_option("--eps-cut", o.eps_cut, "small-jump cutoff");
  app.fallthrough();

  int (*command)(const ExperimentConfig&) = nullptr;
  auto sub = [&](const char* name, const char* help, int (*fn)(const ExperimentConfig&)) {
    app.add_subcommand(name, help)->callback([&command, fn] { command = fn; });
  };
  sub("suite", "run the acceptance criteria and write suite.json", cmd_suite);
  sub("solve", "solve the configured problem on one noise path", cmd_solve);
  sub("kernel", "kernel mass, positivity and block decay report", cmd_kernel);
  sub("norms", "norms of the configured input fields", cmd_norms);
  sub("zakai", "filter density against the conditional oracle", cmd_zakai);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return command(resolve(o));
  } catch (const spide::ConfigError& e) {
    std::fprintf(stderr, "configuration error in '%s': %s\n", e.field().c_str(), e.what());
    return 2;
  } catch (const spide::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
