// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit code 0 iff all pass.
#include <cstdio>
#include <cstring>
#include <string>

#include "filterlab/config.hpp"
#include "filterlab/suite.hpp"
#include "spide/errors.hpp"

int main(int argc, char** argv) {
  std::string out = "acceptance_out";
  std::string config_path;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--out")) out = argv[i + 1];
    else if (!std::strcmp(argv[i], "--config")) config_path = argv[i + 1];
  }
  try {
    auto config = config_path.empty() ? filterlab::parse_config(nlohmann::json::object())
                                      : filterlab::load_config(config_path);
    auto report = filterlab::run_suite(config, [](const filterlab::CriterionResult& c) {
      const auto* w = c.worst();
      std::printf("%s %s %s", c.pass() ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str());
      if (w)
        std::printf("  [%s = %s, tol %s]", w->label.c_str(), filterlab::num(w->value).c_str(),
                    filterlab::num(w->tol).c_str());
      std::printf("\n");
      std::fflush(stdout);
    });
    filterlab::emit_results(report, out);
    std::printf("%s\n", report.pass() ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
    return report.pass() ? 0 : 1;
  } catch (const spide::ConfigError& e) {
    std::fprintf(stderr, "configuration error in '%s': %s\n", e.field().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
