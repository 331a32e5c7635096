// wsl_cli: verify solution families, induce surfaces, summarize reports.
//
// Exit codes: 0 pass, 2 numerical failure, 64 usage, 66 missing inputs.

#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "wsl/cli.hpp"

namespace {

using wsl::cli::RunConfig;

struct Flags {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_run_flags(CLI::App* sub, Flags& f, bool family_flags) {
  sub->add_option("--config", f.config_path, "key = value config file; flags override it");
  auto opt = [&](const std::string& key, const std::string& help) {
    sub->add_option("--" + key, f.values[key], help);
  };
  if (family_flags) {
    opt("family", "rational | exponential | trig | unimodular | holomorphic");
    opt("lambda", "family parameter lambda");
    opt("A", "trig family parameter A");
    opt("H0", "constant mean curvature of the unimodular and holomorphic families");
    opt("eps", "spinor sign, 1 or -1");
    opt("grid", "samples as NXxNY");
    opt("domain", "xmin,xmax,ymin,ymax");
    opt("basepoint", "x,y of the integration basepoint");
    opt("tol-scale", "multiplier for every tolerance");
    opt("levels", "grids in the refinement study (each halves h)");
    opt("jobs", "suites run concurrently");
    opt("format", "json | csv");
  }
  opt("out", "output directory (WSL_OUT overrides)");
}

RunConfig resolve(const CLI::App* sub, const Flags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig{} : wsl::cli::load_config(f.config_path);
  for (const auto& [key, value] : f.values)
    if (sub->count("--" + key) > 0) wsl::cli::set_key(c, key, value);
  if (const char* env = std::getenv("WSL_OUT"); env && *env) wsl::cli::set_key(c, "out", env);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spinor-induced surfaces: residual checks, surface induction and reports"};
  app.set_version_flag("--version", wsl::kVersion);
  app.require_subcommand(1);

  Flags verify_flags, induce_flags, report_flags;
  CLI::App* verify = app.add_subcommand("verify", "run the verification suites for a family");
  CLI::App* induce = app.add_subcommand("induce", "induce a surface and export OBJ, CSV and curvature JSON");
  CLI::App* report = app.add_subcommand("report", "summarize the reports in the output directory");
  add_run_flags(verify, verify_flags, true);
  add_run_flags(induce, induce_flags, true);
  add_run_flags(report, report_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wsl::cli::kUsage;
  }

  try {
    if (verify->parsed()) return wsl::cli::cmd_verify(resolve(verify, verify_flags), std::cerr);
    if (induce->parsed()) return wsl::cli::cmd_induce(resolve(induce, induce_flags), std::cerr);
    return wsl::cli::cmd_report(resolve(report, report_flags), std::cout);
  } catch (const wsl::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return wsl::cli::kUsage;
  } catch (const wsl::cli::MissingInput& e) {
    std::cerr << e.what() << '\n';
    return wsl::cli::kMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return wsl::cli::kNumericalFailure;
  }
}
