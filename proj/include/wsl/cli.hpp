#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsl/inducer.hpp"
#include "wsl/integrability.hpp"
#include "wsl/solutions.hpp"

namespace wsl::cli {

/// Process exit codes; stable across versions.
enum ExitCode : int {
  kPass = 0,
  kNumericalFailure = 2,
  kUsage = 64,
  kMissingInput = 66,
};

/// Bad flags, bad config or invalid family parameters (exit 64).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing input files or directories (exit 66).
struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family = "rational";
  double lambda = 1.0;
  double A = 1.0;
  double H0 = 1.0;
  int eps = 1;
  int nx = 101;
  int ny = 101;
  /// xmin, xmax, ymin, ymax; the family default when unset.
  std::optional<std::array<double, 4>> domain;
  /// Basepoint (x, y); the sample nearest the domain center when unset.
  std::optional<std::array<double, 2>> basepoint;
  double tol_scale = 1.0;
  int levels = 2;
  int jobs = 1;
  std::string out = "wsl_out";
  std::string format = "json";

  bool operator==(const RunConfig&) const = default;
};

/// Keys accepted in config files and as --flags, in serialization order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"family", "lambda", "A",         "H0",
                                                "eps",    "grid",   "domain",    "basepoint",
                                                "tol-scale", "levels", "jobs",   "out",
                                                "format"};
  return keys;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(out))
    throw UsageError(key + ": expected a finite number, got '" + v + "'");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw UsageError(key + ": expected an integer, got '" + v + "'");
  return out;
}

template <std::size_t N>
std::array<double, N> parse_list(const std::string& key, const std::string& v, char sep = ',') {
  std::array<double, N> out{};
  std::size_t start = 0;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t end = v.find(sep, start);
    if ((k + 1 < N) == (end == std::string::npos))
      throw UsageError(key + ": expected " + std::to_string(N) + " comma-separated values");
    out[k] = parse_double(key, v.substr(start, end == std::string::npos ? std::string::npos : end - start));
    start = end + 1;
  }
  return out;
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Sets one key from its textual value. The grammar is shared by config files
/// and command-line flags:
///   grid = NXxNY, domain = xmin,xmax,ymin,ymax, basepoint = x,y,
///   format = json|csv, eps = 1|-1, everything else a number or a name.
inline void set_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = detail::trim(raw);
  if (key == "family") {
    const auto& names = family_names();
    if (std::find(names.begin(), names.end(), v) == names.end())
      throw UsageError("unknown family '" + v + "'");
    c.family = v;
  } else if (key == "lambda") {
    c.lambda = detail::parse_double(key, v);
  } else if (key == "A") {
    c.A = detail::parse_double(key, v);
  } else if (key == "H0") {
    c.H0 = detail::parse_double(key, v);
  } else if (key == "eps") {
    c.eps = detail::parse_int(key, v);
    if (c.eps != 1 && c.eps != -1) throw UsageError("eps must be 1 or -1");
  } else if (key == "grid") {
    const auto x = v.find('x');
    if (x == std::string::npos) throw UsageError("grid: expected NXxNY, got '" + v + "'");
    c.nx = detail::parse_int(key, v.substr(0, x));
    c.ny = detail::parse_int(key, v.substr(x + 1));
    if (c.nx < 3 || c.ny < 3) throw UsageError("grid: at least 3x3 samples required");
  } else if (key == "domain") {
    const auto d = detail::parse_list<4>(key, v);
    if (!(d[0] < d[1] && d[2] < d[3])) throw UsageError("domain: need xmin < xmax and ymin < ymax");
    c.domain = d;
  } else if (key == "basepoint") {
    c.basepoint = detail::parse_list<2>(key, v);
  } else if (key == "tol-scale") {
    c.tol_scale = detail::parse_double(key, v);
    if (!(c.tol_scale > 0.0)) throw UsageError("tol-scale must be positive");
  } else if (key == "levels") {
    c.levels = detail::parse_int(key, v);
    if (c.levels < 1 || c.levels > 4) throw UsageError("levels must be between 1 and 4");
  } else if (key == "jobs") {
    c.jobs = detail::parse_int(key, v);
    if (c.jobs < 1) throw UsageError("jobs must be at least 1");
  } else if (key == "out") {
    if (v.empty()) throw UsageError("out: empty path");
    c.out = v;
  } else if (key == "format") {
    if (v != "json" && v != "csv") throw UsageError("format must be json or csv");
    c.format = v;
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

/// Parses "key = value" lines; blank lines and lines starting with '#' are skipped.
inline RunConfig parse_config(std::istream& is, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    set_key(base, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return base;
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MissingInput("cannot read config file " + path);
  return parse_config(is);
}

inline std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "family = " << c.family << '\n';
  os << "lambda = " << detail::fmt(c.lambda) << '\n';
  os << "A = " << detail::fmt(c.A) << '\n';
  os << "H0 = " << detail::fmt(c.H0) << '\n';
  os << "eps = " << c.eps << '\n';
  os << "grid = " << c.nx << 'x' << c.ny << '\n';
  if (c.domain) {
    const auto& d = *c.domain;
    os << "domain = " << detail::fmt(d[0]) << ',' << detail::fmt(d[1]) << ',' << detail::fmt(d[2])
       << ',' << detail::fmt(d[3]) << '\n';
  }
  if (c.basepoint)
    os << "basepoint = " << detail::fmt((*c.basepoint)[0]) << ',' << detail::fmt((*c.basepoint)[1]) << '\n';
  os << "tol-scale = " << detail::fmt(c.tol_scale) << '\n';
  os << "levels = " << c.levels << '\n';
  os << "jobs = " << c.jobs << '\n';
  os << "out = " << c.out << '\n';
  os << "format = " << c.format << '\n';
  return os.str();
}

/// The family named by the config; invalid parameters are usage errors.
inline SolutionFamily family_of(const RunConfig& c) {
  try {
    return make_family(c.family, {c.lambda, c.A, c.H0, c.eps});
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

inline GridSpec grid_of(const RunConfig& c, const SolutionFamily& f) {
  GridSpec g = f.default_grid(c.nx, c.ny);
  if (c.domain) g = {(*c.domain)[0], (*c.domain)[1], (*c.domain)[2], (*c.domain)[3], c.nx, c.ny};
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return g;
}

inline std::pair<int, int> basepoint_of(const RunConfig& c, const GridSpec& g) {
  if (!c.basepoint) return default_basepoint(g);
  const auto [x, y] = *c.basepoint;
  if (!g.contains(x, y)) throw UsageError("basepoint outside the domain");
  return g.nearest(x, y);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// A verification suite: one report per grid. Refined suites run on every
/// level and carry the ratio of the last two levels.
struct Suite {
  std::string name;
  std::function<ResidualReport(const GridSpec&)> run;
  bool refine = false;
};

namespace detail {

inline ResidualReport named(ResidualReport r, const std::string& name) {
  r.name = name;
  return r;
}

}  // namespace detail

/// Suites applicable to a family: exact identities with analytic
/// derivatives, their finite-difference counterparts, currents, the
/// integrability and spin-matrix checks, and the induced-surface closure.
inline std::vector<Suite> suites_for(const SolutionFamily& f, const RunConfig& c) {
  const Tolerances tol{.scale = c.tol_scale};
  const SpinorForm S = f.spinor();
  const ClosedForm H = f.H, rho = f.rho;
  const bool zero_spinor = f.p_constant && *f.p_constant == 0.0;
  std::vector<Suite> out;

  auto exact = [&](std::string name, double t, auto body) {
    out.push_back({name, [=](const GridSpec& g) { return detail::named(body(g), name).within(t); }, false});
  };
  auto fd = [&](std::string name, auto body) {
    out.push_back({name, [=](const GridSpec& g) { return detail::named(body(g), name).within(tol.fd(g)); }, true});
  };

  exact("weierstrass_exact", tol.exact, [=](const GridSpec& g) { return weierstrass_residual(S, H, g); });
  fd("weierstrass_fd", [=](const GridSpec& g) { return weierstrass_residual(sample(S, g), sample(H, g), g); });
  exact("sigma_model_exact", tol.exact, [=](const GridSpec& g) { return sigma_residual(rho, H, g); });
  fd("sigma_model_fd", [=](const GridSpec& g) { return sigma_residual(sample(rho, g), sample(H, g), g); });
  exact("conservation_exact", tol.exact, [=](const GridSpec& g) { return potential_conservation_residual(S, g); });
  fd("conservation_fd", [=](const GridSpec& g) { return potential_conservation_residual(sample(S, g), g); });
  exact("current_exact", tol.exact, [=](const GridSpec& g) { return dbar_J_defect(S, H, g); });
  fd("current_fd", [=](const GridSpec& g) { return dbar_J_defect(sample(S, g), sample(H, g), g); });
  exact("spin_algebra", tol.exact, [=](const GridSpec& g) { return spin_algebra_report(sample(spin_matrix(rho), g)); });
  out.push_back({"h_integrability", [=](const GridSpec& g) {
                   ResidualReport r = detail::named(h_integrability_residual(H, g), "h_integrability");
                   r.expect = Expectation::info;
                   r.note = "dbar d (1/H) vanishes iff H = 1/(Q(z) + Q(zbar)); the interior mean is a metric";
                   return r;
                 }, false});

  if (f.constant_H) {
    exact("landau_lifshitz_exact", tol.exact,
          [=](const GridSpec& g) { return landau_lifshitz_residual(spin_matrix(rho), g); });
    fd("landau_lifshitz_fd",
       [=](const GridSpec& g) { return landau_lifshitz_residual(spin_matrix(sample(rho, g)), g); });
  } else {
    exact("deformed_ll_exact", tol.exact, [=](const GridSpec& g) { return deformed_ll_residual(rho, H, g); });
    fd("deformed_ll_fd", [=](const GridSpec& g) { return deformed_ll_residual(sample(rho, g), sample(H, g), g); });
    out.push_back({"undeformed_ll_control", [=](const GridSpec& g) {
                     ResidualReport r =
                         detail::named(landau_lifshitz_residual(spin_matrix(rho), g), "undeformed_ll_control");
                     r.note = "negative control: nonconstant H needs the deformation term";
                     // Analytic derivatives: a solution would sit at roundoff, so
                     // anything three orders above the exact tolerance is a signal.
                     return r.exceeding(1e3 * tol.exact);
                   }, false});
  }

  if (zero_spinor) return out;

  exact("transform_round_trip", tol.identity,
        [=](const GridSpec& g) { return transform_round_trip(S, rho, H, g); });
  exact("sinh_gordon_exact", tol.exact, [=](const GridSpec& g) { return sinh_gordon_residual(S, H, g); });
  fd("sinh_gordon_fd", [=](const GridSpec& g) { return sinh_gordon_residual(sample(S, g), sample(H, g), g); });

  const std::optional<double> bx = c.basepoint ? std::optional((*c.basepoint)[0]) : std::nullopt;
  out.push_back({"modified_current", [=](const GridSpec& g) {
                   const double x0 = bx.value_or(g.x(default_basepoint(g).first));
                   return detail::named(modified_current(S, H, x0, g).dbar, "modified_current").within(tol.fd(g));
                 }, false});

  if (f.p_constant) {
    const double p0 = *f.p_constant;
    exact("current_norm_identity", tol.identity, [=](const GridSpec& g) { return current_norm_identity(S, H, g); });
    exact("linearization_constraints", tol.exact, [=](const GridSpec& g) {
      ResidualReport r = linearization_constraint_residual(S, g);
      r.add_scalar("p variance", r.metrics["p_variance"]);
      return r;
    });
    exact("linear_system_exact", tol.exact, [=](const GridSpec& g) { return linear_system_residual(S, H, p0, g); });
    fd("linear_system_fd",
       [=](const GridSpec& g) { return linear_system_residual(sample(S, g), sample(H, g), p0, g); });
  }

  if (f.name == "unimodular") {
    const double lam = f.params.at("lambda"), h0 = f.params.at("H0");
    exact("multisoliton_product", tol.exact, [=](const GridSpec& g) {
      const ClosedForm prod = multisoliton_product(rho, family_unimodular(2.0 * lam, h0).rho, g);
      ResidualReport r = sigma_residual(prod, H, g);
      r.add("|rho| - 1", values(prod * conj(prod), g) - 1.0);
      return r;
    });
    exact("unimodular_H_constancy", tol.exact,
          [=](const GridSpec& g) { return unimodular_H_constancy_check(rho, H, g, tol.exact); });
    out.push_back({"unimodular_H_control", [=](const GridSpec& g) {
                     ResidualReport r = detail::named(
                         unimodular_H_constancy_check(rho, family_rational(1.0).H, g, tol.exact),
                         "unimodular_H_control");
                     r.note = "negative control: a unimodular rho cannot carry a nonconstant H";
                     return r.exceeding(tol.exact);
                   }, false});
    exact("phi_compatibility", tol.exact, [=](const GridSpec& g) { return phi_compatibility_residual(rho, H, g); });
  }

  // Induced surface: curvature closure and path independence.
  auto induce = [=](const GridSpec& g) {
    const std::pair<int, int> base =
        bx ? g.nearest((*bx), 0.5 * (g.y_min + g.y_max)) : default_basepoint(g);
    return induce_surface(sample(S, g), base);
  };
  fd("mean_curvature_closure", [=](const GridSpec& g) {
    const Surface srf = induce(g);
    ResidualReport r = mean_curvature_closure(fundamental_forms(srf), sample(H, g));
    r.metrics["imaginary_residue"] = srf.imaginary_residue;
    r.metrics["conjugate_mismatch"] = srf.conjugate_mismatch;
    return r;
  });
  fd("gauss_curvature_closure", [=](const GridSpec& g) {
    return gauss_curvature_consistency(fundamental_forms(induce(g)), gaussian_curvature_from_p(density_p(S), g));
  });
  fd("path_independence", [=](const GridSpec& g) {
    const SpinorField s = sample(S, g);
    const auto base = default_basepoint(g);
    return path_independence_report(s, base, {g.nx - 2, g.ny - 2});
  });
  return out;
}

/// Ratio below which a refined suite counts as nonconvergent.
inline constexpr double kMinRatio = 2.5;

/// Runs a suite on every level. Refined suites return the finest report with
/// the convergence ratio attached; exceptions become failed reports.
inline ResidualReport run_suite(const Suite& s, const GridSpec& g0, int levels) {
  try {
    if (!s.refine || levels < 2) return s.run(g0);
    ConvergenceStudy study;
    study.lo = kMinRatio;
    study.hi = INFINITY;
    GridSpec g = g0;
    ResidualReport last;
    for (int k = 0; k < levels; ++k) {
      if (k > 0) g = g.refined();
      last = s.run(g);
      study.errors.push_back(last.max_norm());
      last.metrics["level" + std::to_string(k) + "_max"] = last.max_norm();
    }
    last.converged = study.second_order();
    const bool at_floor = std::all_of(study.errors.end() - 2, study.errors.end(),
                                      [&](double e) { return e < study.floor; });
    if (at_floor)
      last.note = "roundoff on the finest levels: the discretization is exact here";
    else
      last.convergence_ratio = study.last_ratio();
    if (!*last.converged) last.note = "nonconvergent: ratio below " + detail::fmt(kMinRatio);
    return last;
  } catch (const std::exception& e) {
    ResidualReport r(s.name, g0);
    r.note = std::string("error: ") + e.what();
    r.within(0.0);
    return r;
  }
}

/// Runs suites with at most `jobs` in flight; results keep suite order.
inline std::vector<ResidualReport> run_suites(const std::vector<Suite>& suites, const GridSpec& g,
                                              int levels, int jobs) {
  std::vector<ResidualReport> out(suites.size());
  std::size_t next = 0;
  while (next < suites.size()) {
    std::vector<std::future<ResidualReport>> batch;
    const std::size_t end = std::min(suites.size(), next + std::size_t(std::max(jobs, 1)));
    for (std::size_t k = next; k < end; ++k)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 [&, k] { return run_suite(suites[k], g, levels); }));
    for (std::size_t k = next; k < end; ++k) out[k] = batch[k - next].get();
    next = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

inline const char* kCsvHeader =
    "suite,component,max_norm,l2_norm,masked_points,tolerance,expect,passed,convergence_ratio";

/// One row per component plus an aggregate row with component "*".
inline std::string to_csv(const ResidualReport& r) {
  std::ostringstream os;
  const std::string ratio = r.convergence_ratio ? detail::fmt(*r.convergence_ratio) : "";
  os << kCsvHeader << '\n';
  os << r.name << ",*," << detail::fmt(r.max_norm()) << ',' << detail::fmt(r.l2_norm()) << ','
     << r.masked_points() << ',' << detail::fmt(r.tolerance) << ',' << to_string(r.expect) << ','
     << (r.passed() ? "true" : "false") << ',' << ratio << '\n';
  for (const auto& comp : r.components)
    os << r.name << ",\"" << comp.name << "\"," << detail::fmt(comp.max_norm) << ','
       << detail::fmt(comp.l2_norm) << ',' << comp.masked_points << ",,,,\n";
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline void write_report(const std::filesystem::path& dir, const ResidualReport& r, const std::string& format) {
  if (format == "csv")
    write_text(dir / (r.name + ".csv"), to_csv(r));
  else
    write_text(dir / (r.name + ".json"), to_json(r).dump(2) + "\n");
}

/// One line of the consolidated summary.
struct SummaryRow {
  std::string suite;
  double max_norm = 0.0;
  double tolerance = 0.0;
  std::string expect;
  bool passed = false;
  std::optional<double> ratio;
};

namespace detail {

inline std::optional<SummaryRow> read_json_report(const std::filesystem::path& p) {
  std::ifstream is(p);
  nlohmann::json j = nlohmann::json::parse(is, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("name") || !j.contains("passed")) return std::nullopt;
  SummaryRow r;
  r.suite = j.at("name").get<std::string>();
  r.max_norm = j.value("max_norm", 0.0);
  r.tolerance = j.value("tolerance", 0.0);
  r.expect = j.value("expect", std::string("vanishes"));
  r.passed = j.at("passed").get<bool>();
  if (j.contains("convergence_ratio") && j["convergence_ratio"].is_number())
    r.ratio = j["convergence_ratio"].get<double>();
  return r;
}

inline std::optional<SummaryRow> read_csv_report(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::string header, row;
  if (!std::getline(is, header) || header != kCsvHeader || !std::getline(is, row)) return std::nullopt;
  std::vector<std::string> cols;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  if (row.back() == ',') cols.emplace_back();
  if (cols.size() != 9 || cols[1] != "*") return std::nullopt;
  SummaryRow r;
  r.suite = cols[0];
  r.max_norm = std::stod(cols[2]);
  r.tolerance = std::stod(cols[5]);
  r.expect = cols[6];
  r.passed = cols[7] == "true";
  if (!cols[8].empty()) r.ratio = std::stod(cols[8]);
  return r;
}

}  // namespace detail

/// Suite reports (JSON and CSV) found in a directory, sorted by suite name.
inline std::vector<SummaryRow> collect_reports(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw MissingInput("no reports found: " + dir.string() + " is not a directory");
  std::vector<SummaryRow> rows;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    std::optional<SummaryRow> r;
    if (ext == ".json")
      r = detail::read_json_report(e.path());
    else if (ext == ".csv")
      r = detail::read_csv_report(e.path());
    if (r) rows.push_back(*r);
  }
  if (rows.empty()) throw MissingInput("no reports found in " + dir.string());
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) { return a.suite < b.suite; });
  return rows;
}

inline std::string summary_table(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %12s %12s %-9s %-5s %8s\n", "suite", "max_norm", "tolerance", "expect",
                "pass", "ratio");
  os << buf;
  bool all = true;
  for (const auto& r : rows) {
    const std::string ratio = r.ratio ? [&] {
      char b[32];
      std::snprintf(b, sizeof b, "%.3f", *r.ratio);
      return std::string(b);
    }() : std::string("-");
    std::snprintf(buf, sizeof buf, "%-28s %12.4e %12.4e %-9s %-5s %8s\n", r.suite.c_str(), r.max_norm,
                  r.tolerance, r.expect.c_str(), r.passed ? "PASS" : "FAIL", ratio.c_str());
    os << buf;
    all = all && r.passed;
  }
  os << "overall: " << (all ? "PASS" : "FAIL") << " (" << rows.size() << " suites)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline std::filesystem::path prepare_out(const RunConfig& c) {
  std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!std::filesystem::is_directory(dir)) throw UsageError("cannot create output directory " + c.out);
  return dir;
}

/// Runs every applicable suite, writes one report per suite plus run.cfg.
/// Returns kPass iff every suite passed; failing suite names go to `log`.
inline int cmd_verify(const RunConfig& c, std::ostream& log) {
  const SolutionFamily f = family_of(c);
  const GridSpec g = grid_of(c, f);
  const auto dir = prepare_out(c);
  const std::vector<ResidualReport> reports = run_suites(suites_for(f, c), g, c.levels, c.jobs);
  write_text(dir / "run.cfg", serialize_config(c));
  bool ok = true;
  for (const auto& r : reports) {
    write_report(dir, r, c.format);
    if (!r.passed()) {
      ok = false;
      log << "FAIL " << r.name << ": max " << detail::fmt(r.max_norm()) << " tol " << detail::fmt(r.tolerance);
      if (!r.note.empty()) log << " (" << r.note << ")";
      log << '\n';
    }
  }
  log << (ok ? "verify: PASS" : "verify: FAIL") << " (" << reports.size() << " suites, family " << f.name << ")\n";
  return ok ? kPass : kNumericalFailure;
}

/// Induces the family's surface; writes surface.obj, surface.csv and curvature.json.
inline int cmd_induce(const RunConfig& c, std::ostream& log) {
  const SolutionFamily f = family_of(c);
  const GridSpec g = grid_of(c, f);
  const auto base = basepoint_of(c, g);
  const Tolerances tol{.scale = c.tol_scale};
  const SpinorField s = sample(f.spinor(), g);
  const ComplexField H = sample(f.H, g);
  Surface srf = induce_surface(s, base, PathOrder::row_first, &H, tol.fd(g));
  if (srf.degenerate) {
    log << "induce: degenerate immersion (the spinor vanishes; the surface is a point)\n";
    return kNumericalFailure;
  }
  for (const auto& w : srf.warnings) log << "warning: " << w << '\n';
  const FundamentalForms ff = fundamental_forms(srf);
  const RealField Hn = mean_curvature_numeric(ff), Kn = gauss_curvature_numeric(ff);
  ResidualReport r = mean_curvature_closure(ff, H, "curvature");
  const ResidualReport k = gauss_curvature_consistency(ff, gaussian_curvature_from_p(density_p(f.spinor()), g));
  r.add("K_num - K_formula", to_complex(zip(Kn, gaussian_curvature_from_p(density_p(f.spinor()), g),
                                            [](double a, double b) { return a - b; })));
  r.within(tol.fd(g));
  r.metrics["mean_curvature_max"] = r.components.front().max_norm;
  r.metrics["gauss_curvature_max"] = k.max_norm();
  r.metrics["imaginary_residue"] = srf.imaginary_residue;
  r.metrics["conjugate_mismatch"] = srf.conjugate_mismatch;
  r.metrics["degenerate_points"] = double(ff.degenerate_points);
  r.metrics["basepoint_x"] = g.x(base.first);
  r.metrics["basepoint_y"] = g.y(base.second);

  const auto dir = prepare_out(c);
  export_mesh(srf, (dir / "surface.obj").string());
  {
    std::ostringstream os;
    write_surface_csv(os, srf, Hn, Kn);
    write_text(dir / "surface.csv", os.str());
  }
  write_text(dir / "curvature.json", to_json(r).dump(2) + "\n");
  log << "induce: |H_num| - |H| max " << detail::fmt(r.metrics["mean_curvature_max"]) << ", K max "
      << detail::fmt(k.max_norm()) << (r.passed() ? " PASS" : " FAIL") << '\n';
  return r.passed() ? kPass : kNumericalFailure;
}

/// Prints the consolidated table and writes summary.txt.
inline int cmd_report(const RunConfig& c, std::ostream& out) {
  const auto rows = collect_reports(c.out);
  const std::string table = summary_table(rows);
  out << table;
  write_text(std::filesystem::path(c.out) / "summary.txt", table);
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.passed; });
  return ok ? kPass : kNumericalFailure;
}

}  // namespace wsl::cli
