#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsl/grid.hpp"

namespace wsl {

inline constexpr const char* kVersion = "0.1.0";

/// What a report asserts about its residuals.
enum class Expectation {
  /// Residual must be within tolerance.
  vanishes,
  /// Negative control: residual must reach the tolerance (it detects a defect).
  nonzero,
  /// Reported only.
  info,
};

inline const char* to_string(Expectation e) {
  switch (e) {
    case Expectation::vanishes: return "vanishes";
    case Expectation::nonzero: return "nonzero";
    case Expectation::info: return "info";
  }
  return "?";
}

struct ResidualComponent {
  std::string name;
  double max_norm = 0.0;
  double l2_norm = 0.0;
  std::size_t masked_points = 0;
  std::size_t counted = 0;
};

/// Named residual norms with grid metadata.
///
/// A report with no unmasked sample fails: an empty residual certifies nothing.
struct ResidualReport {
  std::string name;
  GridSpec grid;
  std::vector<ResidualComponent> components;
  double tolerance = 0.0;
  Expectation expect = Expectation::vanishes;
  std::map<std::string, double> metrics;
  std::optional<double> convergence_ratio;
  /// Set by refinement studies; a failed study fails the report.
  std::optional<bool> converged;
  std::string note;

  ResidualReport() = default;
  ResidualReport(std::string n, const GridSpec& g) : name(std::move(n)), grid(g) {}

  template <class T>
  ResidualReport& add(const std::string& component, const Field<T>& residual) {
    require_same_grid(residual.grid(), grid, "ResidualReport::add");
    const Norms n = norms(residual, true);
    components.push_back({component, n.max, n.l2, residual.count_masked(), n.counted});
    return *this;
  }

  ResidualReport& add_scalar(const std::string& component, double value) {
    components.push_back({component, std::abs(value), std::abs(value), 0, 1});
    return *this;
  }

  double max_norm() const {
    double m = 0.0;
    for (const auto& c : components) m = std::max(m, c.max_norm);
    return m;
  }
  double l2_norm() const {
    double s = 0.0;
    for (const auto& c : components) s += c.l2_norm * c.l2_norm;
    return std::sqrt(s);
  }
  std::size_t masked_points() const {
    std::size_t m = 0;
    for (const auto& c : components) m = std::max(m, c.masked_points);
    return m;
  }
  bool empty() const {
    for (const auto& c : components)
      if (c.counted > 0) return false;
    return true;
  }

  bool passed() const {
    if (converged && !*converged) return false;
    switch (expect) {
      case Expectation::vanishes: return !empty() && max_norm() <= tolerance;
      case Expectation::nonzero: return !empty() && max_norm() >= tolerance;
      case Expectation::info: return true;
    }
    return false;
  }

  ResidualReport& within(double tol) {
    tolerance = tol;
    expect = Expectation::vanishes;
    return *this;
  }
  ResidualReport& exceeding(double tol) {
    tolerance = tol;
    expect = Expectation::nonzero;
    return *this;
  }
};

inline nlohmann::ordered_json to_json(const ResidualReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["grid"] = {{"nx", r.grid.nx},
               {"ny", r.grid.ny},
               {"hx", r.grid.hx()},
               {"hy", r.grid.hy()},
               {"domain", {r.grid.x_min, r.grid.x_max, r.grid.y_min, r.grid.y_max}}};
  j["max_norm"] = r.max_norm();
  j["l2_norm"] = r.l2_norm();
  j["masked_points"] = r.masked_points();
  j["tolerance"] = r.tolerance;
  j["expect"] = to_string(r.expect);
  j["passed"] = r.passed();
  if (r.convergence_ratio)
    j["convergence_ratio"] = *r.convergence_ratio;
  else
    j["convergence_ratio"] = nullptr;
  if (r.converged) j["converged"] = *r.converged;
  auto comps = nlohmann::ordered_json::array();
  for (const auto& c : r.components)
    comps.push_back({{"name", c.name},
                     {"max_norm", c.max_norm},
                     {"l2_norm", c.l2_norm},
                     {"masked_points", c.masked_points}});
  j["components"] = comps;
  if (!r.metrics.empty()) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics) m[k] = v;
    j["metrics"] = m;
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["version"] = kVersion;
  return j;
}

/// Tolerances used across the suite; every value is overridable.
///
/// Finite-difference residuals are compared against fd_constant * h^2 * scale
/// with h the larger spacing. Measured on the shipped families at 31x31 and
/// 101x101, the largest C is about 14 (deformed Landau-Lifshitz, rational);
/// 50 leaves headroom for other parameters.
struct Tolerances {
  double exact = 1e-12;
  double identity = 1e-10;
  double fd_constant = 50.0;
  double scale = 1.0;

  double fd(const GridSpec& g) const {
    const double h = std::max(g.hx(), g.hy());
    return fd_constant * h * h * scale;
  }
  /// For residuals carrying one more derivative than the FD data (O(h)).
  double fd_derived(const GridSpec& g) const {
    const double h = std::max(g.hx(), g.hy());
    return fd_constant * h * scale;
  }
};

/// Outcome of a refinement study h -> h/2.
struct ConvergenceStudy {
  std::vector<double> errors;
  /// Errors below this are roundoff: the discretization is exact there.
  double floor = 1e-11;
  double lo = 3.5;
  double hi = 4.5;

  std::vector<double> ratios() const {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k)
      out.push_back(errors[k + 1] > 0.0 ? errors[k] / errors[k + 1] : INFINITY);
    return out;
  }

  /// Every step either lies in [lo, hi] or both levels sit below the floor.
  bool second_order() const {
    if (errors.size() < 2) return false;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
      if (errors[k] < floor && errors[k + 1] < floor) continue;
      const double r = errors[k] / errors[k + 1];
      if (!(r >= lo && r <= hi)) return false;
    }
    return true;
  }

  /// Last finite ratio, or nullopt when every level is at roundoff.
  std::optional<double> last_ratio() const {
    auto r = ratios();
    for (auto it = r.rbegin(); it != r.rend(); ++it)
      if (std::isfinite(*it)) return *it;
    return std::nullopt;
  }
};

}  // namespace wsl
