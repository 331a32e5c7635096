#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsl/weierstrass.hpp"

namespace wsl {

/// An explicit solution: mean curvature, the sigma-model field and the spinor.
///
/// Spinors follow the branch convention psi1 = rho * conj(psi2), i.e. the
/// root of dbar(conj rho) is taken as the conjugate of the root of d rho.
/// For positive parameters this coincides with the principal roots.
struct SolutionFamily {
  std::string name;
  std::map<std::string, double> params;
  int eps = 1;
  ClosedForm H;
  ClosedForm rho;
  ClosedForm psi1;
  ClosedForm psi2;
  bool constant_H = false;
  /// Value of p when it is constant on the whole family.
  std::optional<double> p_constant;
  /// Strip |s| < bound where the formulas are admissible (s = z + zbar).
  std::optional<double> s_bound;
  /// Default x range when the family prefers a narrower window than [-1, 1].
  std::optional<std::pair<double, double>> default_x;

  SpinorForm spinor() const { return {psi1, psi2}; }

  bool admissible(cplx z) const { return H.admissible(z) && psi2.admissible(z); }

  /// Default sampling domain: [-1, 1]^2 clipped to the admissible strip,
  /// or default_x by [-1, 1] when set.
  GridSpec default_grid(int nx, int ny) const {
    double x0 = -1.0, x1 = 1.0;
    if (default_x) {
      x0 = default_x->first;
      x1 = default_x->second;
    } else if (s_bound) {
      x0 = std::max(x0, -0.5 * *s_bound);
      x1 = std::min(x1, 0.5 * *s_bound);
    }
    return {x0, x1, -1.0, 1.0, nx, ny};
  }
};

namespace detail {

inline void require_nonzero(double v, const char* what) {
  if (!std::isfinite(v) || v == 0.0)
    throw std::invalid_argument(std::string(what) + " must be a nonzero real");
}

/// psi2 = eps * droot / (sqrt(H) (1 + |rho|^2)), psi1 = rho conj(psi2).
inline void fill_spinor(SolutionFamily& f, const ClosedForm& droot) {
  const ClosedForm denom = sqrt(f.H) * (1.0 + f.rho * conj(f.rho));
  f.psi2 = double(f.eps) * droot / denom;
  f.psi1 = f.rho * conj(f.psi2);
}

}  // namespace detail

/// H = 1/(1 + lambda^2 s^2), rho = lambda s.
inline SolutionFamily family_rational(double lambda, int eps = 1) {
  detail::require_nonzero(lambda, "lambda");
  detail::require_eps(eps);
  const ClosedForm s = ClosedForm::s();
  SolutionFamily f;
  f.name = "rational";
  f.params = {{"lambda", lambda}};
  f.eps = eps;
  f.H = 1.0 / (1.0 + lambda * lambda * s * s);
  f.rho = lambda * s;
  detail::fill_spinor(f, ClosedForm(std::sqrt(cplx(lambda))));
  f.p_constant = std::abs(lambda);
  return f;
}

/// H = e^{lambda s} / (1 + e^{2 lambda s}), rho = e^{lambda s}.
inline SolutionFamily family_exponential(double lambda, int eps = 1) {
  detail::require_nonzero(lambda, "lambda");
  detail::require_eps(eps);
  const ClosedForm e = exp(lambda * ClosedForm::s());
  SolutionFamily f;
  f.name = "exponential";
  f.params = {{"lambda", lambda}};
  f.eps = eps;
  f.H = e / (1.0 + e * e);
  f.rho = e;
  detail::fill_spinor(f, std::sqrt(cplx(lambda)) * exp(0.5 * lambda * ClosedForm::s()));
  f.p_constant = std::abs(lambda);
  return f;
}

/// The trigonometric family: rho = sin(A s) with H = cos(A s)/(1 + sin^2(A s)).
///
/// This H is the one for which rho solves the sigma-model system; the
/// expression -A tan(As)(2 + cos^2)/(2 - cos^2) is its logarithmic
/// derivative d/ds ln H, see trig_log_derivative. Admissible where
/// cos(A s) > 0, i.e. |s| < pi/(2|A|), minus a guard band.
inline SolutionFamily family_trigonometric(double A, int eps = 1, double guard_band = 0.05) {
  detail::require_nonzero(A, "A");
  detail::require_eps(eps);
  const double bound = std::numbers::pi / (2.0 * std::abs(A)) - guard_band;
  const ClosedForm s = ClosedForm::s();
  const ClosedForm rho = sin(A * s);
  SolutionFamily f;
  f.name = "trig";
  f.params = {{"A", A}};
  f.eps = eps;
  f.H = (cos(A * s) / (1.0 + rho * rho)).restricted([bound](cplx z) {
    return std::abs(2.0 * z.real()) < bound;
  });
  f.rho = rho;
  detail::fill_spinor(f, std::sqrt(cplx(A)) * sqrt(cos(A * s)));
  f.p_constant = std::abs(A);
  f.s_bound = bound;
  // s in (0.1, 1.2)/|A|: away from the edge where cos(As) -> 0 and the
  // finite-difference error is not yet in its asymptotic regime.
  f.default_x = std::pair{0.05 / std::abs(A), 0.6 / std::abs(A)};
  return f;
}

/// A tan(As) (cos^2(As) + 2)/(cos^2(As) - 2), which equals dbar ln H of the
/// trigonometric family.
inline ClosedForm trig_log_derivative(double A) {
  const ClosedForm c = cos(A * ClosedForm::s());
  return A * tan(A * ClosedForm::s()) * (c * c + 2.0) / (c * c - 2.0);
}

/// Unimodular constant-H family rho = e^{i lambda s}, H = H0.
///
/// psi2 = eps sqrt(i lambda) e^{i lambda s / 2} / (2 sqrt(H0)) is the
/// continuous root of d rho; p = |lambda| / (2 H0). lambda = 0 gives rho = 1
/// and the zero spinor.
inline SolutionFamily family_unimodular(double lambda, double H0 = 1.0, int eps = 1) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
  if (!(H0 > 0.0) || !std::isfinite(H0)) throw std::invalid_argument("H0 must be positive");
  detail::require_eps(eps);
  const ClosedForm s = ClosedForm::s();
  const cplx I(0.0, 1.0);
  SolutionFamily f;
  f.name = "unimodular";
  f.params = {{"lambda", lambda}, {"H0", H0}};
  f.eps = eps;
  f.H = ClosedForm(H0);
  f.rho = exp(I * lambda * s);
  f.psi2 = double(eps) * std::sqrt(I * lambda) / (2.0 * std::sqrt(H0)) * exp(0.5 * I * lambda * s);
  f.psi1 = f.rho * conj(f.psi2);
  f.constant_H = true;
  f.p_constant = std::abs(lambda) / (2.0 * H0);
  return f;
}

/// Constant-H family with holomorphic rho = f(z); df is its derivative.
/// Points where df vanishes are excluded.
inline SolutionFamily family_holomorphic(const ClosedForm& fz, const ClosedForm& df, double H0,
                                         int eps = 1, std::string label = "holomorphic") {
  if (!(H0 > 0.0) || !std::isfinite(H0)) throw std::invalid_argument("H0 must be positive");
  detail::require_eps(eps);
  SolutionFamily f;
  f.name = std::move(label);
  f.params = {{"H0", H0}};
  f.eps = eps;
  f.H = ClosedForm(H0);
  f.rho = fz;
  detail::fill_spinor(f, sqrt(mask_small(df, 1e-12)));
  f.constant_H = true;
  return f;
}

/// rho = lambda z, whose induced surface is a sphere of radius 1/H0.
inline SolutionFamily family_holomorphic_linear(double lambda, double H0 = 1.0, int eps = 1) {
  detail::require_nonzero(lambda, "lambda");
  SolutionFamily f =
      family_holomorphic(lambda * ClosedForm::z(), ClosedForm(lambda), H0, eps, "holomorphic");
  f.params["lambda"] = lambda;
  return f;
}

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {"rational", "exponential", "trig", "unimodular",
                                                 "holomorphic"};
  return names;
}

/// Parameters understood by make_family.
struct FamilyParams {
  double lambda = 1.0;
  double A = 1.0;
  double H0 = 1.0;
  int eps = 1;
};

/// Registry lookup by name; "holomorphic" uses f(z) = lambda z.
inline SolutionFamily make_family(const std::string& name, const FamilyParams& p) {
  if (name == "rational") return family_rational(p.lambda, p.eps);
  if (name == "exponential") return family_exponential(p.lambda, p.eps);
  if (name == "trig") return family_trigonometric(p.A, p.eps);
  if (name == "unimodular") return family_unimodular(p.lambda, p.H0, p.eps);
  if (name == "holomorphic") return family_holomorphic_linear(p.lambda, p.H0, p.eps);
  throw std::invalid_argument("unknown family '" + name + "'");
}

}  // namespace wsl
