#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "wsl/sigma_model.hpp"

namespace wsl {

/// dbar d (1/H). Zero exactly when H = 1/(Q(z) + Q(zbar)) for holomorphic Q.
///
/// The mean of dbar d (1/H) over the interior is recorded as a metric, so a
/// non-integrable H (for instance a nonzero constant) can be identified.
template <FieldLike F>
ResidualReport h_integrability_residual(const F& H, const GridSpec& g,
                                        std::string name = "h_integrability") {
  const ComplexField h = values(H, g);
  for (std::size_t k = 0; k < h.size(); ++k)
    if (!h.masked(k) && h[k] == cplx(0.0))
      throw std::domain_error("h_integrability_residual: H vanishes");
  const ComplexField lap = derivs(1.0 / H, g).dzdzbar;
  ResidualReport r(std::move(name), g);
  r.add("dbar d (1/H)", lap);
  double sum = 0.0;
  std::size_t n = 0;
  for (int j = 1; j + 1 < g.ny; ++j)
    for (int i = 1; i + 1 < g.nx; ++i)
      if (!lap.masked(i, j)) {
        sum += lap(i, j).real();
        ++n;
      }
  r.metrics["mean"] = n ? sum / double(n) : 0.0;
  return r;
}

/// A function of one variable that is real on the real axis. It is applied
/// to the forms z and zbar to build H = 1/(Q(z) + Q(zbar)).
struct HolomorphicProfile {
  std::function<ClosedForm(const ClosedForm&)> Q;
};

/// H = 1/(Q(z) + Q(zbar)); zeros of the denominator are excluded.
///
/// Q(z) must not depend on zbar and must be real on the real axis; both are
/// checked at probe points and violations throw std::invalid_argument.
inline ClosedForm h_from_Q(const HolomorphicProfile& profile) {
  if (!profile.Q) throw std::invalid_argument("h_from_Q: empty profile");
  const ClosedForm qz = profile.Q(ClosedForm::z());
  const ClosedForm qw = profile.Q(ClosedForm::zbar());
  const std::array<cplx, 5> probes = {cplx(0.1, 0.2), cplx(-0.4, 0.7), cplx(0.6, -0.3),
                                      cplx(0.35, 0.0), cplx(-0.8, 0.0)};
  for (const cplx z : probes) {
    const Jet j = qz.at(z);
    if (std::abs(j.dzbar()) > 1e-12 * std::max(1.0, std::abs(j.value())))
      throw std::invalid_argument("h_from_Q: Q(z) depends on zbar");
    if (z.imag() == 0.0 && std::abs(j.value().imag()) > 1e-12 * std::max(1.0, std::abs(j.value())))
      throw std::invalid_argument("h_from_Q: Q is not real on the real axis");
    if (std::abs(qw.value(z) - std::conj(j.value())) > 1e-10 * std::max(1.0, std::abs(j.value())))
      throw std::invalid_argument("h_from_Q: Q(conj z) != conj Q(z)");
  }
  return 1.0 / mask_small(qz + qw, 1e-12);
}

/// Coefficients of d rho = A1_0 + A1_1 rho + A1_2 rho^2 and
/// dbar rho = A2_0 + A2_1 rho + A2_2 rho^2.
template <FieldLike F>
struct RiccatiCoeffsT {
  std::array<F, 3> A1;
  std::array<F, 3> A2;
};

using RiccatiCoeffs = RiccatiCoeffsT<ComplexField>;

template <FieldLike F>
ResidualReport riccati_residual(const F& rho, const RiccatiCoeffsT<F>& c, const GridSpec& g,
                                std::string name = "riccati") {
  const FieldJet r = derivs(rho, g);
  auto poly = [&](const std::array<F, 3>& a) {
    return values(a[0], g) + values(a[1], g) * r.value + values(a[2], g) * r.value * r.value;
  };
  ResidualReport out(std::move(name), g);
  out.add("d rho - A1(rho)", r.dz - poly(c.A1));
  out.add("dbar rho - A2(rho)", r.dzbar - poly(c.A2));
  return out;
}

/// The compatibility conditions of the Riccati pair:
///   dbar A1_0 - d A2_0 + A1_1 A2_0 - A2_1 A1_0
///   dbar A1_1 - d A2_1 + 2 A1_2 A2_0 - 2 A2_2 A1_0
///   dbar A1_2 - d A2_2 + A1_2 A2_1 - A1_1 A2_2
template <FieldLike F>
ResidualReport zero_curvature_residual(const RiccatiCoeffsT<F>& c, const GridSpec& g,
                                       std::string name = "zero_curvature") {
  std::array<FieldJet, 3> a1 = {derivs(c.A1[0], g), derivs(c.A1[1], g), derivs(c.A1[2], g)};
  std::array<FieldJet, 3> a2 = {derivs(c.A2[0], g), derivs(c.A2[1], g), derivs(c.A2[2], g)};
  ResidualReport out(std::move(name), g);
  out.add("order 0", a1[0].dzbar - a2[0].dz + a1[1].value * a2[0].value - a2[1].value * a1[0].value);
  out.add("order 1",
          a1[1].dzbar - a2[1].dz + 2.0 * a1[2].value * a2[0].value - 2.0 * a2[2].value * a1[0].value);
  out.add("order 2", a1[2].dzbar - a2[2].dz + a1[2].value * a2[1].value - a1[1].value * a2[2].value);
  return out;
}

/// Fits Riccati coefficients to rho by least squares over the 3x3
/// neighbourhood of each sample.
///
/// Pointwise the coefficients are not unique; the fit picks the
/// minimum-norm solution of the local problem. The quadratic is written in
/// the centred, scaled variable u = (rho - rho_c)/sigma before solving and
/// mapped back, which keeps the 9x3 Vandermonde system well conditioned.
/// Samples whose neighbourhood is incomplete are masked.
template <FieldLike F>
RiccatiCoeffs fit_riccati_coeffs(const F& rho, const GridSpec& g) {
  const FieldJet r = derivs(rho, g);
  RiccatiCoeffs out;
  for (auto* a : {&out.A1, &out.A2})
    for (auto& f : *a) f = ComplexField(g);
  auto mask_all = [&](int i, int j) {
    for (auto* a : {&out.A1, &out.A2})
      for (auto& f : *a) f.set_masked(i, j);
  };
  using Mat = Eigen::Matrix<cplx, 9, 3>;
  using Vec = Eigen::Matrix<cplx, 9, 1>;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.interior(i, j)) {
        mask_all(i, j);
        continue;
      }
      bool complete = true;
      for (int dj = -1; dj <= 1 && complete; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (r.value.masked(i + di, j + dj) || r.dz.masked(i + di, j + dj) ||
              r.dzbar.masked(i + di, j + dj)) {
            complete = false;
            break;
          }
      if (!complete) {
        mask_all(i, j);
        continue;
      }
      const cplx rc = r.value(i, j);
      double sigma = 0.0;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) sigma = std::max(sigma, std::abs(r.value(i + di, j + dj) - rc));
      if (sigma == 0.0) sigma = 1.0;
      Mat V;
      Vec b1, b2;
      int row = 0;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di, ++row) {
          const cplx u = (r.value(i + di, j + dj) - rc) / sigma;
          V(row, 0) = 1.0;
          V(row, 1) = u;
          V(row, 2) = u * u;
          b1(row) = r.dz(i + di, j + dj);
          b2(row) = r.dzbar(i + di, j + dj);
        }
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(V);
      cod.setThreshold(1e-10);
      const Eigen::Matrix<cplx, 3, 1> c1 = cod.solve(b1);
      const Eigen::Matrix<cplx, 3, 1> c2 = cod.solve(b2);
      // B0 + B1 u + B2 u^2 with u = (rho - rc)/sigma, expanded in powers of rho.
      auto unshift = [&](const Eigen::Matrix<cplx, 3, 1>& B, std::array<ComplexField, 3>& A) {
        const cplx b1s = B(1) / sigma, b2s = B(2) / (sigma * sigma);
        A[0](i, j) = B(0) - b1s * rc + b2s * rc * rc;
        A[1](i, j) = b1s - 2.0 * b2s * rc;
        A[2](i, j) = b2s;
      };
      unshift(c1, out.A1);
      unshift(c2, out.A2);
    }
  return out;
}

/// The modified sinh-Gordon relation d dbar ln p - |J|^2/p^2 + p^2 H^2.
template <FieldLike F>
ResidualReport sinh_gordon_residual(const Spinor<F>& s, const F& H, const GridSpec& g,
                                    std::string name = "sinh_gordon") {
  const F p = density_p(s);
  const ComplexField pv = values(p, g);
  for (std::size_t k = 0; k < pv.size(); ++k)
    if (!pv.masked(k) && !(pv[k].real() > 0.0))
      throw std::domain_error("sinh_gordon_residual: p must be positive");
  const ComplexField lap = derivs(log(p), g).dzdzbar;
  const ComplexField J = values(current_J(s), g);
  const ComplexField h = values(H, g);
  ResidualReport r(std::move(name), g);
  r.add("d dbar ln p - |J|^2/p^2 + p^2 H^2", lap - J * conj(J) / (pv * pv) + pv * pv * h * h);
  return r;
}

/// |J|^2 - p^4 H^2, which vanishes when p is constant on a solution.
template <FieldLike F>
ResidualReport current_norm_identity(const Spinor<F>& s, const F& H, const GridSpec& g,
                                     std::string name = "current_norm_identity") {
  const ComplexField pv = values(density_p(s), g);
  const ComplexField J = values(current_J(s), g);
  const ComplexField h = values(H, g);
  ResidualReport r(std::move(name), g);
  r.add("|J|^2 - p^4 H^2", J * conj(J) - pv * pv * pv * pv * h * h);
  return r;
}

/// conj(psi1) dbar psi1 + psi2 dbar conj(psi2) and conj(psi2) d psi2 + psi1 d conj(psi1),
/// with the variance of p (forced constant by the constraints) as a metric.
template <FieldLike F>
ResidualReport linearization_constraint_residual(const Spinor<F>& s, const GridSpec& g,
                                                 std::string name = "linearization_constraints") {
  const FieldJet a = derivs(s.psi1, g);
  const FieldJet b = derivs(s.psi2, g);
  const FieldJet ac = a.conjugate();
  const FieldJet bc = b.conjugate();
  ResidualReport r(std::move(name), g);
  r.add("conj_psi1 dbar psi1 + psi2 dbar conj_psi2", ac.value * a.dzbar + b.value * bc.dzbar);
  r.add("conj_psi2 d psi2 + psi1 d conj_psi1", bc.value * b.dz + a.value * ac.dz);
  r.metrics["p_variance"] = variance(values(density_p(s), g));
  return r;
}

/// The decoupled linear equations under the constraints (p = p0):
///   dbar d psi1 - (dbar ln H) d psi1 + p0^2 H^2 psi1
///   d dbar psi2 - (d ln H) dbar psi2 + p0^2 H^2 psi2
/// and their conjugates.
template <FieldLike F>
ResidualReport linear_system_residual(const Spinor<F>& s, const F& H, double p0, const GridSpec& g,
                                      std::string name = "linear_system") {
  detail::require_positive(values(H, g), "linear_system_residual");
  const FieldJet a = derivs(s.psi1, g);
  const FieldJet b = derivs(s.psi2, g);
  const FieldJet ac = a.conjugate();
  const FieldJet bc = b.conjugate();
  const FieldJet lh = derivs(log(H), g);
  const ComplexField h = values(H, g);
  const ComplexField k = p0 * p0 * h * h;
  ResidualReport r(std::move(name), g);
  r.add("psi1 equation", a.dzdzbar - lh.dzbar * a.dz + k * a.value);
  r.add("psi2 equation", b.dzdzbar - lh.dz * b.dzbar + k * b.value);
  r.add("conj psi1 equation", ac.dzdzbar - lh.dz * ac.dzbar + k * ac.value);
  r.add("conj psi2 equation", bc.dzdzbar - lh.dzbar * bc.dz + k * bc.value);
  return r;
}

}  // namespace wsl
