#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include "wsl/calculus.hpp"
#include "wsl/report.hpp"

namespace wsl {

/// The pair (psi1, psi2). With F = ClosedForm derivatives are exact; with
/// F = ComplexField they are finite differences on the field's grid.
template <FieldLike F>
struct Spinor {
  F psi1;
  F psi2;
};

using SpinorField = Spinor<ComplexField>;
using SpinorForm = Spinor<ClosedForm>;

inline SpinorField sample(const SpinorForm& s, const GridSpec& g) {
  return {sample(s.psi1, g), sample(s.psi2, g)};
}

/// p = |psi1|^2 + |psi2|^2.
template <FieldLike F>
F density_p(const Spinor<F>& s) {
  return s.psi1 * conj(s.psi1) + s.psi2 * conj(s.psi2);
}

namespace detail {

/// Throws unless the sampled mean curvature is real.
inline void require_real(const ComplexField& h, const char* what, double tol = 1e-12) {
  for (std::size_t k = 0; k < h.size(); ++k)
    if (!h.masked(k) && std::abs(h[k].imag()) > tol * std::max(1.0, std::abs(h[k].real())))
      throw std::domain_error(std::string(what) + ": H is not real-valued");
}

inline void require_eps(int eps) {
  if (eps != 1 && eps != -1) throw std::invalid_argument("eps must be +1 or -1");
}

}  // namespace detail

/// Defects of the four first-order equations
///   d psi1 = pH psi2,  dbar psi2 = -pH psi1  and their conjugates.
template <FieldLike F>
ResidualReport weierstrass_residual(const Spinor<F>& s, const F& H, const GridSpec& g,
                                    std::string name = "weierstrass") {
  const FieldJet j1 = derivs(s.psi1, g);
  const FieldJet j2 = derivs(s.psi2, g);
  const ComplexField h = values(H, g);
  detail::require_real(h, "weierstrass_residual");
  const ComplexField pH = values(density_p(s), g) * h;
  const FieldJet c1 = j1.conjugate();
  const FieldJet c2 = j2.conjugate();

  ResidualReport r(std::move(name), g);
  r.add("d_psi1 - pH psi2", j1.dz - pH * j2.value);
  r.add("dbar_psi2 + pH psi1", j2.dzbar + pH * j1.value);
  r.add("dbar_conj_psi1 - pH conj_psi2", c1.dzbar - pH * c2.value);
  r.add("d_conj_psi2 + pH conj_psi1", c2.dz + pH * c1.value);
  return r;
}

/// Conservation laws implied by the first-order system:
///   d(psi1^2) + dbar(psi2^2) = 0  and  d(psi1 conj psi2) - dbar(conj psi1 psi2) = 0.
///
/// The second law holds with a relative minus sign; with a plus sign the
/// left side equals 2pH(|psi2|^2 - |psi1|^2). That variant is recorded as a
/// metric so the difference stays visible.
template <FieldLike F>
ResidualReport potential_conservation_residual(const Spinor<F>& s, const GridSpec& g,
                                               std::string name = "conservation") {
  const FieldJet a = derivs(s.psi1 * s.psi1, g);
  const FieldJet b = derivs(s.psi2 * s.psi2, g);
  const FieldJet m = derivs(s.psi1 * conj(s.psi2), g);
  const FieldJet n = derivs(conj(s.psi1) * s.psi2, g);
  ResidualReport r(std::move(name), g);
  r.add("d(psi1^2) + dbar(psi2^2)", a.dz + b.dzbar);
  r.add("d(psi1 conj_psi2) - dbar(conj_psi1 psi2)", m.dz - n.dzbar);
  r.metrics["plus_sign_variant_max"] = norms(m.dz + n.dzbar).max;
  return r;
}

/// J = conj(psi1) d psi2 - psi2 d conj(psi1).
template <FieldLike F>
F current_J(const Spinor<F>& s) {
  return conj(s.psi1) * dz(s.psi2) - s.psi2 * dz(conj(s.psi1));
}

/// dbar J + p^2 dH, which vanishes on solutions.
///
/// dbar J is expanded by the product rule,
///   dbar J = dbar conj(psi1) d psi2 + conj(psi1) dbar d psi2
///          - dbar psi2 d conj(psi1) - psi2 dbar d conj(psi1),
/// so the sampled path applies each stencil once. Differentiating a sampled
/// J instead would differentiate the jump between one-sided and central
/// truncation errors and lose an order next to the boundary.
template <FieldLike F>
ResidualReport dbar_J_defect(const Spinor<F>& s, const F& H, const GridSpec& g,
                             std::string name = "dbar_J_defect") {
  const FieldJet a = derivs(s.psi1, g);
  const FieldJet b = derivs(s.psi2, g);
  const FieldJet ac = a.conjugate();
  const ComplexField dbar_J =
      ac.dzbar * b.dz + ac.value * b.dzdzbar - b.dzbar * ac.dz - b.value * ac.dzdzbar;
  const ComplexField p = values(density_p(s), g);
  const FieldJet h = derivs(H, g);
  ResidualReport r(std::move(name), g);
  r.add("dbar J + p^2 dH", dbar_J + p * p * h.dz);
  return r;
}

/// Modified current Jm = J + F with dbar F = p^2 dH.
///
/// F is the antiderivative in the zbar slot with z held fixed:
///   F(z) = integral of G(z, t) dt from t = 2 x0 - z to t = conj(z),
/// G being the polarized integrand p^2 dH. Along this path z + t runs over
/// the real segment [2 x0, 2x], so every explicit family stays on its real
/// section. F vanishes on the column x = x0. The integral is evaluated with
/// composite Gauss-Legendre quadrature to roundoff.
struct ModifiedCurrent {
  ComplexField J;
  ComplexField correction;
  ComplexField value;
  /// Finite-difference dbar of value.
  ResidualReport dbar;
};

inline ModifiedCurrent modified_current(const SpinorForm& s, const ClosedForm& H, double x0,
                                        const GridSpec& g, int panels = 4) {
  g.validate();
  if (!(x0 >= g.x_min && x0 <= g.x_max))
    throw std::invalid_argument("modified_current: basepoint abscissa outside grid");
  const ClosedForm p = density_p(s);
  const ClosedForm integrand = p * p * dz(H);
  using Rule = boost::math::quadrature::gauss<double, 10>;
  ComplexField corr(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const cplx z = g.z(i, j);
      if (!integrand.admissible(z)) {
        corr.set_masked(i, j);
        continue;
      }
      // t = 2 x0 - z + u (2x - 2 x0),  u in [0, 1]
      const double len = 2.0 * (z.real() - x0);
      cplx acc = 0.0;
      for (int k = 0; k < panels; ++k) {
        const double a = double(k) / panels, b = double(k + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t q = 0; q < Rule::abscissa().size(); ++q) {
          const double x = Rule::abscissa()[q];
          const double w = Rule::weights()[q] * half;
          for (double u : {mid - half * x, mid + half * x}) {
            acc += w * integrand.evaluate(z, 2.0 * x0 - z + u * len);
            if (x == 0.0) break;
          }
        }
      }
      acc *= len;
      if (detail::finite(acc))
        corr(i, j) = acc;
      else
        corr.set_masked(i, j);
    }
  ModifiedCurrent out{values(current_J(s), g), corr, {}, {}};
  out.value = out.J + out.correction;
  out.dbar = ResidualReport("modified_current", g);
  out.dbar.add("dbar Jm", d_zbar(out.value));
  out.dbar.metrics["basepoint_x"] = x0;
  return out;
}

/// K = -dbar d log p / p^2.
template <FieldLike F>
RealField gaussian_curvature_from_p(const F& p, const GridSpec& g) {
  const ComplexField pv = values(p, g);
  for (std::size_t k = 0; k < pv.size(); ++k)
    if (!pv.masked(k) && !(pv[k].real() > 0.0))
      throw std::domain_error("gaussian_curvature_from_p: p must be positive");
  const FieldJet lp = derivs(log(p), g);
  return real_part(-lp.dzdzbar / (pv * pv));
}

}  // namespace wsl
