#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "wsl/weierstrass.hpp"

namespace wsl {

namespace detail {

inline void require_positive(const ComplexField& h, const char* what) {
  for (std::size_t k = 0; k < h.size(); ++k)
    if (!h.masked(k) && !(h[k].real() > 0.0))
      throw std::domain_error(std::string(what) + ": H must be positive");
}

inline ClosedForm exclude_small(const ClosedForm& f, double thr) { return mask_small(f, thr); }
inline ComplexField exclude_small(const ComplexField& f, double thr) { return mask_small(f, thr); }

inline void require_some_live(const ComplexField& f, const char* what) {
  if (f.all_masked()) throw std::domain_error(std::string(what) + ": no admissible sample");
}

}  // namespace detail

/// Threshold below which rho (for the inversion and the 1/rho entry of the
/// deformation matrix) and psi2 (for rho = psi1 / conj psi2) count as zero.
inline constexpr double kZeroThreshold = 1e-8;

/// rho = psi1 / conj(psi2); zeros of psi2 are excluded.
template <FieldLike F>
F rho_from_psi(const Spinor<F>& s) {
  if constexpr (std::same_as<F, ComplexField>) {
    const ComplexField d = mask_small(conj(s.psi2), kZeroThreshold);
    if (d.all_masked()) throw std::domain_error("rho_from_psi: psi2 vanishes everywhere");
    return s.psi1 / d;
  } else {
    return s.psi1 / detail::exclude_small(conj(s.psi2), kZeroThreshold);
  }
}

/// psi2 = eps (d rho)^(1/2) / (H^(1/2) (1 + |rho|^2)), psi1 = rho conj(psi2).
///
/// The root of dbar(conj rho) is the conjugate of the root of d rho. Sampled
/// roots use the sign-continued branch. H must be positive on g; points
/// where d rho vanishes are excluded.
template <FieldLike F>
Spinor<F> psi_from_rho(const F& rho, const F& H, const GridSpec& g, int eps = 1) {
  detail::require_eps(eps);
  detail::require_positive(values(H, g), "psi_from_rho");
  const F root = sqrt_continuous(detail::exclude_small(dz(rho), 1e-14));
  const F psi2 = double(eps) * root / (sqrt(H) * (1.0 + rho * conj(rho)));
  return {rho * conj(psi2), psi2};
}

/// Defects of
///   d dbar rho - 2 conj(rho)/(1+|rho|^2) d rho dbar rho - dbar(ln H) d rho
/// and its conjugate equation.
template <FieldLike F>
ResidualReport sigma_residual(const F& rho, const F& H, const GridSpec& g,
                              std::string name = "sigma_model") {
  detail::require_positive(values(H, g), "sigma_residual");
  const FieldJet r = derivs(rho, g);
  const FieldJet c = r.conjugate();
  const FieldJet lh = derivs(log(H), g);
  const ComplexField q = 1.0 + r.value * c.value;
  ResidualReport out(std::move(name), g);
  out.add("rho equation", r.dzdzbar - 2.0 * c.value / q * r.dz * r.dzbar - lh.dzbar * r.dz);
  out.add("conj equation", c.dzdzbar - 2.0 * r.value / q * c.dzbar * c.dz - lh.dz * c.dzbar);
  return out;
}

/// Both directions of the psi <-> rho transform against a known pair.
///
/// psi_from_rho fixes the spinor only up to sign (eps, and the root branch
/// at each point), so the psi comparison takes the nearer of +psi and -psi.
template <FieldLike F>
ResidualReport transform_round_trip(const Spinor<F>& s, const F& rho, const F& H, const GridSpec& g,
                                    std::string name = "transform_round_trip") {
  const ComplexField r = values(rho, g);
  const Spinor<F> back = psi_from_rho(rho, H, g);
  auto up_to_sign = [](const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](const cplx& x, const cplx& y) { return cplx(std::min(std::abs(x - y), std::abs(x + y))); });
  };
  ResidualReport out(std::move(name), g);
  out.add("rho_from_psi - rho", values(rho_from_psi(s), g) - r);
  out.add("psi1 round trip (up to sign)", up_to_sign(values(back.psi1, g), values(s.psi1, g)));
  out.add("psi2 round trip (up to sign)", up_to_sign(values(back.psi2, g), values(s.psi2, g)));
  return out;
}

enum class DiscreteSymmetry {
  /// rho -> -rho
  Z2,
  /// rho -> 1/rho
  Inversion,
};

template <FieldLike F>
F apply_discrete_symmetry(const F& rho, DiscreteSymmetry which) {
  if (which == DiscreteSymmetry::Z2) return -rho;
  return 1.0 / detail::exclude_small(rho, kZeroThreshold);
}

/// Entries of a 2x2 matrix field.
template <FieldLike F>
struct Mat2 {
  F a, b, c, d;  // [[a, b], [c, d]]
};

template <FieldLike F>
Mat2<F> operator*(const Mat2<F>& x, const Mat2<F>& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}
template <FieldLike F>
Mat2<F> operator-(const Mat2<F>& x, const Mat2<F>& y) {
  return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
template <FieldLike F>
Mat2<F> operator+(const Mat2<F>& x, const Mat2<F>& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

using SpinMatrix = Mat2<ComplexField>;

/// S = (1+|rho|^2)^-1 [[1-|rho|^2, 2 conj rho], [2 rho, |rho|^2 - 1]].
template <FieldLike F>
Mat2<F> spin_matrix(const F& rho) {
  const F m = rho * conj(rho);
  const F q = 1.0 + m;
  return {(1.0 - m) / q, 2.0 * conj(rho) / q, 2.0 * rho / q, (m - 1.0) / q};
}

inline SpinMatrix sample(const Mat2<ClosedForm>& S, const GridSpec& g) {
  return {sample(S.a, g), sample(S.b, g), sample(S.c, g), sample(S.d, g)};
}

template <FieldLike F>
SpinMatrix values(const Mat2<F>& S, const GridSpec& g) {
  return {values(S.a, g), values(S.b, g), values(S.c, g), values(S.d, g)};
}

/// Hermiticity, tracelessness and S^2 = I.
inline ResidualReport spin_algebra_report(const SpinMatrix& S, std::string name = "spin_algebra") {
  const GridSpec& g = S.a.grid();
  ResidualReport r(std::move(name), g);
  r.add("S - S^H [1,1]", S.a - conj(S.a));
  r.add("S - S^H [2,2]", S.d - conj(S.d));
  r.add("S - S^H (off-diagonal)", S.b - conj(S.c));
  r.add("trace", S.a + S.d);
  const SpinMatrix sq = S * S;
  r.add("S^2 - I [1,1]", sq.a - 1.0);
  r.add("S^2 - I [1,2]", sq.b);
  r.add("S^2 - I [2,1]", sq.c);
  r.add("S^2 - I [2,2]", sq.d - 1.0);
  return r;
}

namespace detail {

template <FieldLike F>
SpinMatrix laplace_S(const Mat2<F>& S, const GridSpec& g) {
  return {derivs(S.a, g).dzdzbar, derivs(S.b, g).dzdzbar, derivs(S.c, g).dzdzbar,
          derivs(S.d, g).dzdzbar};
}

inline void add_entries(ResidualReport& r, const SpinMatrix& m, const std::string& prefix) {
  r.add(prefix + "[1,1]", m.a);
  r.add(prefix + "[1,2]", m.b);
  r.add(prefix + "[2,1]", m.c);
  r.add(prefix + "[2,2]", m.d);
}

}  // namespace detail

/// [S, d dbar S], which vanishes when rho solves the constant-H system.
template <FieldLike F>
SpinMatrix ll_commutator(const Mat2<F>& S, const GridSpec& g) {
  const SpinMatrix s = values(S, g);
  const SpinMatrix l = detail::laplace_S(S, g);
  return s * l - l * s;
}

template <FieldLike F>
ResidualReport landau_lifshitz_residual(const Mat2<F>& S, const GridSpec& g,
                                        std::string name = "landau_lifshitz") {
  ResidualReport r(std::move(name), g);
  detail::add_entries(r, ll_commutator(S, g), "[S, d dbar S]");
  return r;
}

/// The matrices R and Hm of the deformed equation [S, d dbar S] + R Hm = 0:
///   R  = 4/(1+|rho|^2)^2 [[-conj(rho) d rho, rho dbar conj(rho)], [d rho, rho^2 dbar conj(rho)]]
///   Hm = [[dbar ln H, conj(rho) dbar ln H], [d ln H, -(1/rho) d ln H]]
/// The 2,2 entries carry the signs for which R Hm reproduces the sigma-model
/// defects; Hm is masked where |rho| < kZeroThreshold.
struct DeformationMatrices {
  SpinMatrix R;
  SpinMatrix Hm;
};

template <FieldLike F>
DeformationMatrices deformation_matrices(const F& rho, const F& H, const GridSpec& g) {
  detail::require_positive(values(H, g), "deformation_matrices");
  const FieldJet r = derivs(rho, g);
  const FieldJet c = r.conjugate();
  const FieldJet lh = derivs(log(H), g);
  const ComplexField q = 1.0 + r.value * c.value;
  const ComplexField k = 4.0 / (q * q);
  DeformationMatrices m;
  m.R = {-k * c.value * r.dz, k * r.value * c.dzbar, k * r.dz, k * r.value * r.value * c.dzbar};
  const ComplexField inv_rho = 1.0 / mask_small(r.value, kZeroThreshold);
  m.Hm = {lh.dzbar, c.value * lh.dzbar, lh.dz, -inv_rho * lh.dz};
  return m;
}

template <FieldLike F>
ResidualReport deformed_ll_residual(const F& rho, const F& H, const GridSpec& g,
                                    std::string name = "deformed_landau_lifshitz") {
  const DeformationMatrices m = deformation_matrices(rho, H, g);
  const SpinMatrix total = ll_commutator(spin_matrix(rho), g) + m.R * m.Hm;
  ResidualReport r(std::move(name), g);
  detail::add_entries(r, total, "[S, d dbar S] + R Hm");
  return r;
}

namespace detail {

inline double max_unimodular_defect(const ComplexField& rho) {
  return norms(rho * conj(rho) - 1.0, false).max;
}

}  // namespace detail

inline constexpr double kUnimodularTolerance = 1e-10;

/// Pointwise product of two unimodular fields.
template <FieldLike F>
F multisoliton_product(const F& r1, const F& r2, const GridSpec& g) {
  if (detail::max_unimodular_defect(values(r1, g)) > kUnimodularTolerance ||
      detail::max_unimodular_defect(values(r2, g)) > kUnimodularTolerance)
    throw std::invalid_argument("multisoliton_product: factors must satisfy |rho| = 1");
  return r1 * r2;
}

/// For unimodular rho solving the sigma-model system H must be constant.
///
/// Reports the variance of H together with the sigma-model residual. The
/// pair is flagged inconsistent (metric "inconsistent" = 1) when the variance
/// exceeds the tolerance: a unimodular solution cannot carry that H.
template <FieldLike F>
ResidualReport unimodular_H_constancy_check(const F& rho, const F& H, const GridSpec& g,
                                            double tolerance = 1e-12,
                                            std::string name = "unimodular_H_constancy") {
  const ComplexField rv = values(rho, g);
  if (detail::max_unimodular_defect(rv) > kUnimodularTolerance)
    throw std::invalid_argument("unimodular_H_constancy_check: rho is not unimodular");
  const ComplexField hv = values(H, g);
  const double var = variance(hv, false);
  ResidualReport r(std::move(name), g);
  r.add_scalar("variance of H", var);
  r.metrics["sigma_residual_max"] = sigma_residual(rho, H, g).max_norm();
  r.metrics["inconsistent"] = var > tolerance ? 1.0 : 0.0;
  r.within(tolerance);
  return r;
}

/// Cross-derivative condition for d phi = ln(d ln rho), dbar phi = ln H:
///   dbar ln(d ln rho) - d ln H = 0.
/// With phi_z = ln(d rho / rho) this reads
///   (rho_{z zbar}/rho - rho_z rho_zbar / rho^2) / (rho_z / rho) - d ln H.
/// Points where d ln rho vanishes are masked.
template <FieldLike F>
ResidualReport phi_compatibility_residual(const F& rho, const F& H, const GridSpec& g,
                                             std::string name = "phi_compatibility") {
  detail::require_positive(values(H, g), "phi_compatibility_residual");
  const FieldJet r = derivs(rho, g);
  const FieldJet lh = derivs(log(H), g);
  const ComplexField dlog = mask_small(r.dz / r.value, 1e-12);
  const ComplexField dbar_dlog = r.dzdzbar / r.value - r.dz * r.dzbar / (r.value * r.value);
  ResidualReport out(std::move(name), g);
  out.add("dbar ln(d ln rho) - d ln H", dbar_dlog / dlog - lh.dz);
  return out;
}

}  // namespace wsl
