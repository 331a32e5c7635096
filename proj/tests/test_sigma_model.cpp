#include <gtest/gtest.h>

#include <random>

#include "wsl/sigma_model.hpp"
#include "wsl/solutions.hpp"

using namespace wsl;

namespace {

const GridSpec kGrid(-1.0, 1.0, -1.0, 1.0, 41, 41);
const Tolerances kTol;

double max_diff(const ComplexField& a, const ComplexField& b) { return norms(a - b, false).max; }

}  // namespace

TEST(Transform, RhoFromPsi) {
  const SolutionFamily r = family_rational(1.5);
  EXPECT_LT(max_diff(sample(rho_from_psi(r.spinor()), kGrid), sample(1.5 * ClosedForm::s(), kGrid)), 1e-13);
  const SolutionFamily e = family_exponential(0.7);
  EXPECT_LT(max_diff(sample(rho_from_psi(e.spinor()), kGrid), sample(exp(0.7 * ClosedForm::s()), kGrid)), 1e-13);
  // Equal real spinor components give rho = 1.
  ComplexField one(kGrid, 0.6);
  EXPECT_LT(max_diff(rho_from_psi(SpinorField{one, one}), ComplexField(kGrid, 1.0)), 1e-15);
  EXPECT_THROW(rho_from_psi(SpinorField{one, ComplexField(kGrid)}), std::domain_error);
}

TEST(Transform, PsiFromRhoPointValues) {
  const SolutionFamily f = family_rational(1.0);
  const GridSpec g(0.0, 1.0, 0.0, 1.0, 11, 11);
  const Spinor<ClosedForm> s = psi_from_rho(f.rho, f.H, g);
  EXPECT_LT(std::abs(s.psi1.value(0.0)), 1e-15);
  EXPECT_LT(std::abs(s.psi2.value(0.0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(s.psi1.value(1.0) - 0.89442719099991588), 1e-15);
  EXPECT_LT(std::abs(s.psi2.value(1.0) - 0.44721359549995794), 1e-15);
  const Spinor<ClosedForm> m = psi_from_rho(f.rho, f.H, g, -1);
  EXPECT_LT(std::abs(m.psi2.value(0.0) + 1.0), 1e-15);
  EXPECT_THROW(psi_from_rho(f.rho, -1.0 * f.H, g), std::domain_error);
}

TEST(Transform, RoundTripOnEveryFamily) {
  for (const std::string& name : family_names()) {
    const SolutionFamily f = make_family(name, {.lambda = 1.3, .A = 1.0, .H0 = 0.8});
    const GridSpec g = f.default_grid(31, 31);
    EXPECT_LE(transform_round_trip(f.spinor(), f.rho, f.H, g).max_norm(), 1e-12) << name;
    EXPECT_LT(max_diff(sample(rho_from_psi(psi_from_rho(f.rho, f.H, g)), g), sample(f.rho, g)), 1e-12) << name;
  }
}

TEST(SigmaModel, FamiliesSolveIt) {
  const SolutionFamily r = family_rational(1.0);
  EXPECT_LE(sigma_residual(r.rho, r.H, kGrid).max_norm(), 1e-12);
  const SolutionFamily t = family_trigonometric(1.0);
  const GridSpec strip(0.05, 0.6, -1.0, 1.0, 41, 41);  // s in (0.1, 1.2)
  EXPECT_LE(sigma_residual(t.rho, t.H, strip).max_norm(), 1e-12);
  EXPECT_LE(sigma_residual(sample(t.rho, strip), sample(t.H, strip), strip).max_norm(), kTol.fd(strip));
  const ClosedForm z = ClosedForm::z();
  EXPECT_LE(sigma_residual(z * z, ClosedForm(2.0), kGrid).max_norm(), 1e-12);
  EXPECT_THROW(sigma_residual(r.rho, ClosedForm(0.0), kGrid), std::domain_error);
}

TEST(DiscreteSymmetry, Z2AndInversion) {
  const SolutionFamily f = family_rational(1.0);
  EXPECT_LE(sigma_residual(apply_discrete_symmetry(f.rho, DiscreteSymmetry::Z2), f.H, kGrid).max_norm(), 1e-12);
  // Inversion: rho^-2 amplification next to rho = 0 costs a few digits.
  const GridSpec away(0.1, 1.0, -1.0, 1.0, 41, 41);
  EXPECT_LE(sigma_residual(apply_discrete_symmetry(f.rho, DiscreteSymmetry::Inversion), f.H, away).max_norm(),
            1e-10);
  const ClosedForm twice =
      apply_discrete_symmetry(apply_discrete_symmetry(f.rho, DiscreteSymmetry::Inversion), DiscreteSymmetry::Inversion);
  EXPECT_LT(max_diff(sample(twice, away), sample(f.rho, away)), 1e-14);
}

TEST(SpinMatrix, SpecialValuesAndAlgebra) {
  const GridSpec g(0, 1, 0, 1, 3, 3);
  const SpinMatrix s0 = spin_matrix(ComplexField(g, 0.0));
  EXPECT_EQ(s0.a(1, 1), 1.0);
  EXPECT_EQ(s0.b(1, 1), 0.0);
  EXPECT_EQ(s0.d(1, 1), -1.0);
  const SpinMatrix s1 = spin_matrix(ComplexField(g, 1.0));
  EXPECT_EQ(s1.a(1, 1), 0.0);
  EXPECT_EQ(s1.b(1, 1), 1.0);
  EXPECT_EQ(s1.c(1, 1), 1.0);
  std::mt19937 gen(3);
  std::normal_distribution<double> n(0.0, 3.0);
  ComplexField rho(kGrid);
  for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = cplx(n(gen), n(gen));
  EXPECT_LE(spin_algebra_report(spin_matrix(rho)).max_norm(), 1e-12);
}

TEST(LandauLifshitz, UnimodularAndControls) {
  const SolutionFamily u = family_unimodular(1.0, 1.0);
  EXPECT_LE(landau_lifshitz_residual(spin_matrix(u.rho), kGrid).max_norm(), 1e-12);
  EXPECT_LE(landau_lifshitz_residual(spin_matrix(sample(u.rho, kGrid)), kGrid).max_norm(), kTol.fd(kGrid));
  EXPECT_EQ(landau_lifshitz_residual(spin_matrix(ClosedForm(cplx(0.3, 0.2))), kGrid).max_norm(), 0.0);
  const SolutionFamily r = family_rational(1.0);
  EXPECT_GT(landau_lifshitz_residual(spin_matrix(r.rho), kGrid).max_norm(), 10.0 * kTol.fd(kGrid));
}

TEST(LandauLifshitz, DeformedEquation) {
  const SolutionFamily r = family_rational(1.0);
  EXPECT_LE(deformed_ll_residual(r.rho, r.H, kGrid).max_norm(), 1e-12);
  EXPECT_LE(deformed_ll_residual(sample(r.rho, kGrid), sample(r.H, kGrid), kGrid).max_norm(), kTol.fd(kGrid));
  const SolutionFamily t = family_trigonometric(1.0);
  const GridSpec strip(0.05, 0.6, -1.0, 1.0, 41, 41);
  EXPECT_LE(deformed_ll_residual(t.rho, t.H, strip).max_norm(), 1e-12);
  const SolutionFamily e = family_exponential(-2.0);
  EXPECT_LE(deformed_ll_residual(e.rho, e.H, kGrid).max_norm(), 1e-12);
  // Constant H: the deformation term vanishes.
  const SolutionFamily u = family_unimodular(2.0, 3.0);
  const DeformationMatrices m = deformation_matrices(u.rho, u.H, kGrid);
  const SpinMatrix prod = m.R * m.Hm;
  for (const ComplexField* e2 : {&prod.a, &prod.b, &prod.c, &prod.d}) EXPECT_EQ(norms(*e2, false).max, 0.0);
}

TEST(Multisoliton, ProductsSolve) {
  const ClosedForm r1 = family_unimodular(1.0).rho, r2 = family_unimodular(2.0).rho;
  const ClosedForm sq = multisoliton_product(r1, r1, kGrid);
  EXPECT_LT(max_diff(sample(sq, kGrid), sample(family_unimodular(2.0).rho, kGrid)), 1e-14);
  const ClosedForm same = multisoliton_product(r1, ClosedForm(1.0), kGrid);
  EXPECT_LT(max_diff(sample(same, kGrid), sample(r1, kGrid)), 1e-15);
  const ClosedForm mixed = multisoliton_product(r1, r2, kGrid);
  EXPECT_LE(sigma_residual(mixed, ClosedForm(1.0), kGrid).max_norm(), 1e-12);
  EXPECT_LE(norms(sample(mixed * conj(mixed), kGrid) - 1.0, false).max, 1e-10);
  EXPECT_THROW(multisoliton_product(r1, family_rational(1.0).rho, kGrid), std::invalid_argument);
}

TEST(UnimodularConstancy, FlagsNonconstantH) {
  const ClosedForm rho = family_unimodular(1.0).rho;
  const ResidualReport ok = unimodular_H_constancy_check(rho, ClosedForm(2.0), kGrid);
  EXPECT_EQ(ok.max_norm(), 0.0);
  EXPECT_EQ(ok.metrics.at("inconsistent"), 0.0);
  EXPECT_TRUE(ok.passed());
  const ResidualReport bad = unimodular_H_constancy_check(rho, family_rational(1.0).H, kGrid);
  EXPECT_EQ(bad.metrics.at("inconsistent"), 1.0);
  EXPECT_FALSE(bad.passed());
  EXPECT_GT(bad.metrics.at("sigma_residual_max"), 1e-2);
  EXPECT_THROW(unimodular_H_constancy_check(family_rational(1.0).rho, ClosedForm(1.0), kGrid),
               std::invalid_argument);
}

TEST(PhiCompatibility, UnimodularAndProducts) {
  const ClosedForm r1 = family_unimodular(1.0).rho, r2 = family_unimodular(2.0).rho;
  EXPECT_LE(phi_compatibility_residual(r1, ClosedForm(1.0), kGrid).max_norm(), 1e-12);
  EXPECT_LE(phi_compatibility_residual(multisoliton_product(r1, r2, kGrid), ClosedForm(1.0), kGrid).max_norm(),
            1e-12);
  // Constant rho: d ln rho = 0 everywhere, nothing left to check.
  const ResidualReport c = phi_compatibility_residual(ClosedForm(2.0), ClosedForm(1.0), kGrid);
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.masked_points(), kGrid.size());
}
