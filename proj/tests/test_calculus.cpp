#include <gtest/gtest.h>

#include "wsl/calculus.hpp"

using namespace wsl;

namespace {

const GridSpec kGrid(-1.0, 1.0, -1.0, 1.0, 41, 41);

double max_diff(const ComplexField& a, const ComplexField& b) {
  return norms(a - b, false).max;
}

}  // namespace

TEST(Jet, ProductRuleAndConjugate) {
  const cplx z0(0.3, -0.7);
  Jet z = Jet::variable_z(z0);
  Jet w = Jet::variable_zbar(std::conj(z0));
  Jet f = z * z * w;  // |z|^2 z
  EXPECT_NEAR(std::abs(f.dz() - 2.0 * z0 * std::conj(z0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f.dzbar() - z0 * z0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(f.dzdzbar() - 2.0 * z0), 0.0, 1e-14);
  Jet g = conj(f);
  EXPECT_NEAR(std::abs(g.dz() - std::conj(f.dzbar())), 0.0, 1e-14);
}

TEST(Jet, ComposeMatchesClosedForms) {
  const cplx z0(0.2, 0.1);
  Jet s = Jet::variable_z(z0) + Jet::variable_zbar(std::conj(z0));
  Jet e = exp(s * 0.5);
  const double x2 = 2.0 * z0.real();
  EXPECT_NEAR(std::abs(e.dzdzbar() - 0.25 * std::exp(0.5 * x2)), 0.0, 1e-13);
  Jet l = log(1.0 + s * s);
  // d/ds log(1+s^2) = 2s/(1+s^2); second = 2(1-s^2)/(1+s^2)^2
  EXPECT_NEAR(std::abs(l.dz() - 2.0 * x2 / (1 + x2 * x2)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(l.dzdzbar() - 2.0 * (1 - x2 * x2) / std::pow(1 + x2 * x2, 2)), 0.0, 1e-13);
  Jet r = sqrt(s * s + 1.0);
  EXPECT_NEAR(std::abs(r.value() - std::sqrt(1 + x2 * x2)), 0.0, 1e-14);
}

TEST(Jet, OrderTrackingThrows) {
  Jet z = Jet::variable_z(cplx(0.1, 0.2));
  Jet d = derivative_z(derivative_z(z * z));
  EXPECT_EQ(d.order_z(), 0);
  EXPECT_THROW(d.dz(), std::logic_error);
  EXPECT_THROW(derivative_z(d), std::logic_error);
}

TEST(Calculus, WirtingerOnPolynomial) {
  // f = z^2 zbar: df/dz = 2|z|^2, df/dzbar = z^2, d dbar f = 2z
  ClosedForm z = ClosedForm::z(), w = ClosedForm::zbar();
  ClosedForm f = z * z * w;
  ComplexField fs = sample(f, kGrid);
  FieldJet exact = derivs(f, kGrid);
  FieldJet fd = derivs(fs, kGrid);
  EXPECT_LT(max_diff(fd.dz, exact.dz), 1e-2);
  EXPECT_LT(max_diff(fd.dzbar, exact.dzbar), 1e-2);
  EXPECT_LT(max_diff(fd.dzdzbar, exact.dzdzbar), 1e-2);
}

TEST(Calculus, SecondOrderConvergence) {
  ClosedForm f = exp(ClosedForm::z() * 0.7) * sin(ClosedForm::zbar());
  GridSpec g = kGrid;
  std::vector<double> errs;
  for (int level = 0; level < 3; ++level) {
    FieldJet exact = derivs(f, g);
    FieldJet fd = derivs(sample(f, g), g);
    errs.push_back(norms(fd.dz - exact.dz, false).max + norms(fd.dzdzbar - exact.dzdzbar, false).max);
    g = g.refined();
  }
  for (int k = 0; k + 1 < int(errs.size()); ++k) {
    const double ratio = errs[k] / errs[k + 1];
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
  }
}

TEST(Calculus, MaskedStencilsFallBackOneSided) {
  ClosedForm f = ClosedForm::z() * ClosedForm::z();
  ComplexField fs = sample(f, kGrid);
  fs.set_masked(20, 20);
  ComplexField d = d_x(fs);
  EXPECT_TRUE(d.masked(20, 20));
  EXPECT_FALSE(d.masked(19, 20));
  EXPECT_NEAR(std::abs(d(19, 20) - 2.0 * kGrid.z(19, 20)), 0.0, 1e-12);
  // An isolated live sample has no stencil.
  ComplexField iso(kGrid);
  for (std::size_t k = 0; k < iso.size(); ++k) iso.set_masked(k);
  iso.set_masked(5, 5, false);
  EXPECT_TRUE(d_x(iso).masked(5, 5));
}

TEST(Calculus, GuardAndSingularPolicy) {
  ClosedForm inv = 1.0 / ClosedForm::s();
  GridSpec g(-1.0, 1.0, -1.0, 1.0, 5, 5);  // x = 0 column hits s = 0
  EXPECT_THROW(sample(inv, g), std::domain_error);
  ComplexField m = sample(inv, g, SingularPolicy::mask);
  EXPECT_EQ(m.count_masked(), 5u);
  ClosedForm guarded = inv.restricted([](cplx z) { return std::abs(z.real()) > 1e-9; });
  EXPECT_EQ(sample(guarded, g).count_masked(), 5u);
}

TEST(Calculus, SqrtContinuousRemovesBranchJump) {
  // z^2 on a domain crossing the negative real axis: the principal root jumps.
  GridSpec g(-1.0, -0.2, -0.5, 0.5, 21, 21);
  ComplexField z2 = sample(ClosedForm::z() * ClosedForm::z(), g);
  ComplexField r = sqrt_continuous(z2);
  ComplexField zf = sample(ClosedForm::z(), g);
  const cplx sign = r(0, 0) / zf(0, 0);
  EXPECT_LT(max_diff(r, zf * sign), 1e-12);
}

TEST(Grid, Validation) {
  EXPECT_THROW(GridSpec(0, 1, 0, 1, 2, 5), std::invalid_argument);
  EXPECT_THROW(GridSpec(1, 0, 0, 1, 5, 5), std::invalid_argument);
  std::vector<cplx> v(9, cplx(1.0));
  v[4] = cplx(NAN, 0);
  EXPECT_THROW(ComplexField(GridSpec(0, 1, 0, 1, 3, 3), v), std::invalid_argument);
}
