#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "wsl/grid.hpp"
#include "wsl/jet.hpp"

namespace wsl {

/// A field given by formula rather than by samples.
///
/// The formula is the polarized form F(z, w): evaluated at (z, conj(z)) it
/// gives the field value, and its Taylor jet at that point carries the exact
/// Wirtinger derivatives. Keeping w independent also lets the modified
/// current integrate in the zbar slot with z held fixed.
///
/// The optional guard marks where the formula is meaningful; samples that
/// fail the guard are masked.
class ClosedForm {
 public:
  using Expansion = std::function<Jet(cplx z, cplx w)>;
  using Scalar = std::function<cplx(cplx z, cplx w)>;
  using Guard = std::function<bool(cplx z)>;

  ClosedForm() : ClosedForm(cplx(0.0)) {}

  /// From a jet expansion alone; values are read off the jet.
  explicit ClosedForm(Expansion f, Guard admissible = {}) {
    auto jf = std::make_shared<const Expansion>(std::move(f));
    f_ = jf;
    v_ = std::make_shared<const Scalar>([jf](cplx z, cplx w) { return (*jf)(z, w).value(); });
    if (admissible) guard_ = std::make_shared<const Guard>(std::move(admissible));
  }

  /// From a jet expansion and a cheaper value-only evaluator of the same function.
  ClosedForm(Expansion f, Scalar v, Guard admissible)
      : f_(std::make_shared<const Expansion>(std::move(f))),
        v_(std::make_shared<const Scalar>(std::move(v))) {
    if (admissible) guard_ = std::make_shared<const Guard>(std::move(admissible));
  }

  ClosedForm(cplx c)  // NOLINT: constants promote implicitly
      : ClosedForm([c](cplx, cplx) { return Jet(c); }, [c](cplx, cplx) { return c; }, {}) {}
  ClosedForm(double c) : ClosedForm(cplx(c)) {}  // NOLINT

  /// The coordinate z.
  static ClosedForm z() {
    return ClosedForm([](cplx z, cplx) { return Jet::variable_z(z); },
                      [](cplx z, cplx) { return z; }, {});
  }
  /// The coordinate zbar.
  static ClosedForm zbar() {
    return ClosedForm([](cplx, cplx w) { return Jet::variable_zbar(w); },
                      [](cplx, cplx w) { return w; }, {});
  }
  /// s = z + zbar = 2x, the variable every explicit family depends on.
  static ClosedForm s() { return z() + zbar(); }

  /// Polarized expansion with z and w independent.
  Jet expand(cplx z, cplx w) const { return (*f_)(z, w); }
  /// Polarized value only.
  cplx evaluate(cplx z, cplx w) const { return (*v_)(z, w); }
  /// Expansion on the real slice w = conj(z).
  Jet at(cplx z) const { return expand(z, std::conj(z)); }
  cplx value(cplx z) const { return evaluate(z, std::conj(z)); }

  bool admissible(cplx z) const { return !guard_ || (*guard_)(z); }
  bool has_guard() const { return static_cast<bool>(guard_); }
  Guard guard() const {
    if (!guard_) return {};
    auto g = guard_;
    return [g](cplx z) { return (*g)(z); };
  }

  /// Same formula with an extra admissibility condition.
  ClosedForm restricted(Guard extra) const {
    auto f = f_;
    auto v = v_;
    auto g = guard_;
    auto e = std::make_shared<const Guard>(std::move(extra));
    return ClosedForm([f](cplx z, cplx w) { return (*f)(z, w); },
                      [v](cplx z, cplx w) { return (*v)(z, w); },
                      [g, e](cplx z) { return (!g || (*g)(z)) && (*e)(z); });
  }

  /// Pointwise combination of two forms; guards are intersected. The
  /// operation must accept both Jet and cplx arguments.
  template <class Op>
  static ClosedForm combine(const ClosedForm& a, const ClosedForm& b, Op op) {
    auto fa = a.f_, fb = b.f_;
    auto va = a.v_, vb = b.v_;
    Guard g;
    if (a.guard_ || b.guard_) {
      auto ga = a.guard_, gb = b.guard_;
      g = [ga, gb](cplx z) { return (!ga || (*ga)(z)) && (!gb || (*gb)(z)); };
    }
    return ClosedForm([fa, fb, op](cplx z, cplx w) { return Jet(op((*fa)(z, w), (*fb)(z, w))); },
                      [va, vb, op](cplx z, cplx w) { return cplx(op((*va)(z, w), (*vb)(z, w))); },
                      std::move(g));
  }

  /// Applies a map accepting both Jet and cplx to this form.
  template <class Op>
  ClosedForm apply(Op op) const {
    auto f = f_;
    auto v = v_;
    return ClosedForm([f, op](cplx z, cplx w) { return Jet(op((*f)(z, w))); },
                      [v, op](cplx z, cplx w) { return cplx(op((*v)(z, w))); }, guard());
  }

  /// Applies a jet-only map; values go through the jet.
  template <class Op>
  ClosedForm apply_jet(Op op) const {
    auto f = f_;
    return ClosedForm([f, op](cplx z, cplx w) { return op((*f)(z, w)); }, guard());
  }

  friend ClosedForm operator+(const ClosedForm& a, const ClosedForm& b) {
    return combine(a, b, [](const auto& x, const auto& y) { return x + y; });
  }
  friend ClosedForm operator-(const ClosedForm& a, const ClosedForm& b) {
    return combine(a, b, [](const auto& x, const auto& y) { return x - y; });
  }
  friend ClosedForm operator*(const ClosedForm& a, const ClosedForm& b) {
    return combine(a, b, [](const auto& x, const auto& y) { return x * y; });
  }
  friend ClosedForm operator/(const ClosedForm& a, const ClosedForm& b) {
    return combine(a, b, [](const auto& x, const auto& y) { return x / y; });
  }
  friend ClosedForm operator-(const ClosedForm& a) {
    return a.apply([](const auto& x) { return -x; });
  }

  /// conj(F)(z, w) = conj(F(conj(w), conj(z))).
  friend ClosedForm conj(const ClosedForm& a) {
    auto f = a.f_;
    auto v = a.v_;
    return ClosedForm(
        [f](cplx z, cplx w) { return conj((*f)(std::conj(w), std::conj(z))); },
        [v](cplx z, cplx w) { return std::conj((*v)(std::conj(w), std::conj(z))); }, a.guard());
  }

 private:
  std::shared_ptr<const Expansion> f_;
  std::shared_ptr<const Scalar> v_;
  std::shared_ptr<const Guard> guard_;
};

inline ClosedForm exp(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::exp; return exp(x); });
}
inline ClosedForm log(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::log; return log(x); });
}
inline ClosedForm sqrt(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::sqrt; return sqrt(x); });
}
inline ClosedForm sin(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::sin; return sin(x); });
}
inline ClosedForm cos(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::cos; return cos(x); });
}
inline ClosedForm tan(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::tan; return tan(x); });
}
inline ClosedForm sinh(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::sinh; return sinh(x); });
}
inline ClosedForm cosh(const ClosedForm& a) {
  return a.apply([](const auto& x) { using std::cosh; return cosh(x); });
}
inline ClosedForm pow(const ClosedForm& a, int n) {
  return a.apply([n](const auto& x) {
    using std::pow;
    return pow(x, n);
  });
}

/// Exact Wirtinger derivatives of a form (one order of the jet is consumed).
inline ClosedForm dz(const ClosedForm& a) {
  return a.apply_jet([](const Jet& x) { return derivative_z(x); });
}
inline ClosedForm dzbar(const ClosedForm& a) {
  return a.apply_jet([](const Jet& x) { return derivative_zbar(x); });
}

/// Excludes points where |F| < threshold.
inline ClosedForm mask_small(const ClosedForm& a, double threshold) {
  ClosedForm copy = a;
  return a.restricted([copy, threshold](cplx z) { return std::abs(copy.value(z)) >= threshold; });
}

/// Continuous branch of the square root; for a formula the principal branch
/// is exact pointwise and its derivatives do not depend on the branch.
inline ClosedForm sqrt_continuous(const ClosedForm& a) { return sqrt(a); }

enum class SingularPolicy {
  /// A non-finite value at a guard-admissible point is a construction error.
  strict,
  /// Non-finite values are masked.
  mask,
};

/// Samples a form on the grid: values[i, j] = F(x_i + i y_j).
inline ComplexField sample(const ClosedForm& cf, const GridSpec& g,
                           SingularPolicy policy = SingularPolicy::strict) {
  g.validate();
  std::vector<cplx> vals(g.size());
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      const cplx z = g.z(i, j);
      if (!cf.admissible(z)) {
        mask[k] = 1;
        continue;
      }
      const cplx v = cf.value(z);
      if (!detail::finite(v)) {
        if (policy == SingularPolicy::strict)
          throw std::domain_error("sample: singular value at admissible point (" +
                                  std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                                  ")");
        mask[k] = 1;
        continue;
      }
      vals[k] = v;
    }
  return ComplexField(g, std::move(vals), std::move(mask));
}

}  // namespace wsl
