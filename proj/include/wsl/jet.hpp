#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace wsl {

using cplx = std::complex<double>;

/// Truncated Taylor expansion of a function of the independent pair (z, zbar).
///
/// A real-analytic function of z = x + iy can be written as F(z, w) with w
/// standing in for zbar. Expanding F around (z0, w0) in the increments
/// (dz, dw) up to bi-degree (2, 2) gives all Wirtinger derivatives
/// d^a/dz^a d^b/dzbar^b F with a, b <= 2. Coefficients are stored as
/// c[a][b] = (d^a dbar^b F) / (a! b!).
///
/// Every jet carries the bi-degree up to which its coefficients are exact.
/// Arithmetic takes the minimum of its operands; taking a derivative
/// lowers the order by one. Reading a coefficient past the exact order
/// throws, so a composite that needs more derivatives than its inputs
/// carry fails loudly instead of returning truncation garbage.
class Jet {
 public:
  static constexpr int kMaxOrder = 2;

  Jet() = default;
  Jet(cplx c) { c_[0][0] = c; }   // NOLINT: constants promote implicitly
  Jet(double c) { c_[0][0] = c; }  // NOLINT

  /// The coordinate z expanded at z0: z0 + dz.
  static Jet variable_z(cplx z0) {
    Jet j(z0);
    j.c_[1][0] = 1.0;
    return j;
  }

  /// The coordinate zbar expanded at w0: w0 + dw.
  static Jet variable_zbar(cplx w0) {
    Jet j(w0);
    j.c_[0][1] = 1.0;
    return j;
  }

  cplx coef(int a, int b) const {
    if (a < 0 || b < 0 || a > order_z_ || b > order_zbar_)
      throw std::logic_error("Jet: coefficient requested beyond exact order");
    return c_[a][b];
  }

  cplx value() const { return c_[0][0]; }
  cplx dz() const { return coef(1, 0); }
  cplx dzbar() const { return coef(0, 1); }
  cplx dzdzbar() const { return coef(1, 1); }

  int order_z() const { return order_z_; }
  int order_zbar() const { return order_zbar_; }

  Jet& operator+=(const Jet& o) {
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; b <= kMaxOrder; ++b) c_[a][b] += o.c_[a][b];
    merge_order(o);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; b <= kMaxOrder; ++b) c_[a][b] -= o.c_[a][b];
    merge_order(o);
    return *this;
  }
  Jet& operator*=(cplx s) {
    for (auto& row : c_)
      for (auto& v : row) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    a *= -1.0;
    return a;
  }

  friend Jet operator*(const Jet& x, const Jet& y) {
    Jet r;
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; b <= kMaxOrder; ++b) {
        cplx acc = 0.0;
        for (int i = 0; i <= a; ++i)
          for (int k = 0; k <= b; ++k) acc += x.c_[i][k] * y.c_[a - i][b - k];
        r.c_[a][b] = acc;
      }
    r.order_z_ = std::min(x.order_z_, y.order_z_);
    r.order_zbar_ = std::min(x.order_zbar_, y.order_zbar_);
    return r;
  }

  /// Applies a scalar function given its first four derivatives at the
  /// expansion point. Bi-degree (2, 2) has total degree 4, so the series in
  /// the increment terminates at the fourth power.
  Jet compose(const std::array<cplx, 5>& derivs) const {
    Jet delta = *this;
    delta.c_[0][0] = 0.0;
    static constexpr double inv_fact[5] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
    Jet r(derivs[4] * inv_fact[4]);
    r.order_z_ = order_z_;
    r.order_zbar_ = order_zbar_;
    for (int k = 3; k >= 0; --k) {
      r = r * delta;
      r.c_[0][0] += derivs[k] * inv_fact[k];
    }
    return r;
  }

  /// Wirtinger conjugate: the jet of conj(F) swaps the roles of z and zbar.
  friend Jet conj(const Jet& x) {
    Jet r;
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; b <= kMaxOrder; ++b) r.c_[a][b] = std::conj(x.c_[b][a]);
    r.order_z_ = x.order_zbar_;
    r.order_zbar_ = x.order_z_;
    return r;
  }

  friend Jet derivative_z(const Jet& x) {
    if (x.order_z_ == 0) throw std::logic_error("Jet: no z-derivative left");
    Jet r;
    for (int a = 0; a < kMaxOrder; ++a)
      for (int b = 0; b <= kMaxOrder; ++b) r.c_[a][b] = double(a + 1) * x.c_[a + 1][b];
    r.order_z_ = x.order_z_ - 1;
    r.order_zbar_ = x.order_zbar_;
    return r;
  }

  friend Jet derivative_zbar(const Jet& x) {
    if (x.order_zbar_ == 0) throw std::logic_error("Jet: no zbar-derivative left");
    Jet r;
    for (int a = 0; a <= kMaxOrder; ++a)
      for (int b = 0; b < kMaxOrder; ++b) r.c_[a][b] = double(b + 1) * x.c_[a][b + 1];
    r.order_z_ = x.order_z_;
    r.order_zbar_ = x.order_zbar_ - 1;
    return r;
  }

 private:
  void merge_order(const Jet& o) {
    order_z_ = std::min(order_z_, o.order_z_);
    order_zbar_ = std::min(order_zbar_, o.order_zbar_);
  }

  std::array<std::array<cplx, kMaxOrder + 1>, kMaxOrder + 1> c_{};
  int order_z_ = kMaxOrder;
  int order_zbar_ = kMaxOrder;
};

inline Jet reciprocal(const Jet& x) {
  const cplx v = x.value();
  const cplx r = 1.0 / v;
  return x.compose({r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r,
                    24.0 * r * r * r * r * r});
}

inline Jet operator/(const Jet& x, const Jet& y) {
  return x * reciprocal(y);
}

inline Jet exp(const Jet& x) {
  const cplx e = std::exp(x.value());
  return x.compose({e, e, e, e, e});
}

inline Jet log(const Jet& x) {
  const cplx v = x.value();
  const cplx r = 1.0 / v;
  return x.compose({std::log(v), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
}

/// Principal branch at the expansion point.
inline Jet sqrt(const Jet& x) {
  const cplx v = x.value();
  const cplx s = std::sqrt(v);
  const cplx r = 1.0 / v;
  return x.compose({s, 0.5 * s * r, -0.25 * s * r * r, 0.375 * s * r * r * r,
                    -0.9375 * s * r * r * r * r});
}

inline Jet sin(const Jet& x) {
  const cplx s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({s, c, -s, -c, s});
}

inline Jet cos(const Jet& x) {
  const cplx s = std::sin(x.value()), c = std::cos(x.value());
  return x.compose({c, -s, -c, s, c});
}

inline Jet tan(const Jet& x) { return sin(x) / cos(x); }

inline Jet sinh(const Jet& x) {
  const cplx s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.compose({s, c, s, c, s});
}

inline Jet cosh(const Jet& x) {
  const cplx s = std::sinh(x.value()), c = std::cosh(x.value());
  return x.compose({c, s, c, s, c});
}

inline Jet pow(const Jet& x, int n) {
  if (n < 0) return reciprocal(pow(x, -n));
  Jet r(1.0);
  Jet base = x;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

/// |F|^2 = F * conj(F), real on the diagonal w = conj(z).
inline Jet abs2(const Jet& x) { return x * conj(x); }

}  // namespace wsl
