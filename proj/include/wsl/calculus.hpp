#pragma once

#include <concepts>
#include <deque>
#include <stdexcept>
#include <type_traits>

#include "wsl/closed_form.hpp"
#include "wsl/grid.hpp"

namespace wsl {

// ---------------------------------------------------------------------------
// Pointwise algebra on sampled fields, mirroring the ClosedForm algebra so
// residual formulas can be written once for both representations.
// ---------------------------------------------------------------------------

inline ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](const cplx& x, const cplx& y) { return x + y; });
}
inline ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](const cplx& x, const cplx& y) { return x - y; });
}
inline ComplexField operator*(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](const cplx& x, const cplx& y) { return x * y; });
}
inline ComplexField operator/(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, [](const cplx& x, const cplx& y) { return x / y; });
}
inline ComplexField operator-(const ComplexField& a) {
  return a.map([](const cplx& x) { return -x; });
}
inline ComplexField operator+(const ComplexField& a, cplx s) {
  return a.map([s](const cplx& x) { return x + s; });
}
inline ComplexField operator+(cplx s, const ComplexField& a) { return a + s; }
inline ComplexField operator-(const ComplexField& a, cplx s) { return a + (-s); }
inline ComplexField operator-(cplx s, const ComplexField& a) {
  return a.map([s](const cplx& x) { return s - x; });
}
inline ComplexField operator*(const ComplexField& a, cplx s) {
  return a.map([s](const cplx& x) { return x * s; });
}
inline ComplexField operator*(cplx s, const ComplexField& a) { return a * s; }
inline ComplexField operator/(const ComplexField& a, cplx s) {
  return a.map([s](const cplx& x) { return x / s; });
}
inline ComplexField operator/(cplx s, const ComplexField& a) {
  return a.map([s](const cplx& x) { return s / x; });
}
inline ComplexField operator+(const ComplexField& a, double s) { return a + cplx(s); }
inline ComplexField operator+(double s, const ComplexField& a) { return a + cplx(s); }
inline ComplexField operator-(const ComplexField& a, double s) { return a - cplx(s); }
inline ComplexField operator-(double s, const ComplexField& a) { return cplx(s) - a; }
inline ComplexField operator*(const ComplexField& a, double s) { return a * cplx(s); }
inline ComplexField operator*(double s, const ComplexField& a) { return a * cplx(s); }
inline ComplexField operator/(const ComplexField& a, double s) { return a / cplx(s); }
inline ComplexField operator/(double s, const ComplexField& a) { return cplx(s) / a; }

inline ComplexField conj(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::conj(x); });
}
inline ComplexField exp(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::exp(x); });
}
inline ComplexField log(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::log(x); });
}
inline ComplexField sqrt(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::sqrt(x); });
}
inline ComplexField sin(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::sin(x); });
}
inline ComplexField cos(const ComplexField& a) {
  return a.map([](const cplx& x) { return std::cos(x); });
}
inline ComplexField pow(const ComplexField& a, int n) {
  return a.map([n](const cplx& x) { return std::pow(x, n); });
}

inline ComplexField mask_small(const ComplexField& a, double threshold) {
  ComplexField out = a;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (!out.masked(k) && std::abs(out[k]) < threshold) out.set_masked(k);
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

namespace detail {

/// Second-order first and second derivative along one grid direction.
/// Central where both neighbours are live, one-sided (3 resp. 4 points)
/// otherwise; a sample with no admissible stencil is masked.
template <bool AlongX, int Order>
ComplexField directional(const ComplexField& f) {
  const GridSpec& g = f.grid();
  const int n = AlongX ? g.nx : g.ny;
  const double h = AlongX ? g.hx() : g.hy();
  ComplexField out(g);
  auto live = [&](int i, int j, int off) {
    const int ii = AlongX ? i + off : i;
    const int jj = AlongX ? j : j + off;
    const int t = AlongX ? ii : jj;
    return t >= 0 && t < n && !f.masked(ii, jj);
  };
  auto at = [&](int i, int j, int off) -> cplx {
    return AlongX ? f(i + off, j) : f(i, j + off);
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (f.masked(i, j)) {
        out.set_masked(i, j);
        continue;
      }
      cplx v;
      if constexpr (Order == 1) {
        if (live(i, j, -1) && live(i, j, 1))
          v = (at(i, j, 1) - at(i, j, -1)) / (2.0 * h);
        else if (live(i, j, 1) && live(i, j, 2))
          v = (-3.0 * at(i, j, 0) + 4.0 * at(i, j, 1) - at(i, j, 2)) / (2.0 * h);
        else if (live(i, j, -1) && live(i, j, -2))
          v = (3.0 * at(i, j, 0) - 4.0 * at(i, j, -1) + at(i, j, -2)) / (2.0 * h);
        else {
          out.set_masked(i, j);
          continue;
        }
      } else {
        if (live(i, j, -1) && live(i, j, 1))
          v = (at(i, j, 1) - 2.0 * at(i, j, 0) + at(i, j, -1)) / (h * h);
        else if (live(i, j, 1) && live(i, j, 2) && live(i, j, 3))
          v = (2.0 * at(i, j, 0) - 5.0 * at(i, j, 1) + 4.0 * at(i, j, 2) - at(i, j, 3)) / (h * h);
        else if (live(i, j, -1) && live(i, j, -2) && live(i, j, -3))
          v = (2.0 * at(i, j, 0) - 5.0 * at(i, j, -1) + 4.0 * at(i, j, -2) - at(i, j, -3)) /
              (h * h);
        else {
          out.set_masked(i, j);
          continue;
        }
      }
      out(i, j) = v;
    }
  return out;
}

}  // namespace detail

inline ComplexField d_x(const ComplexField& f) { return detail::directional<true, 1>(f); }
inline ComplexField d_y(const ComplexField& f) { return detail::directional<false, 1>(f); }
inline ComplexField d_xx(const ComplexField& f) { return detail::directional<true, 2>(f); }
inline ComplexField d_yy(const ComplexField& f) { return detail::directional<false, 2>(f); }

/// Wirtinger derivative d/dz = (d/dx - i d/dy) / 2.
inline ComplexField d_z(const ComplexField& f) {
  return zip(d_x(f), d_y(f), [](const cplx& a, const cplx& b) { return 0.5 * (a - cplx(0, 1) * b); });
}

/// Wirtinger derivative d/dzbar = (d/dx + i d/dy) / 2.
inline ComplexField d_zbar(const ComplexField& f) {
  return zip(d_x(f), d_y(f), [](const cplx& a, const cplx& b) { return 0.5 * (a + cplx(0, 1) * b); });
}

/// d/dzbar d/dz, discretised as a quarter of the compact five-point Laplacian.
inline ComplexField mixed_dzbar_dz(const ComplexField& f) {
  return zip(d_xx(f), d_yy(f), [](const cplx& a, const cplx& b) { return 0.25 * (a + b); });
}

inline ComplexField dz(const ComplexField& f) { return d_z(f); }
inline ComplexField dzbar(const ComplexField& f) { return d_zbar(f); }

/// Principal square root followed by a sign-continuation sweep.
///
/// A flood fill from the first live sample of each connected component flips
/// the sign of a neighbour whenever the flipped value is closer to the
/// current one, so the result has no spurious branch-cut jumps. This is the
/// single sequential pass in the library.
inline ComplexField sqrt_continuous(const ComplexField& a) {
  ComplexField r = sqrt(a);
  const GridSpec& g = r.grid();
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int j0 = 0; j0 < g.ny; ++j0)
    for (int i0 = 0; i0 < g.nx; ++i0) {
      if (r.masked(i0, j0) || seen[g.index(i0, j0)]) continue;
      seen[g.index(i0, j0)] = 1;
      queue.emplace_back(i0, j0);
      while (!queue.empty()) {
        auto [i, j] = queue.front();
        queue.pop_front();
        const cplx cur = r(i, j);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = i + di[d], nj = j + dj[d];
          if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
          const std::size_t k = g.index(ni, nj);
          if (seen[k] || r.masked(k)) continue;
          if (std::abs(r[k] - cur) > std::abs(-r[k] - cur)) r[k] = -r[k];
          seen[k] = 1;
          queue.emplace_back(ni, nj);
        }
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Uniform access for both representations
// ---------------------------------------------------------------------------

/// A quantity a residual can be built from: a formula or a sampled field.
template <class F>
concept FieldLike = std::same_as<F, ClosedForm> || std::same_as<F, ComplexField>;

/// Value and the three Wirtinger derivatives a residual may need, on a grid.
struct FieldJet {
  ComplexField value;
  ComplexField dz;
  ComplexField dzbar;
  ComplexField dzdzbar;

  /// Jet of the conjugate field: d(conj f) = conj(dbar f).
  FieldJet conjugate() const {
    return {conj(value), conj(dzbar), conj(dz), conj(dzdzbar)};
  }
};

inline ComplexField values(const ClosedForm& f, const GridSpec& g) { return sample(f, g); }
inline ComplexField values(const ComplexField& f, const GridSpec& g) {
  require_same_grid(f.grid(), g, "values");
  return f;
}

/// Exact jets from a formula. Inadmissible or singular samples are masked.
inline FieldJet derivs(const ClosedForm& f, const GridSpec& g) {
  g.validate();
  FieldJet out{ComplexField(g), ComplexField(g), ComplexField(g), ComplexField(g)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const cplx z = g.z(i, j);
      ComplexField* slots[4] = {&out.value, &out.dz, &out.dzbar, &out.dzdzbar};
      if (!f.admissible(z)) {
        for (ComplexField* c : slots) c->set_masked(i, j);
        continue;
      }
      const Jet jet = f.at(z);
      // A form built from exact derivatives carries fewer orders; the
      // components it cannot supply are masked rather than approximated.
      const int need[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
      for (int c = 0; c < 4; ++c) {
        const int a = need[c][0], b = need[c][1];
        const bool available = jet.order_z() >= a && jet.order_zbar() >= b;
        const cplx v = available ? jet.coef(a, b) : cplx(NAN, 0.0);
        if (detail::finite(v))
          (*slots[c])(i, j) = v;
        else
          slots[c]->set_masked(i, j);
      }
    }
  return out;
}

/// Finite-difference jets from samples.
inline FieldJet derivs(const ComplexField& f, const GridSpec& g) {
  require_same_grid(f.grid(), g, "derivs");
  return {f, d_z(f), d_zbar(f), mixed_dzbar_dz(f)};
}

}  // namespace wsl
