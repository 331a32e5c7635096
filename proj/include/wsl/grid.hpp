#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsl/jet.hpp"

namespace wsl {

/// Uniform rectangular sampling of the (x, y) plane, z = x + iy.
///
/// Samples are indexed (i, j) with i along x and j along y. Storage is
/// row-major with rows of constant y: index = j * nx + i.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  int nx = 3;
  int ny = 3;

  GridSpec() = default;
  GridSpec(double x0, double x1, double y0, double y1, int nx_, int ny_)
      : x_min(x0), x_max(x1), y_min(y0), y_max(y1), nx(nx_), ny(ny_) {
    validate();
  }

  /// Throws std::invalid_argument unless the grid supports central differences.
  void validate() const {
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
          std::isfinite(y_max)))
      throw std::invalid_argument("GridSpec: non-finite domain bound");
    if (!(x_max > x_min) || !(y_max > y_min))
      throw std::invalid_argument("GridSpec: empty domain");
    if (nx < 3 || ny < 3)
      throw std::invalid_argument("GridSpec: at least 3 samples per direction required");
    if (!(hx() > 0.0) || !(hy() > 0.0) || !std::isfinite(hx()) || !std::isfinite(hy()))
      throw std::invalid_argument("GridSpec: degenerate spacing");
  }

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  double x(int i) const { return i == nx - 1 ? x_max : x_min + i * hx(); }
  double y(int j) const { return j == ny - 1 ? y_max : y_min + j * hy(); }
  cplx z(int i, int j) const { return {x(i), y(j)}; }
  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t index(int i, int j) const { return std::size_t(j) * nx + i; }
  bool interior(int i, int j) const { return i > 0 && j > 0 && i < nx - 1 && j < ny - 1; }

  /// Same domain with the spacing halved in both directions.
  GridSpec refined() const { return {x_min, x_max, y_min, y_max, 2 * nx - 1, 2 * ny - 1}; }

  /// Nearest sample to a point, clamped to the grid.
  std::pair<int, int> nearest(double px, double py) const {
    auto clampi = [](long v, int n) { return int(std::max(0L, std::min<long>(v, n - 1))); };
    return {clampi(std::lround((px - x_min) / hx()), nx), clampi(std::lround((py - y_min) / hy()), ny)};
  }

  bool contains(double px, double py) const {
    return px >= x_min && px <= x_max && py >= y_min && py <= y_max;
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

namespace detail {
inline bool finite(double v) { return std::isfinite(v); }
inline bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
}  // namespace detail

/// Values on a GridSpec with an exclusion mask.
///
/// Masked samples carry no meaning: they are skipped by norms and by the
/// finite-difference stencils. Unmasked samples must be finite.
template <class T>
class Field {
 public:
  using value_type = T;

  Field() = default;

  explicit Field(const GridSpec& g, T fill = T{})
      : grid_(g), values_(g.size(), fill), mask_(g.size(), 0) {
    g.validate();
  }

  Field(const GridSpec& g, std::vector<T> values, std::vector<std::uint8_t> mask = {})
      : grid_(g), values_(std::move(values)), mask_(std::move(mask)) {
    g.validate();
    if (mask_.empty()) mask_.assign(g.size(), 0);
    if (values_.size() != g.size() || mask_.size() != g.size())
      throw std::invalid_argument("Field: value count does not match grid");
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (!mask_[k] && !detail::finite(values_[k]))
        throw std::invalid_argument("Field: non-finite value at unmasked sample " +
                                    std::to_string(k));
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  T& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  const T& operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  T& operator[](std::size_t k) { return values_[k]; }
  const T& operator[](std::size_t k) const { return values_[k]; }

  bool masked(int i, int j) const { return mask_[grid_.index(i, j)] != 0; }
  bool masked(std::size_t k) const { return mask_[k] != 0; }
  void set_masked(std::size_t k, bool m = true) { mask_[k] = m ? 1 : 0; }
  void set_masked(int i, int j, bool m = true) { set_masked(grid_.index(i, j), m); }

  const std::vector<T>& values() const { return values_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  std::size_t count_masked() const {
    std::size_t n = 0;
    for (auto m : mask_) n += m ? 1 : 0;
    return n;
  }

  bool all_masked() const { return count_masked() == size(); }

  /// Pointwise map; a non-finite result masks that sample.
  template <class F>
  auto map(F&& f) const -> Field<std::invoke_result_t<F, const T&>> {
    using U = std::invoke_result_t<F, const T&>;
    Field<U> out(grid_);
    for (std::size_t k = 0; k < size(); ++k) {
      if (mask_[k]) {
        out.set_masked(k);
        continue;
      }
      U v = f(values_[k]);
      if (detail::finite(v))
        out[k] = v;
      else
        out.set_masked(k);
    }
    return out;
  }

 private:
  GridSpec grid_;
  std::vector<T> values_;
  std::vector<std::uint8_t> mask_;
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

/// Pointwise binary combination; masks are united.
template <class A, class B, class F>
auto zip(const Field<A>& a, const Field<B>& b, F&& f)
    -> Field<std::invoke_result_t<F, const A&, const B&>> {
  require_same_grid(a.grid(), b.grid(), "zip");
  using U = std::invoke_result_t<F, const A&, const B&>;
  Field<U> out(a.grid());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.masked(k) || b.masked(k)) {
      out.set_masked(k);
      continue;
    }
    U v = f(a[k], b[k]);
    if (detail::finite(v))
      out[k] = v;
    else
      out.set_masked(k);
  }
  return out;
}

inline RealField real_part(const ComplexField& f) {
  return f.map([](const cplx& v) { return v.real(); });
}
inline RealField imag_part(const ComplexField& f) {
  return f.map([](const cplx& v) { return v.imag(); });
}
inline ComplexField to_complex(const RealField& f) {
  return f.map([](const double& v) { return cplx(v, 0.0); });
}

/// Max and grid-weighted L2 norms over unmasked samples.
struct Norms {
  double max = 0.0;
  double l2 = 0.0;
  std::size_t counted = 0;
};

template <class T>
Norms norms(const Field<T>& f, bool interior_only = true) {
  const GridSpec& g = f.grid();
  Norms n;
  double sum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (f.masked(i, j) || (interior_only && !g.interior(i, j))) continue;
      const double a = std::abs(f(i, j));
      n.max = std::max(n.max, a);
      sum += a * a;
      ++n.counted;
    }
  n.l2 = std::sqrt(sum * g.hx() * g.hy());
  return n;
}

/// Population variance of the real part over unmasked interior samples.
inline double variance(const ComplexField& f, bool interior_only = true) {
  const GridSpec& g = f.grid();
  std::vector<double> vals;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (f.masked(i, j) || (interior_only && !g.interior(i, j))) continue;
      vals.push_back(f(i, j).real());
    }
  if (vals.empty()) return 0.0;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= double(vals.size());
  double acc = 0.0;
  for (double v : vals) acc += (v - mean) * (v - mean);
  return acc / double(vals.size());
}

}  // namespace wsl
