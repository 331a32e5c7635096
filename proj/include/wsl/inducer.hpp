#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wsl/weierstrass.hpp"

namespace wsl {

/// Which leg of the rectilinear path from the basepoint is walked first.
enum class PathOrder {
  /// Along the basepoint row (x direction), then up the target column.
  row_first,
  /// Along the basepoint column (y direction), then across the target row.
  column_first,
};

/// Coordinates X1, X2, X3 of an induced surface over the grid.
struct Surface {
  GridSpec grid;
  RealField X1, X2, X3;
  std::pair<int, int> basepoint{0, 0};
  /// max |Im X_k| of the integrated combinations.
  double imaginary_residue = 0.0;
  /// max |(X1 - i X2) - conj(X1 + i X2)| between the two determinations.
  double conjugate_mismatch = 0.0;
  /// The spinor vanishes identically: the map collapses to a point.
  bool degenerate = false;
  std::vector<std::string> warnings;

  Surface() = default;
  Surface(const GridSpec& g, RealField x1, RealField x2, RealField x3)
      : grid(g), X1(std::move(x1)), X2(std::move(x2)), X3(std::move(x3)) {
    require_same_grid(X1.grid(), g, "Surface");
    require_same_grid(X2.grid(), g, "Surface");
    require_same_grid(X3.grid(), g, "Surface");
  }

  bool masked(int i, int j) const { return X1.masked(i, j) || X2.masked(i, j) || X3.masked(i, j); }
};

/// Basepoint sample nearest to the domain center.
inline std::pair<int, int> default_basepoint(const GridSpec& g) {
  return g.nearest(0.5 * (g.x_min + g.x_max), 0.5 * (g.y_min + g.y_max));
}

namespace detail {

/// Trapezoid line integral of the one-form a dz + b dzbar along rectilinear
/// grid paths from the basepoint. Along x the form reads (a + b) dx, along y
/// it reads i(a - b) dy. Samples whose path crosses a masked sample are masked.
inline ComplexField integrate_form(const ComplexField& a, const ComplexField& b,
                                   std::pair<int, int> base, PathOrder order) {
  const GridSpec& g = a.grid();
  require_same_grid(b.grid(), g, "integrate_form");
  const ComplexField wx = a + b;
  const ComplexField wy = cplx(0, 1) * (a - b);
  const auto [i0, j0] = base;
  const double hx = g.hx(), hy = g.hy();
  ComplexField out(g);
  for (std::size_t k = 0; k < out.size(); ++k) out.set_masked(k);

  // First leg along the basepoint row or column, then each second leg.
  auto walk_x = [&](int j, int ifrom, cplx start) {
    out(ifrom, j) = start;
    out.set_masked(ifrom, j, false);
    for (int dir : {1, -1}) {
      cplx acc = start;
      for (int i = ifrom + dir; i >= 0 && i < g.nx; i += dir) {
        if (wx.masked(i, j) || wx.masked(i - dir, j)) break;
        acc += 0.5 * hx * double(dir) * (wx(i, j) + wx(i - dir, j));
        out(i, j) = acc;
        out.set_masked(i, j, false);
      }
    }
  };
  auto walk_y = [&](int i, int jfrom, cplx start) {
    out(i, jfrom) = start;
    out.set_masked(i, jfrom, false);
    for (int dir : {1, -1}) {
      cplx acc = start;
      for (int j = jfrom + dir; j >= 0 && j < g.ny; j += dir) {
        if (wy.masked(i, j) || wy.masked(i, j - dir)) break;
        acc += 0.5 * hy * double(dir) * (wy(i, j) + wy(i, j - dir));
        out(i, j) = acc;
        out.set_masked(i, j, false);
      }
    }
  };

  if (wx.masked(i0, j0)) throw std::domain_error("induce_surface: basepoint is masked");
  if (order == PathOrder::row_first) {
    walk_x(j0, i0, 0.0);
    ComplexField leg = out;
    for (int i = 0; i < g.nx; ++i)
      if (!leg.masked(i, j0)) walk_y(i, j0, leg(i, j0));
  } else {
    walk_y(i0, j0, 0.0);
    ComplexField leg = out;
    for (int j = 0; j < g.ny; ++j)
      if (!leg.masked(i0, j)) walk_x(j, i0, leg(i0, j));
  }
  return out;
}

}  // namespace detail

/// Induces X from a spinor through
///   X1 + i X2 =  2i  integral (conj(psi1)^2 dz - conj(psi2)^2 dzbar)
///   X1 - i X2 =  2i  integral (psi2^2 dz - psi1^2 dzbar)
///   X3        = -2   integral (conj(psi1) psi2 dz + psi1 conj(psi2) dzbar)
/// The two determinations of (X1, X2) are conjugate on solutions; their
/// mismatch and the imaginary residue of X3 are reported, not dropped.
///
/// If H is supplied, a warning is recorded when the sampled first-order
/// residual exceeds warn_tol (the integrals are then path dependent).
inline Surface induce_surface(const SpinorField& s, std::pair<int, int> base,
                              PathOrder order = PathOrder::row_first,
                              const ComplexField* H = nullptr, double warn_tol = INFINITY) {
  const GridSpec& g = s.psi1.grid();
  require_same_grid(s.psi2.grid(), g, "induce_surface");
  if (base.first < 0 || base.second < 0 || base.first >= g.nx || base.second >= g.ny)
    throw std::invalid_argument("induce_surface: basepoint outside grid");
  const ComplexField c1 = conj(s.psi1), c2 = conj(s.psi2);
  const cplx two_i(0.0, 2.0);
  const ComplexField W = detail::integrate_form(two_i * c1 * c1, -two_i * c2 * c2, base, order);
  const ComplexField V =
      detail::integrate_form(two_i * s.psi2 * s.psi2, -two_i * s.psi1 * s.psi1, base, order);
  const ComplexField Z = detail::integrate_form(-2.0 * c1 * s.psi2, -2.0 * s.psi1 * c2, base, order);

  const ComplexField x1 = 0.5 * (W + V);
  const ComplexField x2 = (W - V) / cplx(0.0, 2.0);
  Surface out(g, real_part(x1), real_part(x2), real_part(Z));
  out.basepoint = base;
  out.imaginary_residue = std::max({norms(imag_part(x1), false).max, norms(imag_part(x2), false).max,
                                    norms(imag_part(Z), false).max});
  out.conjugate_mismatch = norms(V - conj(W), false).max;
  out.degenerate = norms(values(density_p(s), g), false).max < 1e-14;
  if (out.X1.all_masked()) throw std::domain_error("induce_surface: no sample reachable");
  if (H) {
    const double res = weierstrass_residual(s, *H, g).max_norm();
    if (res > warn_tol) {
      std::ostringstream msg;
      msg << "first-order residual " << res << " exceeds " << warn_tol
          << "; the inducing integrals are path dependent";
      out.warnings.push_back(msg.str());
    }
  }
  if (out.degenerate) out.warnings.push_back("degenerate immersion: the spinor vanishes");
  return out;
}

inline Surface induce_surface(const SpinorForm& s, const GridSpec& g, std::pair<int, int> base,
                              PathOrder order = PathOrder::row_first) {
  return induce_surface(sample(s, g), base, order);
}

/// Compares the row-first and column-first integrals: the max coordinate
/// discrepancy at z1 is the report value; the whole-field maximum is a metric.
inline ResidualReport path_independence_report(const SpinorField& s, std::pair<int, int> z0,
                                               std::pair<int, int> z1,
                                               std::string name = "path_independence") {
  const Surface a = induce_surface(s, z0, PathOrder::row_first);
  const Surface b = induce_surface(s, z0, PathOrder::column_first);
  const GridSpec& g = a.grid;
  const auto [i, j] = z1;
  if (i < 0 || j < 0 || i >= g.nx || j >= g.ny)
    throw std::invalid_argument("path_independence_report: target outside grid");
  ResidualReport r(std::move(name), g);
  if (a.masked(i, j) || b.masked(i, j)) throw std::domain_error("path_independence_report: target masked");
  const double d = std::max({std::abs(a.X1(i, j) - b.X1(i, j)), std::abs(a.X2(i, j) - b.X2(i, j)),
                             std::abs(a.X3(i, j) - b.X3(i, j))});
  r.add_scalar("|X(row first) - X(column first)| at target", d);
  double field_max = 0.0;
  for (auto [fa, fb] : {std::pair{&a.X1, &b.X1}, std::pair{&a.X2, &b.X2}, std::pair{&a.X3, &b.X3}})
    field_max = std::max(field_max, norms(zip(*fa, *fb, [](double x, double y) { return x - y; }), false).max);
  r.metrics["field_max"] = field_max;
  return r;
}

/// First and second fundamental forms with respect to (x, y).
struct FundamentalForms {
  GridSpec grid;
  RealField E, F, G;
  RealField e, f, g;
  std::array<RealField, 3> normal;
  /// Samples where EG - F^2 <= 0 (no immersion); they are masked.
  std::size_t degenerate_points = 0;
};

namespace detail {

inline ComplexField d_xy(const ComplexField& f) { return d_x(d_y(f)); }

using Vec3 = std::array<ComplexField, 3>;

inline ComplexField dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace detail

inline FundamentalForms fundamental_forms(const Surface& s) {
  using detail::Vec3;
  const GridSpec& g = s.grid;
  const Vec3 X = {to_complex(s.X1), to_complex(s.X2), to_complex(s.X3)};
  Vec3 Xx, Xy, Xxx, Xxy, Xyy;
  for (int k = 0; k < 3; ++k) {
    Xx[k] = d_x(X[k]);
    Xy[k] = d_y(X[k]);
    Xxx[k] = d_xx(X[k]);
    Xyy[k] = d_yy(X[k]);
    Xxy[k] = detail::d_xy(X[k]);
  }
  const ComplexField E = detail::dot(Xx, Xx), F = detail::dot(Xx, Xy), G = detail::dot(Xy, Xy);
  ComplexField det = E * G - F * F;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < det.size(); ++k)
    if (!det.masked(k) && !(det[k].real() > 1e-300)) {
      det.set_masked(k);
      ++bad;
    }
  const Vec3 cross = {Xx[1] * Xy[2] - Xx[2] * Xy[1], Xx[2] * Xy[0] - Xx[0] * Xy[2],
                      Xx[0] * Xy[1] - Xx[1] * Xy[0]};
  const ComplexField len = sqrt(det);
  const Vec3 n = {cross[0] / len, cross[1] / len, cross[2] / len};
  FundamentalForms ff;
  ff.grid = g;
  ff.E = real_part(E);
  ff.F = real_part(F);
  ff.G = real_part(G);
  ff.e = real_part(detail::dot(Xxx, n));
  ff.f = real_part(detail::dot(Xxy, n));
  ff.g = real_part(detail::dot(Xyy, n));
  ff.normal = {real_part(n[0]), real_part(n[1]), real_part(n[2])};
  ff.degenerate_points = bad;
  return ff;
}

/// (eG - 2fF + gE) / (2(EG - F^2)); the sign follows the normal X_x x X_y.
inline RealField mean_curvature_numeric(const FundamentalForms& ff) {
  const ComplexField E = to_complex(ff.E), F = to_complex(ff.F), G = to_complex(ff.G);
  const ComplexField e = to_complex(ff.e), f = to_complex(ff.f), g = to_complex(ff.g);
  return real_part((e * G - 2.0 * f * F + g * E) / (2.0 * (E * G - F * F)));
}

/// (eg - f^2) / (EG - F^2).
inline RealField gauss_curvature_numeric(const FundamentalForms& ff) {
  const ComplexField E = to_complex(ff.E), F = to_complex(ff.F), G = to_complex(ff.G);
  const ComplexField e = to_complex(ff.e), f = to_complex(ff.f), g = to_complex(ff.g);
  return real_part((e * g - f * f) / (E * G - F * F));
}

/// Interior max of | |H_num| - |H| |; the signed difference is a component too.
inline ResidualReport mean_curvature_closure(const FundamentalForms& ff, const ComplexField& H,
                                             std::string name = "mean_curvature_closure") {
  require_same_grid(H.grid(), ff.grid, "mean_curvature_closure");
  const ComplexField hn = to_complex(mean_curvature_numeric(ff));
  ResidualReport r(std::move(name), ff.grid);
  r.add("|H_num| - |H|", zip(hn, H, [](const cplx& a, const cplx& b) { return cplx(std::abs(a) - std::abs(b)); }));
  const Norms plus = norms(hn - H), minus = norms(hn + H);
  r.metrics["signed_difference_max"] = std::min(plus.max, minus.max);
  r.metrics["orientation"] = plus.max <= minus.max ? 1.0 : -1.0;
  return r;
}

/// K_num from the fundamental forms against K = -d dbar log p / p^2.
inline ResidualReport gauss_curvature_consistency(const FundamentalForms& ff, const RealField& K_formula,
                                                  std::string name = "gauss_curvature_consistency") {
  require_same_grid(K_formula.grid(), ff.grid, "gauss_curvature_consistency");
  const RealField kn = gauss_curvature_numeric(ff);
  ResidualReport r(std::move(name), ff.grid);
  r.add("K_num - K_formula", zip(kn, K_formula, [](double a, double b) { return a - b; }));
  return r;
}

/// Field with a ring of the given width around the grid boundary masked.
template <class T>
Field<T> mask_ring(const Field<T>& f, int width) {
  Field<T> out = f;
  const GridSpec& g = f.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (i < width || j < width || i >= g.nx - width || j >= g.ny - width) out.set_masked(i, j);
  return out;
}

/// Laplace-Beltrami operator in divergence form from the first fundamental form:
///   (1/sqrt(det)) [d_x((G u_x - F u_y)/sqrt(det)) + d_y((E u_y - F u_x)/sqrt(det))].
inline RealField laplace_beltrami(const FundamentalForms& ff, const RealField& u) {
  const ComplexField E = to_complex(ff.E), F = to_complex(ff.F), G = to_complex(ff.G);
  const ComplexField U = to_complex(u);
  const ComplexField ux = d_x(U), uy = d_y(U);
  const ComplexField sq = sqrt(E * G - F * F);
  const ComplexField ax = (G * ux - F * uy) / sq;
  const ComplexField ay = (E * uy - F * ux) / sq;
  return real_part((d_x(ax) + d_y(ay)) / sq);
}

/// -2 gamma H + alpha (Delta H + 2 H^3 + R H) with R = -2K.
///
/// The Laplacian nests two stencils, so the two outermost rings are
/// excluded from the norm.
inline ResidualReport rigid_string_residual(const RealField& H, const RealField& K, double gamma,
                                            double alpha, const FundamentalForms& ff,
                                            std::string name = "rigid_string") {
  require_same_grid(H.grid(), ff.grid, "rigid_string_residual");
  require_same_grid(K.grid(), ff.grid, "rigid_string_residual");
  const ComplexField h = to_complex(H), k = to_complex(K);
  const ComplexField lap = to_complex(laplace_beltrami(ff, H));
  const ComplexField R = -2.0 * k;
  const ComplexField res = -2.0 * gamma * h + alpha * (lap + 2.0 * h * h * h + R * h);
  ResidualReport r(std::move(name), ff.grid);
  r.add("-2 gamma H + alpha (Delta H + 2 H^3 + R H)", mask_ring(res, 2));
  return r;
}

// ---------------------------------------------------------------------------
// Mesh and CSV output
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// OBJ text for an nx-by-ny vertex lattice stored row-major (index j*nx + i).
///
/// One "v" line per unmasked vertex in row-major order, and two triangles per
/// cell whose four corners are unmasked. Throws if every vertex is masked.
inline void write_obj(std::ostream& os, int nx, int ny, std::span<const std::array<double, 3>> xyz,
                      std::span<const std::uint8_t> mask) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("write_obj: at least 2x2 vertices required");
  const std::size_t n = std::size_t(nx) * std::size_t(ny);
  if (xyz.size() != n || (!mask.empty() && mask.size() != n))
    throw std::invalid_argument("write_obj: size mismatch");
  auto live = [&](std::size_t k) { return mask.empty() || !mask[k]; };
  std::vector<long> id(n, 0);
  long next = 1;
  for (std::size_t k = 0; k < n; ++k)
    if (live(k)) id[k] = next++;
  if (next == 1) throw std::domain_error("write_obj: every vertex is masked");
  for (std::size_t k = 0; k < n; ++k)
    if (live(k))
      os << "v " << detail::fmt17(xyz[k][0]) << ' ' << detail::fmt17(xyz[k][1]) << ' '
         << detail::fmt17(xyz[k][2]) << '\n';
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t a = std::size_t(j) * nx + i, b = a + 1, c = a + nx, d = c + 1;
      if (!(live(a) && live(b) && live(c) && live(d))) continue;
      os << "f " << id[a] << ' ' << id[b] << ' ' << id[d] << '\n';
      os << "f " << id[a] << ' ' << id[d] << ' ' << id[c] << '\n';
    }
}

inline void export_mesh(const Surface& s, std::ostream& os) {
  const GridSpec& g = s.grid;
  std::vector<std::array<double, 3>> xyz(g.size());
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      mask[k] = s.masked(i, j) ? 1 : 0;
      xyz[k] = {s.X1(i, j), s.X2(i, j), s.X3(i, j)};
    }
  write_obj(os, g.nx, g.ny, xyz, mask);
}

inline void export_mesh(const Surface& s, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("export_mesh: cannot open " + path);
  export_mesh(s, os);
  if (!os) throw std::runtime_error("export_mesh: write failed for " + path);
}

struct ObjMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<long, 3>> faces;
};

/// Reads the subset of OBJ written by write_obj (v and triangular f lines).
inline ObjMesh read_obj(std::istream& is) {
  ObjMesh m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      std::array<std::string, 3> t;
      ls >> t[0] >> t[1] >> t[2];
      if (!ls) throw std::runtime_error("read_obj: malformed vertex line");
      m.vertices.push_back({std::stod(t[0]), std::stod(t[1]), std::stod(t[2])});
    } else if (tag == "f") {
      std::array<long, 3> f{};
      ls >> f[0] >> f[1] >> f[2];
      if (!ls) throw std::runtime_error("read_obj: malformed face line");
      for (long v : f)
        if (v < 1 || v > long(m.vertices.size()))
          throw std::runtime_error("read_obj: face index out of range");
      m.faces.push_back(f);
    } else {
      throw std::runtime_error("read_obj: unsupported record '" + tag + "'");
    }
  }
  return m;
}

/// CSV with columns x, y, X1, X2, X3, H_num, K_num; masked values print as nan.
inline void write_surface_csv(std::ostream& os, const Surface& s, const RealField& H_num,
                              const RealField& K_num) {
  const GridSpec& g = s.grid;
  auto cell = [](const RealField& f, int i, int j) {
    return f.masked(i, j) ? std::string("nan") : detail::fmt17(f(i, j));
  };
  os << "x,y,X1,X2,X3,H_num,K_num\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      os << detail::fmt17(g.x(i)) << ',' << detail::fmt17(g.y(j)) << ',' << cell(s.X1, i, j) << ','
         << cell(s.X2, i, j) << ',' << cell(s.X3, i, j) << ',' << cell(H_num, i, j) << ','
         << cell(K_num, i, j) << '\n';
}

}  // namespace wsl
