#include "qha/weyl_toeplitz.hpp"

#include <algorithm>
#include <cmath>

#include "qha/kernels.hpp"
#include "qha/parallel.hpp"

namespace qha {

namespace {

// <D e_k, e_m> for the one-mode displacement with zeta = conj(z)/sqrt(t),
// m, k = 0..D. For a = m - k >= 0 the entries along the a-th diagonal are
// l_k = sqrt(k!/(k+a)!) x^{a/2} e^{-x/2} L_k^a(x), x = |zeta|^2, generated
// upward in k by the normalized Laguerre recurrence.
CMatrix weyl_one_mode(int D, double t, cplx z) {
  const int d = D + 1;
  CMatrix w = CMatrix::Zero(d, d);
  const cplx zeta = std::conj(z) / std::sqrt(t);
  const double x = std::norm(zeta);
  const double phi = std::arg(zeta);
  for (int a = 0; a < d; ++a) {
    double l_prev = 0, l;
    if (x == 0)
      l = a == 0 ? 1.0 : 0.0;
    else
      l = std::exp(0.5 * a * std::log(x) - 0.5 * x - 0.5 * std::lgamma(a + 1.0));
    const cplx lower = std::polar(1.0, a * phi);
    const cplx upper = (a % 2 ? -1.0 : 1.0) * std::conj(lower);
    for (int k = 0; k + a < d; ++k) {
      w(k + a, k) = lower * l;
      if (a > 0) w(k, k + a) = upper * l;
      double next = ((2.0 * k + 1 + a - x) * l - std::sqrt(static_cast<double>(k) * (k + a)) * l_prev) /
                    std::sqrt((k + 1.0) * (k + 1.0 + a));
      l_prev = l;
      l = next;
    }
  }
  return w;
}

}  // namespace

CMatrix weyl_matrix(const Basis& basis, std::span<const cplx> z) {
  const FockParams& params = basis.params();
  if (params.n == 1) return weyl_one_mode(params.D, params.t, z[0]);
  std::vector<CMatrix> modes;
  for (int i = 0; i < params.n; ++i) modes.push_back(weyl_one_mode(params.D, params.t, z[i]));
  const auto d = static_cast<Eigen::Index>(basis.size());
  CMatrix m(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto& b = basis[static_cast<std::size_t>(c)];
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto& a = basis[static_cast<std::size_t>(r)];
      cplx v = 1.0;
      for (int i = 0; i < params.n && v != 0.0; ++i) v *= modes[i](a[i], b[i]);
      m(r, c) = v;
    }
  }
  return m;
}

FockOperator weyl(const FockParams& params, const Point& z, Diagnostics* diag) {
  if (static_cast<int>(z.size()) != params.n) throw Error("weyl: point dimension mismatch");
  if (!params.trusted(z)) raise_flag(diag, "weyl: z=" + format_point(z) + " outside trusted window");
  Basis basis(params);
  return {params, weyl_matrix(basis, z)};
}

FockOperator weyl_by_quadrature(const FockParams& params, const Point& z, int order) {
  if (static_cast<int>(z.size()) != params.n) throw Error("weyl_by_quadrature: point dimension mismatch");
  if (order <= 0) order = params.Q + 20 + static_cast<int>(std::ceil(4 * norm2(z) / params.t));
  GaussGrid grid = gaussian_grid(params.n, params.t, order);
  Basis basis(params);
  const std::size_t d = basis.size();
  const double r2 = norm2(z);
  auto body = [&](std::size_t b, std::size_t e, CMatrix& acc) {
    std::vector<cplx> ew(d), es(d), shifted(params.n);
    for (std::size_t i = b; i < e; ++i) {
      auto w = grid.node(i);
      // k_z(w) = exp(w . conj(z)/t - |z|^2/(2t))
      cplx dot = 0;
      for (int k = 0; k < params.n; ++k) {
        dot += w[k] * std::conj(z[k]);
        shifted[k] = w[k] - z[k];
      }
      cplx kz = std::exp(dot / params.t - r2 / (2 * params.t));
      basis.evaluate(w, ew.data());
      basis.evaluate(shifted, es.data());
      for (auto& v : ew) v = std::conj(v);
      kernels::rank1_update(d, grid.weight(i) * kz, ew.data(), es.data(), acc.data());
    }
  };
  const auto di = static_cast<Eigen::Index>(d);
  CMatrix m = parallel::chunked_reduce(grid.size(), CMatrix(CMatrix::Zero(di, di)), body,
                                       [](CMatrix a, const CMatrix& b) { return CMatrix(a + b); },
                                       std::max<std::size_t>(parallel::kChunk, grid.size() / 64 + 1));
  return {params, std::move(m)};
}

FockOperator alpha_op(const FockOperator& a, const Point& z) {
  FockOperator w = weyl(a.params, z);
  return {a.params, w.m * a.m * w.m.adjoint()};
}


FockOperator toeplitz(const FockParams& params, const Symbol& f) {
  params.validate();
  if (f.n() != params.n) throw Error("toeplitz: symbol dimension does not match params");
  GaussGrid grid = gaussian_grid(params);
  Basis basis(params);
  const std::size_t d = basis.size();
  auto body = [&](std::size_t b, std::size_t e, CMatrix& acc) {
    std::vector<cplx> ew(d), cw(d);
    for (std::size_t i = b; i < e; ++i) {
      auto w = grid.node(i);
      cplx fv = f(w);
      if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()))
        throw Error("toeplitz: non-finite symbol value at node " + std::to_string(i) + " " +
                    format_point(grid.point(i)) + " for " + f.describe());
      basis.evaluate(w, ew.data());
      for (std::size_t k = 0; k < d; ++k) cw[k] = std::conj(ew[k]);
      kernels::rank1_update(d, grid.weight(i) * fv, cw.data(), ew.data(), acc.data());
    }
  };
  const auto di = static_cast<Eigen::Index>(d);
  CMatrix m = parallel::chunked_reduce(grid.size(), CMatrix(CMatrix::Zero(di, di)), body,
                                       [](CMatrix a, const CMatrix& b) { return CMatrix(a + b); },
                                       parallel::matrix_chunk(grid.size(), d));
  return {params, std::move(m)};
}

cplx berezin_at(const FockOperator& a, const Point& z) {
  Basis basis(a.params);
  CVector c(static_cast<Eigen::Index>(basis.size()));
  kernel_coefficients_into(basis, z, c.data());
  CVector mc = a.m * c;
  return kernels::cdotc(basis.size(), c.data(), mc.data());
}

namespace {

WindowOptions resolve(const FockParams& params, WindowOptions o) {
  if (o.center.empty()) o.center = Point(params.n, 0.0);
  // cube inscribed in the trusted ball
  if (o.half_width <= 0) o.half_width = std::sqrt(params.trusted_radius2() / (2.0 * params.n));
  if (o.points <= 0) o.points = 41;
  return o;
}

}  // namespace

GridFunction berezin_grid(const FockOperator& a, const WindowOptions& opts, Diagnostics* diag) {
  WindowOptions o = resolve(a.params, opts);
  GridFunction g;
  g.n = a.params.n;
  g.center = o.center;
  g.half_width = o.half_width;
  g.points = o.points;
  g.order = o.order;
  g.values.resize(g.size());
  Basis basis(a.params);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const std::size_t chunk = parallel::kChunk;
  parallel::for_each_chunk(parallel::chunk_count(g.size(), chunk), [&](std::size_t c) {
    std::size_t b = c * chunk, e = std::min(g.size(), b + chunk);
    CMatrix cz(d, static_cast<Eigen::Index>(e - b));
    for (std::size_t i = b; i < e; ++i) {
      Point z = g.node(i);
      kernel_coefficients_into(basis, z, cz.col(static_cast<Eigen::Index>(i - b)).data());
    }
    CMatrix mc = a.m * cz;
    for (std::size_t i = b; i < e; ++i) {
      auto col = static_cast<Eigen::Index>(i - b);
      g.values[i] = kernels::cdotc(basis.size(), cz.col(col).data(), mc.col(col).data());
    }
  });
  // farthest corner of the cube
  double far2 = 0;
  for (int i = 0; i < g.n; ++i) {
    double xr = std::abs(o.center[i].real()) + o.half_width, xi = std::abs(o.center[i].imag()) + o.half_width;
    far2 += xr * xr + xi * xi;
  }
  if (far2 > a.params.trusted_radius2() * (1 + 1e-12))
    raise_flag(diag, "berezin: window extends outside the trusted region |z|^2 <= tD/4");
  return g;
}

Symbol berezin(const FockOperator& a, const WindowOptions& opts, Diagnostics* diag) {
  return Symbol::grid(berezin_grid(a, opts, diag), "berezin");
}

cplx heat_at(const Symbol& f, double t, const Point& z, int order) {
  return integrate(gaussian_grid(f.n(), t, order, z), [&](std::span<const cplx> w) { return f(w); });
}

HeatTransformResult heat_transform(const Symbol& f, double t, const WindowOptions& opts, int order) {
  if (!(t > 0)) throw Error("heat_transform: t must be positive");
  if (opts.half_width <= 0) throw Error("heat_transform: window half width must be positive");
  GridFunction g;
  g.n = f.n();
  g.center = opts.center.empty() ? Point(f.n(), 0.0) : opts.center;
  g.half_width = opts.half_width;
  g.points = opts.points > 0 ? opts.points : 41;
  g.order = opts.order;
  g.values.resize(g.size());
  GaussGrid base = gaussian_grid(f.n(), t, order);
  parallel::for_each_index(g.size(), [&](std::size_t i) {
    Point z = g.node(i);
    cplx acc = 0;
    Point w(z.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      auto u = base.node(k);
      for (std::size_t j = 0; j < z.size(); ++j) w[j] = z[j] + u[j];
      cplx v = f(w);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw Error("heat_transform: non-finite value of " + f.describe() + " at " + format_point(w));
      acc += base.weight(k) * v;
    }
    g.values[i] = acc;
  });
  return {Symbol::grid(std::move(g), "heat_transform"), t, f};
}

}  // namespace qha
