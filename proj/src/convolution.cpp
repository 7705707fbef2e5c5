#include "qha/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "qha/kernels.hpp"
#include "qha/parallel.hpp"

namespace qha {

double ConvolutionConfig::resolved_window(const FockParams& params) const {
  return window > 0 ? window : default_window(params);
}

namespace {

void check_finite(cplx v, const Point& z, const Symbol& f, const char* op) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(std::string(op) + ": non-finite value of " + f.describe() + " at " + format_point(z));
}

// A = left * right^H when the numerical rank is at most dim/4.
bool low_rank_factor(const CMatrix& a, CMatrix& left, CMatrix& right) {
  const auto d = a.rows();
  if (d == 0) return false;
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s(0) > 0)
    while (r < s.size() && s(r) > 1e-14 * s(0)) ++r;
  if (4 * r > d) return false;
  left = svd.matrixU().leftCols(r) * s.head(r).asDiagonal();
  right = svd.matrixV().leftCols(r);
  return true;
}

// z -> alpha_z(A), through a low-rank factorization A = L R^H when the
// numerical rank is small.
class AlphaAction {
 public:
  explicit AlphaAction(const FockOperator& a) : basis_(a.params), a_(a.m) {
    low_rank_ = low_rank_factor(a.m, left_, right_);
  }

  CMatrix operator()(std::span<const cplx> z) const {
    CMatrix w = weyl_matrix(basis_, z);
    if (low_rank_) return (w * left_) * (w * right_).adjoint();
    return w * a_ * w.adjoint();
  }

  const Basis& basis() const { return basis_; }

 private:
  Basis basis_;
  CMatrix a_;
  CMatrix left_, right_;
  bool low_rank_ = false;
};

Box integration_box(const Symbol& f, const FockParams& params, const ConvolutionConfig& cfg) {
  if (cfg.box) return *cfg.box;
  Box b = Box::cube(params.n, cfg.resolved_window(params));
  if (auto s = f.support()) b = intersect(b, *s);
  return b;
}

// Shell mass of |f| |alpha_z(A)|_F between the cubes of half width W and
// 2W, relative to the mass inside W.
void window_check(const Symbol& f, const AlphaAction& alpha, const FockParams& params,
                  const ConvolutionConfig& cfg, Diagnostics* diag) {
  if (cfg.instability_tol < 0 || cfg.box) return;
  const double w = cfg.resolved_window(params);
  Box outer = Box::cube(params.n, 2 * w);
  if (auto s = f.support()) outer = intersect(outer, *s);
  if (outer.empty()) return;
  GaussGrid grid = lebesgue_grid(outer, cfg.shell_m);
  struct Mass {
    double inner = 0, shell = 0;
  };
  Mass m = parallel::chunked_reduce(
      grid.size(), Mass{},
      [&](std::size_t b, std::size_t e, Mass& acc) {
        for (std::size_t i = b; i < e; ++i) {
          auto z = grid.node(i);
          cplx fv = f(z);
          if (fv == 0.0) continue;
          Point p = grid.point(i);
          check_finite(fv, p, f, "conv_fun_op");
          double v = grid.weight(i) * std::abs(fv) * alpha(z).norm();
          bool inside = true;
          for (const auto& c : z) inside = inside && std::abs(c.real()) <= w && std::abs(c.imag()) <= w;
          (inside ? acc.inner : acc.shell) += v;
        }
      },
      [](Mass a, const Mass& b) { return Mass{a.inner + b.inner, a.shell + b.shell}; });
  if (m.shell > cfg.instability_tol * m.inner)
    raise_flag(diag, "window instability: mass outside W=" + std::to_string(w) + " is " + std::to_string(m.shell) +
                         " against " + std::to_string(m.inner) + " inside, for " + f.describe());
}

}  // namespace

GaussGrid convolution_grid(const Symbol& f, const FockParams& params, const ConvolutionConfig& cfg) {
  if (cfg.m < 2) throw Error("convolution: m must be >= 2");
  Box b = integration_box(f, params, cfg);
  if (b.empty()) {
    // symbol support misses the window: a degenerate one-node grid with weight 0
    MeasureTag tag;
    tag.kind = MeasureKind::lebesgue;
    tag.box = b;
    return GaussGrid(params.n, Point(params.n, 0.0), {0.0}, tag);
  }
  return lebesgue_grid(b, cfg.m);
}

FockOperator conv_fun_op(const Symbol& f, const FockOperator& a, const ConvolutionConfig& cfg, Diagnostics* diag) {
  const FockParams& params = a.params;
  if (f.n() != params.n) throw Error("conv_fun_op: symbol dimension does not match operator");
  AlphaAction alpha(a);
  GaussGrid grid = convolution_grid(f, params, cfg);
  const auto d = static_cast<Eigen::Index>(params.dim());
  CMatrix m = parallel::chunked_reduce(
      grid.size(), CMatrix(CMatrix::Zero(d, d)),
      [&](std::size_t b, std::size_t e, CMatrix& acc) {
        for (std::size_t i = b; i < e; ++i) {
          if (grid.weight(i) == 0) continue;
          auto z = grid.node(i);
          cplx fv = f(z);
          if (fv == 0.0) continue;
          check_finite(fv, grid.point(i), f, "conv_fun_op");
          CMatrix x = alpha(z);
          kernels::caxpy(static_cast<std::size_t>(x.size()), grid.weight(i) * fv, x.data(), acc.data());
        }
      },
      [](CMatrix x, const CMatrix& y) { return CMatrix(x + y); }, parallel::matrix_chunk(grid.size(), params.dim()));
  window_check(f, alpha, params, cfg, diag);
  return {params, std::move(m)};
}

OpOpConvolution::OpOpConvolution(const FockOperator& a, const FockOperator& b)
    : params_(a.params), basis_(a.params), a_(a.m) {
  require_same_space(a.params, b.params, "conv_op_op");
  FockOperator u = parity_matrix(params_);
  ubu_ = u.m * b.m * u.m;
  low_rank_ = low_rank_factor(a.m, left_, right_);
}

cplx OpOpConvolution::operator()(std::span<const cplx> z) const {
  CMatrix w = weyl_matrix(basis_, z);
  if (low_rank_) {
    // Tr(L R^H W X W^H) = Tr((W^H R)^H X (W^H L))
    CMatrix g = w.adjoint() * right_;
    CMatrix h = w.adjoint() * left_;
    CMatrix xh = ubu_ * h;
    cplx acc = 0;
    for (Eigen::Index k = 0; k < g.cols(); ++k)
      acc += kernels::cdotc(static_cast<std::size_t>(g.rows()), g.col(k).data(), xh.col(k).data());
    return acc;
  }
  CMatrix p = w * ubu_ * w.adjoint();
  // Tr(A P) = sum_ij A_ij P_ji
  CMatrix pt = p.transpose();
  return kernels::cdotu(static_cast<std::size_t>(pt.size()), a_.data(), pt.data());
}

cplx conv_op_op_at(const FockOperator& a, const FockOperator& b, const Point& z) {
  return OpOpConvolution(a, b)(z);
}

Symbol conv_op_op(const FockOperator& a, const FockOperator& b, const WindowOptions& opts, Diagnostics* diag) {
  OpOpConvolution conv(a, b);
  GridFunction g;
  g.n = a.params.n;
  g.center = opts.center.empty() ? Point(g.n, 0.0) : opts.center;
  g.half_width = opts.half_width > 0 ? opts.half_width : std::sqrt(a.params.trusted_radius2() / (2.0 * g.n));
  g.points = opts.points > 0 ? opts.points : 41;
  g.order = opts.order;
  g.values.resize(g.size());
  parallel::for_each_index(g.size(), [&](std::size_t i) {
    Point z = g.node(i);
    g.values[i] = conv(z);
  });
  if (!a.params.trusted(g.center)) raise_flag(diag, "conv_op_op: window centre outside trusted region");
  return Symbol::grid(std::move(g), "conv_op_op");
}

Symbol conv_fun_fun(const Symbol& f, const Symbol& g, const FockParams& params, const ConvolutionConfig& cfg,
                    const WindowOptions& out, Diagnostics* diag) {
  if (f.n() != g.n() || f.n() != params.n) throw Error("conv_fun_fun: dimension mismatch");
  if (out.half_width <= 0) throw Error("conv_fun_fun: output window half width must be positive");
  GaussGrid grid = convolution_grid(f, params, cfg);
  std::vector<cplx> fv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    fv[i] = grid.weight(i) == 0 ? cplx(0) : f(grid.node(i));
    check_finite(fv[i], grid.point(i), f, "conv_fun_fun");
  }
  const auto gsupp = g.support();
  GridFunction res;
  res.n = params.n;
  res.center = out.center.empty() ? Point(params.n, 0.0) : out.center;
  res.half_width = out.half_width;
  res.points = out.points > 0 ? out.points : 41;
  res.order = out.order;
  res.values.resize(res.size());
  parallel::for_each_index(res.size(), [&](std::size_t p) {
    Point z = res.node(p);
    Point zw(z.size());
    cplx acc = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (fv[i] == 0.0) continue;
      auto w = grid.node(i);
      for (std::size_t k = 0; k < z.size(); ++k) zw[k] = z[k] - w[k];
      if (gsupp && !gsupp->contains(zw)) continue;
      cplx gv = g(zw);
      check_finite(gv, zw, g, "conv_fun_fun");
      acc += grid.weight(i) * fv[i] * gv;
    }
    res.values[p] = acc;
  });
  if (cfg.instability_tol >= 0 && !cfg.box && !f.support()) {
    // mass of |f| in the shell [-2W, 2W] minus [-W, W]
    double w = cfg.resolved_window(params);
    GaussGrid outer = lebesgue_grid(Box::cube(params.n, 2 * w), cfg.shell_m);
    double inner = 0, shell = 0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
      auto z = outer.node(i);
      bool inside = true;
      for (const auto& c : z) inside = inside && std::abs(c.real()) <= w && std::abs(c.imag()) <= w;
      (inside ? inner : shell) += outer.weight(i) * std::abs(f(z));
    }
    if (shell > cfg.instability_tol * inner)
      raise_flag(diag, "window instability in conv_fun_fun for " + f.describe());
  }
  return Symbol::grid(std::move(res), "conv_fun_fun");
}

FockOperator toeplitz_via_convolution(const FockParams& params, const Symbol& f, const ConvolutionConfig& cfg,
                                      Diagnostics* diag) {
  FockOperator r = std::pow(M_PI * params.t, -params.n) * projection_constants(params);
  return conv_fun_op(f, r, cfg, diag);
}

namespace {

// int h(z) (A * B)(z) dV over grid, deterministic.
cplx integrate_op_op(const OpOpConvolution& conv, const GaussGrid& grid, const std::function<cplx(std::span<const cplx>)>& h) {
  return integrate(grid, [&](std::span<const cplx> z) {
    cplx hv = h ? h(z) : cplx(1.0);
    return hv == 0.0 ? cplx(0) : hv * conv(z);
  });
}

double rel(cplx lhs, cplx rhs, cplx scale) { return std::abs(lhs - rhs) / (1 + std::abs(scale)); }

}  // namespace

double trace_identity_residual(const FockOperator& a, const FockOperator& b, const ConvolutionConfig& cfg,
                               Diagnostics* diag) {
  require_same_space(a.params, b.params, "trace_identity_residual");
  const FockParams& params = a.params;
  OpOpConvolution conv(a, b);
  GaussGrid grid = cfg.box ? lebesgue_grid(*cfg.box, cfg.m) : lebesgue_grid(cfg.resolved_window(params), cfg.m, params.n);
  cplx lhs = integrate_op_op(conv, grid, nullptr);
  cplx rhs = std::pow(M_PI * params.t, params.n) * a.trace() * b.trace();
  double r = rel(lhs, rhs, rhs);
  if (!std::isfinite(r)) raise_flag(diag, "trace identity: non-finite residual");
  return r;
}

std::array<double, 3> adjoint_duality_residuals(const Symbol& f, const FockOperator& a1, const FockOperator& a2,
                                                const FockOperator& b, const ConvolutionConfig& cfg,
                                                Diagnostics* diag) {
  require_same_space(a1.params, a2.params, "adjoint_duality_residuals");
  require_same_space(a1.params, b.params, "adjoint_duality_residuals");
  const FockParams& params = a1.params;
  FockOperator u = parity_matrix(params);
  auto tr = [](const CMatrix& x, const CMatrix& y) { return cplx((x * y).trace()); };
  GaussGrid fgrid = convolution_grid(f, params, cfg);
  auto fval = [&](std::span<const cplx> z) { return f(z); };

  // <f * A2, B> = <A2, Uf * B>
  cplx lhs1 = tr(conv_fun_op(f, a2, cfg, diag).m, b.m);
  cplx rhs1 = tr(a2.m, conv_fun_op(f.parity(), b, cfg, diag).m);

  // <f * A1, B> = <f, B * (U A1 U)>
  cplx lhs2 = tr(conv_fun_op(f, a1, cfg, diag).m, b.m);
  cplx rhs2 = integrate_op_op(OpOpConvolution(b, u * a1 * u), fgrid, fval);

  // <A1 * A2, f> = <A2, f * (U A1 U)>
  cplx lhs3 = integrate_op_op(OpOpConvolution(a1, a2), fgrid, fval);
  cplx rhs3 = tr(a2.m, conv_fun_op(f, u * a1 * u, cfg, diag).m);

  return {rel(lhs1, rhs1, lhs1), rel(lhs2, rhs2, lhs2), rel(lhs3, rhs3, lhs3)};
}

double l1_norm(const Symbol& f, const FockParams& params, const ConvolutionConfig& cfg) {
  GaussGrid grid = convolution_grid(f, params, cfg);
  return integrate(grid, [&](std::span<const cplx> z) { return cplx(std::abs(f(z))); }).real();
}

double young_ratio(const Symbol& f, const FockOperator& a, const ConvolutionConfig& cfg) {
  double denom = l1_norm(f, a.params, cfg) * operator_norm_2(a);
  if (denom == 0) return 0;
  return operator_norm_2(conv_fun_op(f, a, cfg)) / denom;
}

}  // namespace qha
