#include "qha/approx.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "qha/parallel.hpp"
#include "qha/weyl_toeplitz.hpp"

namespace qha {

namespace {

bool default_layout(const NodeLayout& l) { return l.explicit_nodes.empty() && l.pitch <= 0 && l.radius <= 0; }

// Heat kernel f_s at squared distance r2 in complex dimension n.
double heat(double s, double r2, int n) { return std::pow(M_PI * s, -n) * std::exp(-r2 / s); }

}  // namespace

std::vector<Point> lattice_nodes(int n, double t, int N, const NodeLayout& layout) {
  if (!layout.explicit_nodes.empty()) return layout.explicit_nodes;
  const double pitch = layout.pitch > 0 ? layout.pitch : std::min(std::sqrt(t) / 2, std::sqrt(t / N));
  const double radius = layout.radius > 0 ? layout.radius : 3 * std::sqrt(t) + std::sqrt(t / N);
  const int k = static_cast<int>(std::floor(radius / pitch + 1e-12));
  const int axes = 2 * n;
  std::vector<int> idx(axes, -k);
  std::vector<Point> out;
  for (;;) {
    Point z(n);
    double r2 = 0;
    for (int i = 0; i < n; ++i) {
      z[i] = {pitch * idx[2 * i], pitch * idx[2 * i + 1]};
      r2 += std::norm(z[i]);
    }
    if (r2 <= radius * radius * (1 + 1e-12)) out.push_back(z);
    int a = axes - 1;
    for (; a >= 0; --a) {
      if (++idx[a] <= k) break;
      idx[a] = -k;
    }
    if (a < 0) break;
  }
  return out;
}

HeatKernelFit fit_heat_kernel(const FockParams& params, int N, const NodeLayout& layout, const FitConfig& cfg) {
  if (N < 1) throw Error("fit_heat_kernel: N must be >= 1");
  const int n = params.n;
  const double t = params.t;
  HeatKernelFit fit;
  fit.N = N;
  fit.t = t;
  fit.nodes = (N == 1 && default_layout(layout)) ? std::vector<Point>{Point(n, 0.0)} : lattice_nodes(n, t, N, layout);
  if (fit.nodes.empty()) throw Error("fit_heat_kernel: node layout is empty");

  const double window = cfg.window > 0 ? cfg.window : 8 * std::sqrt(t);
  GaussGrid grid = lebesgue_grid(window, cfg.m, n);
  const auto P = static_cast<Eigen::Index>(grid.size());
  const auto J = static_cast<Eigen::Index>(fit.nodes.size());

  Eigen::MatrixXd phi(P, J);
  Eigen::VectorXd y(P), w(P);
  for (Eigen::Index p = 0; p < P; ++p) {
    auto z = grid.node(static_cast<std::size_t>(p));
    double r2 = 0;
    for (const auto& c : z) r2 += std::norm(c);
    y(p) = heat(t / N, r2, n);
    w(p) = grid.weight(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < J; ++j) {
      double d2 = 0;
      for (int i = 0; i < n; ++i) d2 += std::norm(z[i] - fit.nodes[static_cast<std::size_t>(j)][i]);
      phi(p, j) = heat(t, d2, n);
    }
  }

  double ridge = cfg.ridge;
  // Weighted ridge solve plus one iterated-Tikhonov correction, which
  // removes the first-order regularization bias.
  auto solve = [&](const Eigen::VectorXd& ww) -> Eigen::VectorXd {
    Eigen::MatrixXd wphi = ww.asDiagonal() * phi;
    Eigen::MatrixXd g = phi.transpose() * wphi;
    Eigen::VectorXd b = wphi.transpose() * y;
    for (int attempt = 0; attempt < 6; ++attempt) {
      double lambda = ridge * g.trace() / static_cast<double>(J);
      Eigen::MatrixXd reg = g;
      reg.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(reg);
      if (llt.info() == Eigen::Success) {
        Eigen::VectorXd c = llt.solve(b);
        c += llt.solve(b - g * c);
        if (c.allFinite()) return c;
      }
      ridge *= 100;
      fit.flags.push_back("ill-conditioned normal equations; ridge raised to " + std::to_string(ridge));
    }
    throw Error("fit_heat_kernel: normal equations could not be solved");
  };
  auto l1 = [&](const Eigen::VectorXd& c, Eigen::VectorXd& r) {
    r = y - phi * c;
    return w.dot(r.cwiseAbs());
  };

  Eigen::VectorXd r;
  Eigen::VectorXd best = solve(w);
  double best_l1 = l1(best, r);
  fit.method = "ridge-ls";
  Eigen::VectorXd c = best;
  for (int pass = 1; pass <= cfg.irls_passes && J > 1; ++pass) {
    double floor = 1e-6 * r.cwiseAbs().maxCoeff();
    if (floor == 0) break;
    Eigen::VectorXd ww = w.array() / r.cwiseAbs().array().max(floor);
    c = solve(ww);
    double v = l1(c, r);
    if (v < best_l1) {
      best_l1 = v;
      best = c;
      fit.method = "irls-" + std::to_string(pass);
    }
  }
  if (cfg.normalize_mass && best.sum() != 0) best /= best.sum();
  fit.coefficients.assign(best.data(), best.data() + best.size());
  // The candidates were chosen on the fit grid; report on a finer one.
  fit.l1_residual = fit_l1_residual(fit, n, window, cfg.m + cfg.m / 2 + 1);
  fit.ridge_used = ridge;
  return fit;
}

double fit_l1_residual(const HeatKernelFit& fit, int n, double window, int m) {
  GaussGrid grid = lebesgue_grid(window, m, n);
  return integrate(grid, [&](std::span<const cplx> z) {
           double r2 = 0;
           for (const auto& c : z) r2 += std::norm(c);
           double v = heat(fit.t / fit.N, r2, n);
           for (std::size_t j = 0; j < fit.nodes.size(); ++j) {
             double d2 = 0;
             for (int i = 0; i < n; ++i) d2 += std::norm(z[i] - fit.nodes[j][i]);
             v -= fit.coefficients[j] * heat(fit.t, d2, n);
           }
           return cplx(std::abs(v));
         })
      .real();
}

Symbol build_symbol_from_berezin(const FockOperator& a, const HeatKernelFit& fit, const SymbolBuildOptions& opts,
                                 Diagnostics* diag) {
  const FockParams& params = a.params;
  if (fit.nodes.size() != fit.coefficients.size()) throw Error("build_symbol_from_berezin: malformed fit");
  const double st = std::sqrt(params.t);
  const double h = opts.spacing * st;
  double node_extent = 0;
  std::size_t untrusted = 0;
  for (const auto& z : fit.nodes) {
    for (const auto& c : z) node_extent = std::max({node_extent, std::abs(c.real()), std::abs(c.imag())});
    if (!params.trusted(z)) ++untrusted;
  }
  double hw = opts.half_width;
  if (hw <= 0) {
    GaussRule gh = gauss_hermite(params.Q);
    hw = st * gh.nodes.back() + node_extent + 2 * h;
  }
  WindowOptions wo;
  wo.half_width = hw;
  wo.points = static_cast<int>(std::ceil(2 * hw / h)) + 1;
  wo.order = opts.order;
  Symbol b = berezin(a, wo);
  if (untrusted)
    raise_flag(diag, std::to_string(untrusted) + " fit nodes lie outside the trusted window");
  Box box = Box::cube(params.n, hw);
  std::vector<Symbol> terms;
  for (std::size_t j = 0; j < fit.nodes.size(); ++j) {
    if (!box.contains(fit.nodes[j])) raise_flag(diag, "fit node " + format_point(fit.nodes[j]) + " outside Berezin grid");
    terms.push_back(b.translate(fit.nodes[j]).scale(fit.coefficients[j]));
  }
  return Symbol::sum(std::move(terms));
}

double measured_young_constant(const FockOperator& a, const ConvolutionConfig& cfg) {
  const FockParams& params = a.params;
  const int n = params.n;
  const double t = params.t;
  const double anorm = operator_norm_2(a);
  if (anorm == 0) return 1.0;
  Point shift(n, cplx(0.5, 0.5));
  std::vector<std::pair<Symbol, double>> battery = {
      {Symbol::heat_kernel(n, t), 6.5 * std::sqrt(t)},
      {Symbol::heat_kernel(n, t / 2), 6.5 * std::sqrt(t)},
      {Symbol::heat_kernel(n, t).translate(shift), 6.5 * std::sqrt(t) + 0.5},
      {Symbol::heat_kernel(n, t / 2) + Symbol::heat_kernel(n, t).scale(-1.0), 6.5 * std::sqrt(t)},
  };
  double c = 1.0;
  for (auto& [f, half] : battery) {
    ConvolutionConfig local = cfg;
    local.box = Box::cube(n, half);
    local.m = 40;
    double l1 = l1_norm(f, params, local);
    if (l1 == 0) continue;
    c = std::max(c, operator_norm_2(conv_fun_op(f, a, local)) / (l1 * anorm));
  }
  return c;
}

namespace {

FockOperator heat_smoothed(const FockOperator& a, double s, double box, int m) {
  ConvolutionConfig cfg;
  cfg.box = Box::cube(a.params.n, box * std::sqrt(s));
  cfg.m = m > 0 ? m : std::max(40, 2 * a.params.D);
  return conv_fun_op(Symbol::heat_kernel(a.params.n, s), a, cfg);
}

}  // namespace

ApproximationReport toeplitz_approximation(const FockOperator& a, const std::vector<int>& stages,
                                           const ApproxConfig& cfg, const std::string& target) {
  const FockParams& params = a.params;
  params.validate();
  ApproximationReport rep;
  rep.target = target;
  rep.params = params;
  rep.target_norm = operator_norm_2(a);
  rep.young_constant = measured_young_constant(a, cfg.conv);
  for (int N : stages) {
    ApproximationStage st;
    st.N = N;
    st.fit = fit_heat_kernel(params, N, cfg.layout, cfg.fit);
    Diagnostics diag;
    auto t0 = std::chrono::steady_clock::now();
    Symbol g = build_symbol_from_berezin(a, st.fit, cfg.symbol, &diag);
    st.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    FockOperator tg = toeplitz(params, g);
    FockOperator e = a - tg;
    st.op_error = trusted_norm(e);
    st.op_error_full = operator_norm_2(e);
    FockOperator base = a - heat_smoothed(a, params.t / N, cfg.baseline_box, cfg.baseline_m);
    st.baseline_error = trusted_norm(base);
    st.baseline_error_full = operator_norm_2(base);
    st.bound = st.baseline_error + rep.young_constant * rep.target_norm * st.fit.l1_residual;
    st.flags = diag.flags;
    st.flags.insert(st.flags.end(), st.fit.flags.begin(), st.fit.flags.end());
    rep.stages.push_back(std::move(st));
  }
  return rep;
}

std::vector<ApproxIdentityPoint> approximate_identity_sweep(const FockOperator& a, const std::vector<double>& s_list,
                                                            double box, int m) {
  std::vector<ApproxIdentityPoint> out;
  for (double s : s_list) {
    if (!(s > 0)) throw Error("approximate_identity_sweep: s must be positive");
    FockOperator e = heat_smoothed(a, s, box, m) - a;
    out.push_back({s, operator_norm_2(e), trusted_norm(e)});
  }
  return out;
}

}  // namespace qha
