#include "qha/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "qha/parallel.hpp"
#include "qha/weyl_toeplitz.hpp"

namespace qha {

double SweepRecord::quantity(const std::string& name) const {
  for (const auto& [k, v] : quantities)
    if (k == name) return v;
  throw Error("sweep record has no quantity " + name);
}

std::vector<SweepRecord> quantization_sweep(const Symbol& f, const Symbol& g, const std::vector<double>& t_list,
                                            const FockParams& base, int window_points) {
  std::vector<SweepRecord> out;
  const Symbol fg = f * g;
  for (double t : t_list) {
    FockParams p = base;
    p.t = t;
    p.validate();
    FockOperator tf = toeplitz(p, f), tg = toeplitz(p, g), tfg = toeplitz(p, fg);
    double op_gap = trusted_norm(tf * tg - tfg);

    WindowOptions wo;
    wo.half_width = std::sqrt(p.trusted_radius2() / (2.0 * p.n));
    wo.points = window_points;
    HeatTransformResult h = heat_transform(fg, t, wo);
    const GridFunction& hg = *h.symbol.as_grid();
    double sup_gap = 0;
    for (std::size_t i = 0; i < hg.size(); ++i) sup_gap = std::max(sup_gap, std::abs(fg(hg.node(i)) - hg.values[i]));

    SweepRecord r;
    r.parameter = t;
    r.quantities = {{"op_gap", op_gap}, {"sup_gap", sup_gap}};
    r.params = p;
    r.symbols = "f=" + f.describe() + "; g=" + g.describe();
    out.push_back(std::move(r));
  }
  return out;
}

CompactnessProfile compactness_diagnostic(const FockOperator& a, const std::vector<double>& radii,
                                          int angular_samples, Diagnostics* diag) {
  const FockParams& p = a.params;
  CompactnessProfile prof;
  prof.radii = radii;
  Basis basis(p);
  CVector c(static_cast<Eigen::Index>(basis.size()));
  for (double r : radii) {
    if (r * r > p.trusted_radius2() * (1 + 1e-12))
      raise_flag(diag, "compactness_diagnostic: radius " + std::to_string(r) + " outside trusted window");
    double best = 0;
    for (int k = 0; k < angular_samples; ++k) {
      Point z(p.n, 0.0);
      z[0] = std::polar(r, 2 * M_PI * k / angular_samples);
      kernel_coefficients_into(basis, z, c.data());
      best = std::max(best, std::abs(c.dot(a.m * c)));
    }
    prof.max_abs.push_back(best);
  }
  prof.singular_values = singular_values(a.m);
  return prof;
}

InvarianceResult invariance_check(const FockParams& params, const Symbol& f, const std::vector<Point>& directions,
                                  const std::vector<double>& magnitudes) {
  FockOperator tf = toeplitz(params, f);
  InvarianceResult res;
  for (const auto& d : directions)
    for (double lam : magnitudes) {
      Point w = scaled(d, lam);
      double r = trusted_norm(alpha_op(tf, w) - tf);
      res.shifts.push_back(w);
      res.residuals.push_back(r);
      res.max_residual = std::max(res.max_residual, r);
    }
  return res;
}

Symbol horizontal_symbol(int n, double width) {
  return Symbol::custom(n, "horizontal(exp(-(Re w1)^2/" + std::to_string(width) + "))",
                        [width](std::span<const cplx> w) {
                          double x = w[0].real();
                          return cplx(std::exp(-x * x / width));
                        });
}

ApproximationReport ccr_weyl_approximation(const Point& z0, const FockParams& params, const std::vector<int>& stages,
                                           const ApproxConfig& cfg) {
  Diagnostics diag;
  FockOperator w = weyl(params, z0, &diag);
  ApproximationReport rep = toeplitz_approximation(w, stages, cfg, "weyl" + format_point(z0));
  if (!diag.clean())
    for (auto& st : rep.stages) st.flags.insert(st.flags.begin(), diag.flags.begin(), diag.flags.end());
  return rep;
}

bool monotone_within(const std::vector<double>& v, double slack) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > (1 + slack) * v[i - 1]) return false;
  return true;
}

}  // namespace qha
