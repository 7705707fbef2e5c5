#include "qha/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qha/parallel.hpp"

namespace qha {

GaussRule gauss_hermite(int order) {
  if (order < 1) throw Error("gauss_hermite: order must be >= 1");
  const int n = order;
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  std::vector<double> x(n), w(n);
  double z = 0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      // orthonormal Hermite recurrence
      double p1 = pim4, p2 = 0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / (pp * pp);
  }
  if (n % 2) x[n / 2] = 0.0;
  GaussRule r;
  r.nodes.assign(x.rbegin(), x.rend());
  r.weights.assign(w.rbegin(), w.rend());
  return r;
}

GaussRule gauss_legendre(int order) {
  if (order < 1) throw Error("gauss_legendre: order must be >= 1");
  const int n = order;
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-16) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1 - z * z) * pp * pp);
  }
  if (n % 2) r.nodes[n / 2] = 0.0;
  return r;
}

Box Box::cube(int n, double half_width, const Point& center) {
  Box b;
  for (int i = 0; i < n; ++i) {
    double cr = center.empty() ? 0.0 : center[i].real();
    double ci = center.empty() ? 0.0 : center[i].imag();
    b.lo.push_back(cr - half_width);
    b.hi.push_back(cr + half_width);
    b.lo.push_back(ci - half_width);
    b.hi.push_back(ci + half_width);
  }
  return b;
}

bool Box::empty() const {
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(hi[k] > lo[k])) return true;
  return lo.empty();
}

double Box::volume() const {
  if (empty()) return 0.0;
  double v = 1;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

bool Box::contains(const Point& z) const {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i].real() < lo[2 * i] || z[i].real() > hi[2 * i]) return false;
    if (z[i].imag() < lo[2 * i + 1] || z[i].imag() > hi[2 * i + 1]) return false;
  }
  return true;
}

Box intersect(const Box& a, const Box& b) {
  if (a.lo.size() != b.lo.size()) throw Error("intersect: box dimension mismatch");
  Box r = a;
  for (std::size_t k = 0; k < a.lo.size(); ++k) {
    r.lo[k] = std::max(a.lo[k], b.lo[k]);
    r.hi[k] = std::min(a.hi[k], b.hi[k]);
  }
  return r;
}

std::string MeasureTag::describe() const {
  char buf[160];
  if (kind == MeasureKind::gaussian) {
    std::snprintf(buf, sizeof buf, "gaussian(t=%.17g, order=%d)", t, order);
    std::string s = buf;
    if (!center.empty()) s += " centred at " + format_point(center);
    return s;
  }
  std::string s = "lebesgue(order=" + std::to_string(order) + ", box=";
  for (std::size_t k = 0; k < box.lo.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s[%.17g,%.17g]", k ? "x" : "", box.lo[k], box.hi[k]);
    s += buf;
  }
  return s + ")";
}

GaussGrid::GaussGrid(int n, std::vector<cplx> nodes, std::vector<double> weights, MeasureTag tag)
    : n_(n), nodes_(std::move(nodes)), weights_(std::move(weights)), tag_(std::move(tag)) {
  if (nodes_.size() != weights_.size() * static_cast<std::size_t>(n_))
    throw Error("GaussGrid: node/weight count mismatch");
}

Point GaussGrid::point(std::size_t i) const {
  auto s = node(i);
  return {s.begin(), s.end()};
}

namespace {

// Tensor product of per-axis rules over 2n real axes; axis 0 varies slowest.
GaussGrid tensor_grid(int n, const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& w,
                      MeasureTag tag) {
  const int axes = 2 * n;
  std::size_t total = 1;
  for (const auto& a : x) total *= a.size();
  std::vector<cplx> nodes(total * static_cast<std::size_t>(n));
  std::vector<double> weights(total);
  std::vector<std::size_t> idx(axes, 0);
  for (std::size_t p = 0; p < total; ++p) {
    double wt = 1;
    for (int k = 0; k < axes; ++k) wt *= w[k][idx[k]];
    weights[p] = wt;
    for (int i = 0; i < n; ++i) nodes[p * n + i] = {x[2 * i][idx[2 * i]], x[2 * i + 1][idx[2 * i + 1]]};
    for (int k = axes - 1; k >= 0; --k) {
      if (++idx[k] < x[k].size()) break;
      idx[k] = 0;
    }
  }
  return GaussGrid(n, std::move(nodes), std::move(weights), std::move(tag));
}

}  // namespace

GaussGrid gaussian_grid(int n, double t, int order, const Point& center) {
  if (n < 1 || !(t > 0) || order < 1) throw Error("gaussian_grid: invalid n, t or order");
  if (!center.empty() && static_cast<int>(center.size()) != n) throw Error("gaussian_grid: centre dimension mismatch");
  GaussRule gh = gauss_hermite(order);
  const double st = std::sqrt(t), isp = 1.0 / std::sqrt(M_PI);
  std::vector<std::vector<double>> x(2 * n), w(2 * n);
  for (int k = 0; k < 2 * n; ++k) {
    double c = 0;
    if (!center.empty()) c = k % 2 ? center[k / 2].imag() : center[k / 2].real();
    for (int j = 0; j < order; ++j) {
      x[k].push_back(c + st * gh.nodes[j]);
      w[k].push_back(gh.weights[j] * isp);
    }
  }
  MeasureTag tag;
  tag.kind = MeasureKind::gaussian;
  tag.t = t;
  tag.order = order;
  tag.center = center;
  return tensor_grid(n, x, w, std::move(tag));
}

GaussGrid gaussian_grid(const FockParams& params) { return gaussian_grid(params.n, params.t, params.Q); }

GaussGrid lebesgue_grid(const Box& box, int m) {
  if (m < 2) throw Error("lebesgue_grid: m must be >= 2");
  if (box.empty() || box.real_dim() % 2) throw Error("lebesgue_grid: empty or malformed box");
  GaussRule gl = gauss_legendre(m);
  const int axes = box.real_dim();
  std::vector<std::vector<double>> x(axes), w(axes);
  for (int k = 0; k < axes; ++k) {
    double mid = 0.5 * (box.lo[k] + box.hi[k]), half = 0.5 * (box.hi[k] - box.lo[k]);
    for (int j = 0; j < m; ++j) {
      x[k].push_back(mid + half * gl.nodes[j]);
      w[k].push_back(half * gl.weights[j]);
    }
  }
  MeasureTag tag;
  tag.kind = MeasureKind::lebesgue;
  tag.order = m;
  tag.box = box;
  return tensor_grid(axes / 2, x, w, std::move(tag));
}

GaussGrid lebesgue_grid(double window, int m, int n) {
  if (!(window > 0)) throw Error("lebesgue_grid: window must be positive");
  return lebesgue_grid(Box::cube(n, window), m);
}

double default_window(const FockParams& params) {
  return std::sqrt(params.t * (params.D + 4)) + 3 * std::sqrt(params.t);
}

cplx integrate(const GaussGrid& grid, const PointFunction& f) {
  return parallel::chunked_reduce(
      grid.size(), cplx{0.0},
      [&](std::size_t b, std::size_t e, cplx& acc) {
        for (std::size_t i = b; i < e; ++i) {
          cplx v = f(grid.node(i));
          if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error("integrate: non-finite integrand at node " + std::to_string(i) + " " +
                        format_point(grid.point(i)));
          acc += grid.weight(i) * v;
        }
      },
      [](cplx a, cplx b) { return a + b; });
}

void write_grid_csv(std::ostream& os, const GaussGrid& grid) {
  os << "# measure: " << grid.measure().describe() << "\n";
  os << "index";
  for (int i = 1; i <= grid.n(); ++i) os << ",re_z" << i << ",im_z" << i;
  os << ",weight\n";
  char buf[64];
  for (std::size_t p = 0; p < grid.size(); ++p) {
    os << p;
    for (const auto& c : grid.node(p)) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", c.real(), c.imag());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g\n", grid.weight(p));
    os << buf;
  }
}

}  // namespace qha
