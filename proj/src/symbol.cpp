#include "qha/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "qha/parallel.hpp"

namespace qha {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(cplx v) {
  if (v.imag() == 0) return num(v.real());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", v.real(), v.imag());
  return buf;
}

void require_dim(const Point& z, int n, const char* what) {
  if (static_cast<int>(z.size()) != n) throw Error(std::string(what) + ": point dimension mismatch");
}

}  // namespace

double GridFunction::coordinate(int axis, int k) const {
  double c = axis % 2 ? center[axis / 2].imag() : center[axis / 2].real();
  return c - half_width + k * spacing();
}

std::size_t GridFunction::size() const {
  std::size_t s = 1;
  for (int k = 0; k < 2 * n; ++k) s *= static_cast<std::size_t>(points);
  return s;
}

Point GridFunction::node(std::size_t flat) const {
  std::vector<int> idx(2 * n);
  for (int k = 2 * n - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % points);
    flat /= points;
  }
  Point z(n);
  for (int i = 0; i < n; ++i) z[i] = {coordinate(2 * i, idx[2 * i]), coordinate(2 * i + 1, idx[2 * i + 1])};
  return z;
}

cplx GridFunction::operator()(std::span<const cplx> w) const {
  const int axes = 2 * n;
  const int p = std::min(order, points);
  const double h = spacing();
  std::vector<int> base(axes);
  std::vector<double> lw(static_cast<std::size_t>(axes * p));
  for (int k = 0; k < axes; ++k) {
    double x = k % 2 ? w[k / 2].imag() : w[k / 2].real();
    double u = (x - coordinate(k, 0)) / h;
    if (!(u >= -1e-9 && u <= points - 1 + 1e-9)) return {std::nan(""), std::nan("")};
    int b = static_cast<int>(std::floor(u)) - p / 2 + 1;
    b = std::clamp(b, 0, points - p);
    base[k] = b;
    double s = u - b;
    for (int j = 0; j < p; ++j) {
      double l = 1;
      for (int m = 0; m < p; ++m)
        if (m != j) l *= (s - m) / static_cast<double>(j - m);
      lw[k * p + j] = l;
    }
  }
  // tensor sum over p^axes stencil points, last axis fastest
  std::vector<int> off(axes, 0);
  cplx acc = 0;
  for (;;) {
    std::size_t flat = 0;
    double wt = 1;
    for (int k = 0; k < axes; ++k) {
      flat = flat * points + static_cast<std::size_t>(base[k] + off[k]);
      wt *= lw[k * p + off[k]];
    }
    acc += wt * values[flat];
    int k = axes - 1;
    for (; k >= 0; --k) {
      if (++off[k] < p) break;
      off[k] = 0;
    }
    if (k < 0) break;
  }
  return acc;
}

struct Symbol::Node {
  virtual ~Node() = default;
  virtual cplx eval(std::span<const cplx> w) const = 0;
  virtual Kind kind() const = 0;
  virtual std::string describe() const = 0;
  virtual std::optional<Box> support() const { return std::nullopt; }
  int n = 1;
};

namespace {

using Node = Symbol::Node;
using Kind = Symbol::Kind;

struct ConstantNode : Node {
  cplx c;
  cplx eval(std::span<const cplx>) const override { return c; }
  Kind kind() const override { return Kind::constant; }
  std::string describe() const override { return "constant(" + num(c) + ")"; }
};

struct GaussianNode : Node {
  Point center;
  double width;
  cplx amp;
  cplx eval(std::span<const cplx> w) const override {
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += std::norm(w[i] - center[i]);
    return amp * std::exp(-r2 / width);
  }
  Kind kind() const override { return Kind::gaussian; }
  std::string describe() const override {
    return "gaussian(center=" + format_point(center) + ", width=" + num(width) + ", amplitude=" + num(amp) + ")";
  }
};

struct PlaneWaveNode : Node {
  Point zeta;
  cplx eval(std::span<const cplx> w) const override {
    cplx dot = 0;
    for (int i = 0; i < n; ++i) dot += w[i] * std::conj(zeta[i]);
    return std::polar(1.0, dot.imag());
  }
  Kind kind() const override { return Kind::plane_wave; }
  std::string describe() const override { return "plane_wave(zeta=" + format_point(zeta) + ")"; }
};

struct PolynomialNode : Node {
  std::vector<Symbol::Monomial> terms;
  cplx eval(std::span<const cplx> w) const override {
    cplx acc = 0;
    for (const auto& m : terms) {
      cplx v = m.coef;
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m.p[i]; ++k) v *= w[i];
        for (int k = 0; k < m.q[i]; ++k) v *= std::conj(w[i]);
      }
      acc += v;
    }
    return acc;
  }
  Kind kind() const override { return Kind::polynomial; }
  std::string describe() const override { return "polynomial(" + std::to_string(terms.size()) + " terms)"; }
};

struct RadialNode : Node {
  std::vector<double> radii;
  std::vector<cplx> values;
  cplx eval(std::span<const cplx> w) const override {
    double r2 = 0;
    for (int i = 0; i < n; ++i) r2 += std::norm(w[i]);
    double r = std::sqrt(r2);
    if (r <= radii.front()) return values.front();
    if (r >= radii.back()) return values.back();
    auto it = std::upper_bound(radii.begin(), radii.end(), r);
    std::size_t k = static_cast<std::size_t>(it - radii.begin());
    double s = (r - radii[k - 1]) / (radii[k] - radii[k - 1]);
    return (1 - s) * values[k - 1] + s * values[k];
  }
  Kind kind() const override { return Kind::radial; }
  std::string describe() const override { return "radial(" + std::to_string(radii.size()) + " samples)"; }
};

struct CustomNode : Node {
  std::string name;
  Symbol::Fn fn;
  std::optional<Box> box;
  cplx eval(std::span<const cplx> w) const override { return fn(w); }
  Kind kind() const override { return Kind::custom; }
  std::string describe() const override { return name; }
  std::optional<Box> support() const override { return box; }
};

struct GridNode : Node {
  GridFunction g;
  std::string name;
  cplx eval(std::span<const cplx> w) const override { return g(w); }
  Kind kind() const override { return Kind::grid; }
  std::string describe() const override {
    return name + "(points=" + std::to_string(g.points) + ", half_width=" + num(g.half_width) + ")";
  }
  std::optional<Box> support() const override { return g.box(); }
};

struct TranslateNode : Node {
  std::shared_ptr<const Node> inner;
  Point z0;
  cplx eval(std::span<const cplx> w) const override {
    cplx buf[8];
    std::vector<cplx> heap;
    cplx* p = buf;
    if (n > 8) {
      heap.resize(n);
      p = heap.data();
    }
    for (int i = 0; i < n; ++i) p[i] = w[i] - z0[i];
    return inner->eval({p, static_cast<std::size_t>(n)});
  }
  Kind kind() const override { return Kind::translate; }
  std::string describe() const override { return "translate(" + inner->describe() + ", " + format_point(z0) + ")"; }
  std::optional<Box> support() const override {
    auto b = inner->support();
    if (!b) return b;
    for (int i = 0; i < n; ++i) {
      b->lo[2 * i] += z0[i].real();
      b->hi[2 * i] += z0[i].real();
      b->lo[2 * i + 1] += z0[i].imag();
      b->hi[2 * i + 1] += z0[i].imag();
    }
    return b;
  }
};

struct ParityNode : Node {
  std::shared_ptr<const Node> inner;
  cplx eval(std::span<const cplx> w) const override {
    std::vector<cplx> m(w.begin(), w.end());
    for (auto& c : m) c = -c;
    return inner->eval(m);
  }
  Kind kind() const override { return Kind::parity; }
  std::string describe() const override { return "parity(" + inner->describe() + ")"; }
  std::optional<Box> support() const override {
    auto b = inner->support();
    if (!b) return b;
    Box r = *b;
    for (std::size_t k = 0; k < r.lo.size(); ++k) {
      r.lo[k] = -b->hi[k];
      r.hi[k] = -b->lo[k];
    }
    return r;
  }
};

struct ScaleNode : Node {
  std::shared_ptr<const Node> inner;
  cplx factor;
  cplx eval(std::span<const cplx> w) const override { return factor * inner->eval(w); }
  Kind kind() const override { return Kind::scale; }
  std::string describe() const override { return num(factor) + " * " + inner->describe(); }
  std::optional<Box> support() const override { return inner->support(); }
};

struct SumNode : Node {
  std::vector<std::shared_ptr<const Node>> terms;
  cplx eval(std::span<const cplx> w) const override {
    cplx acc = 0;
    for (const auto& t : terms) acc += t->eval(w);
    return acc;
  }
  Kind kind() const override { return Kind::sum; }
  std::string describe() const override {
    if (terms.size() > 4) return "sum of " + std::to_string(terms.size()) + " terms";
    std::string s = "sum(";
    for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? ", " : "") + terms[i]->describe();
    return s + ")";
  }
  // bounding box of the union
  std::optional<Box> support() const override {
    std::optional<Box> acc;
    for (const auto& t : terms) {
      auto b = t->support();
      if (!b) return std::nullopt;
      if (!acc) {
        acc = b;
        continue;
      }
      for (std::size_t k = 0; k < b->lo.size(); ++k) {
        acc->lo[k] = std::min(acc->lo[k], b->lo[k]);
        acc->hi[k] = std::max(acc->hi[k], b->hi[k]);
      }
    }
    return acc;
  }
};

struct ProductNode : Node {
  std::vector<std::shared_ptr<const Node>> factors;
  cplx eval(std::span<const cplx> w) const override {
    cplx acc = 1;
    for (const auto& f : factors) acc *= f->eval(w);
    return acc;
  }
  Kind kind() const override { return Kind::product; }
  std::string describe() const override {
    std::string s = "product(";
    for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? ", " : "") + factors[i]->describe();
    return s + ")";
  }
  std::optional<Box> support() const override {
    std::optional<Box> acc;
    for (const auto& f : factors) {
      auto b = f->support();
      if (!b) continue;
      acc = acc ? intersect(*acc, *b) : *b;
    }
    return acc;
  }
};

template <class T>
std::shared_ptr<T> make_node(int n) {
  auto p = std::make_shared<T>();
  p->n = n;
  return p;
}

}  // namespace

Symbol Symbol::constant(int n, cplx c) {
  auto p = make_node<ConstantNode>(n);
  p->c = c;
  return Symbol(p);
}

Symbol Symbol::gaussian(const Point& center, double width, cplx amplitude) {
  if (!(width > 0)) throw Error("gaussian symbol: width must be positive");
  auto p = make_node<GaussianNode>(static_cast<int>(center.size()));
  p->center = center;
  p->width = width;
  p->amp = amplitude;
  return Symbol(p);
}

Symbol Symbol::heat_kernel(int n, double s) {
  return gaussian(Point(n, 0.0), s, std::pow(M_PI * s, -n));
}

Symbol Symbol::plane_wave(const Point& zeta) {
  auto p = make_node<PlaneWaveNode>(static_cast<int>(zeta.size()));
  p->zeta = zeta;
  return Symbol(p);
}

Symbol Symbol::polynomial(int n, std::vector<Monomial> terms) {
  for (const auto& m : terms)
    if (static_cast<int>(m.p.size()) != n || static_cast<int>(m.q.size()) != n)
      throw Error("polynomial symbol: power vector length must equal n");
  auto p = make_node<PolynomialNode>(n);
  p->terms = std::move(terms);
  return Symbol(p);
}

Symbol Symbol::radial(int n, std::vector<double> radii, std::vector<cplx> values) {
  if (radii.empty() || radii.size() != values.size()) throw Error("radial symbol: table sizes differ or are empty");
  if (!std::is_sorted(radii.begin(), radii.end())) throw Error("radial symbol: radii must ascend");
  auto p = make_node<RadialNode>(n);
  p->radii = std::move(radii);
  p->values = std::move(values);
  return Symbol(p);
}

Symbol Symbol::custom(int n, std::string name, Fn fn, std::optional<Box> support) {
  auto p = make_node<CustomNode>(n);
  p->name = std::move(name);
  p->fn = std::move(fn);
  p->box = std::move(support);
  return Symbol(p);
}

Symbol Symbol::grid(GridFunction g, std::string name) {
  if (g.points < 2 || g.values.size() != g.size()) throw Error("grid symbol: sample table does not match grid shape");
  auto p = make_node<GridNode>(g.n);
  p->g = std::move(g);
  p->name = std::move(name);
  return Symbol(p);
}

Symbol Symbol::sum(std::vector<Symbol> terms) {
  if (terms.empty()) throw Error("sum symbol: no terms");
  auto p = make_node<SumNode>(terms.front().n());
  for (auto& t : terms) {
    if (t.n() != p->n) throw Error("sum symbol: dimension mismatch");
    p->terms.push_back(t.node_);
  }
  return Symbol(p);
}

Symbol Symbol::product(std::vector<Symbol> factors) {
  if (factors.empty()) throw Error("product symbol: no factors");
  auto p = make_node<ProductNode>(factors.front().n());
  for (auto& f : factors) {
    if (f.n() != p->n) throw Error("product symbol: dimension mismatch");
    p->factors.push_back(f.node_);
  }
  return Symbol(p);
}

Symbol Symbol::translate(const Point& z0) const {
  require_dim(z0, n(), "translate");
  auto p = make_node<TranslateNode>(n());
  p->inner = node_;
  p->z0 = z0;
  return Symbol(p);
}

Symbol Symbol::parity() const {
  auto p = make_node<ParityNode>(n());
  p->inner = node_;
  return Symbol(p);
}

Symbol Symbol::scale(cplx factor) const {
  auto p = make_node<ScaleNode>(n());
  p->inner = node_;
  p->factor = factor;
  return Symbol(p);
}

cplx Symbol::operator()(std::span<const cplx> w) const {
  if (static_cast<int>(w.size()) != node_->n) throw Error("symbol evaluation: point dimension mismatch");
  return node_->eval(w);
}

int Symbol::n() const { return node_->n; }
Symbol::Kind Symbol::kind() const { return node_->kind(); }
std::string Symbol::describe() const { return node_->describe(); }
std::optional<Box> Symbol::support() const { return node_->support(); }

const GridFunction* Symbol::as_grid() const {
  auto g = dynamic_cast<const GridNode*>(node_.get());
  return g ? &g->g : nullptr;
}

Symbol operator+(const Symbol& a, const Symbol& b) { return Symbol::sum({a, b}); }
Symbol operator*(const Symbol& a, const Symbol& b) { return Symbol::product({a, b}); }

GridFunction sample(const Symbol& f, const Point& center, double half_width, int points, int order) {
  if (points < 2 || !(half_width > 0)) throw Error("sample: need points >= 2 and positive half width");
  GridFunction g;
  g.n = f.n();
  g.center = center.empty() ? Point(f.n(), 0.0) : center;
  require_dim(g.center, f.n(), "sample");
  g.half_width = half_width;
  g.points = points;
  g.order = order;
  g.values.resize(g.size());
  parallel::for_each_index(g.size(), [&](std::size_t i) {
    Point z = g.node(i);
    g.values[i] = f(z);
  });
  return g;
}

void write_symbol_csv(std::ostream& os, const GridFunction& g, const std::string& header) {
  os << header;
  for (int i = 1; i <= g.n; ++i) os << (i > 1 ? "," : "") << "re_z" << i << ",im_z" << i;
  os << ",re_value,im_value\n";
  char buf[64];
  for (std::size_t p = 0; p < g.size(); ++p) {
    Point z = g.node(p);
    for (int i = 0; i < g.n; ++i) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", i ? "," : "", z[i].real(), z[i].imag());
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", g.values[p].real(), g.values[p].imag());
    os << buf;
  }
}

}  // namespace qha
