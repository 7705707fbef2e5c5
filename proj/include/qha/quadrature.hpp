#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qha/fock.hpp"

namespace qha {

// One-dimensional Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Weight e^{-x^2} on the real line.
GaussRule gauss_hermite(int order);
// Weight 1 on [-1, 1].
GaussRule gauss_legendre(int order);

// Axis-aligned box in R^{2n}, axes ordered (Re z1, Im z1, Re z2, ...).
struct Box {
  std::vector<double> lo, hi;

  static Box cube(int n, double half_width, const Point& center = {});
  int real_dim() const { return static_cast<int>(lo.size()); }
  bool empty() const;
  double volume() const;
  bool contains(const Point& z) const;
};

Box intersect(const Box& a, const Box& b);

enum class MeasureKind { gaussian, lebesgue };

struct MeasureTag {
  MeasureKind kind = MeasureKind::gaussian;
  double t = 0;       // gaussian
  int order = 0;      // points per real axis
  Box box;            // lebesgue
  Point center;       // gaussian, shifted grids
  std::string describe() const;
};

class GaussGrid {
 public:
  GaussGrid(int n, std::vector<cplx> nodes, std::vector<double> weights, MeasureTag tag);

  int n() const { return n_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const cplx> node(std::size_t i) const {
    return {nodes_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  Point point(std::size_t i) const;
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  const MeasureTag& measure() const { return tag_; }

 private:
  int n_;
  std::vector<cplx> nodes_;  // size() * n, row per node
  std::vector<double> weights_;
  MeasureTag tag_;
};

// Tensor Gauss-Hermite grid of order params.Q per real axis for mu_t.
GaussGrid gaussian_grid(const FockParams& params);
// Same for mu_t shifted to be centred at `center` (empty means origin).
GaussGrid gaussian_grid(int n, double t, int order, const Point& center = {});
// Tensor Gauss-Legendre grid on [-W, W]^{2n}.
GaussGrid lebesgue_grid(double window, int m, int n);
GaussGrid lebesgue_grid(const Box& box, int m);

double default_window(const FockParams& params);

using PointFunction = std::function<cplx(std::span<const cplx>)>;

// sum_i w_i f(node_i), deterministic across thread counts. Throws Error
// naming the node if f is not finite there.
cplx integrate(const GaussGrid& grid, const PointFunction& f);

// Columns: index, then Re/Im per coordinate, then weight.
void write_grid_csv(std::ostream& os, const GaussGrid& grid);

}  // namespace qha
