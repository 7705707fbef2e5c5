#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qha/quadrature.hpp"
#include "qha/types.hpp"

namespace qha {

// Samples on a uniform tensor grid over the cube center + [-hw, hw]^{2n},
// last real axis fastest. Evaluation uses local Lagrange interpolation of
// the given order per axis and returns NaN outside the cube.
struct GridFunction {
  int n = 1;
  Point center;
  double half_width = 1;
  int points = 2;  // per real axis
  int order = 8;
  std::vector<cplx> values;

  double spacing() const { return 2 * half_width / (points - 1); }
  // Coordinate of sample k along real axis `axis`.
  double coordinate(int axis, int k) const;
  std::size_t size() const;
  Point node(std::size_t flat) const;
  Box box() const { return Box::cube(n, half_width, center); }
  cplx operator()(std::span<const cplx> w) const;
};

class Symbol {
 public:
  enum class Kind { constant, gaussian, plane_wave, polynomial, radial, custom, grid, translate, parity, scale, sum, product };

  struct Monomial {
    cplx coef;
    MultiIndex p;  // powers of w
    MultiIndex q;  // powers of conj(w)
  };

  using Fn = std::function<cplx(std::span<const cplx>)>;

  struct Node;

  static Symbol constant(int n, cplx c);
  // amplitude * exp(-|w - center|^2 / width)
  static Symbol gaussian(const Point& center, double width, cplx amplitude = 1.0);
  // f_s(w) = (pi s)^{-n} exp(-|w|^2 / s)
  static Symbol heat_kernel(int n, double s);
  // exp(i Im(w . conj(zeta)))
  static Symbol plane_wave(const Point& zeta);
  static Symbol polynomial(int n, std::vector<Monomial> terms);
  // Linear interpolation of values against |w| at ascending radii; the
  // last value continues beyond the table.
  static Symbol radial(int n, std::vector<double> radii, std::vector<cplx> values);
  static Symbol custom(int n, std::string name, Fn fn, std::optional<Box> support = std::nullopt);
  static Symbol grid(GridFunction g, std::string name = "grid");
  static Symbol sum(std::vector<Symbol> terms);
  static Symbol product(std::vector<Symbol> factors);

  // w -> f(w - z0)
  Symbol translate(const Point& z0) const;
  // w -> f(-w)
  Symbol parity() const;
  Symbol scale(cplx factor) const;

  cplx operator()(std::span<const cplx> w) const;
  cplx operator()(const Point& w) const { return (*this)(std::span<const cplx>(w)); }

  int n() const;
  Kind kind() const;
  std::string describe() const;
  // Box outside which the symbol is zero or undefined; nullopt when the
  // symbol has unbounded support.
  std::optional<Box> support() const;
  const GridFunction* as_grid() const;

 private:
  explicit Symbol(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Symbol operator+(const Symbol& a, const Symbol& b);
Symbol operator*(const Symbol& a, const Symbol& b);

// Samples f on the uniform grid described by the other arguments.
GridFunction sample(const Symbol& f, const Point& center, double half_width, int points, int order = 8);

// Column layout: Re/Im per coordinate, then Re/Im of the value.
void write_symbol_csv(std::ostream& os, const GridFunction& g, const std::string& header = "");

}  // namespace qha
