#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qha/symbol.hpp"

using namespace qha;

TEST_SUITE("symbol") {

TEST_CASE("atoms") {
  const Point w{cplx(0.7, -0.3)};
  CHECK(Symbol::constant(1, cplx(2, 1))(w) == cplx(2, 1));
  CHECK(std::abs(Symbol::gaussian(Point{cplx(0.5, 0)}, 2.0, 3.0)(w) - 3 * std::exp(-(0.04 + 0.09) / 2)) < 1e-15);
  CHECK(std::abs(Symbol::heat_kernel(1, 0.5)(w) - oracle::heat_kernel(0.5, 0.58, 1)) < 1e-15);
  const Point zeta{cplx(1, 2)};
  cplx pw = Symbol::plane_wave(zeta)(w);
  CHECK(std::abs(pw - std::exp(cplx(0, std::imag(w[0] * std::conj(zeta[0]))))) < 1e-15);
  Symbol poly = Symbol::polynomial(1, {{cplx(1), {1}, {1}}, {cplx(0, 2), {2}, {0}}});
  CHECK(std::abs(poly(w) - (std::norm(w[0]) + cplx(0, 2) * w[0] * w[0])) < 1e-15);
}

TEST_CASE("radial interpolation") {
  Symbol r = Symbol::radial(1, {0, 1, 2}, {1.0, 0.5, 0.0});
  CHECK(std::abs(r(Point{cplx(0, 0.5)}) - 0.75) < 1e-15);
  CHECK(std::abs(r(Point{cplx(3, 4)})) == 0);
}

TEST_CASE("combinators") {
  Symbol g = Symbol::gaussian(Point{cplx(0, 0)}, 1.0);
  const Point z0{cplx(1, 1)}, w{cplx(0.2, 0.9)};
  CHECK(std::abs(g.translate(z0)(w) - g(w - z0)) < 1e-15);
  CHECK(std::abs(Symbol::gaussian(z0, 1.0).parity()(w) - Symbol::gaussian(z0, 1.0)(-w)) < 1e-15);
  CHECK(std::abs((g + g)(w) - 2.0 * g(w)) < 1e-15);
  CHECK(std::abs((g * g)(w) - g(w) * g(w)) < 1e-15);
  CHECK(std::abs(g.scale(cplx(0, 3))(w) - cplx(0, 3) * g(w)) < 1e-15);
  CHECK(g.translate(z0).kind() == Symbol::Kind::translate);
  CHECK(!g.describe().empty());
}

TEST_CASE("support") {
  Box b = Box::cube(1, 1);
  Symbol c = Symbol::custom(1, "bump", [](auto w) { return cplx(std::max(0.0, 1 - std::norm(w[0]))); }, b);
  REQUIRE(c.support());
  CHECK(c.translate(Point{cplx(2, 0)}).support()->lo[0] == doctest::Approx(1));
  CHECK_FALSE(Symbol::gaussian(Point{0.0}, 1.0).support());
  CHECK((c * Symbol::gaussian(Point{0.0}, 1.0)).support());
}

TEST_CASE("grid interpolation") {
  Symbol g = Symbol::gaussian(Point{cplx(0.1, -0.2)}, 2.0);
  GridFunction s = sample(g, Point{0.0}, 3.0, 121);
  CHECK(s.size() == 121u * 121u);
  CHECK(s.spacing() == doctest::Approx(0.05));
  Symbol gs = Symbol::grid(s);
  REQUIRE(gs.as_grid());
  double err = 0;
  for (double x = -2.9; x <= 2.9; x += 0.137)
    for (double y = -2.9; y <= 2.9; y += 0.173) {
      Point w{cplx(x, y)};
      err = std::max(err, std::abs(gs(w) - g(w)));
    }
  CHECK(err < 1e-10);
  CHECK(std::isnan(gs(Point{cplx(3.5, 0)}).real()));
}

TEST_CASE("symbol csv") {
  std::ostringstream os;
  write_symbol_csv(os, sample(Symbol::constant(1, 1.0), Point{0.0}, 1.0, 3), "# h\n");
  std::string s = os.str();
  CHECK(s.rfind("# h\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 11);
}

}  // TEST_SUITE
