#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qha/quadrature.hpp"

using namespace qha;

TEST_SUITE("quadrature") {

TEST_CASE("hermite rule moments") {
  // int x^{2k} e^{-x^2} dx = Gamma(k + 1/2)
  GaussRule r = gauss_hermite(20);
  REQUIRE(r.nodes.size() == 20);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  for (int k = 0; k < 20; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
    CHECK(s == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("legendre rule moments") {
  GaussRule r = gauss_legendre(12);
  for (int k = 0; k < 12; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 2 * k);
    CHECK(s == doctest::Approx(2.0 / (2 * k + 1)).epsilon(1e-13));
  }
}

TEST_CASE("gaussian measure") {
  GaussGrid g = gaussian_grid(FockParams{1, 1.7, 10, 20});
  CHECK(g.size() == 400);
  CHECK(std::abs(integrate(g, [](auto) { return cplx(1); }) - 1.0) < 1e-14);
  CHECK(std::abs(integrate(g, [](auto z) { return cplx(std::norm(z[0])); }) - 1.7) < 1e-13);
  CHECK(std::abs(integrate(g, [](auto z) { return z[0]; })) < 1e-15);
  CHECK(std::abs(integrate(g, [](auto z) { return cplx(std::pow(std::norm(z[0]), 2)); }) - 2 * 1.7 * 1.7) < 1e-12);
  const cplx z0(0.4, -0.9);
  cplx repro = integrate(g, [&](auto w) { return std::exp(w[0] * std::conj(z0) / 1.7); });
  CHECK(std::abs(repro - 1.0) < 1e-12);
}

TEST_CASE("gaussian measure n=2") {
  GaussGrid g = gaussian_grid(2, 0.5, 8);
  CHECK(g.size() == 4096);
  cplx s = integrate(g, [](auto z) { return cplx(std::norm(z[0]) * std::norm(z[1])); });
  CHECK(std::abs(s - 0.25) < 1e-13);
}

TEST_CASE("shifted gaussian grid") {
  const Point c{cplx(1.5, -0.5)};
  GaussGrid g = gaussian_grid(1, 1, 30, c);
  cplx mean = integrate(g, [](auto z) { return z[0]; });
  CHECK(std::abs(mean - c[0]) < 1e-13);
}

TEST_CASE("lebesgue grid") {
  GaussGrid g = lebesgue_grid(2.5, 10, 1);
  CHECK(std::abs(integrate(g, [](auto) { return cplx(1); }) - 25.0) < 1e-12);
  CHECK(std::abs(integrate(g, [](auto z) { return cplx(std::pow(z[0].real(), 3) * z[0].imag()); })) < 1e-13);

  GaussGrid h = lebesgue_grid(7.0, 80, 1);
  cplx mass = integrate(h, [](auto z) { return cplx(oracle::heat_kernel(1, std::norm(z[0]), 1)); });
  CHECK(std::abs(mass - 1.0) < 1e-8);

  Box b{{-1, 0}, {2, 3}};
  GaussGrid bg = lebesgue_grid(b, 6);
  CHECK(std::abs(integrate(bg, [](auto) { return cplx(1); }) - 9.0) < 1e-13);
}

TEST_CASE("boxes") {
  Box a = Box::cube(1, 2);
  Box b{{1, -5}, {4, 1}};
  Box c = intersect(a, b);
  CHECK(c.lo == std::vector<double>{1, -2});
  CHECK(c.hi == std::vector<double>{2, 1});
  CHECK(c.volume() == doctest::Approx(3));
  CHECK(c.contains(Point{cplx(1.5, 0)}));
  CHECK_FALSE(c.contains(Point{cplx(0.5, 0)}));
  CHECK(intersect(a, Box{{3, 3}, {4, 4}}).empty());
}

TEST_CASE("non-finite integrand is reported") {
  GaussGrid g = gaussian_grid(1, 1, 4);
  CHECK_THROWS_AS(integrate(g, [](auto) { return cplx(std::numeric_limits<double>::quiet_NaN()); }), Error);
}

TEST_CASE("grid csv") {
  std::ostringstream os;
  write_grid_csv(os, gaussian_grid(1, 1, 2));
  std::string s = os.str();
  CHECK(s.rfind("# measure", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}

}  // TEST_SUITE
