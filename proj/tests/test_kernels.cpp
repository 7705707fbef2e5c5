#include <cstdlib>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "qha/fock.hpp"
#include "qha/kernels.hpp"
#include "qha/parallel.hpp"
#include "qha/weyl_toeplitz.hpp"

using namespace qha;
namespace k = qha::kernels;

namespace {

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  if (n > 3) {
    v[1] = {-0.0, 0.0};
    v[2] = {1e150, -1e-300};
  }
  return v;
}

bool same_bits(cplx a, cplx b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::force_isa(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("environment pin") {
  const char* pin = std::getenv("QHA_FORCE_SCALAR");
  if (pin && std::string(pin) == "1") CHECK(k::active_isa() == k::Isa::scalar);
  else if (k::isa_supported(k::Isa::avx2)) CHECK(k::active_isa() == k::Isa::avx2);
}

TEST_CASE("scalar reference matches naive sums") {
  auto x = random_vector(37, 1), y = random_vector(37, 2);
  x[2] = y[2] = 1.0;
  cplx naive = 0;
  for (std::size_t i = 0; i < x.size(); ++i) naive += std::conj(x[i]) * y[i];
  CHECK(std::abs(k::scalar::cdotc(x.size(), x.data(), y.data()) - naive) < 1e-12);
  naive = 0;
  for (std::size_t i = 0; i < x.size(); ++i) naive += x[i] * y[i];
  CHECK(std::abs(k::scalar::cdotu(x.size(), x.data(), y.data()) - naive) < 1e-12);
}

TEST_CASE("avx2 and scalar agree bit for bit") {
  if (!k::isa_supported(k::Isa::avx2)) {
    MESSAGE("AVX2 not available; equivalence not exercised");
    return;
  }
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 1001u}) {
    auto x = random_vector(n, 10 + n), y = random_vector(n, 20 + n);
    CHECK(same_bits(k::scalar::cdotu(n, x.data(), y.data()), k::avx2::cdotu(n, x.data(), y.data())));
    CHECK(same_bits(k::scalar::cdotc(n, x.data(), y.data()), k::avx2::cdotc(n, x.data(), y.data())));
    auto ys = y, yv = y;
    const cplx a(0.37, -1.25);
    k::scalar::caxpy(n, a, x.data(), ys.data());
    k::avx2::caxpy(n, a, x.data(), yv.data());
    CHECK(same_bits(ys, yv));
  }
}

TEST_CASE("signed zeros survive conjugation") {
  std::vector<cplx> x{{0.0, 0.0}}, y{{-0.0, 0.0}};
  cplx s = k::scalar::cdotc(1, x.data(), y.data());
  if (k::isa_supported(k::Isa::avx2)) CHECK(same_bits(s, k::avx2::cdotc(1, x.data(), y.data())));
}

TEST_CASE("dispatch switches variants") {
  IsaGuard guard;
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  CHECK(std::string(k::isa_name(k::Isa::scalar)) == "scalar");
  if (!k::isa_supported(k::Isa::avx2)) CHECK_THROWS(k::force_isa(k::Isa::avx2));
}

TEST_CASE("library results do not depend on the variant") {
  if (!k::isa_supported(k::Isa::avx2)) return;
  IsaGuard guard;
  FockParams p{1, 1, 20, 30};
  Symbol f = Symbol::gaussian(Point{cplx(0.5, 0.2)}, 3.0);
  FockOperator a = random_finite_rank(p, 2, 5);
  k::force_isa(k::Isa::scalar);
  CMatrix t0 = toeplitz(p, f).m;
  GridFunction b0 = berezin_grid(a);
  k::force_isa(k::Isa::avx2);
  CMatrix t1 = toeplitz(p, f).m;
  GridFunction b1 = berezin_grid(a);
  CHECK(std::memcmp(t0.data(), t1.data(), sizeof(cplx) * t0.size()) == 0);
  CHECK(same_bits(b0.values, b1.values));
}

TEST_CASE("rank one update") {
  const std::size_t n = 9;
  auto x = random_vector(n, 3), y = random_vector(n, 4);
  x[2] = y[2] = 0.5;
  std::vector<cplx> acc(n * n, 0.0);
  k::rank1_update(n, cplx(2, 1), x.data(), y.data(), acc.data());
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(acc[j * n + i] - cplx(2, 1) * x[i] * y[j]) < 1e-13);
}

}  // TEST_SUITE

TEST_SUITE("parallel") {

TEST_CASE("tree reduce order") {
  std::vector<std::string> parts{"a", "b", "c", "d", "e"};
  auto r = parallel::tree_reduce(parts, [](std::string x, std::string y) { return "(" + x + y + ")"; });
  CHECK(r == "(((ab)(cd))e)");
}

TEST_CASE("chunked reduce independent of thread count") {
  std::vector<double> v(10007);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(1.0 + i) * 1e-3 * (1 + i % 17);
  auto run = [&] {
    return parallel::chunked_reduce(
        v.size(), 0.0, [&](std::size_t b, std::size_t e, double& acc) {
          for (std::size_t i = b; i < e; ++i) acc += v[i];
        },
        [](double a, double b) { return a + b; });
  };
  parallel::set_max_threads(1);
  double one = run();
  parallel::set_max_threads(3);
  double three = run();
  parallel::set_max_threads(8);
  double eight = run();
  parallel::set_max_threads(0);
  CHECK(std::memcmp(&one, &three, sizeof one) == 0);
  CHECK(std::memcmp(&one, &eight, sizeof one) == 0);
}

TEST_CASE("exceptions propagate") {
  parallel::set_max_threads(2);
  CHECK_THROWS_AS(parallel::for_each_chunk(10, [](std::size_t c) {
                    if (c == 7) throw Error("boom");
                  }),
                  Error);
  parallel::set_max_threads(0);
}

TEST_CASE("matrix chunk bounds partials") {
  CHECK(parallel::matrix_chunk(0, 10) == 1);
  CHECK(parallel::chunk_count(100, parallel::matrix_chunk(100, 10)) == 2);
  std::size_t c = parallel::matrix_chunk(1000000, 1000);
  CHECK(parallel::chunk_count(1000000, c) <= 4);
}

TEST_CASE("toeplitz identical across thread counts") {
  FockParams p{2, 1, 8, 12};
  Symbol f = Symbol::gaussian(Point{cplx(0.3, 0), cplx(0, -0.2)}, 2.0);
  parallel::set_max_threads(1);
  CMatrix a = toeplitz(p, f).m;
  parallel::set_max_threads(4);
  CMatrix b = toeplitz(p, f).m;
  parallel::set_max_threads(0);
  CHECK(std::memcmp(a.data(), b.data(), sizeof(cplx) * a.size()) == 0);
}

}  // TEST_SUITE
