#include <immintrin.h>

#include "qha/kernels.hpp"

// Two complex doubles per register, laid out [re0, im0, re1, im1].
namespace qha::kernels::avx2 {
namespace {

inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// [xr*yr - xi*yi, xi*yr + xr*yi] per complex lane
inline __m256d cmul(__m256d x, __m256d y) {
  __m256d yr = _mm256_movedup_pd(y);
  __m256d yi = _mm256_permute_pd(y, 0b1111);
  __m256d p1 = _mm256_mul_pd(x, yr);
  __m256d p2 = _mm256_mul_pd(swap_pairs(x), yi);
  return _mm256_addsub_pd(p1, p2);
}

// [yr*xr + yi*xi, yi*xr - yr*xi] per complex lane, i.e. conj(x)*y
inline __m256d cmulc(__m256d x, __m256d y) {
  __m256d xr = _mm256_movedup_pd(x);
  __m256d xi = _mm256_permute_pd(x, 0b1111);
  __m256d p1 = _mm256_mul_pd(y, xr);
  __m256d p2 = _mm256_mul_pd(swap_pairs(y), xi);
  __m256d neg = _mm256_xor_pd(p2, _mm256_set1_pd(-0.0));
  return _mm256_addsub_pd(p1, neg);
}

template <class Mul, class Tail>
cplx striped_dot(std::size_t n, const cplx* x, const cplx* y, Mul mul, Tail tail) {
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  __m256d acc01 = _mm256_setzero_pd();  // stripes 0 and 1
  __m256d acc23 = _mm256_setzero_pd();  // stripes 2 and 3
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = _mm256_add_pd(acc01, mul(_mm256_loadu_pd(xp + 2 * i), _mm256_loadu_pd(yp + 2 * i)));
    acc23 = _mm256_add_pd(acc23, mul(_mm256_loadu_pd(xp + 2 * i + 4), _mm256_loadu_pd(yp + 2 * i + 4)));
  }
  alignas(32) double s[8];
  _mm256_store_pd(s, acc01);
  _mm256_store_pd(s + 4, acc23);
  double sr[4] = {s[0], s[2], s[4], s[6]};
  double si[4] = {s[1], s[3], s[5], s[7]};
  for (; i < n; ++i) tail(xp + 2 * i, yp + 2 * i, sr[i % 4], si[i % 4]);
  return {(sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3])};
}

}  // namespace

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    __m256d p1 = _mm256_mul_pd(xv, ar);
    __m256d p2 = _mm256_mul_pd(swap_pairs(xv), ai);
    __m256d t = _mm256_addsub_pd(p1, p2);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), t));
  }
  if (i < n) scalar::caxpy(n - i, a, x + i, y + i);
}

cplx cdotu(std::size_t n, const cplx* x, const cplx* y) {
  return striped_dot(n, x, y, cmul, [](const double* xp, const double* yp, double& sr, double& si) {
    sr += xp[0] * yp[0] - xp[1] * yp[1];
    si += xp[1] * yp[0] + xp[0] * yp[1];
  });
}

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
  return striped_dot(n, x, y, cmulc, [](const double* xp, const double* yp, double& sr, double& si) {
    sr += yp[0] * xp[0] + yp[1] * xp[1];
    si += yp[1] * xp[0] - yp[0] * xp[1];
  });
}

}  // namespace qha::kernels::avx2
