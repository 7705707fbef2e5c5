#include "qha/kernels.hpp"

namespace qha::kernels::scalar {

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const double* xp = reinterpret_cast<const double*>(x);
  double* yp = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xp[2 * i], xi = xp[2 * i + 1];
    double tr = ar * xr - ai * xi;
    double ti = ar * xi + ai * xr;
    yp[2 * i] = yp[2 * i] + tr;
    yp[2 * i + 1] = yp[2 * i + 1] + ti;
  }
}

cplx cdotu(std::size_t n, const cplx* x, const cplx* y) {
  double sr[4] = {0, 0, 0, 0}, si[4] = {0, 0, 0, 0};
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xp[2 * i], xi = xp[2 * i + 1];
    double yr = yp[2 * i], yi = yp[2 * i + 1];
    sr[i % 4] += xr * yr - xi * yi;
    si[i % 4] += xi * yr + xr * yi;
  }
  return {(sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3])};
}

cplx cdotc(std::size_t n, const cplx* x, const cplx* y) {
  double sr[4] = {0, 0, 0, 0}, si[4] = {0, 0, 0, 0};
  const double* xp = reinterpret_cast<const double*>(x);
  const double* yp = reinterpret_cast<const double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    double xr = xp[2 * i], xi = xp[2 * i + 1];
    double yr = yp[2 * i], yi = yp[2 * i + 1];
    sr[i % 4] += yr * xr + yi * xi;
    si[i % 4] += yi * xr - yr * xi;
  }
  return {(sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3])};
}

}  // namespace qha::kernels::scalar
