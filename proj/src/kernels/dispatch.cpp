#include <cstdlib>
#include <cstring>

#include "qha/kernels.hpp"

namespace qha::kernels {
namespace {

struct Table {
  void (*caxpy)(std::size_t, cplx, const cplx*, cplx*);
  cplx (*cdotu)(std::size_t, const cplx*, const cplx*);
  cplx (*cdotc)(std::size_t, const cplx*, const cplx*);
  Isa isa;
};

constexpr Table kScalar{scalar::caxpy, scalar::cdotu, scalar::cdotc, Isa::scalar};
#ifdef QHA_HAVE_AVX2
constexpr Table kAvx2{avx2::caxpy, avx2::cdotu, avx2::cdotc, Isa::avx2};
#endif

bool env_forces_scalar() {
  const char* v = std::getenv("QHA_FORCE_SCALAR");
  return v && *v && std::strcmp(v, "0") != 0;
}

Table initial_table() {
#ifdef QHA_HAVE_AVX2
  if (!env_forces_scalar() && isa_supported(Isa::avx2)) return kAvx2;
#endif
  return kScalar;
}

Table& table() {
  static Table t = initial_table();
  return t;
}

}  // namespace

bool isa_supported(Isa isa) {
  if (isa == Isa::scalar) return true;
#ifdef QHA_HAVE_AVX2
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return table().isa; }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw Error(std::string("instruction set not available: ") + isa_name(isa));
#ifdef QHA_HAVE_AVX2
  table() = isa == Isa::avx2 ? kAvx2 : kScalar;
#else
  table() = kScalar;
#endif
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) { table().caxpy(n, a, x, y); }
cplx cdotu(std::size_t n, const cplx* x, const cplx* y) { return table().cdotu(n, x, y); }
cplx cdotc(std::size_t n, const cplx* x, const cplx* y) { return table().cdotc(n, x, y); }

void rank1_update(std::size_t dim, cplx a, const cplx* x, const cplx* y, cplx* acc) {
  auto axpy = table().caxpy;
  for (std::size_t j = 0; j < dim; ++j) axpy(dim, a * y[j], x, acc + j * dim);
}

}  // namespace qha::kernels

#ifndef QHA_HAVE_AVX2
namespace qha::kernels::avx2 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y) { scalar::caxpy(n, a, x, y); }
cplx cdotu(std::size_t n, const cplx* x, const cplx* y) { return scalar::cdotu(n, x, y); }
cplx cdotc(std::size_t n, const cplx* x, const cplx* y) { return scalar::cdotc(n, x, y); }
}  // namespace qha::kernels::avx2
#endif
