#pragma once

#include <cstddef>

#include "qha/types.hpp"

// Inner loops shared by the quadrature sweeps. Every kernel has a scalar
// reference and an AVX2 variant; the active one is chosen once at startup
// from the CPU features (QHA_FORCE_SCALAR=1 in the environment pins the
// reference). Both variants follow the same operation order, so results
// are bit-identical.
namespace qha::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
bool isa_supported(Isa isa);
// Selects the variant used by the dispatching entry points. Throws if the
// CPU lacks the instruction set.
void force_isa(Isa isa);
const char* isa_name(Isa isa);

// y += a * x
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
// sum x_i * y_i, accumulated in four stripes i mod 4 combined as
// (s0 + s1) + (s2 + s3)
cplx cdotu(std::size_t n, const cplx* x, const cplx* y);
// sum conj(x_i) * y_i, same stripe order as cdotu
cplx cdotc(std::size_t n, const cplx* x, const cplx* y);
// acc += a * x * y^T for a column-major dim x dim accumulator
void rank1_update(std::size_t dim, cplx a, const cplx* x, const cplx* y, cplx* acc);

namespace scalar {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx cdotu(std::size_t n, const cplx* x, const cplx* y);
cplx cdotc(std::size_t n, const cplx* x, const cplx* y);
}  // namespace scalar

namespace avx2 {
void caxpy(std::size_t n, cplx a, const cplx* x, cplx* y);
cplx cdotu(std::size_t n, const cplx* x, const cplx* y);
cplx cdotc(std::size_t n, const cplx* x, const cplx* y);
}  // namespace avx2

}  // namespace qha::kernels
