#pragma once

#include <optional>

#include "qha/fock.hpp"
#include "qha/symbol.hpp"

namespace qha {

// Matrix of W_z on the truncated basis. Built per coordinate from the
// displacement matrix elements (normalized associated Laguerre functions
// via a three-term recurrence), then tensored over coordinates.
FockOperator weyl(const FockParams& params, const Point& z, Diagnostics* diag = nullptr);

// Same matrix from the defining integral <k_z e_b(. - z), e_a> against
// mu_t. order = 0 picks an order large enough for the non-polynomial
// factor k_z. Slow; kept as an independent cross-check.
FockOperator weyl_by_quadrature(const FockParams& params, const Point& z, int order = 0);

// W_z A W_{-z}, with W_{-z} taken as the adjoint of W_z.
FockOperator alpha_op(const FockOperator& a, const Point& z);

// M[a,b] = int f e_b conj(e_a) dmu_t on the params.Q Gauss-Hermite grid.
// Throws Error naming the node if f is not finite there.
FockOperator toeplitz(const FockParams& params, const Symbol& f);

struct WindowOptions {
  Point center;            // empty means origin
  double half_width = 0;   // 0 means the cube inscribed in the trusted ball
  int points = 0;          // 0 means 41 per real axis
  int order = 8;           // interpolation order of the resulting grid
};

// A~(z) = <A k_z, k_z>, exact for the truncated matrix at every z.
cplx berezin_at(const FockOperator& a, const Point& z);
// Grid symbol of the Berezin transform. Flags when the window leaves the
// trusted region.
Symbol berezin(const FockOperator& a, const WindowOptions& opts = {}, Diagnostics* diag = nullptr);
GridFunction berezin_grid(const FockOperator& a, const WindowOptions& opts = {}, Diagnostics* diag = nullptr);

struct HeatTransformResult {
  Symbol symbol;  // grid kind
  double t;
  Symbol source;
};

// (pi t)^{-n} int f(w) exp(-|z - w|^2 / t) dV(w) as a mu_t expectation
// centred at z, Gauss-Hermite of the given order per axis.
cplx heat_at(const Symbol& f, double t, const Point& z, int order = 40);
HeatTransformResult heat_transform(const Symbol& f, double t, const WindowOptions& opts, int order = 40);

}  // namespace qha

namespace qha {

// Weyl matrix for a prebuilt basis; the building block of weyl().
CMatrix weyl_matrix(const Basis& basis, std::span<const cplx> z);

}  // namespace qha
