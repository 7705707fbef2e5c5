#pragma once

#include <array>
#include <optional>
#include <string>

#include "qha/fock.hpp"
#include "qha/symbol.hpp"
#include "qha/weyl_toeplitz.hpp"

namespace qha {

struct ConvolutionConfig {
  double window = 0;  // half width W of the dV cube; 0 means default_window(params)
  int m = 80;         // Gauss-Legendre points per real axis
  // Integration box override; when unset the cube [-W, W]^{2n} is clipped
  // to the symbol's support box.
  std::optional<Box> box;
  // Relative shell mass (over [-2W, 2W] minus [-W, W]) above which a
  // window-instability flag is raised. Negative disables the check.
  double instability_tol = 1e-6;
  int shell_m = 24;

  double resolved_window(const FockParams& params) const;
};

// int f(z) alpha_z(A) dV(z)
FockOperator conv_fun_op(const Symbol& f, const FockOperator& a, const ConvolutionConfig& cfg,
                         Diagnostics* diag = nullptr);

// Precomputed A * B evaluator: z -> Tr(A alpha_z(U B U)). Uses a low-rank
// factorization of A when it pays off.
class OpOpConvolution {
 public:
  OpOpConvolution(const FockOperator& a, const FockOperator& b);
  cplx operator()(std::span<const cplx> z) const;
  const FockParams& params() const { return params_; }

 private:
  FockParams params_;
  Basis basis_;
  CMatrix a_, ubu_;
  CMatrix left_, right_;  // A = left * right^H when low rank
  bool low_rank_ = false;
};

cplx conv_op_op_at(const FockOperator& a, const FockOperator& b, const Point& z);
Symbol conv_op_op(const FockOperator& a, const FockOperator& b, const WindowOptions& opts = {},
                  Diagnostics* diag = nullptr);

// (f * g)(z) = int f(w) g(z - w) dV(w), sampled on the output window.
Symbol conv_fun_fun(const Symbol& f, const Symbol& g, const FockParams& params, const ConvolutionConfig& cfg,
                    const WindowOptions& out, Diagnostics* diag = nullptr);

// R_t * f with R_t = (pi t)^{-n} P_C.
FockOperator toeplitz_via_convolution(const FockParams& params, const Symbol& f, const ConvolutionConfig& cfg,
                                      Diagnostics* diag = nullptr);

// |int (A * B) dV - (pi t)^n Tr A Tr B| / (1 + |(pi t)^n Tr A Tr B|)
double trace_identity_residual(const FockOperator& a, const FockOperator& b, const ConvolutionConfig& cfg,
                               Diagnostics* diag = nullptr);

// Residuals of the three trace-pairing dualities, each |lhs - rhs| / (1 + |lhs|):
//   <f * A2, B> = <A2, Uf * B>
//   <f * A1, B> = <f, B * (U A1 U)>
//   <A1 * A2, f> = <A2, f * (U A1 U)>
// with <A, B> = Tr(AB) and <f, g> = int f g dV.
std::array<double, 3> adjoint_duality_residuals(const Symbol& f, const FockOperator& a1, const FockOperator& a2,
                                                const FockOperator& b, const ConvolutionConfig& cfg,
                                                Diagnostics* diag = nullptr);

// |f * A|_op / (|f|_{L1(window)} |A|_op)
double young_ratio(const Symbol& f, const FockOperator& a, const ConvolutionConfig& cfg);

// |f|_{L1} on the convolution grid for f.
double l1_norm(const Symbol& f, const FockParams& params, const ConvolutionConfig& cfg);

// Integration grid conv_fun_op would use for f.
GaussGrid convolution_grid(const Symbol& f, const FockParams& params, const ConvolutionConfig& cfg);

}  // namespace qha
