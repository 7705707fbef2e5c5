#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qha/types.hpp"

namespace qha {

struct FockParams {
  int n = 1;       // complex dimension
  double t = 1.0;  // Gaussian weight
  int D = 0;       // total-degree cutoff
  int Q = 2;       // quadrature order per real axis

  // Throws Error unless t > 0, n >= 1, D >= 0 and Q >= D + 2.
  void validate() const;
  std::size_t dim() const;
  // |z|^2 <= t D / 4
  double trusted_radius2() const { return t * D / 4.0; }
  bool trusted(const Point& z) const;
  int trusted_degree() const { return D / 2; }
  // Number of basis elements of degree <= trusted_degree(). These come
  // first in graded order, so the trusted sub-block is a leading block.
  std::size_t trusted_dim() const;
};

// Same truncated space (n, t, D); Q may differ.
bool same_space(const FockParams& a, const FockParams& b);
void require_same_space(const FockParams& a, const FockParams& b, const char* op);

std::size_t binomial(int n, int k);

using MultiIndex = std::vector<int>;

int degree(const MultiIndex& a);

// All multi-indices with |a| <= D in graded lexicographic order: by total
// degree, then by decreasing first entry, then decreasing second, ...
std::vector<MultiIndex> basis_indexer(const FockParams& params);

// Basis with a precomputed recursion table so that all e_a(z) come out of
// one pass: e_a = z_k / sqrt(t a_k) * e_{a - 1_k} for the last non-zero k.
class Basis {
 public:
  explicit Basis(const FockParams& params);

  const FockParams& params() const { return params_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  // Throws Error if the index is not in the basis.
  std::size_t position(const MultiIndex& a) const;

  // out[i] = e_{indices[i]}(z)
  void evaluate(std::span<const cplx> z, cplx* out) const;

 private:
  FockParams params_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> parent_;
  std::vector<int> axis_;
  std::vector<double> scale_;
};

cplx eval_basis(const FockParams& params, const MultiIndex& a, std::span<const cplx> z);

struct FockVector {
  FockParams params;
  CVector coeffs;

  double norm() const { return coeffs.norm(); }
};

FockVector basis_vector(const FockParams& params, std::size_t position);

// Coefficients of the normalized kernel k_z. Flags points outside the
// trusted window and truncation defects 1 - |c|^2 above defect_threshold.
FockVector kernel_coefficients(const FockParams& params, const Point& z, Diagnostics* diag = nullptr,
                               double defect_threshold = 1e-8);
// Unflagged variant for inner loops; out has length basis.size().
void kernel_coefficients_into(const Basis& basis, std::span<const cplx> z, cplx* out);

struct FockOperator {
  FockParams params;
  CMatrix m;

  FockOperator() = default;
  FockOperator(const FockParams& p, CMatrix mat);

  std::size_t dim() const { return static_cast<std::size_t>(m.rows()); }
  cplx trace() const { return m.trace(); }
  FockOperator adjoint() const { return {params, m.adjoint()}; }
  // Leading block on degrees <= D/2.
  CMatrix trusted_block() const;
};

FockOperator operator+(const FockOperator& a, const FockOperator& b);
FockOperator operator-(const FockOperator& a, const FockOperator& b);
FockOperator operator*(const FockOperator& a, const FockOperator& b);
FockOperator operator*(cplx s, const FockOperator& a);

FockOperator identity_operator(const FockParams& params);
FockOperator zero_operator(const FockParams& params);
// P_C = 1 (x) 1, the projection onto constants
FockOperator projection_constants(const FockParams& params);

// y (x) x : g -> <g, y> x, so M[a,b] = x_a conj(y_b)
FockOperator rank_one(const FockVector& y, const FockVector& x);
FockOperator parity_matrix(const FockParams& params);

std::vector<double> singular_values(const CMatrix& m);
double operator_norm_2(const CMatrix& m);
double operator_norm_2(const FockOperator& a);
double schatten_norm(const FockOperator& a, double p0);
double trusted_norm(const FockOperator& a);

// Largest sampled ratio |Ag|_p / |g|_p over random polynomials g, with
// F^p norms by quadrature against mu_{2t/p}. Non-decreasing in trials
// for a fixed seed.
double p_operator_norm_lower_bound(const FockOperator& a, double p, int trials, std::uint64_t seed = 1);

// Random operator of the given rank, sum_j y_j (x) x_j with y_j, x_j
// normalized combinations of coherent states centred in the trusted disc.
// Keeps its Berezin mass inside the trusted window.
FockOperator random_finite_rank(const FockParams& params, int rank, std::uint64_t seed);

}  // namespace qha
