#include "qha/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "qha/quadrature.hpp"

namespace qha {

void FockParams::validate() const {
  if (n < 1) throw Error("n must be >= 1, got " + std::to_string(n));
  if (!(t > 0) || !std::isfinite(t)) throw Error("t must be a positive finite number");
  if (D < 0) throw Error("D must be >= 0, got " + std::to_string(D));
  if (Q < D + 2)
    throw Error("quadrature order Q=" + std::to_string(Q) + " must be >= D+2=" + std::to_string(D + 2));
}

std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

std::size_t FockParams::dim() const { return binomial(D + n, n); }
std::size_t FockParams::trusted_dim() const { return binomial(trusted_degree() + n, n); }
bool FockParams::trusted(const Point& z) const { return norm2(z) <= trusted_radius2() * (1 + 1e-12); }

bool same_space(const FockParams& a, const FockParams& b) {
  return a.n == b.n && a.t == b.t && a.D == b.D;
}

void require_same_space(const FockParams& a, const FockParams& b, const char* op) {
  if (!same_space(a, b)) throw Error(std::string(op) + ": operands live on different truncated spaces");
}

int degree(const MultiIndex& a) {
  int d = 0;
  for (int v : a) d += v;
  return d;
}

namespace {

// All indices of length n with total d, first entry descending.
void indices_of_degree(int n, int d, MultiIndex& prefix, std::vector<MultiIndex>& out) {
  if (static_cast<int>(prefix.size()) == n - 1) {
    prefix.push_back(d);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int k = d; k >= 0; --k) {
    prefix.push_back(k);
    indices_of_degree(n, d - k, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> basis_indexer(const FockParams& params) {
  if (params.n < 1 || params.D < 0) throw Error("basis_indexer: invalid n or D");
  std::vector<MultiIndex> out;
  out.reserve(params.dim());
  MultiIndex prefix;
  for (int d = 0; d <= params.D; ++d) indices_of_degree(params.n, d, prefix, out);
  return out;
}

Basis::Basis(const FockParams& params) : params_(params), indices_(basis_indexer(params)) {
  std::map<MultiIndex, std::size_t> pos;
  for (std::size_t i = 0; i < indices_.size(); ++i) pos.emplace(indices_[i], i);
  parent_.assign(indices_.size(), 0);
  axis_.assign(indices_.size(), -1);
  scale_.assign(indices_.size(), 1.0);
  for (std::size_t i = 1; i < indices_.size(); ++i) {
    MultiIndex a = indices_[i];
    int k = params.n - 1;
    while (a[k] == 0) --k;
    scale_[i] = 1.0 / std::sqrt(params.t * a[k]);
    a[k] -= 1;
    axis_[i] = k;
    parent_[i] = pos.at(a);
  }
}

std::size_t Basis::position(const MultiIndex& a) const {
  auto it = std::find(indices_.begin(), indices_.end(), a);
  if (it == indices_.end()) throw Error("multi-index not in basis");
  return static_cast<std::size_t>(it - indices_.begin());
}

void Basis::evaluate(std::span<const cplx> z, cplx* out) const {
  out[0] = 1.0;
  for (std::size_t i = 1; i < indices_.size(); ++i) out[i] = out[parent_[i]] * (z[axis_[i]] * scale_[i]);
}

cplx eval_basis(const FockParams& params, const MultiIndex& a, std::span<const cplx> z) {
  if (static_cast<int>(a.size()) != params.n || static_cast<int>(z.size()) != params.n)
    throw Error("eval_basis: dimension mismatch");
  if (degree(a) > params.D) throw Error("eval_basis: index above degree cutoff");
  cplx v = 1.0;
  for (int i = 0; i < params.n; ++i)
    for (int k = 1; k <= a[i]; ++k) v *= z[i] / std::sqrt(params.t * k);
  return v;
}

FockVector basis_vector(const FockParams& params, std::size_t position) {
  FockVector v{params, CVector::Zero(static_cast<Eigen::Index>(params.dim()))};
  v.coeffs(static_cast<Eigen::Index>(position)) = 1.0;
  return v;
}

void kernel_coefficients_into(const Basis& basis, std::span<const cplx> z, cplx* out) {
  double r2 = 0;
  for (const auto& c : z) r2 += std::norm(c);
  basis.evaluate(z, out);
  const double g = std::exp(-r2 / (2 * basis.params().t));
  for (std::size_t i = 0; i < basis.size(); ++i) out[i] = g * std::conj(out[i]);
}

FockVector kernel_coefficients(const FockParams& params, const Point& z, Diagnostics* diag,
                               double defect_threshold) {
  if (static_cast<int>(z.size()) != params.n) throw Error("kernel_coefficients: dimension mismatch");
  Basis basis(params);
  FockVector v{params, CVector(static_cast<Eigen::Index>(basis.size()))};
  kernel_coefficients_into(basis, z, v.coeffs.data());
  if (!params.trusted(z)) raise_flag(diag, "kernel_coefficients: z=" + format_point(z) + " outside trusted window");
  double defect = 1.0 - v.coeffs.squaredNorm();
  if (defect > defect_threshold)
    raise_flag(diag, "kernel_coefficients: truncation defect " + std::to_string(defect) + " at z=" + format_point(z));
  return v;
}

FockOperator::FockOperator(const FockParams& p, CMatrix mat) : params(p), m(std::move(mat)) {
  auto d = static_cast<Eigen::Index>(p.dim());
  if (m.rows() != d || m.cols() != d) throw Error("FockOperator: matrix size does not match basis dimension");
}

CMatrix FockOperator::trusted_block() const {
  auto k = static_cast<Eigen::Index>(params.trusted_dim());
  return m.topLeftCorner(k, k);
}

FockOperator operator+(const FockOperator& a, const FockOperator& b) {
  require_same_space(a.params, b.params, "operator+");
  return {a.params, a.m + b.m};
}

FockOperator operator-(const FockOperator& a, const FockOperator& b) {
  require_same_space(a.params, b.params, "operator-");
  return {a.params, a.m - b.m};
}

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  require_same_space(a.params, b.params, "operator*");
  return {a.params, a.m * b.m};
}

FockOperator operator*(cplx s, const FockOperator& a) { return {a.params, s * a.m}; }

FockOperator identity_operator(const FockParams& params) {
  auto d = static_cast<Eigen::Index>(params.dim());
  return {params, CMatrix::Identity(d, d)};
}

FockOperator zero_operator(const FockParams& params) {
  auto d = static_cast<Eigen::Index>(params.dim());
  return {params, CMatrix::Zero(d, d)};
}

FockOperator projection_constants(const FockParams& params) {
  FockOperator p = zero_operator(params);
  p.m(0, 0) = 1.0;
  return p;
}

FockOperator rank_one(const FockVector& y, const FockVector& x) {
  require_same_space(y.params, x.params, "rank_one");
  return {x.params, x.coeffs * y.coeffs.adjoint()};
}

FockOperator parity_matrix(const FockParams& params) {
  FockOperator u = zero_operator(params);
  auto idx = basis_indexer(params);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    u.m(k, k) = degree(idx[i]) % 2 ? -1.0 : 1.0;
  }
  return u;
}

std::vector<double> singular_values(const CMatrix& m) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double operator_norm_2(const CMatrix& m) {
  auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

double operator_norm_2(const FockOperator& a) { return operator_norm_2(a.m); }

double schatten_norm(const FockOperator& a, double p0) {
  if (!(p0 >= 1)) throw Error("schatten_norm: p0 must be >= 1");
  auto s = singular_values(a.m);
  if (s.empty() || s.front() == 0) return 0.0;
  if (std::isinf(p0)) return s.front();
  // scaled by the largest value to avoid overflow for large p0
  double acc = 0;
  for (double v : s) acc += std::pow(v / s.front(), p0);
  return s.front() * std::pow(acc, 1.0 / p0);
}

double trusted_norm(const FockOperator& a) { return operator_norm_2(a.trusted_block()); }

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

cplx complex_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng), u2 = uniform01(rng);
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
}

double fock_p_norm(const Basis& basis, const GaussGrid& grid, const CVector& g, double p) {
  std::vector<cplx> e(basis.size());
  double acc = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis.evaluate(grid.node(i), e.data());
    cplx v = 0;
    for (std::size_t k = 0; k < basis.size(); ++k) v += g(static_cast<Eigen::Index>(k)) * e[k];
    acc += grid.weight(i) * std::pow(std::abs(v), p);
  }
  return std::pow(acc, 1.0 / p);
}

}  // namespace

double p_operator_norm_lower_bound(const FockOperator& a, double p, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error("p_operator_norm_lower_bound: trials must be >= 1");
  if (!(p > 1) || std::isinf(p)) throw Error("p_operator_norm_lower_bound: p must lie in (1, inf)");
  const FockParams& params = a.params;
  Basis basis(params);
  GaussGrid grid = gaussian_grid(params.n, 2 * params.t / p, params.Q);
  const auto low = static_cast<Eigen::Index>(params.trusted_dim());
  std::mt19937_64 rng(seed);
  double best = 0;
  for (int k = 0; k < trials; ++k) {
    CVector g = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
    for (Eigen::Index i = 0; i < low; ++i) g(i) = complex_normal(rng);
    double gn = fock_p_norm(basis, grid, g, p);
    if (gn == 0) continue;
    best = std::max(best, fock_p_norm(basis, grid, a.m * g, p) / gn);
  }
  return best;
}

FockOperator random_finite_rank(const FockParams& params, int rank, std::uint64_t seed) {
  if (rank < 0) throw Error("random_finite_rank: rank must be >= 0");
  std::mt19937_64 rng(seed);
  Basis basis(params);
  const double radius = 0.75 * std::sqrt(params.trusted_radius2());
  auto coherent_mix = [&] {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
    CVector c(static_cast<Eigen::Index>(basis.size()));
    for (int l = 0; l < 3; ++l) {
      Point z(static_cast<std::size_t>(params.n));
      for (auto& zi : z) {
        // uniform in the disc of the given radius, per coordinate
        double r = radius * std::sqrt(uniform01(rng)) / std::sqrt(static_cast<double>(params.n));
        double th = 2 * M_PI * uniform01(rng);
        zi = std::polar(r, th);
      }
      kernel_coefficients_into(basis, z, c.data());
      v += complex_normal(rng) * c;
    }
    return CVector(v / v.norm());
  };
  FockOperator a = zero_operator(params);
  for (int j = 0; j < rank; ++j) {
    CVector y = coherent_mix();
    CVector x = coherent_mix();
    a.m += x * y.adjoint();
  }
  return a;
}

}  // namespace qha
