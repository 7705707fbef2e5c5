#pragma once

#include <string>
#include <vector>

#include "qha/convolution.hpp"
#include "qha/fock.hpp"
#include "qha/symbol.hpp"

namespace qha {

// Candidate translate centres for the heat-kernel fit.
struct NodeLayout {
  double pitch = 0;   // 0 means min(sqrt(t)/2, sqrt(t/N))
  double radius = 0;  // 0 means 3 sqrt(t) + sqrt(t/N)
  std::vector<Point> explicit_nodes;  // overrides the lattice when non-empty
};

struct FitConfig {
  double window = 0;   // fit grid half width; 0 means 8 sqrt(t)
  int m = 160;         // Gauss-Legendre points per real axis of the fit grid
  double ridge = 1e-9;  // relative to the mean diagonal of the normal matrix
  int irls_passes = 10;
  bool normalize_mass = true;  // rescale so that sum c_j = 1
};

struct HeatKernelFit {
  int N = 1;
  double t = 1;
  std::vector<Point> nodes;
  std::vector<double> coefficients;
  double l1_residual = 0;  // |f_{t/N} - sum c_j f_t(. - z_j)|_{L1} on a grid finer than the fit grid
  double ridge_used = 0;
  std::string method;  // which candidate solution was kept
  std::vector<std::string> flags;
};

std::vector<Point> lattice_nodes(int n, double t, int N, const NodeLayout& layout);

// Fits f_{t/N} by sum_j c_j f_t(. - z_j). Candidates are the ridge least
// squares solution and iteratively reweighted (L1-targeting) refinements of
// it; the one with the smallest L1 residual is kept. N = 1 with the default
// layout uses the single node 0.
HeatKernelFit fit_heat_kernel(const FockParams& params, int N, const NodeLayout& layout = {},
                              const FitConfig& cfg = {});

// L1 residual of a fit recomputed on an independent grid.
double fit_l1_residual(const HeatKernelFit& fit, int n, double window, int m);

struct SymbolBuildOptions {
  double spacing = 0.05;  // Berezin grid spacing in units of sqrt(t)
  int order = 8;
  double half_width = 0;  // 0 means: covers params.Q Gauss-Hermite nodes shifted by every fit node
};

// sum_j c_j translate(berezin(A), z_j) over one shared Berezin grid.
// Flags fit nodes outside the trusted window.
Symbol build_symbol_from_berezin(const FockOperator& a, const HeatKernelFit& fit, const SymbolBuildOptions& opts = {},
                                 Diagnostics* diag = nullptr);

struct ApproxConfig {
  NodeLayout layout;
  FitConfig fit;
  SymbolBuildOptions symbol;
  // Baseline |A - f_{t/N} * A| uses a box of half width baseline_box * sqrt(t/N)
  // with baseline_m points per axis, 0 meaning max(40, 2D).
  double baseline_box = 6.5;
  int baseline_m = 0;
  ConvolutionConfig conv;
};

struct ApproximationStage {
  int N = 1;
  HeatKernelFit fit;
  double build_seconds = 0;
  double op_error = 0;             // |A - T_{g_N}| on the trusted sub-block
  double op_error_full = 0;        // same on the whole truncated space
  double baseline_error = 0;       // |A - f_{t/N} * A| on the trusted sub-block
  double baseline_error_full = 0;
  double bound = 0;                // baseline_error + C |A| l1_residual
  std::vector<std::string> flags;
};

struct ApproximationReport {
  std::string target;
  FockParams params;
  double target_norm = 0;
  double young_constant = 0;  // measured C, at least 1
  std::vector<ApproximationStage> stages;
};

// Measured constant in |f * A| <= C |f|_{L1} |A| over a fixed battery of
// Gaussian and Gaussian-difference symbols.
double measured_young_constant(const FockOperator& a, const ConvolutionConfig& cfg);

ApproximationReport toeplitz_approximation(const FockOperator& a, const std::vector<int>& stages,
                                           const ApproxConfig& cfg = {}, const std::string& target = "operator");

struct ApproxIdentityPoint {
  double s;
  double error;          // |f_s * A - A|
  double error_trusted;  // same on the trusted sub-block
};

std::vector<ApproxIdentityPoint> approximate_identity_sweep(const FockOperator& a, const std::vector<double>& s_list,
                                                            double box = 6.5, int m = 0);

}  // namespace qha
