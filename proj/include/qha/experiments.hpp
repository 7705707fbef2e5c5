#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qha/approx.hpp"
#include "qha/fock.hpp"
#include "qha/symbol.hpp"

namespace qha {

struct SweepRecord {
  double parameter = 0;  // t or s
  std::vector<std::pair<std::string, double>> quantities;
  FockParams params;
  std::string symbols;

  double quantity(const std::string& name) const;
};

// Per t: |T_f T_g - T_{fg}| on the trusted sub-block ("op_gap") and
// sup |fg - heat_transform(fg, t)| over the trusted window ("sup_gap").
// The model is rebuilt for every t from base (n, D, Q kept).
std::vector<SweepRecord> quantization_sweep(const Symbol& f, const Symbol& g, const std::vector<double>& t_list,
                                            const FockParams& base, int window_points = 41);

struct CompactnessProfile {
  std::vector<double> radii;
  std::vector<double> max_abs;  // max |A~| on the circle of each radius
  std::vector<double> singular_values;
};

// Circles lie in the first complex coordinate plane.
CompactnessProfile compactness_diagnostic(const FockOperator& a, const std::vector<double>& radii,
                                          int angular_samples = 64, Diagnostics* diag = nullptr);

struct InvarianceResult {
  double max_residual = 0;
  std::vector<Point> shifts;
  std::vector<double> residuals;  // |alpha_w(T_f) - T_f| on the trusted sub-block
};

InvarianceResult invariance_check(const FockParams& params, const Symbol& f, const std::vector<Point>& directions,
                                  const std::vector<double>& magnitudes);

// Horizontal symbol exp(-(Re w_1)^2 / width), invariant under imaginary shifts.
Symbol horizontal_symbol(int n, double width = 1.0);

ApproximationReport ccr_weyl_approximation(const Point& z0, const FockParams& params, const std::vector<int>& stages,
                                           const ApproxConfig& cfg = {});

bool monotone_within(const std::vector<double>& v, double slack);

}  // namespace qha
