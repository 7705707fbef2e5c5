// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qha/approx.hpp"
#include "qha/cli.hpp"
#include "qha/convolution.hpp"
#include "qha/experiments.hpp"
#include "qha/parallel.hpp"
#include "qha/quadrature.hpp"
#include "qha/weyl_toeplitz.hpp"

using namespace qha;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

FockParams model(int n, double t, int D, int Q) {
  FockParams p{n, t, D, Q};
  p.validate();
  return p;
}

CMatrix lead(const CMatrix& m, std::size_t k) {
  const auto e = static_cast<Eigen::Index>(k);
  return m.topLeftCorner(e, e);
}

// ---- 1 ---------------------------------------------------------------------

Outcome exact_quadrature() {
  auto t0 = Clock::now();
  FockParams p = model(1, 1, 30, 40);
  GaussGrid grid = gaussian_grid(p);
  Basis basis(p);
  const auto d = static_cast<Eigen::Index>(basis.size());
  CMatrix gram = CMatrix::Zero(d, d);
  std::vector<cplx> e(basis.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    basis.evaluate(grid.node(i), e.data());
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) gram(a, b) += grid.weight(i) * std::conj(e[a]) * e[b];
  }
  double ortho = (gram - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  double one = (toeplitz(p, Symbol::constant(1, 1.0)).m - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  CMatrix r2 = toeplitz(p, Symbol::polynomial(1, {{1.0, {1}, {1}}})).m;
  double diag = 0;
  for (int k = 0; k <= 30; ++k) diag = std::max(diag, std::abs(r2(k, k) - p.t * (k + 1)));
  CMatrix u = parity_matrix(p).m;
  bool parity = (u * u - CMatrix::Identity(d, d)).norm() == 0;
  for (int k = 0; k <= 30; ++k) parity = parity && u(k, k) == cplx(k % 2 ? -1 : 1);
  double secs = seconds_since(t0);
  bool ok = ortho <= 1e-12 && one <= 1e-12 && diag <= 1e-12 && parity && secs < 5;
  return {ok, "orthonormality=" + num(ortho) + " T_1=" + num(one) + " T_|w|^2=" + num(diag) +
                  " parity=" + (parity ? "exact" : "broken") + " time=" + num(secs) + "s"};
}

// ---- 2 ---------------------------------------------------------------------

std::vector<std::pair<cplx, cplx>> weyl_samples() {
  std::vector<std::pair<cplx, cplx>> s;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      s.push_back({std::polar(1.0, 0.4 + i * M_PI / 2), std::polar(j % 2 ? 1.0 : 0.5, 1.1 + j * M_PI / 2)});
  return s;
}

double commutation_residual(const FockParams& p) {
  double worst = 0;
  for (auto [z, w] : weyl_samples()) {
    CMatrix lhs = weyl(p, Point{z}).m * weyl(p, Point{w}).m;
    CMatrix rhs = std::exp(cplx(0, -std::imag(z * std::conj(w)) / p.t)) * weyl(p, Point{z + w}).m;
    worst = std::max(worst, operator_norm_2(CMatrix(lead(lhs - rhs, p.trusted_dim()))));
  }
  return worst;
}

Outcome weyl_algebra() {
  FockParams p40 = model(1, 1, 40, 50), p20 = model(1, 1, 20, 30);
  double r40 = commutation_residual(p40), r20 = commutation_residual(p20);
  double inv = 0;
  for (auto [z, w] : weyl_samples()) {
    CMatrix prod = weyl(p40, Point{z}).m * weyl(p40, Point{-z}).m;
    CMatrix id = CMatrix::Identity(prod.rows(), prod.cols());
    inv = std::max(inv, operator_norm_2(CMatrix(lead(prod - id, p40.trusted_dim()))));
  }
  bool ok = r40 <= 1e-6 && r20 >= 10 * r40 && inv <= 1e-8;
  return {ok, "commutation(D=40)=" + num(r40) + " commutation(D=20)=" + num(r20) + " ratio=" + num(r20 / r40) +
                  " inverse=" + num(inv)};
}

// ---- 3 ---------------------------------------------------------------------

Outcome berezin_closed_form() {
  FockParams p = model(1, 1, 40, 50);
  const double rmax = std::sqrt(p.t * p.D) / 2;
  double worst = 0;
  for (int a = 0; a < 6; ++a) {
    const cplx z0 = std::polar(rmax * a / 5.0, 0.7 * a);
    auto k0 = kernel_coefficients(p, Point{z0});
    FockOperator r = rank_one(k0, k0);
    for (int i = 0; i <= 10; ++i)
      for (int j = 0; j < 12; ++j) {
        const cplx z = std::polar(rmax * i / 10.0, 2 * M_PI * j / 12);
        worst = std::max(worst, std::abs(berezin_at(r, Point{z}) - std::exp(-std::norm(z - z0) / p.t)));
      }
  }
  return {worst <= 1e-8, "max error=" + num(worst)};
}

// ---- 4 ---------------------------------------------------------------------

Outcome convolution_identities() {
  FockParams p = model(1, 1, 40, 50);
  ConvolutionConfig cfg;
  double trace = 0;
  for (int i = 0; i < 20; ++i) {
    FockOperator a = random_finite_rank(p, 1 + i % 3, 1000 + 2 * i);
    FockOperator b = random_finite_rank(p, 1 + (i + 1) % 3, 1001 + 2 * i);
    trace = std::max(trace, trace_identity_residual(a, b, cfg));
  }
  double duality = 0;
  for (int i = 0; i < 3; ++i) {
    Symbol f = Symbol::gaussian(Point{cplx(0.3 * i, -0.2)}, 1.0 + i);
    auto r = adjoint_duality_residuals(f, random_finite_rank(p, 1, 2000 + i), random_finite_rank(p, 2, 2100 + i),
                                       random_finite_rank(p, 1, 2200 + i), cfg);
    for (double v : r) duality = std::max(duality, v);
  }
  double comm = 0;
  for (int i = 0; i < 3; ++i) {
    FockOperator a = random_finite_rank(p, 2, 3000 + i), b = random_finite_rank(p, 3, 3100 + i);
    WindowOptions wo;
    wo.points = 15;
    Symbol ab = conv_op_op(a, b, wo), ba = conv_op_op(b, a, wo);
    const GridFunction &g = *ab.as_grid(), &h = *ba.as_grid();
    for (std::size_t k = 0; k < g.size(); ++k) comm = std::max(comm, std::abs(g.values[k] - h.values[k]));
  }
  bool ok = trace <= 1e-4 && duality <= 1e-4 && comm <= 1e-6;
  return {ok, "trace=" + num(trace) + " duality=" + num(duality) + " commutativity=" + num(comm)};
}

// ---- 5 ---------------------------------------------------------------------

Outcome two_pipelines() {
  FockParams p = model(1, 1, 40, 50);
  ConvolutionConfig cfg;
  double bump = 0, wave = 0;
  {
    Symbol f = Symbol::gaussian(Point{cplx(0.5, 0)}, 4.0);
    CMatrix a = toeplitz(p, f).m, b = toeplitz_via_convolution(p, f, cfg).m;
    bump = (a - b).norm() / a.norm();
  }
  {
    Symbol f = Symbol::plane_wave(Point{cplx(1, 0.5)});
    CMatrix a = toeplitz(p, f).m, b = toeplitz_via_convolution(p, f, cfg).m;
    wave = (a - b).norm() / a.norm();
  }
  return {bump <= 1e-4 && wave <= 1e-4, "gaussian-bump=" + num(bump) + " plane-wave=" + num(wave)};
}

// ---- 6 ---------------------------------------------------------------------

Outcome approximate_identity() {
  auto t0 = Clock::now();
  FockParams p = model(1, 1, 40, 50);
  FockOperator a = toeplitz(p, Symbol::gaussian(Point{cplx(0.5, 0)}, 4.0));
  auto pts = approximate_identity_sweep(a, {1, 0.5, 0.25, 0.125});
  std::vector<double> err;
  std::string d;
  for (const auto& x : pts) {
    err.push_back(x.error);
    d += num(x.error) + " ";
  }
  // centred oracle: the operator norm is invariant under translation of the bump
  double oracle_gap = 0;
  for (const auto& x : pts) {
    double exact = 0;
    for (int k = 0; k <= 20; ++k)
      exact = std::max(exact, std::abs(oracle::smoothed_gaussian_diag(k, 4, x.s, 1) - oracle::toeplitz_gaussian_diag(k, 4, 1)));
    oracle_gap = std::max(oracle_gap, std::abs(x.error_trusted - exact) / exact);
  }
  double secs = seconds_since(t0);
  bool ok = monotone_within(err, 0.10) && err.back() < err.front() && secs < 60;
  return {ok, "errors=" + d + "oracle_rel_gap=" + num(oracle_gap) + " time=" + num(secs) + "s"};
}

// ---- 7 ---------------------------------------------------------------------

Outcome approximation_scheme() {
  auto t0 = Clock::now();
  FockParams p = model(1, 1, 40, 50);
  struct Target {
    std::string name;
    FockOperator a;
  };
  auto k0 = kernel_coefficients(p, Point{0.0});
  std::vector<Target> targets{{"toeplitz", toeplitz(p, Symbol::gaussian(Point{cplx(0.5, 0)}, 4.0))},
                              {"weyl", weyl(p, Point{cplx(0.5, 0)})},
                              {"rank-one", rank_one(k0, k0)}};
  bool ok = true;
  std::string d;
  for (const auto& tg : targets) {
    ApproximationReport rep = toeplitz_approximation(tg.a, {1, 2, 4, 8}, {}, tg.name);
    std::vector<double> err;
    bool dominated = true;
    for (const auto& s : rep.stages) {
      err.push_back(s.op_error);
      dominated = dominated && s.op_error <= 1.1 * s.bound;
    }
    bool mono = monotone_within(err, 0.10);
    bool third = err.back() <= err.front() / 3;
    ok = ok && mono && third && dominated;
    d += tg.name + "[" + num(err.front()) + "->" + num(err.back()) + (mono ? "" : " non-monotone") +
         (third ? "" : " above 1/3") + (dominated ? "" : " undominated") + "] ";
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 300;
  return {ok, d + "time=" + num(secs) + "s"};
}

// ---- 8 ---------------------------------------------------------------------

Outcome quantization() {
  FockParams base = model(1, 1, 40, 50);
  Symbol f = Symbol::gaussian(Point{cplx(0.5, 0)}, 4.0), g = Symbol::gaussian(Point{cplx(-0.3, 0.2)}, 4.0);
  auto recs = quantization_sweep(f, g, {1, 0.5, 0.25, 0.125}, base);
  std::vector<double> op, sup;
  bool rebuilt = true;
  for (const auto& r : recs) {
    op.push_back(r.quantity("op_gap"));
    sup.push_back(r.quantity("sup_gap"));
    rebuilt = rebuilt && r.params.t == r.parameter;
  }
  bool ok = rebuilt && monotone_within(op, 0.15) && monotone_within(sup, 0.15) && op.back() < op.front() &&
            sup.back() < sup.front();
  std::string d = "op_gap=";
  for (double v : op) d += num(v) + " ";
  d += "sup_gap=";
  for (double v : sup) d += num(v) + " ";
  return {ok, d};
}

// ---- 9 ---------------------------------------------------------------------

Outcome invariance() {
  FockParams p = model(1, 1, 50, 70);
  const std::vector<double> mags{0.25, 0.5, 1};
  double horiz = invariance_check(p, horizontal_symbol(1), {Point{cplx(0, 1)}}, mags).max_residual;
  Symbol radial = Symbol::custom(1, "radial", [](auto w) { return cplx(std::exp(-std::norm(w[0]) / 4)); });
  double control = invariance_check(p, radial, {Point{cplx(1, 0)}}, mags).max_residual;
  return {horiz <= 1e-6 && control >= 0.01, "horizontal=" + num(horiz) + " radial-control=" + num(control)};
}

// ---- 10 --------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qha");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "qha_acceptance_determinism";
  std::vector<std::map<std::string, std::string>> snaps;
  bool codes = true;
  for (std::string threads : {"1", "3", "1", "4"}) {
    fs::path dir = root / ("run" + std::to_string(snaps.size()));
    fs::remove_all(dir);
    const std::vector<std::string> common{"--out", dir.string(), "--threads", threads, "--seed", "7"};
    auto go = [&](std::vector<std::string> a) {
      a.insert(a.end(), common.begin(), common.end());
      codes = codes && run_cli(a) == 0;
    };
    go({"verify"});
    go({"approx", "--stages", "1,2,4", "--target", "weyl:0.5,0"});
    go({"sweep", "--kind", "quantization"});
    go({"sweep", "--kind", "approx-identity"});
    go({"sweep", "--kind", "compactness", "--target", "rank-one:0.5,0.5"});
    go({"sweep", "--kind", "invariance"});
    go({"export-operator", "--target", "toeplitz:gaussian"});
    go({"export-berezin", "--target", "toeplitz:planewave:1,0.5"});
    snaps.push_back(snapshot(dir));
  }
  fs::remove_all(root);
  parallel::set_max_threads(0);
  bool same = true;
  for (std::size_t i = 1; i < snaps.size(); ++i) same = same && snaps[i] == snaps[0];
  return {codes && same && snaps[0].size() >= 20,
          std::to_string(snaps[0].size()) + " files, threads 1/3/1/4 " + (same ? "byte-identical" : "DIFFER") +
              (codes ? "" : ", a command failed")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact-quadrature identities", exact_quadrature},
      {"weyl algebra", weyl_algebra},
      {"berezin closed form", berezin_closed_form},
      {"convolution identities", convolution_identities},
      {"two-pipeline toeplitz agreement", two_pipelines},
      {"approximate identity", approximate_identity},
      {"constructive toeplitz approximation", approximation_scheme},
      {"quantization sweep", quantization},
      {"invariance", invariance},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed ? 1 : 0;
}
