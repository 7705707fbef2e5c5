#include "qha/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qha/approx.hpp"
#include "qha/convolution.hpp"
#include "qha/experiments.hpp"
#include "qha/io.hpp"
#include "qha/parallel.hpp"
#include "qha/quadrature.hpp"
#include "qha/weyl_toeplitz.hpp"

namespace qha::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"model.n", "1"},
      {"model.t", "1"},
      {"model.D", "40"},
      {"model.Q", "50"},
      {"conv.window", "0"},
      {"conv.m", "80"},
      {"output.dir", "qha_out"},
      {"seed", "1"},
      {"threads", "0"},
      {"suite", "all"},
      {"verify.pairs", "5"},
      {"tol.orthonormality", "1e-12"},
      {"tol.weyl", "1e-6"},
      {"tol.inverse", "1e-8"},
      {"tol.berezin", "1e-8"},
      {"tol.trace", "1e-4"},
      {"tol.duality", "1e-4"},
      {"tol.commutativity", "1e-6"},
      {"tol.pipeline", "1e-4"},
      {"tol.window", "1e-6"},
      {"tol.invariance", "1e-6"},
      {"tol.negative_control", "0.01"},
      {"tol.slack", "0.10"},
      {"tol.sweep_slack", "0.15"},
      {"approx.target", "toeplitz:gaussian"},
      {"approx.stages", "1,2,4,8"},
      {"approx.timings", "false"},
      {"fit.pitch", "0"},
      {"fit.radius", "0"},
      {"fit.ridge", "1e-9"},
      {"fit.m", "160"},
      {"fit.irls_passes", "10"},
      {"sweep.kind", "quantization"},
      {"sweep.values", "auto"},
      {"sweep.symbol", "auto"},
      {"sweep.target", "auto"},
      {"sweep.magnitudes", "0.25,0.5,1"},
      {"export.target", "toeplitz:gaussian"},
      {"export.half_width", "0"},
      {"export.points", "41"},
  };
  return d;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

RunConfig::RunConfig() : values_(defaults()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  it->second = trim(value);
}

void RunConfig::set_assignment(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      set_assignment(line);
    } catch (const UsageError& e) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const { return parse_double(key, get(key)); }

int RunConfig::integer(const std::string& key) const {
  long long v = parse_int(key, get(key));
  if (v < -1000000000LL || v > 1000000000LL) throw UsageError("config key " + key + " out of range");
  return static_cast<int>(v);
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split(get(key), ',')) out.push_back(parse_double(key, s));
  return out;
}

std::vector<int> RunConfig::integers(const std::string& key) const {
  std::vector<int> out;
  for (const auto& s : split(get(key), ',')) out.push_back(static_cast<int>(parse_int(key, s)));
  return out;
}

FockParams RunConfig::model() const {
  FockParams p;
  p.n = integer("model.n");
  p.t = number("model.t");
  p.D = integer("model.D");
  p.Q = integer("model.Q");
  return p;
}

std::uint64_t RunConfig::seed() const {
  long long s = parse_int("seed", get("seed"));
  if (s < 0) throw UsageError("seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

void RunConfig::validate() const {
  try {
    model().validate();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(std::string("invalid model: ") + e.what());
  }
  if (number("conv.window") < 0) throw UsageError("conv.window must be >= 0");
  if (integer("conv.m") < 2) throw UsageError("conv.m must be >= 2");
  if (integer("threads") < 0) throw UsageError("threads must be >= 0");
  if (integer("verify.pairs") < 1) throw UsageError("verify.pairs must be >= 1");
  if (integer("export.points") < 2) throw UsageError("export.points must be >= 2");
  seed();
  for (const auto& [k, v] : values_)
    if (k.rfind("tol.", 0) == 0 && !(number(k) >= 0)) throw UsageError(k + " must be >= 0");
  for (int n : integers("approx.stages"))
    if (n < 1) throw UsageError("approx.stages entries must be >= 1");
  const std::string& b = get("approx.timings");
  if (b != "true" && b != "false") throw UsageError("approx.timings must be true or false");
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::map<std::string, std::string> RunConfig::embedded() const {
  auto m = values_;
  m.erase("threads");
  m.erase("output.dir");
  return m;
}

std::string RunConfig::dump_embedded() const {
  std::string out;
  for (const auto& [k, v] : embedded()) out += k + " = " + v + "\n";
  return out;
}

Point parse_point(const std::string& text, int n) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("expected a point 're,im', got '" + text + "'");
  Point z(n, 0.0);
  z[0] = {parse_double("point", parts[0]), parse_double("point", parts[1])};
  return z;
}

FockOperator parse_target(const std::string& spec, const FockParams& params, std::string* description) {
  auto parts = split(spec, ':');
  const std::string& kind = parts.empty() ? spec : parts[0];
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw UsageError("malformed target spec '" + spec + "'");
  };
  auto desc = [&](const std::string& d) {
    if (description) *description = d;
  };
  const int n = params.n;
  if (kind == "identity") {
    need(1, 1);
    desc("identity");
    return identity_operator(params);
  }
  if (kind == "projection") {
    need(1, 1);
    desc("P_C");
    return projection_constants(params);
  }
  if (kind == "weyl") {
    need(2, 2);
    Point z = parse_point(parts[1], n);
    desc("weyl" + format_point(z));
    return weyl(params, z);
  }
  if (kind == "rank-one") {
    need(2, 2);
    Point z = parse_point(parts[1], n);
    FockVector k = kernel_coefficients(params, z);
    desc("rank_one(k_z, k_z), z=" + format_point(z));
    return rank_one(k, k);
  }
  if (kind == "toeplitz") {
    need(2, 4);
    Symbol f = Symbol::constant(n, 1.0);
    if (parts[1] == "gaussian") {
      double width = parts.size() > 2 ? parse_double("width", parts[2]) : 4.0;
      if (!(width > 0)) throw UsageError("gaussian width must be positive");
      Point c = parts.size() > 3 ? parse_point(parts[3], n) : parse_point("0.5,0", n);
      f = Symbol::gaussian(c, width);
    } else if (parts[1] == "planewave") {
      need(3, 3);
      f = Symbol::plane_wave(parse_point(parts[2], n));
    } else {
      throw UsageError("unknown toeplitz symbol '" + parts[1] + "'");
    }
    desc("toeplitz(" + f.describe() + ")");
    return toeplitz(params, f);
  }
  throw UsageError("unknown target kind '" + kind + "'");
}

namespace {

struct Context {
  RunConfig cfg;
  FockParams params;
  fs::path out_dir;
  std::ostream* out;
  std::ostream* err;

  Json config_json() const {
    Json j = Json::object();
    for (const auto& [k, v] : cfg.embedded()) j[k] = v;
    return j;
  }
  std::string csv_header() const { return io::comment_block(cfg.dump_embedded()); }

  ConvolutionConfig conv() const {
    ConvolutionConfig c;
    c.window = cfg.number("conv.window");
    c.m = cfg.integer("conv.m");
    c.instability_tol = cfg.number("tol.window");
    return c;
  }

  void write(const fs::path& rel, const std::string& text) const {
    fs::path p = out_dir / rel;
    fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << text;
  }
  void write_json(const fs::path& rel, Json j) const {
    j["config"] = config_json();
    write(rel, j.dump(2) + "\n");
  }
};

// ---- verify ---------------------------------------------------------------

struct IdentityResult {
  std::string name;
  std::string operands;
  double residual = 0;
  double tolerance = 0;
  std::vector<std::string> flags;
  bool pass() const { return residual <= tolerance && flags.empty(); }
};

std::vector<Point> unit_samples(int n) {
  std::vector<Point> zs;
  for (cplx c : {cplx(0.5, 0), cplx(0, 0.5), cplx(0.6, 0.8), cplx(-0.3, 0.4), cplx(-0.7071, -0.7071)}) {
    Point z(n, 0.0);
    z[0] = c;
    zs.push_back(z);
  }
  return zs;
}

IdentityResult check_orthonormality(const Context& c) {
  const FockParams& p = c.params;
  GaussGrid grid = gaussian_grid(p);
  Basis basis(p);
  const std::size_t d = basis.size();
  const auto di = static_cast<Eigen::Index>(d);
  CMatrix g = parallel::chunked_reduce(
      grid.size(), CMatrix(CMatrix::Zero(di, di)),
      [&](std::size_t b, std::size_t e, CMatrix& acc) {
        CVector ev(di);
        for (std::size_t i = b; i < e; ++i) {
          basis.evaluate(grid.node(i), ev.data());
          acc.noalias() += grid.weight(i) * (ev.conjugate() * ev.transpose());
        }
      },
      [](CMatrix a, const CMatrix& b) { return CMatrix(a + b); }, parallel::matrix_chunk(grid.size(), d));
  double r = (g - CMatrix::Identity(di, di)).cwiseAbs().maxCoeff();
  return {"orthonormality", "basis e_a, |a| <= D", r, c.cfg.number("tol.orthonormality"), {}};
}

IdentityResult check_toeplitz_constant(const Context& c) {
  FockOperator t1 = toeplitz(c.params, Symbol::constant(c.params.n, 1.0));
  double r = (t1.m - identity_operator(c.params).m).cwiseAbs().maxCoeff();
  return {"toeplitz_constant", "T_1 vs identity", r, c.cfg.number("tol.orthonormality"), {}};
}

IdentityResult check_parity(const Context& c) {
  FockOperator u = parity_matrix(c.params);
  double r = ((u * u).m - identity_operator(c.params).m).cwiseAbs().maxCoeff();
  return {"parity_involution", "U U vs identity", r, 0.0, {}};
}

IdentityResult check_weyl_inverse(const Context& c) {
  double r = 0;
  for (const auto& z : unit_samples(c.params.n)) {
    FockOperator w = weyl(c.params, z), wm = weyl(c.params, -z);
    r = std::max(r, trusted_norm(w * wm - identity_operator(c.params)));
  }
  return {"weyl_inverse", "W_z W_{-z} on degrees <= D/2, |z| <= 1", r, c.cfg.number("tol.inverse"), {}};
}

IdentityResult check_weyl_commutation(const Context& c) {
  double r = 0;
  auto zs = unit_samples(c.params.n);
  for (std::size_t i = 0; i < zs.size(); ++i)
    for (std::size_t j = 0; j < zs.size(); ++j) {
      const Point &z = zs[i], &w = zs[j];
      cplx dot = 0;
      for (int k = 0; k < c.params.n; ++k) dot += z[k] * std::conj(w[k]);
      cplx phase = std::polar(1.0, -dot.imag() / c.params.t);
      FockOperator lhs = weyl(c.params, z) * weyl(c.params, w);
      FockOperator rhs = phase * weyl(c.params, z + w);
      r = std::max(r, trusted_norm(lhs - rhs));
    }
  return {"weyl_commutation", "W_z W_w vs phase W_{z+w} on degrees <= D/2", r, c.cfg.number("tol.weyl"), {}};
}

IdentityResult check_berezin(const Context& c) {
  const FockParams& p = c.params;
  double rad = std::sqrt(p.t * p.D) / 2;
  double r = 0;
  WindowOptions wo;
  wo.half_width = rad / std::sqrt(2.0 * p.n);
  wo.points = 21;
  for (cplx z0c : {cplx(0, 0), cplx(0.5, 0.5), cplx(rad / 2, 0), cplx(0, -rad / std::sqrt(2.0))}) {
    Point z0(p.n, 0.0);
    z0[0] = z0c;
    FockVector k = kernel_coefficients(p, z0);
    GridFunction g = berezin_grid(rank_one(k, k), wo);
    for (std::size_t i = 0; i < g.size(); ++i) {
      Point z = g.node(i);
      r = std::max(r, std::abs(g.values[i] - std::exp(-norm2(z - z0) / p.t)));
    }
  }
  return {"berezin_closed_form", "berezin(k_z0 (x) k_z0) vs exp(-|z-z0|^2/t)", r, c.cfg.number("tol.berezin"), {}};
}

IdentityResult check_trace(const Context& c) {
  Diagnostics diag;
  double r = 0;
  int pairs = c.cfg.integer("verify.pairs");
  for (int k = 0; k < pairs; ++k) {
    FockOperator a = random_finite_rank(c.params, 2, c.cfg.seed() * 1000 + 2 * k);
    FockOperator b = random_finite_rank(c.params, 3, c.cfg.seed() * 1000 + 2 * k + 1);
    r = std::max(r, trace_identity_residual(a, b, c.conv(), &diag));
  }
  r = std::max(r, trace_identity_residual(projection_constants(c.params), projection_constants(c.params), c.conv(), &diag));
  return {"trace_identity", "int A*B dV vs (pi t)^n Tr A Tr B, seeded rank-2/rank-3 pairs and P_C", r,
          c.cfg.number("tol.trace"), diag.flags};
}

IdentityResult check_duality(const Context& c) {
  Diagnostics diag;
  const int n = c.params.n;
  Symbol f = Symbol::heat_kernel(n, c.params.t);
  double r = 0;
  auto a1 = random_finite_rank(c.params, 1, c.cfg.seed() * 1000 + 101);
  auto a2 = random_finite_rank(c.params, 1, c.cfg.seed() * 1000 + 102);
  auto b = random_finite_rank(c.params, 1, c.cfg.seed() * 1000 + 103);
  for (double v : adjoint_duality_residuals(f, a1, a2, b, c.conv(), &diag)) r = std::max(r, v);
  auto pc = projection_constants(c.params);
  for (double v : adjoint_duality_residuals(f, pc, pc, pc, c.conv(), &diag)) r = std::max(r, v);
  return {"adjoint_duality", "f_t with seeded rank-1 operators and with P_C", r, c.cfg.number("tol.duality"),
          diag.flags};
}

IdentityResult check_commutativity(const Context& c) {
  auto a = random_finite_rank(c.params, 2, c.cfg.seed() * 1000 + 201);
  auto b = random_finite_rank(c.params, 2, c.cfg.seed() * 1000 + 202);
  WindowOptions wo;
  wo.points = 11;
  const Symbol sab = conv_op_op(a, b, wo);
  const Symbol sba = conv_op_op(b, a, wo);
  const GridFunction& ab = *sab.as_grid();
  const GridFunction& ba = *sba.as_grid();
  double r = 0;
  for (std::size_t i = 0; i < ab.size(); ++i) r = std::max(r, std::abs(ab.values[i] - ba.values[i]));
  return {"commutativity", "A*B vs B*A on the trusted grid", r, c.cfg.number("tol.commutativity"), {}};
}

IdentityResult check_two_pipeline(const Context& c) {
  Diagnostics diag;
  const int n = c.params.n;
  Point c0(n, 0.0), zeta(n, 0.0);
  c0[0] = {0.5, 0.0};
  zeta[0] = {1.0, 0.5};
  double r = 0;
  for (const Symbol& f : {Symbol::gaussian(c0, 4.0), Symbol::plane_wave(zeta)}) {
    FockOperator a = toeplitz(c.params, f);
    FockOperator b = toeplitz_via_convolution(c.params, f, c.conv(), &diag);
    r = std::max(r, (a.m - b.m).norm() / a.m.norm());
  }
  return {"toeplitz_two_pipeline", "toeplitz(f) vs R_t * f for a Gaussian bump and a plane wave", r,
          c.cfg.number("tol.pipeline"), diag.flags};
}

IdentityResult check_window(const Context& c) {
  Diagnostics diag;
  auto pc = projection_constants(c.params);
  conv_fun_op(Symbol::heat_kernel(c.params.n, c.params.t), pc, c.conv(), &diag);
  double r = trace_identity_residual(pc, pc, c.conv());
  return {"window_stability", "f_t * P_C shell mass and P_C * P_C mass", r, c.cfg.number("tol.trace"), diag.flags};
}

const std::vector<std::pair<std::string, std::function<IdentityResult(const Context&)>>>& identity_suite() {
  static const std::vector<std::pair<std::string, std::function<IdentityResult(const Context&)>>> s = {
      {"orthonormality", check_orthonormality},
      {"toeplitz_constant", check_toeplitz_constant},
      {"parity_involution", check_parity},
      {"weyl_inverse", check_weyl_inverse},
      {"weyl_commutation", check_weyl_commutation},
      {"berezin_closed_form", check_berezin},
      {"trace_identity", check_trace},
      {"adjoint_duality", check_duality},
      {"commutativity", check_commutativity},
      {"toeplitz_two_pipeline", check_two_pipeline},
      {"window_stability", check_window},
  };
  return s;
}

int cmd_verify(const Context& c) {
  std::vector<std::string> selected;
  const std::string& suite = c.cfg.get("suite");
  if (suite == "all") {
    for (const auto& [name, fn] : identity_suite()) selected.push_back(name);
  } else {
    for (const auto& s : split(suite, ',')) {
      bool known = std::any_of(identity_suite().begin(), identity_suite().end(),
                               [&](const auto& e) { return e.first == s; });
      if (!known) throw UsageError("unknown identity '" + s + "' in suite");
      selected.push_back(s);
    }
  }
  Json summary = Json::array();
  std::vector<std::string> failed;
  for (const auto& [name, fn] : identity_suite()) {
    if (std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
    IdentityResult r = fn(c);
    Json j{{"schema_version", io::kSchemaVersion}, {"identity", r.name},      {"operands", r.operands},
           {"residual", r.residual},               {"tolerance", r.tolerance}, {"pass", r.pass()},
           {"flags", r.flags}};
    c.write_json(fs::path("verify") / (name + ".json"), j);
    summary.push_back({{"identity", r.name}, {"residual", r.residual}, {"pass", r.pass()}});
    *c.out << (r.pass() ? "PASS " : "FAIL ") << name << " residual=" << io::fmt(r.residual)
           << " tolerance=" << io::fmt(r.tolerance) << "\n";
    for (const auto& f : r.flags) *c.out << "  flag: " << f << "\n";
    if (!r.pass()) failed.push_back(name);
  }
  c.write_json("verify/summary.json", Json{{"schema_version", io::kSchemaVersion}, {"results", summary}});
  if (!failed.empty()) {
    for (const auto& f : failed) *c.err << "identity failed: " << f << "\n";
    return kToleranceFailure;
  }
  return kOk;
}

// ---- approx ---------------------------------------------------------------

int cmd_approx(const Context& c) {
  std::string desc;
  FockOperator a = parse_target(c.cfg.get("approx.target"), c.params, &desc);
  ApproxConfig ac;
  ac.conv = c.conv();
  ac.layout.pitch = c.cfg.number("fit.pitch");
  ac.layout.radius = c.cfg.number("fit.radius");
  ac.fit.ridge = c.cfg.number("fit.ridge");
  ac.fit.m = c.cfg.integer("fit.m");
  ac.fit.irls_passes = c.cfg.integer("fit.irls_passes");
  ApproximationReport rep = toeplitz_approximation(a, c.cfg.integers("approx.stages"), ac, desc);
  Json j = io::to_json(rep, c.cfg.get("approx.timings") == "true");
  c.write_json("approx.json", j);
  std::ostringstream csv;
  io::write_report_csv(csv, rep, c.csv_header());
  c.write("approx.csv", csv.str());
  for (const auto& st : rep.stages)
    *c.out << "N=" << st.N << " op_error=" << io::fmt(st.op_error) << " baseline=" << io::fmt(st.baseline_error)
           << " l1=" << io::fmt(st.fit.l1_residual) << "\n";
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

std::vector<double> values_or(const Context& c, std::vector<double> fallback) {
  if (c.cfg.get("sweep.values") == "auto") return fallback;
  return c.cfg.numbers("sweep.values");
}

std::string choice(const Context& c, const std::string& key, const std::string& fallback) {
  const std::string& v = c.cfg.get(key);
  return v == "auto" ? fallback : v;
}

int cmd_sweep(const Context& c) {
  const std::string kind = c.cfg.get("sweep.kind");
  const int n = c.params.n;
  const double slack = c.cfg.number("tol.sweep_slack");
  Json meta{{"schema_version", io::kSchemaVersion}, {"kind", kind}, {"params", io::to_json(c.params)},
            {"seed", c.cfg.seed()}};
  std::ostringstream csv;
  int status = kOk;

  if (kind == "quantization") {
    auto ts = values_or(c, {1, 0.5, 0.25, 0.125});
    std::string sym = choice(c, "sweep.symbol", "gaussian");
    Symbol g = Symbol::gaussian(Point(n, 0.0), 4.0);
    Symbol f = g;
    if (sym == "planewave")
      f = Symbol::plane_wave(parse_point("0.5,0", n));
    else if (sym != "gaussian")
      throw UsageError("quantization sweep: sweep.symbol must be gaussian or planewave");
    auto recs = quantization_sweep(f, g, ts, c.params);
    io::write_sweep_csv(csv, recs, c.csv_header());
    std::vector<double> op, sup;
    Json rows = Json::array();
    for (const auto& r : recs) {
      op.push_back(r.quantity("op_gap"));
      sup.push_back(r.quantity("sup_gap"));
      rows.push_back(io::to_json(r));
    }
    bool ok = monotone_within(op, slack) && monotone_within(sup, slack);
    meta["records"] = rows;
    meta["monotone_within_slack"] = ok;
    meta["slack"] = slack;
    if (!ok) status = kToleranceFailure;
  } else if (kind == "approx-identity") {
    std::string desc;
    FockOperator a = parse_target(choice(c, "sweep.target", "toeplitz:gaussian"), c.params, &desc);
    auto pts = approximate_identity_sweep(a, values_or(c, {1, 0.5, 0.25, 0.125}));
    csv << c.csv_header() << "s,error,error_trusted\n";
    std::vector<double> errs;
    Json rows = Json::array();
    for (const auto& p : pts) {
      csv << io::fmt(p.s) << "," << io::fmt(p.error) << "," << io::fmt(p.error_trusted) << "\n";
      errs.push_back(p.error);
      rows.push_back({{"s", p.s}, {"error", p.error}, {"error_trusted", p.error_trusted}});
    }
    bool ok = monotone_within(errs, c.cfg.number("tol.slack"));
    meta["target"] = desc;
    meta["records"] = rows;
    meta["monotone_within_slack"] = ok;
    if (!ok) status = kToleranceFailure;
  } else if (kind == "compactness") {
    std::string desc;
    FockOperator a = parse_target(choice(c, "sweep.target", "identity"), c.params, &desc);
    double rmax = std::sqrt(c.params.trusted_radius2());
    std::vector<double> radii;
    for (int k = 0; k <= 8; ++k) radii.push_back(rmax * k / 8);
    radii = values_or(c, radii);
    Diagnostics diag;
    auto prof = compactness_diagnostic(a, radii, 64, &diag);
    csv << c.csv_header() << "radius,max_abs_berezin\n";
    for (std::size_t i = 0; i < prof.radii.size(); ++i)
      csv << io::fmt(prof.radii[i]) << "," << io::fmt(prof.max_abs[i]) << "\n";
    std::ostringstream sv;
    io::write_values_csv(sv, prof.singular_values, "singular_value", c.csv_header());
    c.write("sweep_compactness_singular_values.csv", sv.str());
    meta["target"] = desc;
    meta["radii"] = prof.radii;
    meta["max_abs"] = prof.max_abs;
    meta["flags"] = diag.flags;
  } else if (kind == "invariance") {
    std::string sym = choice(c, "sweep.symbol", "horizontal");
    Symbol f = horizontal_symbol(n);
    Point dir(n, 0.0);
    dir[0] = {0, 1};
    bool negative = false;
    if (sym == "radial") {
      std::vector<double> r;
      std::vector<cplx> v;
      for (int k = 0; k <= 4000; ++k) {
        r.push_back(0.005 * k);
        v.push_back(std::exp(-r.back() * r.back() / 4));
      }
      f = Symbol::radial(n, r, v);
      dir[0] = {1, 0};
      negative = true;
    } else if (sym == "constant") {
      f = Symbol::constant(n, 1.0);
    } else if (sym != "horizontal") {
      throw UsageError("invariance sweep: sweep.symbol must be horizontal, radial or constant");
    }
    auto res = invariance_check(c.params, f, {dir}, c.cfg.numbers("sweep.magnitudes"));
    csv << c.csv_header() << "magnitude,residual\n";
    auto mags = c.cfg.numbers("sweep.magnitudes");
    for (std::size_t i = 0; i < res.residuals.size(); ++i)
      csv << io::fmt(mags[i]) << "," << io::fmt(res.residuals[i]) << "\n";
    meta["symbol"] = f.describe();
    meta["direction"] = {dir[0].real(), dir[0].imag()};
    meta["max_residual"] = res.max_residual;
    meta["negative_control"] = negative;
    if (negative) {
      bool detected = res.max_residual >= c.cfg.number("tol.negative_control");
      meta["negative_control_detected"] = detected;
      *c.out << "negative control: residual " << io::fmt(res.max_residual)
             << (detected ? " detected non-invariance\n" : " NOT detected\n");
      if (!detected) status = kToleranceFailure;
    } else {
      bool ok = res.max_residual <= c.cfg.number("tol.invariance");
      meta["invariant"] = ok;
      if (!ok) status = kToleranceFailure;
    }
  } else {
    throw UsageError("unknown sweep kind '" + kind + "'");
  }
  c.write("sweep_" + kind + ".csv", csv.str());
  c.write_json("sweep_" + kind + ".json", meta);
  *c.out << csv.str().substr(c.csv_header().size());
  return status;
}

// ---- exports --------------------------------------------------------------

int cmd_export_operator(const Context& c) {
  std::string desc;
  FockOperator a = parse_target(c.cfg.get("export.target"), c.params, &desc);
  std::ostringstream op;
  io::write_operator(op, a);
  c.write("operator.json", op.str());
  std::ostringstream sv;
  io::write_values_csv(sv, singular_values(a.m), "singular_value", c.csv_header() + "# target = " + desc + "\n");
  c.write("singular_values.csv", sv.str());
  *c.out << "wrote operator " << desc << " (dim " << a.dim() << ")\n";
  return kOk;
}

int cmd_export_berezin(const Context& c) {
  std::string desc;
  FockOperator a = parse_target(c.cfg.get("export.target"), c.params, &desc);
  WindowOptions wo;
  wo.half_width = c.cfg.number("export.half_width");
  wo.points = c.cfg.integer("export.points");
  Diagnostics diag;
  GridFunction g = berezin_grid(a, wo, &diag);
  std::ostringstream csv;
  std::string header = c.csv_header() + "# target = " + desc + "\n";
  for (const auto& f : diag.flags) header += "# flag: " + f + "\n";
  write_symbol_csv(csv, g, header);
  c.write("berezin.csv", csv.str());
  *c.out << "wrote Berezin transform of " << desc << " on " << g.size() << " points\n";
  return kOk;
}

const char* kColumnsHelp = R"(Output files (all embed the resolved config, minus threads and output.dir):
  verify/<identity>.json   identity, operands, residual, tolerance, pass, flags
  approx.csv               N, nodes, l1_residual, op_error, op_error_full, baseline_error, bound
  approx.json              per-stage fits (nodes, coefficients), errors, domination bound
  sweep_quantization.csv   parameter (t), op_gap, sup_gap
  sweep_approx-identity.csv s, error, error_trusted
  sweep_compactness.csv    radius, max_abs_berezin (+ singular values CSV)
  sweep_invariance.csv     magnitude, residual
  operator.json            operator container (params, basis, row-major [re, im])
  singular_values.csv      index, singular_value
  berezin.csv              re_z1, im_z1, ..., re_value, im_value
Exit codes: 0 success, 1 tolerance failure, 2 usage or config error.)";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum harmonic analysis on truncated Fock spaces"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string config_file;
  std::vector<std::string> sets;
  bool print_config = false;
  std::string threads, seed, out_dir;
  std::string target, stages, kind, values, symbol;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "key = value config file");
    sub->add_option("--set", sets, "override a config key (key=value), repeatable");
    sub->add_flag("--print-config", print_config, "print the resolved config and exit");
    sub->add_option("--threads", threads, "worker thread cap (results do not depend on it)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out_dir, "output directory");
  };
  auto* verify = app.add_subcommand("verify", "run the identity suites");
  common(verify);
  auto* approx = app.add_subcommand("approx", "constructive Toeplitz approximation of a target operator");
  common(approx);
  approx->add_option("--target", target, "identity | projection | weyl:re,im | rank-one:re,im | toeplitz:gaussian[:width[:re,im]] | toeplitz:planewave:re,im");
  approx->add_option("--stages", stages, "comma separated N list");
  auto* sweep = app.add_subcommand("sweep", "experiment sweeps");
  common(sweep);
  sweep->add_option("--kind", kind, "quantization | approx-identity | compactness | invariance");
  sweep->add_option("--values", values, "comma separated parameter list");
  sweep->add_option("--symbol", symbol, "gaussian | planewave (quantization); horizontal | radial | constant (invariance)");
  sweep->add_option("--target", target, "target operator for approx-identity and compactness");
  auto* exp_op = app.add_subcommand("export-operator", "write an operator container and its singular values");
  common(exp_op);
  exp_op->add_option("--target", target, "target operator spec");
  auto* exp_b = app.add_subcommand("export-berezin", "write the Berezin transform on a grid");
  common(exp_b);
  exp_b->add_option("--target", target, "target operator spec");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& s : sets) cfg.set_assignment(s);
    if (!threads.empty()) cfg.set("threads", threads);
    if (!seed.empty()) cfg.set("seed", seed);
    if (!out_dir.empty()) cfg.set("output.dir", out_dir);
    if (approx->parsed()) {
      if (!target.empty()) cfg.set("approx.target", target);
      if (!stages.empty()) cfg.set("approx.stages", stages);
    }
    if (sweep->parsed()) {
      if (!kind.empty()) cfg.set("sweep.kind", kind);
      if (!values.empty()) cfg.set("sweep.values", values);
      if (!symbol.empty()) cfg.set("sweep.symbol", symbol);
      if (!target.empty()) cfg.set("sweep.target", target);
    }
    if ((exp_op->parsed() || exp_b->parsed()) && !target.empty()) cfg.set("export.target", target);
    cfg.validate();
    if (print_config) {
      out << cfg.dump();
      return kOk;
    }
    parallel::set_max_threads(static_cast<unsigned>(cfg.integer("threads")));

    Context ctx{cfg, cfg.model(), fs::path(cfg.get("output.dir")), &out, &err};
    if (verify->parsed()) return cmd_verify(ctx);
    if (approx->parsed()) return cmd_approx(ctx);
    if (sweep->parsed()) return cmd_sweep(ctx);
    if (exp_op->parsed()) return cmd_export_operator(ctx);
    return cmd_export_berezin(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kToleranceFailure;
  }
}

}  // namespace qha::cli
