#include "dhym/cli_io.hpp"

#include "dhym/core_geometry.hpp"
#include "dhym/kym_ndim.hpp"
#include "dhym/legendre.hpp"
#include "dhym/radius_limits.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#ifndef DHYM_VERSION
#define DHYM_VERSION "0.0.0"
#endif

namespace dhym::io {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void invalid(const std::string& msg) { raise(ErrorKind::InvalidConfig, msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) invalid(what + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(what + " must be finite");
  return x;
}

int integer(const json& v, const std::string& what) {
  if (!v.is_number_integer()) invalid(what + " must be an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) invalid(what + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, what));
  return out;
}

std::vector<std::vector<double>> square_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) invalid(what + " must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : v) rows.push_back(number_list(r, what));
  for (const auto& r : rows) {
    if (r.size() != rows.size()) raise(ErrorKind::DimensionMismatch, what + " must be square");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (rows[i][j] != rows[j][i]) invalid(what + " must be symmetric");
    }
  }
  return rows;
}

SymMatrix to_sym(const std::vector<std::vector<double>>& rows) {
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return SymMatrix(m);
}

void check_grid(int n, const std::string& what) {
  if (n < 16 || !spectral::is_power_of_two(n)) invalid(what + " must be a power of two >= 16");
}

std::vector<linops::TrialMode> trial_modes(const json& v, const std::string& what) {
  if (!v.is_array()) invalid(what + " must be an array of [k1, k2, cos, sin]");
  std::vector<linops::TrialMode> out;
  for (const auto& m : v) {
    if (!m.is_array() || m.size() != 4) invalid(what + " entries must be [k1, k2, cos, sin]");
    out.push_back({integer(m[0], what), integer(m[1], what), number(m[2], what), number(m[3], what)});
  }
  return out;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) invalid("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json trace_json(const std::vector<ode::TraceEntry>& trace) {
  json out = json::array();
  for (const auto& e : trace) out.push_back({{"t", e.t}, {"newton_iterations", e.newton_iterations}, {"residual", e.residual}});
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::vector<double> grid_nodes(int n) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = static_cast<double>(j) / n;
  return x;
}

struct Session {
  const RunConfig& config;
  std::ostream& log;
  bool verbose;
  json manifest;
  RunResult result;

  void info(const std::string& msg) {
    if (verbose) log << msg << '\n';
  }

  fs::path write(const std::string& name, const Table& table) {
    const fs::path path = config.output / name;
    write_csv(path, table);
    result.artifacts.push_back(path);
    info("wrote " + path.string());
    return path;
  }
};

json problem_constants(const ODEProblem& p) {
  const auto k = ode::coefficients(p);
  json d = {{"K0", k.K0}, {"C0", k.C0}, {"c_A", ode::compatibility_constant(p)}};
  if (p.regime == Regime::DHYM) {
    const auto tp = geometry::torus_constant_phase(p.F0);
    d["theta_hat"] = tp.phase.angle();
    d["phase_cos"] = tp.phase.cos;
    d["phase_sin"] = tp.phase.sin;
    d["N"] = tp.magnitude;
  }
  return d;
}

void cmd_solve(Session& s) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = build_problem(s.config);
  const auto bundle = ode::solve(p);
  s.manifest["timings"]["solve"] = seconds_since(t0);
  const int n = p.grid();

  const auto t1 = std::chrono::steady_clock::now();
  const auto mp = ode::max_principle_verify(bundle, p);
  const auto lifted = ode::lifted_residuals(bundle, p);
  s.manifest["timings"]["verify"] = seconds_since(t1);

  Table t;
  t.header = {"x", "phi", "phi_dd", "psi", "phiF", "residual"};
  t.columns = {grid_nodes(n), bundle.phi.values(), bundle.phi_dd, bundle.psi.values(), bundle.phiF.values(),
               bundle.residual};
  s.write("solution.csv", t);

  json derived = problem_constants(p);
  derived["datum_shift"] = bundle.datum_shift;
  derived["legendre_offset"] = bundle.legendre_offset;
  derived["max_principle"] = {{"x_bar", mp.x_bar}, {"lhs", mp.lhs}, {"bound", mp.bound}, {"margin", mp.margin},
                              {"holds", mp.holds}};
  derived["lifted_residuals"] = {{"first", lifted.first}, {"second", lifted.second}, {"ma_defect", lifted.ma_defect}};
  s.manifest["derived"] = derived;
  s.manifest["trace"] = trace_json(bundle.trace);
  s.manifest["newton_history"] = bundle.newton_history;
  s.manifest["residual_norm"] = bundle.residual_norm;
  s.info("residual " + format_double(bundle.residual_norm) + " after " + std::to_string(bundle.trace.size() - 1) +
         " continuation steps");
}

void cmd_phase(Session& s) {
  const auto& F0 = s.config.f0;
  const auto tp = geometry::torus_constant_phase(F0);
  json d = {{"theta_hat", tp.phase.angle()},
            {"phase_cos", tp.phase.cos},
            {"phase_sin", tp.phase.sin},
            {"N", tp.magnitude},
            {"average_radius", geometry::average_radius(F0.matrix())},
            {"unit_defect", std::abs(tp.phase.cos * tp.phase.cos + tp.phase.sin * tp.phase.sin - 1.0)}};
  if (F0.b != 0.0) {
    const double k = geometry::phase_positivity_constant(F0, tp.phase);
    d["positivity_constant"] = k;
    d["positivity_identity"] = F0.b * F0.b * tp.magnitude / (1.0 + F0.b * F0.b + F0.c * F0.c);
  }
  const auto lambdas = geometry::pencil_eigenvalues(SymMatrix::identity(2), F0.matrix());
  const auto sd = geometry::phase_radius(lambdas);
  d["lambdas"] = sd.lambdas;
  d["theta"] = sd.theta;
  d["radius"] = sd.radius;
  s.manifest["derived"] = d;

  Table t;
  t.header = {"theta_hat", "cos", "sin", "N", "average_radius"};
  t.columns = {{tp.phase.angle()}, {tp.phase.cos}, {tp.phase.sin}, {tp.magnitude}, {geometry::average_radius(F0.matrix())}};
  s.write("phase.csv", t);
}

SymMatrix expand_matrix(const RunConfig& c) {
  if (!c.expand.f0.empty()) return to_sym(c.expand.f0);
  return c.f0.matrix();
}

void cmd_expand(Session& s) {
  const auto data = CohomologyData::from(expand_matrix(s.config));
  json d = {{"n", data.n}, {"e", data.e}, {"c_large", data.c_large}, {"c_small", finite_or_null(data.c_small)}};

  const auto large = limits::large_radius_phase_check(data, s.config.expand.t_large);
  s.write("expansion_large.csv", Table{{"t", "error"}, {large.t, large.error}});
  d["large"] = {{"slope", finite_or_null(large.slope)}, {"monotone", large.monotone}};

  try {
    const auto small = limits::small_radius_phase_check(data, s.config.expand.t_small);
    s.write("expansion_small.csv", Table{{"t", "error"}, {small.t, small.error}});
    d["small"] = {{"slope", finite_or_null(small.slope)}, {"monotone", small.monotone}};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateTopPower) throw;
    d["small"] = {{"skipped", e.what()}};
  }
  s.manifest["derived"] = d;
}

void cmd_limits(Session& s) {
  if (s.config.regime == Regime::DHYM) invalid("limits needs regime large_radius or small_radius");
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = build_problem(s.config);
  const auto study = limits::limit_convergence_study(p, s.config.limits.t);
  s.manifest["timings"]["limits"] = seconds_since(t0);
  s.write("limits.csv", Table{{"t", "difference", "scaled_K0"}, {study.t, study.difference, study.scaled_K0}});
  s.manifest["derived"] = {{"limit_K0", study.limit_K0},
                           {"order", finite_or_null(study.order)},
                           {"noise_floor", study.noise_floor}};
}

void cmd_legendre(Session& s) {
  const auto psi = build_datum(s.config);
  const int n = psi.size();
  const auto fwd = legendre::legendre_forward(psi);
  const auto back = legendre::legendre_forward(fwd.phi);
  const auto psi_dd = psi.derivative(2);
  const auto phi_dd = fwd.phi.derivative(2);
  std::vector<double> xs(n);
  for (int j = 0; j < n; ++j) xs[j] = fwd.map.inverse(static_cast<double>(j) / n);

  std::vector<double> product(n), involution(n);
  double duality = 0.0, inv_err = 0.0;
  for (int j = 0; j < n; ++j) {
    product[j] = (1.0 + psi_dd[j]) * (1.0 + spectral::interpolate(phi_dd, xs[j]));
    involution[j] = back.phi[j] - psi[j];
    duality = std::max(duality, std::abs(product[j] - 1.0));
    inv_err = std::max(inv_err, std::abs(involution[j]));
  }
  const auto y_of_x = fwd.map.node_values();

  Table t;
  t.header = {"y", "psi", "x", "phi", "y_of_x", "duality_product", "involution_error"};
  t.columns = {grid_nodes(n), psi.values(), xs, fwd.phi.values(), y_of_x, product, involution};
  s.write("legendre.csv", t);
  s.manifest["derived"] = {{"offset", fwd.offset}, {"duality_defect", duality}, {"involution_error", inv_err}};
}

void cmd_residual(Session& s) {
  if (s.config.residual_input.empty()) invalid("residual command needs residual.input");
  const auto table = read_csv(s.config.residual_input);
  auto column = [&](const std::string& name) -> const std::vector<double>& {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return table.columns[i];
    }
    invalid("solution CSV lacks column '" + name + "'");
  };
  const auto& sigma = column("phi_dd");
  const auto& stored = column("residual");
  RunConfig cfg = s.config;
  cfg.grid = static_cast<int>(sigma.size());
  const auto p = build_problem(cfg);
  const auto k = ode::coefficients(p);
  const auto projected = ode::project_datum(p.datum, p);
  const auto r = ode::curvature_residual(sigma, projected.datum.values(), k);

  std::vector<double> diff(r.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    diff[i] = r[i] - stored[i];
    worst = std::max(worst, std::abs(diff[i]));
  }
  s.write("residual.csv", Table{{"x", "residual", "stored", "difference"}, {column("x"), r, stored, diff}});
  s.manifest["derived"] = problem_constants(p);
  s.manifest["derived"]["residual_norm"] = spectral::sup_norm(r);
  s.manifest["derived"]["roundtrip_difference"] = worst;
}

void cmd_lincheck(Session& s) {
  const auto& lc = s.config.lincheck;
  const SymMatrix B = lc.b.empty() ? s.config.f0.matrix() : to_sym(lc.b);
  if (B.dim() != 2) raise(ErrorKind::DimensionMismatch, "lincheck.b must be 2x2");
  const int n = lc.grid;

  const auto t0 = std::chrono::steady_clock::now();
  const auto ctx = LinearizedContext::at_solution(linops::band_limited(n, lc.background), B);

  std::mt19937_64 rng(lc.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const int kmax = std::max(1, n / 8);
  std::uniform_int_distribution<int> wave(-kmax, kmax);
  auto random_modes = [&]() {
    std::vector<linops::TrialMode> modes;
    for (int m = 0; m < 4; ++m) {
      int k1 = 0, k2 = 0;
      while (k1 == 0 && k2 == 0) {
        k1 = wave(rng);
        k2 = wave(rng);
      }
      modes.push_back({k1, k2, coeff(rng), coeff(rng)});
    }
    return modes;
  };

  std::vector<TorusField2D> trials;
  for (int i = 0; i < lc.trials; ++i) trials.push_back(linops::band_limited(n, random_modes()));
  const double rayleigh = lc.trials > 0 ? linops::negativity_check(ctx, trials)
                                        : -std::numeric_limits<double>::infinity();

  const auto xi_modes = random_modes();
  const auto gamma_modes = random_modes();
  const double defect = linops::selfadjointness_defect(ctx, linops::band_limited(n, xi_modes),
                                                       linops::band_limited(n, gamma_modes));
  const auto study = linops::selfadjointness_refinement(lc.background, B, xi_modes, gamma_modes, lc.refinement);
  s.manifest["timings"]["lincheck"] = seconds_since(t0);

  std::vector<double> grids(study.grids.begin(), study.grids.end());
  s.write("lincheck_refinement.csv", Table{{"grid", "defect"}, {grids, study.defects}});
  s.manifest["derived"] = {{"max_rayleigh", finite_or_null(rayleigh)},
                           {"selfadjointness_defect", defect},
                           {"refinement_order", finite_or_null(study.order)}};
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DegeneratePhase:
    case ErrorKind::DegenerateDenominator:
    case ErrorKind::DegenerateTopPower:
    case ErrorKind::PhasePreconditionViolated:
      return kExitInvalid;
    case ErrorKind::SmallRadiusObstruction:
      return kExitObstruction;
    case ErrorKind::NotConvex:
    case ErrorKind::NotMonotone:
    case ErrorKind::SingularLinearization:
    case ErrorKind::SingularElliptic:
    case ErrorKind::ContinuationStalled:
    case ErrorKind::ConvexityLost:
      return kExitNonConvergence;
    case ErrorKind::NonPositiveMetric:
    case ErrorKind::NonPeriodicCurvature:
    case ErrorKind::InvariantViolation:
      return kExitInternal;
  }
  return kExitInternal;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

void write_csv(const fs::path& path, const Table& table) {
  if (table.header.size() != table.columns.size()) raise(ErrorKind::DimensionMismatch, "CSV header/column count");
  std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
  for (const auto& c : table.columns) {
    if (c.size() != rows) raise(ErrorKind::DimensionMismatch, "CSV columns differ in length");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::string text;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) text += ',';
    text += table.header[i];
  }
  text += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) text += ',';
      text += format_double(table.columns[i][r]);
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::InvalidConfig, "cannot write " + path.string());
  out << text;
}

Table read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) invalid("empty CSV " + path.string());
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  t.columns.assign(t.header.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= t.columns.size()) invalid("ragged CSV " + path.string());
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) invalid("non-numeric CSV cell '" + cell + "'");
      t.columns[i++].push_back(v);
    }
    if (i != t.columns.size()) invalid("ragged CSV " + path.string());
  }
  return t;
}

RunConfig parse_config(std::string_view text, const fs::path& base_dir, const Overrides& overrides) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    invalid(std::string("malformed JSON: ") + e.what());
  }
  check_keys(j, "config", {"regime", "f0", "alpha", "datum", "grid", "tolerances", "output", "expand", "limits",
                           "lincheck", "residual"});
  RunConfig c;
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  if (j.contains("regime")) {
    if (!j["regime"].is_string()) invalid("regime must be a string");
    c.regime = parse_regime(j["regime"].get<std::string>());
  }
  if (j.contains("f0")) {
    const auto f = number_list(j["f0"], "f0");
    if (f.size() != 3) raise(ErrorKind::DimensionMismatch, "f0 must be [a, b, c]");
    c.f0 = {f[0], f[1], f[2]};
  } else {
    invalid("missing f0");
  }
  if (j.contains("alpha")) c.alpha = number(j["alpha"], "alpha");
  if (c.alpha < 0.0) invalid("alpha must be non-negative");

  if (j.contains("datum")) {
    const auto& d = j["datum"];
    check_keys(d, "datum", {"kind", "coefficients", "constant", "file"});
    if (d.contains("kind")) {
      if (!d["kind"].is_string()) invalid("datum.kind must be a string");
      c.datum.kind = d["kind"].get<std::string>();
    }
    if (d.contains("constant")) c.datum.constant = number(d["constant"], "datum.constant");
    if (c.datum.kind == "fourier") {
      if (d.contains("file")) invalid("datum.file is only valid for kind 'samples'");
      if (d.contains("coefficients")) {
        if (!d["coefficients"].is_array()) invalid("datum.coefficients must be an array of [k, cos, sin]");
        for (const auto& m : d["coefficients"]) {
          if (!m.is_array() || m.size() != 3) invalid("datum.coefficients entries must be [k, cos, sin]");
          const int k = integer(m[0], "datum.coefficients k");
          if (k < 1) invalid("datum.coefficients k must be >= 1");
          c.datum.modes.push_back({k, number(m[1], "datum.coefficients"), number(m[2], "datum.coefficients")});
        }
      }
    } else if (c.datum.kind == "samples") {
      if (d.contains("coefficients")) invalid("datum.coefficients is only valid for kind 'fourier'");
      if (!d.contains("file") || !d["file"].is_string()) invalid("datum.file is required for kind 'samples'");
      c.datum.file = resolve(d["file"].get<std::string>());
    } else {
      invalid("datum.kind must be 'fourier' or 'samples'");
    }
  }

  if (j.contains("grid")) c.grid = integer(j["grid"], "grid");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    check_keys(t, "tolerances", {"residual", "step_floor", "max_newton"});
    if (t.contains("residual")) c.tol.residual = number(t["residual"], "tolerances.residual");
    if (t.contains("step_floor")) c.tol.step_floor = number(t["step_floor"], "tolerances.step_floor");
    if (t.contains("max_newton")) c.tol.max_newton = integer(t["max_newton"], "tolerances.max_newton");
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) invalid("output must be a string");
    c.output = resolve(j["output"].get<std::string>());
  } else {
    c.output = base_dir / c.output;
  }

  if (j.contains("expand")) {
    const auto& e = j["expand"];
    check_keys(e, "expand", {"f0_matrix", "t_large", "t_small"});
    if (e.contains("f0_matrix")) c.expand.f0 = square_matrix(e["f0_matrix"], "expand.f0_matrix");
    if (e.contains("t_large")) c.expand.t_large = number_list(e["t_large"], "expand.t_large");
    if (e.contains("t_small")) c.expand.t_small = number_list(e["t_small"], "expand.t_small");
  }
  if (j.contains("limits")) {
    const auto& l = j["limits"];
    check_keys(l, "limits", {"t"});
    if (l.contains("t")) c.limits.t = number_list(l["t"], "limits.t");
  }
  if (j.contains("lincheck")) {
    const auto& l = j["lincheck"];
    check_keys(l, "lincheck", {"grid", "b", "background", "refinement", "trials", "seed"});
    if (l.contains("grid")) c.lincheck.grid = integer(l["grid"], "lincheck.grid");
    if (l.contains("b")) c.lincheck.b = square_matrix(l["b"], "lincheck.b");
    if (l.contains("background")) c.lincheck.background = trial_modes(l["background"], "lincheck.background");
    if (l.contains("refinement")) {
      c.lincheck.refinement.clear();
      for (const auto& g : l["refinement"]) c.lincheck.refinement.push_back(integer(g, "lincheck.refinement"));
    }
    if (l.contains("trials")) c.lincheck.trials = integer(l["trials"], "lincheck.trials");
    if (l.contains("seed")) {
      if (!l["seed"].is_number_unsigned()) invalid("lincheck.seed must be a non-negative integer");
      c.lincheck.seed = l["seed"].get<std::uint64_t>();
    }
    if (c.lincheck.grid < 8) invalid("lincheck.grid must be >= 8");
    if (c.lincheck.trials < 0) invalid("lincheck.trials must be >= 0");
  }
  if (j.contains("residual")) {
    const auto& r = j["residual"];
    check_keys(r, "residual", {"input"});
    if (r.contains("input")) {
      if (!r["input"].is_string()) invalid("residual.input must be a string");
      c.residual_input = resolve(r["input"].get<std::string>());
    }
  }

  if (overrides.out) c.output = *overrides.out;
  if (overrides.grid) c.grid = *overrides.grid;
  if (overrides.tol) c.tol.residual = *overrides.tol;

  check_grid(c.grid, "grid");
  if (!(c.tol.residual > 0.0)) invalid("tolerances.residual must be positive");
  if (!(c.tol.step_floor > 0.0 && c.tol.step_floor < 1.0)) invalid("tolerances.step_floor must lie in (0, 1)");
  if (c.tol.max_newton < 1) invalid("tolerances.max_newton must be >= 1");

  c.canonical = j.dump();
  c.hash = fnv1a(c.canonical);
  return c;
}

RunConfig load_config(const fs::path& path, const Overrides& overrides) {
  return parse_config(read_file(path), path.parent_path(), overrides);
}

PeriodicProfile build_datum(const RunConfig& c) {
  if (c.datum.kind == "samples") {
    const auto t = read_csv(c.datum.file);
    if (t.columns.empty()) invalid("datum file has no columns");
    const auto& v = t.columns.back();
    if (static_cast<int>(v.size()) != c.grid) {
      raise(ErrorKind::DimensionMismatch, "datum file has " + std::to_string(v.size()) + " samples, grid is " +
                                              std::to_string(c.grid));
    }
    return PeriodicProfile(v);
  }
  return PeriodicProfile::from_series(c.grid, c.datum.modes, c.datum.constant);
}

ODEProblem build_problem(const RunConfig& c) {
  return ODEProblem::make(c.regime, c.alpha, c.f0, build_datum(c), c.tol);
}

RunResult run(const Options& options, std::ostream& log) {
  static const std::set<std::string> commands{"solve", "phase", "expand", "lincheck", "residual", "legendre", "limits"};
  RunResult failure;
  try {
    if (!commands.count(options.command)) invalid("unknown command '" + options.command + "'");
    const RunConfig config = load_config(options.config, options.overrides);
    Session s{config, log, options.verbose, json::object(), {}};
    const auto t0 = std::chrono::steady_clock::now();

    s.manifest["version"] = DHYM_VERSION;
    s.manifest["command"] = options.command;
    s.manifest["config_hash"] = hex(config.hash);
    s.manifest["config"] = json::parse(config.canonical);
    s.manifest["regime"] = to_string(config.regime);
    s.manifest["grid"] = config.grid;
    const char* threads = std::getenv("DHYM_THREADS");
    s.manifest["threads"] = threads ? json(threads) : json(nullptr);

    if (options.command == "solve") cmd_solve(s);
    else if (options.command == "phase") cmd_phase(s);
    else if (options.command == "expand") cmd_expand(s);
    else if (options.command == "lincheck") cmd_lincheck(s);
    else if (options.command == "residual") cmd_residual(s);
    else if (options.command == "legendre") cmd_legendre(s);
    else cmd_limits(s);

    s.manifest["timings"]["total"] = seconds_since(t0);
    const fs::path mpath = config.output / "manifest.json";
    fs::create_directories(config.output);
    std::ofstream(mpath, std::ios::binary | std::ios::trunc) << s.manifest.dump(2) << '\n';
    s.result.artifacts.push_back(mpath);
    s.result.status = kExitOk;
    s.result.message = options.command + " ok";
    return s.result;
  } catch (const Error& e) {
    failure.status = exit_code(e.kind());
    failure.message = e.what();
  } catch (const fs::filesystem_error& e) {
    failure.status = kExitInvalid;
    failure.message = e.what();
  } catch (const std::exception& e) {
    failure.status = kExitInternal;
    failure.message = e.what();
  }
  log << "error: " << failure.message << '\n';
  return failure;
}

}  // namespace dhym::io
