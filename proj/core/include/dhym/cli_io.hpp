#pragma once

// Configuration, orchestration and persistence for the dhym command line tool.

#include "dhym/errors.hpp"
#include "dhym/linearized_ops.hpp"
#include "dhym/ode_solver.hpp"
#include "dhym/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dhym::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitObstruction = 3;
inline constexpr int kExitNonConvergence = 4;
inline constexpr int kExitInternal = 5;

int exit_code(ErrorKind kind);

struct DatumSpec {
  std::string kind = "fourier";  ///< "fourier" or "samples"
  double constant = 0.0;
  std::vector<spectral::Mode> modes;
  std::filesystem::path file;
};

struct ExpandSection {
  std::vector<std::vector<double>> f0;  ///< defaults to the 2x2 f0
  std::vector<double> t_large{10, 20, 40, 80, 160};
  std::vector<double> t_small{0.08, 0.04, 0.02, 0.01, 0.005};
};

struct LimitsSection {
  std::vector<double> t{4, 8, 16, 32};
};

struct LincheckSection {
  int grid = 32;
  std::vector<std::vector<double>> b;  ///< defaults to the 2x2 f0
  std::vector<linops::TrialMode> background;
  std::vector<int> refinement{16, 24, 32};
  int trials = 100;
  std::uint64_t seed = 1;
};

struct RunConfig {
  Regime regime = Regime::DHYM;
  ConstantCurvature2 f0;
  double alpha = 1.0;
  DatumSpec datum;
  int grid = 256;
  SolverTolerances tol;
  std::filesystem::path output = "out";
  ExpandSection expand;
  LimitsSection limits;
  LincheckSection lincheck;
  std::filesystem::path residual_input;  ///< solution CSV for the residual command

  std::string canonical;  ///< canonical JSON dump of the input
  std::uint64_t hash = 0;
};

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<int> grid;
  std::optional<double> tol;
};

/// Parses and validates JSON text; unknown keys are rejected. Relative paths
/// resolve against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const Overrides& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Datum samples on the configured grid.
PeriodicProfile build_datum(const RunConfig& config);
ODEProblem build_problem(const RunConfig& config);

std::uint64_t fnv1a(std::string_view bytes);

/// %.17g with '.' as decimal separator regardless of locale.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

struct Options {
  std::string command;
  std::filesystem::path config;
  Overrides overrides;
  bool verbose = false;
};

struct RunResult {
  int status = kExitOk;
  std::string message;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs one subcommand: solve, phase, expand, lincheck, residual, legendre,
/// limits. Errors are reported through the status, never thrown.
RunResult run(const Options& options, std::ostream& log);

}  // namespace dhym::io
