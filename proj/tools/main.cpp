#include "dhym/cli_io.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Coupled dHYM equations on flat tori"};
  app.require_subcommand(1, 1);

  dhym::io::Options opts;
  std::string out;
  int grid = 0;
  double tol = 0.0;

  const char* commands[][2] = {
      {"solve", "solve the periodic ODE and write solution.csv"},
      {"phase", "topological phase and radius of f0"},
      {"expand", "large and small radius phase expansions"},
      {"lincheck", "self-adjointness and negativity of the linearized operator"},
      {"residual", "recompute the residual of a stored solution"},
      {"legendre", "Legendre transform of the datum, read as psi"},
      {"limits", "convergence of scaled dHYM solutions to a limit regime"},
  };
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", opts.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--grid", grid, "grid size (power of two >= 16)");
    sub->add_option("--tol", tol, "residual tolerance");
    sub->add_flag("--verbose", opts.verbose, "progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dhym::io::kExitInvalid;
  }

  auto* sub = app.get_subcommands().front();
  opts.command = sub->get_name();
  if (sub->count("--out")) opts.overrides.out = out;
  if (sub->count("--grid")) opts.overrides.grid = grid;
  if (sub->count("--tol")) opts.overrides.tol = tol;

  const auto result = dhym::io::run(opts, std::cerr);
  if (result.status == dhym::io::kExitOk) {
    for (const auto& a : result.artifacts) std::cout << a.string() << '\n';
  }
  return result.status;
}
