// ostro_stab: spectral stability analysis of small-amplitude Ostrovsky waves.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ostro/runner.hpp"

namespace cli = ostro::cli;

int main(int argc, char** argv) {
  CLI::App app{"Stability of small-amplitude periodic Ostrovsky waves", "ostro_stab"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  cli::RunConfig cfg;
  double k = 0, a = 0, xi = 0;
  int n = 0, m = 0;
  std::string format = "json", which;

  auto* k_opt = app.add_option("--k", k, "carrier wavenumber");
  auto* a_opt = app.add_option("--a", a, "wave amplitude");
  auto* n_opt = app.add_option("--n", n, "first mode index");
  auto* m_opt = app.add_option("--m", m, "second mode index");
  auto* xi_opt = app.add_option("--xi", xi, "Floquet exponent in (0, 1/2]");
  app.add_option("--beta", cfg.beta, "dispersion coefficient (nonzero)")->capture_default_str();
  app.add_option("--gamma", cfg.gamma, "rotation coefficient (> 0)")->capture_default_str();
  app.add_option("--dn-max", cfg.dn_max, "largest mode separation to enumerate")->capture_default_str();
  app.add_option("--n-range", cfg.n_range, "mode index range |n|")->capture_default_str();
  app.add_option("--N", cfg.N, "Fourier truncation (matrix size 2N+1)")->capture_default_str();
  app.add_option("--xi-grid", cfg.xi_grid, "number of xi grid points")->capture_default_str();
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", cfg.out, "output file (figures: output directory)");
  app.add_flag("--opposite-krein", cfg.opposite_krein, "keep only opposite-signature pairs");
  app.add_option("--which", which, "figure to emit (default: all)")
      ->check(CLI::IsMember({"K_curves", "collision_ranges", "collision_contour"}));
  app.add_option("--a-max", cfg.a_max, "largest accepted amplitude")->capture_default_str();
  app.add_flag("--timing", cfg.timing, "record wall time in diagnostics");

  for (auto c : {cli::Command::wave, cli::Command::dispersion, cli::Command::collisions,
                 cli::Command::krein, cli::Command::reduced, cli::Command::spectrum,
                 cli::Command::threshold, cli::Command::figures}) {
    app.add_subcommand(std::string(cli::to_string(c)));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return cli::kExitUsage;
  }

  cfg.command = *cli::parse_command(app.get_subcommands().front()->get_name());
  if (*k_opt) cfg.k = k;
  if (*a_opt) cfg.a = a;
  if (*n_opt) cfg.n = n;
  if (*m_opt) cfg.m = m;
  if (*xi_opt) cfg.xi = xi;
  cfg.format = format == "csv" ? cli::OutputFormat::csv : cli::OutputFormat::json;
  if (!which.empty()) cfg.which = cli::parse_figure(which);
  cfg.threads = cli::threads_from_env();

  const cli::RunOutcome r = cli::run(cfg);
  if (cfg.out.empty() || cfg.command == cli::Command::figures) std::cout << r.output;
  if (r.exit_code != cli::kExitOk && !r.message.empty()) std::cerr << r.message << "\n";
  return r.exit_code;
}
