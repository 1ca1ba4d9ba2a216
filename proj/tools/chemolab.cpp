// chemolab: simulate and analyze the two-species chemotaxis system with
// signal absorption.
//
//   chemolab run --config scenario.json --out results/
//   chemolab threshold --n 2 --chi1 1 --chi2 1 --w0max 0.5
//   chemolab analyze-weight --p 2 --eps 0.3 --m 1.5707963 --samples 1000
//   chemolab convergence --config scenario.json --levels 3 --out conv/

#include "chemolab/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Every step allocates fresh fields; keep freed blocks instead of returning them to the kernel.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
#endif
  using namespace chemolab;
  CLI::App app{"Finite-volume simulator for a two-species chemotaxis system with signal absorption"};
  app.require_subcommand(1);
  app.fallthrough();

  bool quiet = false;
  long seed = 0;
  app.add_flag("--quiet", quiet, "Suppress progress and tables on stdout");
  app.add_option("--seed", seed, "Reserved; unused");

  std::filesystem::path config;
  std::optional<std::filesystem::path> out;

  auto* run = app.add_subcommand("run", "Run a scenario and verify the solution properties");
  run->add_option("--config", config, "Scenario JSON")->required();
  run->add_option("--out", out, "Output directory (CHEMOLAB_OUT overrides)");

  int n = 2;
  double chi1 = 1, chi2 = 1, w0max = 0;
  bool as_json = false;
  auto* thr = app.add_subcommand("threshold", "Smallness condition and the (eps, p) construction");
  thr->add_option("--n", n, "Spatial dimension")->required();
  thr->add_option("--chi1", chi1, "Sensitivity of the first species")->required();
  thr->add_option("--chi2", chi2, "Sensitivity of the second species")->required();
  thr->add_option("--w0max", w0max, "Sup-norm of the initial signal")->required();
  thr->add_flag("--json", as_json, "Print JSON instead of a table");

  double p = 2, eps = 0.3, m = 1;
  int samples = 1000;
  auto* weight = app.add_subcommand("analyze-weight", "Tabulate phi, phi', phi'' and the identity residual");
  weight->add_option("--p", p, "Exponent p > 1")->required();
  weight->add_option("--eps", eps, "eps in (0,1)")->required();
  weight->add_option("--m", m, "Amplitude M")->required();
  weight->add_option("--samples", samples, "Number of equispaced samples on [0, M]");
  weight->add_option("--out", out, "Also write weight_table.csv here");

  int levels = 3;
  auto* conv = app.add_subcommand("convergence", "Grid self-convergence study");
  conv->add_option("--config", config, "Scenario JSON")->required();
  conv->add_option("--levels", levels, "Number of grid levels (>= 3 for an order estimate)");
  conv->add_option("--out", out, "Output directory (CHEMOLAB_OUT overrides)");

  CLI11_PARSE(app, argc, argv);
  (void)seed;

  if (run->parsed()) return cmd_run(config, resolve_out_dir(out), std::cout, std::cerr, quiet);
  if (thr->parsed()) return cmd_threshold(n, chi1, chi2, w0max, as_json, std::cout, std::cerr);
  if (weight->parsed()) {
    std::optional<std::filesystem::path> dir;
    if (out || std::getenv("CHEMOLAB_OUT")) dir = resolve_out_dir(out);
    return cmd_analyze_weight(p, eps, m, samples, dir, quiet, std::cout, std::cerr);
  }
  if (conv->parsed()) return cmd_convergence(config, levels, resolve_out_dir(out), std::cout, std::cerr, quiet);
  return kExitError;
}
