#pragma once

#include "chemolab/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chemolab {

inline constexpr const char* kToolVersion = "1.0.0";

/// Process exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitCheckFailed = 2, kExitBlowup = 3 };

/// CHEMOLAB_OUT, when set and nonempty, wins over the --out flag.
std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& flag);

struct SpeciesThreshold {
  double m{0};
  bool within{false};
  std::optional<double> eps;
  std::optional<double> p;
  std::optional<double> admissible;  // admissible_bound(p, eps), which must exceed m
};

struct ThresholdTable {
  int n{0};
  double bound{0};
  bool within{false};
  SpeciesThreshold species[2];
};

ThresholdTable threshold_table(int n, double chi1, double chi2, double w0_max);

struct WeightSample {
  double s, phi, phi_prime, phi_second, residual;
};

/// `samples` equispaced points on [0, m] (both ends included).
std::vector<WeightSample> weight_table(double p, double eps, double m, int samples);

/// run: solve, write diagnostics.csv, final_state snapshot, report.json and
/// manifest.json into `out`. Returns an ExitCode.
int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out, std::ostream& os,
            std::ostream& err, bool quiet);

int cmd_threshold(int n, double chi1, double chi2, double w0_max, bool json, std::ostream& os, std::ostream& err);

int cmd_analyze_weight(double p, double eps, double m, int samples, const std::optional<std::filesystem::path>& out,
                       bool quiet, std::ostream& os, std::ostream& err);

int cmd_convergence(const std::filesystem::path& config, int levels, const std::filesystem::path& out,
                    std::ostream& os, std::ostream& err, bool quiet);

}  // namespace chemolab
