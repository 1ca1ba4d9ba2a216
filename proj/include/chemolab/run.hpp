#pragma once

#include "chemolab/config.hpp"
#include "chemolab/diagnostics.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chemolab {

enum class Outcome { completed, blowup, error };

const char* to_string(Outcome o);

/// Where and when the divergence sentinel fired.
struct BlowupReport {
  double t{0};
  std::string field;
  std::ptrdiff_t cell{-1};
  double value{0};
};

struct RunResult {
  Outcome outcome{Outcome::completed};
  Stated final_state;
  std::vector<DiagnosticsRecord> series;
  DiagnosticsContext context;
  std::optional<BlowupReport> blowup;
  std::size_t steps{0};
};

/// Called at t = 0 and at every sample time with the state and its record.
using SampleObserver = std::function<void(const Stated&, const DiagnosticsRecord&)>;

/// Materializes and validates the initial data, then integrates to t_end.
RunResult run(const ScenarioConfig& cfg, const SampleObserver& observer = {});

/// Integrates from already-validated initial data. Steps land exactly on the
/// sample times k * output_every and on t_end.
RunResult run(const ScenarioConfig& cfg, const InitialDatad& init, const SampleObserver& observer = {});

InitialDatad initial_data(const ScenarioConfig& cfg);

/// Cell averages of `fine` over blocks of 2^dim children, giving a field on `coarse`.
Fieldd restrict_to(const Fieldd& fine, const Gridd& fine_grid, const Gridd& coarse_grid);

/// Volume-weighted discrete L2 norm.
double l2_norm(const Fieldd& f, const Gridd& grid);

struct ConvergenceRow {
  int level{0};
  std::array<int, 3> cells{};
  double h{0};
  double err_u{0}, err_v{0}, err_w{0};
  std::optional<double> order_u, order_v, order_w;
};

/// Self-convergence on grids refined by 1, 2, ..., 2^(levels-1). Row k holds the
/// L2 distance between level k and the restriction of level k+1, and the order
/// log2(err_k / err_{k+1}); the finest level has no row. Level k runs with
/// dt_max = dt_0 / 4^k, dt_0 being a stable step on the coarsest grid.
std::vector<ConvergenceRow> convergence_study(const ScenarioConfig& cfg, int levels, bool parallel = true);

struct TemporalRow {
  double dt{0};
  double err_u{0}, err_v{0}, err_w{0};
  std::optional<double> order_u, order_v, order_w;
};

/// Same comparison in time on a fixed grid, with dt_max set to each entry of
/// `dts` (which should halve successively and lie below the stable step).
std::vector<TemporalRow> temporal_study(const ScenarioConfig& cfg, const std::vector<double>& dts);

}  // namespace chemolab
