#include "chemolab/run.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace chemolab {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::completed: return "completed";
    case Outcome::blowup: return "blowup";
    case Outcome::error: return "error";
  }
  return "?";
}

InitialDatad initial_data(const ScenarioConfig& cfg) {
  return validate_initial_data(materialize(cfg.u0, cfg.grid), materialize(cfg.v0, cfg.grid),
                               materialize(cfg.w0, cfg.grid), cfg.grid);
}

RunResult run(const ScenarioConfig& cfg, const SampleObserver& observer) {
  return run(cfg, initial_data(cfg), observer);
}

namespace {

std::optional<BlowupReport> sentinel(const Stated& s, double limit) {
  std::ptrdiff_t cu, cv;
  const double mu = s.u.maxCoeff(&cu);
  const double mv = s.v.maxCoeff(&cv);
  if (mu > limit) return BlowupReport{s.t, "u", cu, mu};
  if (mv > limit) return BlowupReport{s.t, "v", cv, mv};
  return std::nullopt;
}

}  // namespace

RunResult run(const ScenarioConfig& cfg, const InitialDatad& init, const SampleObserver& observer) {
  const Gridd& grid = cfg.grid;
  const SchemeOptionsd scheme = cfg.scheme_options();

  RunResult res;
  res.context = make_context(init, grid, cfg.params,
                             lyapunov_weight(cfg.params, init.w_max, grid.dim(), cfg.weight_p, cfg.weight_eps));

  Stated state{0.0, init.u, init.v, init.w};
  const auto sample = [&](const Stated& s) {
    const DiagnosticsRecord* prev = res.series.empty() ? nullptr : &res.series.back();
    res.series.push_back(record(s, res.context, prev));
    if (observer) observer(s, res.series.back());
  };
  sample(state);

  for (long k = 1; state.t < cfg.t_end; ++k) {
    double t_next = double(k) * cfg.output_every;
    if (t_next >= cfg.t_end * (1.0 - 1e-12)) t_next = cfg.t_end;

    while (state.t < t_next) {
      double dt = stable_dt(state, cfg.params, grid, scheme);
      if (!(dt >= kMinTimeStep))
        throw StepSizeError("stable time step " + std::to_string(dt) + " at t=" + std::to_string(state.t) +
                            " is below the floor");
      // Split the remaining interval into equal steps so the sample time is hit exactly.
      const double remaining = t_next - state.t;
      const double n = std::ceil(remaining / dt * (1.0 - 1e-12));
      dt = remaining / std::max(n, 1.0);

      try {
        state = step(state, dt, cfg.params, grid, scheme);
      } catch (const NumericalBlowup& e) {
        res.outcome = Outcome::blowup;
        res.blowup = BlowupReport{state.t + dt, e.field(), e.cell(), std::nan("")};
        res.final_state = std::move(state);
        return res;
      }
      ++res.steps;
      if (n <= 1.0) state.t = t_next;

      if (auto b = sentinel(state, cfg.blowup_linf)) {
        res.outcome = Outcome::blowup;
        res.blowup = b;
        sample(state);
        res.final_state = std::move(state);
        return res;
      }
    }
    sample(state);
  }
  res.final_state = std::move(state);
  return res;
}

Fieldd restrict_to(const Fieldd& fine, const Gridd& fine_grid, const Gridd& coarse_grid) {
  std::array<int, 3> r{1, 1, 1};
  for (int a = 0; a < coarse_grid.dim(); ++a) {
    r[a] = fine_grid.cells(a) / coarse_grid.cells(a);
    if (r[a] * coarse_grid.cells(a) != fine_grid.cells(a))
      throw std::invalid_argument("restrict_to: grids are not nested");
  }
  Fieldd out = Fieldd::Zero(coarse_grid.size());
  const double inv = 1.0 / double(r[0] * r[1] * r[2]);
  for (int k = 0; k < fine_grid.cells(2); ++k)
    for (int j = 0; j < fine_grid.cells(1); ++j)
      for (int i = 0; i < fine_grid.cells(0); ++i)
        out[coarse_grid.index(i / r[0], j / r[1], k / r[2])] += fine[fine_grid.index(i, j, k)];
  return out * inv;
}

double l2_norm(const Fieldd& f, const Gridd& grid) {
  return std::sqrt(grid.volume_element() * f.square().sum());
}

namespace {

std::optional<double> order(double coarse_err, double fine_err) {
  if (!(coarse_err > 0.0) || !(fine_err > 0.0)) return std::nullopt;
  return std::log2(coarse_err / fine_err);
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const ScenarioConfig& cfg, int levels, bool parallel) {
  if (levels < 2) throw std::invalid_argument("convergence study needs at least 2 levels");
  // Parabolic scaling: dt shrinks by 4 per level so the time error stays a fixed
  // multiple of h^2 and does not pollute the observed spatial order.
  const InitialDatad init = initial_data(cfg);
  const double stable0 = stable_dt(Stated{0.0, init.u, init.v, init.w}, cfg.params, cfg.grid, cfg.scheme_options());
  const double interval = std::min(cfg.output_every, cfg.t_end);
  const double dt0 = interval / std::ceil(interval / std::min(0.9 * stable0, cfg.dt_max));

  std::vector<ScenarioConfig> cfgs;
  for (int k = 0; k < levels; ++k) {
    cfgs.push_back(refined(cfg, 1 << k));
    cfgs.back().dt_max = dt0 / double(1 << (2 * k));
  }

  std::vector<std::future<Stated>> jobs;
  for (const auto& c : cfgs)
    jobs.push_back(std::async(parallel ? std::launch::async : std::launch::deferred,
                              [&c] { return run(c).final_state; }));
  std::vector<Stated> finals;
  for (auto& j : jobs) finals.push_back(j.get());

  std::vector<ConvergenceRow> rows;
  for (int k = 0; k + 1 < levels; ++k) {
    const Gridd& gc = cfgs[k].grid;
    const Gridd& gf = cfgs[k + 1].grid;
    ConvergenceRow row;
    row.level = k;
    row.cells = {gc.cells(0), gc.cells(1), gc.cells(2)};
    row.h = gc.min_spacing();
    row.err_u = l2_norm(finals[k].u - restrict_to(finals[k + 1].u, gf, gc), gc);
    row.err_v = l2_norm(finals[k].v - restrict_to(finals[k + 1].v, gf, gc), gc);
    row.err_w = l2_norm(finals[k].w - restrict_to(finals[k + 1].w, gf, gc), gc);
    rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    rows[k].order_u = order(rows[k].err_u, rows[k + 1].err_u);
    rows[k].order_v = order(rows[k].err_v, rows[k + 1].err_v);
    rows[k].order_w = order(rows[k].err_w, rows[k + 1].err_w);
  }
  return rows;
}

std::vector<TemporalRow> temporal_study(const ScenarioConfig& cfg, const std::vector<double>& dts) {
  if (dts.size() < 2) throw std::invalid_argument("temporal study needs at least 2 step sizes");
  std::vector<Stated> finals;
  for (double dt : dts) {
    ScenarioConfig c = cfg;
    c.dt_max = dt;
    finals.push_back(run(c).final_state);
  }
  std::vector<TemporalRow> rows;
  for (std::size_t k = 0; k + 1 < dts.size(); ++k) {
    TemporalRow row;
    row.dt = dts[k];
    row.err_u = l2_norm(finals[k].u - finals[k + 1].u, cfg.grid);
    row.err_v = l2_norm(finals[k].v - finals[k + 1].v, cfg.grid);
    row.err_w = l2_norm(finals[k].w - finals[k + 1].w, cfg.grid);
    rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    rows[k].order_u = order(rows[k].err_u, rows[k + 1].err_u);
    rows[k].order_v = order(rows[k].err_v, rows[k + 1].err_v);
    rows[k].order_w = order(rows[k].err_w, rows[k + 1].err_w);
  }
  return rows;
}

}  // namespace chemolab
