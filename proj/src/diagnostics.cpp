#include "chemolab/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemolab {

DiagnosticsContext make_context(const InitialDatad& init, const Gridd& grid, const ModelParamsd& params,
                                std::optional<WeightFunctiond> weight) {
  DiagnosticsContext ctx;
  ctx.grid = grid;
  ctx.params = params;
  ctx.u_mean0 = init.u_mean;
  ctx.v_mean0 = init.v_mean;
  ctx.w0_max = init.w_max;
  ctx.mass_u0 = mass(init.u, grid);
  ctx.mass_v0 = mass(init.v, grid);
  ctx.half_w0_sq = 0.5 * mass(Fieldd(init.w.square()), grid);
  ctx.weight = std::move(weight);
  return ctx;
}

std::optional<WeightFunctiond> lyapunov_weight(const ModelParamsd& params, double w0_max, int n,
                                               std::optional<double> p, std::optional<double> eps) {
  const double m = params.chi_max() * w0_max;
  if (p.has_value() != eps.has_value())
    throw ParameterError("weight.p and weight.eps must be given together");
  if (p) return make_weight(*p, *eps, m);

  if (!(m > 0.0)) return std::nullopt;
  if (!threshold_check(params, w0_max, n).within) return std::nullopt;
  const double e = epsilon_for_threshold(m, n);
  if (!(e > 0.0 && e < 1.0)) return std::nullopt;
  const double pp = p_for_equality(m, e);
  if (!(pp > 1.0)) return std::nullopt;
  try {
    return make_weight(pp, e, m);
  } catch (const ParameterError&) {
    return std::nullopt;
  }
}

DiagnosticsRecord record(const Stated& state, const DiagnosticsContext& ctx, const DiagnosticsRecord* prev) {
  const Gridd& g = ctx.grid;
  DiagnosticsRecord r;
  r.t = state.t;
  r.mass_u = mass(state.u, g);
  r.mass_v = mass(state.v, g);
  r.linf_u = state.u.abs().maxCoeff();
  r.linf_v = state.v.abs().maxCoeff();
  r.linf_w = state.w.abs().maxCoeff();
  r.dev_u = (state.u - ctx.u_mean0).abs().maxCoeff();
  r.dev_v = (state.v - ctx.v_mean0).abs().maxCoeff();
  if (ctx.weight) r.lyapunov = lyapunov(state, *ctx.weight, ctx.params.chi1, g);
  r.dirichlet_u = dirichlet_energy(state.u, g);
  r.dirichlet_v = dirichlet_energy(state.v, g);
  r.dirichlet_w = dirichlet_energy(state.w, g);
  if (prev) {
    const double dt = r.t - prev->t;
    r.cum_dirichlet_u = prev->cum_dirichlet_u + 0.5 * dt * (prev->dirichlet_u + r.dirichlet_u);
    r.cum_dirichlet_v = prev->cum_dirichlet_v + 0.5 * dt * (prev->dirichlet_v + r.dirichlet_v);
    r.cum_dirichlet_w = prev->cum_dirichlet_w + 0.5 * dt * (prev->dirichlet_w + r.dirichlet_w);
  }
  return r;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double window_fraction,
                   double reference_rate) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay: size mismatch");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw std::invalid_argument("fit_decay: window fraction must lie in (0,1]");
  const std::size_t n = times.size();
  if (n < 3) throw FitDeclined("fewer than 3 samples");
  const std::size_t k =
      std::min(n, std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(window_fraction * double(n)))));
  const std::size_t first = n - k;

  Eigen::MatrixXd design(k, 2);
  Eigen::VectorXd y(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double w = values[first + i];
    if (!(w > 0.0) || !std::isfinite(w)) {
      std::ostringstream os;
      os << "nonpositive or non-finite value " << w << " at t=" << times[first + i];
      throw FitDeclined(os.str());
    }
    design(i, 0) = 1.0;
    design(i, 1) = times[first + i];
    y(i) = -std::log(w);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * coef;
  const double ss_res = resid.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  r2 = std::clamp(r2, 0.0, 1.0);

  return {times[first], coef(1), r2, reference_rate, 0.5 * reference_rate};
}

DecayFit fit_decay(const std::vector<DiagnosticsRecord>& series, double window_fraction,
                   const DiagnosticsContext& ctx) {
  std::vector<double> t, w;
  t.reserve(series.size());
  w.reserve(series.size());
  for (const auto& r : series) {
    t.push_back(r.t);
    w.push_back(r.linf_w);
  }
  const double ref = ctx.params.alpha * ctx.u_mean0 + ctx.params.beta * ctx.v_mean0;
  return fit_decay(t, w, window_fraction, ref);
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "?";
}

namespace {

CheckResult bounded(std::string name, double value, double limit, std::string detail) {
  return {std::move(name), value <= limit ? CheckStatus::pass : CheckStatus::fail, value, limit,
          std::move(detail)};
}

}  // namespace

TheoremReport verify_theorems(const std::vector<DiagnosticsRecord>& series, const DiagnosticsContext& ctx,
                              const VerifyTolerances& tol) {
  TheoremReport rep;
  if (series.empty()) {
    rep.checks.push_back({"series", CheckStatus::fail, 0, 0, "empty diagnostics series"});
    return rep;
  }

  // (a) conservation of both population masses
  double drift = 0.0;
  for (const auto& r : series) {
    drift = std::max(drift, std::abs(r.mass_u - ctx.mass_u0) / ctx.mass_u0);
    drift = std::max(drift, std::abs(r.mass_v - ctx.mass_v0) / ctx.mass_v0);
  }
  rep.checks.push_back(bounded("conservation", drift, tol.mass_drift, "max relative mass drift of u and v"));

  // (b) signal stays inside [0, |w0|_inf] with a nonincreasing maximum
  double excess = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    excess = std::max(excess, series[i].linf_w - ctx.w0_max);
    if (i > 0) excess = std::max(excess, series[i].linf_w - series[i - 1].linf_w);
  }
  rep.checks.push_back(bounded("max_principle", excess, tol.envelope,
                               "max over samples of |w|_inf - |w0|_inf and of sample-to-sample growth"));

  // (c) int_0^t int |grad w|^2 <= (1/2) int w0^2
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : series) worst = std::max(worst, r.cum_dirichlet_w - ctx.half_w0_sq);
  {
    std::ostringstream os;
    os << "max cumulative |grad w|^2 minus half int w0^2 = " << ctx.half_w0_sq;
    rep.checks.push_back(bounded("w_energy_budget", worst, tol.energy_slack, os.str()));
  }

  // (d) space-time gradient integrals of u and v level off
  {
    const double t_end = series.back().t;
    const double t_q = series.front().t + 0.75 * (t_end - series.front().t);
    const auto it = std::find_if(series.begin(), series.end(), [&](const auto& r) { return r.t >= t_q; });
    const auto& q = *it;
    const auto& last = series.back();
    const auto frac = [](double tail, double total) { return total > 0.0 ? tail / total : 0.0; };
    const double fu = frac(last.cum_dirichlet_u - q.cum_dirichlet_u, last.cum_dirichlet_u);
    const double fv = frac(last.cum_dirichlet_v - q.cum_dirichlet_v, last.cum_dirichlet_v);
    std::ostringstream os;
    os << "last-quarter share of int int |grad u|^2 = " << fu << ", |grad v|^2 = " << fv;
    rep.checks.push_back(bounded("gradient_integrals", std::max(fu, fv), tol.tail_fraction, os.str()));
  }

  // (e) end state close to the homogeneous steady state (ubar0, vbar0, 0)
  {
    const auto& last = series.back();
    const double ratio = std::max({last.dev_u / tol.end_dev_u, last.dev_v / tol.end_dev_v,
                                   last.linf_w / tol.end_linf_w});
    std::ostringstream os;
    os << "dev_u=" << last.dev_u << " dev_v=" << last.dev_v << " linf_w=" << last.linf_w
       << " (value is the largest ratio to its limit)";
    rep.checks.push_back(bounded("end_state", ratio, 1.0, os.str()));
  }

  // (f) |w|_inf decays at least at rate (alpha ubar0 + beta vbar0) / 2
  if (!(ctx.w0_max > 0.0)) {
    rep.checks.push_back({"decay_rate", CheckStatus::skipped, 0, 0, "initial signal is zero"});
  } else {
    try {
      const DecayFit fit = fit_decay(series, tol.decay_window, ctx);
      rep.decay = fit;
      std::ostringstream os;
      os << "fitted rate " << fit.rate << " (r^2=" << fit.r_squared << ") vs guaranteed " << fit.half_reference;
      rep.checks.push_back({"decay_rate", fit.rate >= fit.half_reference ? CheckStatus::pass : CheckStatus::fail,
                            fit.rate, fit.half_reference, os.str()});
    } catch (const FitDeclined& e) {
      rep.checks.push_back({"decay_rate", CheckStatus::fail, 0, 0, std::string("fit declined: ") + e.what()});
    }
  }
  return rep;
}

}  // namespace chemolab
