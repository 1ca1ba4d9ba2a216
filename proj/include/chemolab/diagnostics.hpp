#pragma once

#include "chemolab/model.hpp"
#include "chemolab/weight_function.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemolab {

/// Discrete integral: volume element times the sum over cells (index order).
template <typename Scalar>
Scalar mass(const Field<Scalar>& f, const Grid<Scalar>& grid) {
  Scalar s(0);
  for (std::ptrdiff_t c = 0; c < f.size(); ++c) s += f[c];
  return grid.volume_element() * s;
}

/// Sum over interior faces of ((f_r - f_l)/h)^2 times the cell volume; the same
/// face gradient the solver's diffusive fluxes use, so summation by parts holds exactly.
template <typename Scalar>
Scalar dirichlet_energy(const Field<Scalar>& f, const Grid<Scalar>& grid) {
  Scalar total(0);
  for (int a = 0; a < grid.dim(); ++a) {
    const Scalar inv_h = Scalar(1) / grid.spacing(a);
    Scalar s(0);
    const int nx = grid.cells(0), ny = grid.cells(1), nz = grid.cells(2);
    const std::ptrdiff_t st = grid.stride(a);
    for (int k = 0; k < (a == 2 ? nz - 1 : nz); ++k)
      for (int j = 0; j < (a == 1 ? ny - 1 : ny); ++j)
        for (int i = 0; i < (a == 0 ? nx - 1 : nx); ++i) {
          const std::ptrdiff_t l = grid.index(i, j, k);
          const Scalar g = (f[l + st] - f[l]) * inv_h;
          s += g * g;
        }
    total += s;
  }
  return grid.volume_element() * total;
}

/// (1/p) * int u^p phi(chi w). Signal values overshooting the weight domain by
/// rounding (1e-12) are clamped; larger excursions throw DomainError.
template <typename Scalar>
Scalar lyapunov(const Field<Scalar>& u, const Field<Scalar>& w, const WeightFunction<Scalar>& wf, Scalar chi,
                const Grid<Scalar>& grid) {
  using std::pow;
  const Scalar tol(1e-12);
  Scalar s(0);
  for (std::ptrdiff_t c = 0; c < u.size(); ++c) {
    Scalar arg = chi * w[c];
    if (arg > wf.m()) {
      if (arg > wf.m() + tol * (wf.m() > Scalar(1) ? wf.m() : Scalar(1)))
        throw DomainError("weight domain exceeded: chi*w = " + std::to_string(static_cast<double>(arg)) +
                          " > M = " + std::to_string(static_cast<double>(wf.m())));
      arg = wf.m();
    }
    if (arg < Scalar(0)) {
      if (arg < -tol) throw DomainError("negative signal in weight argument");
      arg = Scalar(0);
    }
    s += pow(u[c], wf.p()) * wf.phi(arg);
  }
  return grid.volume_element() * s / wf.p();
}

template <typename Scalar>
Scalar lyapunov(const State<Scalar>& state, const WeightFunction<Scalar>& wf, Scalar chi, const Grid<Scalar>& grid) {
  return lyapunov(state.u, state.w, wf, chi, grid);
}

/// One time sample of the tracked scalars. Field order is the CSV column order.
struct DiagnosticsRecord {
  double t{0};
  double mass_u{0}, mass_v{0};
  double linf_u{0}, linf_v{0}, linf_w{0};
  double dev_u{0}, dev_v{0};
  std::optional<double> lyapunov;
  double dirichlet_u{0}, dirichlet_v{0}, dirichlet_w{0};
  double cum_dirichlet_u{0}, cum_dirichlet_v{0}, cum_dirichlet_w{0};
};

/// Run-level quantities fixed by the initial data.
struct DiagnosticsContext {
  Gridd grid;
  ModelParamsd params;
  double u_mean0{0};
  double v_mean0{0};
  double w0_max{0};
  double mass_u0{0};
  double mass_v0{0};
  double half_w0_sq{0};  // (1/2) int w0^2
  std::optional<WeightFunctiond> weight;
};

DiagnosticsContext make_context(const InitialDatad& init, const Gridd& grid, const ModelParamsd& params,
                                std::optional<WeightFunctiond> weight);

/// Weight function for the Lyapunov functional at M = max(chi_i) * |w0|_inf. With
/// explicit (p, eps) the construction must succeed; otherwise eps and p come
/// from the threshold construction for dimension n, and nullopt is returned when
/// that construction yields no admissible p > 1.
std::optional<WeightFunctiond> lyapunov_weight(const ModelParamsd& params, double w0_max, int n,
                                               std::optional<double> p, std::optional<double> eps);

/// Fresh record; cumulative integrals advance by trapezoid from `prev` when given.
DiagnosticsRecord record(const Stated& state, const DiagnosticsContext& ctx, const DiagnosticsRecord* prev);

struct DecayFit {
  double t_start{0};
  double rate{0};
  double r_squared{0};
  double reference_rate{0};
  double half_reference{0};
};

class FitDeclined : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of -ln(values) against times over the trailing
/// `window_fraction` of samples (at least 3). Throws FitDeclined on nonpositive data.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values, double window_fraction,
                   double reference_rate);

DecayFit fit_decay(const std::vector<DiagnosticsRecord>& series, double window_fraction,
                   const DiagnosticsContext& ctx);

/// Thresholds for verify_theorems. End-state limits are engineering choices:
/// the u, v convergence has no quantitative rate.
struct VerifyTolerances {
  double mass_drift{1e-10};
  double envelope{1e-12};
  double energy_slack{1e-8};
  double tail_fraction{0.01};
  double end_dev_u{1e-3};
  double end_dev_v{1e-3};
  double end_linf_w{1e-3};
  double decay_window{0.5};
};

enum class CheckStatus { pass, fail, skipped };

struct CheckResult {
  std::string name;
  CheckStatus status{CheckStatus::pass};
  double value{0};
  double limit{0};
  std::string detail;
};

struct TheoremReport {
  std::vector<CheckResult> checks;
  std::optional<DecayFit> decay;

  bool all_pass() const {
    for (const auto& c : checks)
      if (c.status == CheckStatus::fail) return false;
    return true;
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

const char* to_string(CheckStatus s);

TheoremReport verify_theorems(const std::vector<DiagnosticsRecord>& series, const DiagnosticsContext& ctx,
                              const VerifyTolerances& tol = {});

}  // namespace chemolab
