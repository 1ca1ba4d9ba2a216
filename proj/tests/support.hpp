#pragma once

// Shared scenario builders and independent numerical oracles for the tests.

#include "chemolab/config.hpp"

#include <cmath>
#include <functional>

namespace chemolab::test {

/// Adaptive Simpson quadrature in long double. Independent of the closed-form
/// log-cosine antiderivative used by WeightFunction::z.
inline long double adaptive_simpson(const std::function<long double(long double)>& f, long double a, long double b,
                                    long double tol, int depth = 50) {
  const auto simpson = [&](long double lo, long double hi, long double flo, long double fmid, long double fhi) {
    return (hi - lo) / 6.0L * (flo + 4.0L * fmid + fhi);
  };
  std::function<long double(long double, long double, long double, long double, long double, long double, long double,
                            int)>
      rec = [&](long double lo, long double hi, long double flo, long double fmid, long double fhi, long double whole,
                long double eps, int d) -> long double {
    const long double mid = 0.5L * (lo + hi);
    const long double lm = 0.5L * (lo + mid), rm = 0.5L * (mid + hi);
    const long double flm = f(lm), frm = f(rm);
    const long double left = simpson(lo, mid, flo, flm, fmid);
    const long double right = simpson(mid, hi, fmid, frm, fhi);
    if (d <= 0 || std::fabs(left + right - whole) <= 15.0L * eps)
      return left + right + (left + right - whole) / 15.0L;
    return rec(lo, mid, flo, flm, fmid, left, 0.5L * eps, d - 1) + rec(mid, hi, fmid, frm, fhi, right, 0.5L * eps, d - 1);
  };
  const long double fa = f(a), fb = f(b), fm = f(0.5L * (a + b));
  return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, depth);
}

inline InitialSpec constant(double value) {
  InitialSpec s;
  s.kind = InitialKind::constant;
  s.value = value;
  return s;
}

inline InitialSpec cosine_bump(double base, double amplitude, std::array<int, 3> modes) {
  InitialSpec s;
  s.kind = InitialKind::cosine_bump;
  s.base = base;
  s.amplitude = amplitude;
  s.modes = modes;
  return s;
}

/// u0 = v0 = 1, w0 = 0.5, all rates 1.
inline ScenarioConfig homogeneous(int dim, int cells, double t_end) {
  ScenarioConfig c;
  c.params = ModelParamsd::make(1, 1, 1, 1);
  c.grid = Gridd::uniform(dim, 1.0, cells);
  c.u0 = constant(1.0);
  c.v0 = constant(1.0);
  c.w0 = constant(0.5);
  c.t_end = t_end;
  c.dt_max = t_end;
  c.output_every = t_end / 200.0;
  return c;
}

/// Omega = (0,1)^2, chi = alpha = beta = 1,
/// u0 = 1 + 0.5 cos(pi x) cos(pi y), v0 = 1 + 0.25 cos(pi x), w0 = 0.25 (1 + cos(pi x)).
inline ScenarioConfig smooth_2d(int cells, double t_end, Advection scheme = Advection::central) {
  ScenarioConfig c;
  c.params = ModelParamsd::make(1, 1, 1, 1);
  c.grid = Gridd::uniform(2, 1.0, cells);
  c.u0 = cosine_bump(1.0, 0.5, {1, 1, 0});
  c.v0 = cosine_bump(1.0, 0.25, {1, 0, 0});
  c.w0 = cosine_bump(0.25, 0.25, {1, 0, 0});
  c.t_end = t_end;
  c.dt_max = t_end;
  c.output_every = t_end / 200.0;
  c.scheme = scheme;
  return c;
}

/// One-dimensional analogue of smooth_2d, cheap enough for unit tests.
inline ScenarioConfig smooth_1d(int cells, double t_end, Advection scheme = Advection::central) {
  ScenarioConfig c = smooth_2d(cells, t_end, scheme);
  c.grid = Gridd::uniform(1, 1.0, cells);
  c.u0 = cosine_bump(1.0, 0.5, {1, 0, 0});
  return c;
}

}  // namespace chemolab::test
