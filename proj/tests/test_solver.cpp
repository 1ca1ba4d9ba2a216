#include "doctest.h"

#include "chemolab/diagnostics.hpp"
#include "chemolab/run.hpp"
#include "chemolab/solver.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace chemolab;

namespace {

constexpr double kPi = std::numbers::pi;

Stated homogeneous_state(const Gridd& g, double U, double V, double W) {
  return {0.0, Fieldd::Constant(g.size(), U), Fieldd::Constant(g.size(), V), Fieldd::Constant(g.size(), W)};
}

Stated sampled(const ScenarioConfig& c) {
  const auto d = initial_data(c);
  return {0.0, d.u, d.v, d.w};
}

}  // namespace

TEST_CASE("grad_w_faces") {
  const auto g = Gridd::uniform(2, 1.0, 8);
  SUBCASE("constant field") {
    const auto gw = grad_w_faces<double>(Fieldd::Constant(g.size(), 3.0), g);
    CHECK(gw[0].abs().maxCoeff() == 0.0);
    CHECK(gw[1].abs().maxCoeff() == 0.0);
    CHECK(gw[2].size() == 0);
  }
  SUBCASE("linear field: unit interior gradients, zero boundary faces") {
    const Fieldd w = g.sample([](double x, double, double) { return x; });
    const auto gw = grad_w_faces(w, g);
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) {
        const double expect = i < 7 ? 1.0 : 0.0;
        CHECK(std::abs(gw[0][g.index(i, j)] - expect) <= 1e-13);
        CHECK(gw[1][g.index(i, j)] == 0.0);
      }
  }
  SUBCASE("second order on cos(pi x)") {
    double prev = 0.0;
    for (int m : {32, 64, 128, 256}) {
      const auto g1 = Gridd::uniform(1, 1.0, m);
      const Fieldd w = g1.sample([](double x, double, double) { return std::cos(kPi * x); });
      const auto gw = grad_w_faces(w, g1);
      double err = 0.0;
      for (int i = 0; i + 1 < m; ++i) {
        const double xf = (i + 1) * g1.spacing(0);
        err = std::max(err, std::abs(gw[0][i] + kPi * std::sin(kPi * xf)));
      }
      if (prev > 0.0) CHECK(std::log2(prev / err) >= 1.9);
      prev = err;
    }
  }
}

TEST_CASE("species_flux") {
  const auto g = Gridd::uniform(1, 1.0, 16);
  const double h = g.spacing(0);

  SUBCASE("chi = 0 gives the Neumann three-point Laplacian") {
    const Fieldd u = g.sample([](double x, double, double) { return std::exp(x) + x * x; });
    const auto f = species_flux(u, 0.0, grad_w_faces(u, g), g, Advection::central);
    const Fieldd lap = -divergence(f, g);
    for (int i = 0; i < 16; ++i) {
      const double left = i > 0 ? u[i - 1] - u[i] : 0.0;
      const double right = i < 15 ? u[i + 1] - u[i] : 0.0;
      CHECK(lap[i] == doctest::Approx((left + right) / (h * h)).epsilon(1e-12));
    }
  }
  SUBCASE("constant density and signal give zero flux") {
    const Fieldd u = Fieldd::Constant(g.size(), 2.0);
    const auto gw = grad_w_faces<double>(Fieldd::Constant(g.size(), 0.7), g);
    for (auto s : {Advection::central, Advection::upwind})
      CHECK(species_flux(u, 1.5, gw, g, s)[0].abs().maxCoeff() == 0.0);
  }
  SUBCASE("u = 1, w = x: flux chi on interior faces for both schemes") {
    const Fieldd u = Fieldd::Ones(g.size());
    const auto gw = grad_w_faces<double>(g.sample([](double x, double, double) { return x; }), g);
    const auto fc = species_flux(u, 2.5, gw, g, Advection::central);
    const auto fu = species_flux(u, 2.5, gw, g, Advection::upwind);
    for (int i = 0; i < 15; ++i) {
      CHECK(std::abs(fc[0][i] - 2.5) <= 1e-12);
      CHECK(fu[0][i] == fc[0][i]);
    }
    CHECK(fc[0][15] == 0.0);
  }
  SUBCASE("upwind picks the donor cell, averages at zero velocity") {
    Fieldd u = Fieldd::Zero(g.size());
    u[3] = 1.0;
    u[4] = 3.0;
    auto gw = detail::zero_faces(g);
    gw[0][3] = 1.0;
    CHECK(species_flux(u, 1.0, gw, g, Advection::upwind)[0][3] == doctest::Approx(-2.0 / h + 1.0));
    gw[0][3] = -1.0;
    CHECK(species_flux(u, 1.0, gw, g, Advection::upwind)[0][3] == doctest::Approx(-2.0 / h - 3.0));
    gw[0][3] = 0.0;
    CHECK(species_flux(u, 1.0, gw, g, Advection::upwind)[0][3] == doctest::Approx(-2.0 / h));
  }
}

TEST_CASE("rhs") {
  const auto params = ModelParamsd::make(1.3, 0.7, 2.0, 0.5);
  SUBCASE("homogeneous state reduces to the absorption ODE") {
    const auto g = Gridd::uniform(2, 1.0, 8);
    const auto r = rhs(homogeneous_state(g, 1.2, 0.8, 0.4), params, g, SchemeOptionsd{});
    CHECK(r.du.abs().maxCoeff() == 0.0);
    CHECK(r.dv.abs().maxCoeff() == 0.0);
    CHECK(((r.dw + (2.0 * 1.2 + 0.5 * 0.8) * 0.4).abs() <= 1e-15).all());
  }
  SUBCASE("u = 0 is absorbing") {
    const auto g = Gridd::uniform(1, 1.0, 16);
    Stated s = sampled(test::smooth_1d(16, 1.0));
    s.u.setZero();
    CHECK(rhs(s, params, g, SchemeOptionsd{}).du.abs().maxCoeff() == 0.0);
  }
  SUBCASE("population rates sum to zero") {
    const auto c = test::smooth_2d(16, 1.0);
    const auto r = rhs(sampled(c), params, c.grid, SchemeOptionsd{});
    CHECK(std::abs(r.du.sum()) <= 1e-10 * r.du.abs().sum());
    CHECK(std::abs(r.dv.sum()) <= 1e-10 * r.dv.abs().sum());
  }
  SUBCASE("manufactured 1D fields: second-order consistency") {
    // u = 1 + 0.5 cos(pi x), v = 1 + 0.25 cos(2 pi x), w = 0.3 + 0.25 cos(pi x) on (0,1);
    // all satisfy zero Neumann data, so du = u'' - chi1 (u w')' etc.
    const auto exact = [&](double x, double& du, double& dv, double& dw) {
      const double u = 1 + 0.5 * std::cos(kPi * x), ux = -0.5 * kPi * std::sin(kPi * x),
                   uxx = -0.5 * kPi * kPi * std::cos(kPi * x);
      const double v = 1 + 0.25 * std::cos(2 * kPi * x), vx = -0.5 * kPi * std::sin(2 * kPi * x),
                   vxx = -kPi * kPi * std::cos(2 * kPi * x);
      const double w = 0.3 + 0.25 * std::cos(kPi * x), wx = -0.25 * kPi * std::sin(kPi * x),
                   wxx = -0.25 * kPi * kPi * std::cos(kPi * x);
      du = uxx - params.chi1 * (ux * wx + u * wxx);
      dv = vxx - params.chi2 * (vx * wx + v * wxx);
      dw = wxx - (params.alpha * u + params.beta * v) * w;
    };
    double prev[3] = {0, 0, 0};
    for (int m : {32, 64, 128}) {
      const auto g = Gridd::uniform(1, 1.0, m);
      const Stated s{0.0, g.sample([](double x, double, double) { return 1 + 0.5 * std::cos(kPi * x); }),
                     g.sample([](double x, double, double) { return 1 + 0.25 * std::cos(2 * kPi * x); }),
                     g.sample([](double x, double, double) { return 0.3 + 0.25 * std::cos(kPi * x); })};
      const auto r = rhs(s, params, g, SchemeOptionsd{});
      double err[3] = {0, 0, 0};
      for (int i = 0; i < m; ++i) {
        double du, dv, dw;
        exact(g.center(0, i), du, dv, dw);
        err[0] = std::max(err[0], std::abs(r.du[i] - du));
        err[1] = std::max(err[1], std::abs(r.dv[i] - dv));
        err[2] = std::max(err[2], std::abs(r.dw[i] - dw));
      }
      if (prev[0] > 0)
        for (int k = 0; k < 3; ++k) CHECK(std::log2(prev[k] / err[k]) >= 1.9);
      for (int k = 0; k < 3; ++k) prev[k] = err[k];
    }
  }
}

TEST_CASE("stable_dt") {
  const auto params = ModelParamsd::make(1, 1, 1e-3, 1e-3);
  SchemeOptionsd opt;
  opt.cfl_safety = 0.5;
  const auto g = Gridd::uniform(2, 1.0, 16);
  const double dt = stable_dt(homogeneous_state(g, 1, 1, 0.5), params, g, opt);
  CHECK(dt == doctest::Approx(0.5 * g.spacing(0) * g.spacing(0) / 4).epsilon(1e-14));

  const auto g2 = g.refined(2);
  CHECK(stable_dt(homogeneous_state(g2, 1, 1, 0.5), params, g2, opt) == doctest::Approx(dt / 4).epsilon(1e-14));

  opt.dt_max = 1e-6;
  CHECK(stable_dt(homogeneous_state(g, 1, 1, 0.5), params, g, opt) == 1e-6);

  SUBCASE("absorption limit") {
    const auto strong = ModelParamsd::make(1, 1, 1e4, 1e4);
    CHECK(stable_dt(homogeneous_state(g, 1, 1, 0.5), strong, g, SchemeOptionsd{}) ==
          doctest::Approx(0.5 / 2e4).epsilon(1e-14));
  }
  SUBCASE("smooth 2D scenario at t = 0") {
    const auto c = test::smooth_2d(64, 5.0);
    const double d0 = stable_dt(sampled(c), c.params, c.grid, c.scheme_options());
    CHECK(std::isfinite(d0));
    CHECK(d0 > 0.0);
  }
}

TEST_CASE("step") {
  const auto params = ModelParamsd::make(1, 1, 1, 1);
  SUBCASE("homogeneous: explicit-Euler ODE update") {
    const auto g = Gridd::uniform(2, 1.0, 8);
    const double dt = 1e-3;
    const Stated s = step(homogeneous_state(g, 1.0, 1.0, 0.5), dt, params, g, SchemeOptionsd{});
    CHECK((s.u == 1.0).all());
    CHECK((s.v == 1.0).all());
    CHECK(((s.w - 0.5 * (1 - dt * 2.0)).abs() <= 1e-16).all());
    CHECK(s.t == dt);
  }
  SUBCASE("no chemotaxis: discrete heat equation keeps the mean") {
    const ModelParamsd heat{0.0, 0.0, 1.0, 1.0};
    const auto c = test::smooth_2d(16, 1.0);
    Stated s = sampled(c);
    const double mu = s.u.mean(), mv = s.v.mean();
    const double dt = stable_dt(s, heat, c.grid, SchemeOptionsd{});
    for (int i = 0; i < 50; ++i) s = step(s, dt, heat, c.grid, SchemeOptionsd{});
    CHECK(std::abs(s.u.mean() - mu) <= 1e-14);
    CHECK(std::abs(s.v.mean() - mv) <= 1e-14);
  }
  SUBCASE("masses preserved per step") {
    const auto c = test::smooth_2d(32, 1.0);
    Stated s = sampled(c);
    for (int i = 0; i < 20; ++i) {
      const double mu = mass(s.u, c.grid), mv = mass(s.v, c.grid);
      s = step(s, stable_dt(s, params, c.grid, SchemeOptionsd{}), params, c.grid, SchemeOptionsd{});
      CHECK(std::abs(mass(s.u, c.grid) - mu) <= 1e-13 * mu);
      CHECK(std::abs(mass(s.v, c.grid) - mv) <= 1e-13 * mv);
    }
  }
  SUBCASE("one full step vs two half steps differ by O(dt^2)") {
    const auto c = test::smooth_1d(32, 1.0);
    const Stated s0 = sampled(c);
    double prev = 0.0;
    for (double dt : {2e-4, 1e-4, 5e-5}) {
      const Stated full = step(s0, dt, params, c.grid, SchemeOptionsd{});
      const Stated half = step(step(s0, dt / 2, params, c.grid, SchemeOptionsd{}), dt / 2, params, c.grid,
                               SchemeOptionsd{});
      const double diff = (full.u - half.u).abs().maxCoeff() + (full.w - half.w).abs().maxCoeff();
      if (prev > 0) CHECK(std::log2(prev / diff) == doctest::Approx(2.0).epsilon(0.05));
      prev = diff;
    }
  }
  SUBCASE("errors") {
    const auto g = Gridd::uniform(1, 1.0, 8);
    Stated s = homogeneous_state(g, 1.0, 1.0, 0.5);
    s.u[4] = 50.0;
    CHECK_THROWS_AS(step(s, 0.1, params, g, SchemeOptionsd{}), PositivityViolation);
    s.u[4] = NAN;
    CHECK_THROWS_AS(step(s, 1e-4, params, g, SchemeOptionsd{}), NumericalBlowup);
    CHECK_THROWS_AS(step(homogeneous_state(g, 1, 1, 0.5), 1e-16, params, g, SchemeOptionsd{}), StepSizeError);
  }
  SUBCASE("tiny negative signal is clipped to zero") {
    const auto g = Gridd::uniform(1, 1.0, 4);
    Stated s = homogeneous_state(g, 1.0, 1.0, 0.0);
    s.w[0] = -5e-15;
    const Stated n = step(s, 1e-15, ModelParamsd{1, 1, 1e-9, 1e-9}, g, SchemeOptionsd{});
    CHECK(n.w.minCoeff() >= 0.0);
  }
}

TEST_CASE("run: homogeneous data stays homogeneous") {
  auto c = test::homogeneous(1, 8, 1.0);
  c.dt_max = 1e-4;
  const auto r = run(c);
  CHECK(r.outcome == Outcome::completed);
  CHECK(r.final_state.t == 1.0);
  CHECK((r.final_state.u == 1.0).all());
  CHECK(r.final_state.w.maxCoeff() == r.final_state.w.minCoeff());
  CHECK(std::abs(r.series.back().linf_w - 0.5 * std::exp(-2.0)) <= 1e-4);
  CHECK(r.series.size() == 201);
  CHECK(r.series.front().t == 0.0);
}

TEST_CASE("run: invariants on a smooth 2D scenario") {
  for (auto scheme : {Advection::central, Advection::upwind}) {
    auto c = test::smooth_2d(16, 0.5, scheme);
    double max_prev = c.w0.base + c.w0.amplitude;
    const auto r = run(c, [&](const Stated& s, const DiagnosticsRecord&) {
      CHECK(s.u.minCoeff() >= -1e-12);
      CHECK(s.v.minCoeff() >= -1e-12);
      CHECK(s.w.minCoeff() >= -1e-12);
      CHECK(s.w.maxCoeff() <= 0.5 + 1e-12);
      CHECK(s.w.maxCoeff() <= max_prev + 1e-12);
      max_prev = s.w.maxCoeff();
    });
    for (const auto& rec : r.series) {
      CHECK(std::abs(rec.mass_u - r.context.mass_u0) <= 1e-10 * r.context.mass_u0);
      CHECK(std::abs(rec.mass_v - r.context.mass_v0) <= 1e-10 * r.context.mass_v0);
    }
  }
}

TEST_CASE("run: reflection symmetry is preserved") {
  // Data symmetric under x -> 1 - x (odd modes of cos cancel in the products used here).
  auto c = test::smooth_2d(16, 0.2);
  c.u0 = test::cosine_bump(1.0, 0.4, {2, 1, 0});
  c.v0 = test::cosine_bump(1.0, 0.2, {2, 0, 0});
  c.w0 = test::cosine_bump(0.3, 0.2, {2, 0, 0});
  const auto& g = c.grid;
  run(c, [&](const Stated& s, const DiagnosticsRecord&) {
    double asym = 0.0;
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) {
        const auto a = g.index(i, j), b = g.index(15 - i, j);
        asym = std::max({asym, std::abs(s.u[a] - s.u[b]), std::abs(s.v[a] - s.v[b]), std::abs(s.w[a] - s.w[b])});
      }
    CHECK(asym <= 1e-12);
  });
}

TEST_CASE("run: upwind keeps densities nonnegative on steep data") {
  ScenarioConfig c = test::smooth_1d(64, 0.2, Advection::upwind);
  c.params = ModelParamsd::make(3, 3, 1, 1);
  InitialSpec u;
  u.kind = InitialKind::gaussian;
  u.center = {0.2, 0, 0};
  u.width = 0.03;
  u.amplitude = 5.0;
  u.floor = 1e-8;
  c.u0 = u;
  c.v0 = u;
  InitialSpec w = u;
  w.center = {0.7, 0, 0};
  w.amplitude = 0.9;
  w.floor = 0.0;
  c.w0 = w;
  run(c, [&](const Stated& s, const DiagnosticsRecord&) {
    CHECK(s.u.minCoeff() >= -1e-12);
    CHECK(s.v.minCoeff() >= -1e-12);
  });
}

TEST_CASE("run: blow-up sentinel reports instead of crashing") {
  ScenarioConfig c = test::smooth_1d(64, 1.0);
  c.params = ModelParamsd::make(10, 10, 1, 1);
  c.u0 = test::constant(1.0);
  c.v0 = test::constant(1.0);
  InitialSpec w;
  w.kind = InitialKind::gaussian;
  w.center = {0.5, 0, 0};
  w.width = 0.1;
  w.amplitude = 1.0;
  c.w0 = w;
  c.blowup_linf = 1.05;
  const auto r = run(c);
  CHECK(r.outcome == Outcome::blowup);
  REQUIRE(r.blowup.has_value());
  CHECK(r.blowup->field == "u");
  CHECK(r.blowup->value > 1.05);
  CHECK(r.blowup->t < 1.0);
}
