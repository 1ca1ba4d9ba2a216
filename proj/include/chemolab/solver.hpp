#pragma once

// Conservative cell-centered finite-volume discretization of
//
//   u_t = div(grad u - chi1 u grad w)
//   v_t = div(grad v - chi2 v grad w)
//   w_t = div(grad w) - (alpha u + beta v) w
//
// with zero flux through every boundary face, advanced by explicit Euler.

#include "chemolab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chemolab {

enum class Advection { central, upwind };

template <typename Scalar>
struct SchemeOptions {
  Advection advection{Advection::central};
  Scalar dt_max{std::numeric_limits<Scalar>::infinity()};
  Scalar cfl_safety{Scalar(0.5)};
  Scalar blowup_linf{Scalar(1e8)};
};

using SchemeOptionsd = SchemeOptions<double>;

/// Per-axis face values. Entry c of axis a belongs to the face between cell c
/// and cell c + stride(a); for the last cell along the axis that face is the
/// boundary and holds zero. Lower boundary faces are implicit zeros. Axes beyond
/// grid.dim() are empty.
template <typename Scalar>
using FaceField = std::array<Field<Scalar>, 3>;

template <typename Scalar>
struct FaceFluxes {
  FaceField<Scalar> u, v, w;
};

template <typename Scalar>
struct Rates {
  Field<Scalar> du, dv, dw;
};

class PositivityViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced by an update.
class NumericalBlowup : public std::runtime_error {
public:
  NumericalBlowup(const std::string& field, std::ptrdiff_t cell)
      : std::runtime_error("non-finite " + field + " in cell " + std::to_string(cell)),
        field_(field), cell_(cell) {}
  const std::string& field() const noexcept { return field_; }
  std::ptrdiff_t cell() const noexcept { return cell_; }

private:
  std::string field_;
  std::ptrdiff_t cell_;
};

class StepSizeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMinTimeStep = 1e-15;

namespace detail {

/// Calls fn(left, right) for every interior face normal to `axis`.
template <typename Scalar, typename Fn>
void for_each_interior_face(const Grid<Scalar>& grid, int axis, Fn&& fn) {
  const int nx = grid.cells(0), ny = grid.cells(1), nz = grid.cells(2);
  const std::ptrdiff_t s = grid.stride(axis);
  const int ilim = axis == 0 ? nx - 1 : nx;
  const int jlim = axis == 1 ? ny - 1 : ny;
  const int klim = axis == 2 ? nz - 1 : nz;
  for (int k = 0; k < klim; ++k)
    for (int j = 0; j < jlim; ++j) {
      const std::ptrdiff_t row = grid.index(0, j, k);
      for (int i = 0; i < ilim; ++i) fn(row + i, row + i + s);
    }
}

template <typename Scalar>
FaceField<Scalar> zero_faces(const Grid<Scalar>& grid) {
  FaceField<Scalar> f;
  for (int a = 0; a < grid.dim(); ++a) f[a] = Field<Scalar>::Zero(grid.size());
  return f;
}

}  // namespace detail

/// Two-point gradient (w_right - w_left) / h across interior faces.
template <typename Scalar>
FaceField<Scalar> grad_w_faces(const Field<Scalar>& w, const Grid<Scalar>& grid) {
  FaceField<Scalar> g = detail::zero_faces(grid);
  for (int a = 0; a < grid.dim(); ++a) {
    const Scalar inv_h = Scalar(1) / grid.spacing(a);
    auto& ga = g[a];
    detail::for_each_interior_face(grid, a, [&](std::ptrdiff_t l, std::ptrdiff_t r) {
      ga[l] = (w[r] - w[l]) * inv_h;
    });
  }
  return g;
}

/// Total face flux F = -grad(density) + chi * density_face * grad_w.
template <typename Scalar>
FaceField<Scalar> species_flux(const Field<Scalar>& density, Scalar chi, const FaceField<Scalar>& gw,
                               const Grid<Scalar>& grid, Advection scheme) {
  FaceField<Scalar> f = detail::zero_faces(grid);
  for (int a = 0; a < grid.dim(); ++a) {
    const Scalar inv_h = Scalar(1) / grid.spacing(a);
    const auto& ga = gw[a];
    auto& fa = f[a];
    detail::for_each_interior_face(grid, a, [&](std::ptrdiff_t l, std::ptrdiff_t r) {
      const Scalar vel = chi * ga[l];
      Scalar face;
      if (scheme == Advection::upwind && vel != Scalar(0))
        face = vel > Scalar(0) ? density[l] : density[r];
      else
        face = Scalar(0.5) * (density[l] + density[r]);
      fa[l] = -(density[r] - density[l]) * inv_h + vel * face;
    });
  }
  return f;
}

/// Pure diffusive flux -grad(f).
template <typename Scalar>
FaceField<Scalar> diffusive_flux(const Field<Scalar>& f, const Grid<Scalar>& grid) {
  FaceField<Scalar> g = grad_w_faces(f, grid);
  for (int a = 0; a < grid.dim(); ++a) g[a] = -g[a];
  return g;
}

/// Cell-wise discrete divergence of a face flux; telescopes to zero over the grid.
template <typename Scalar>
Field<Scalar> divergence(const FaceField<Scalar>& flux, const Grid<Scalar>& grid) {
  Field<Scalar> div = Field<Scalar>::Zero(grid.size());
  for (int a = 0; a < grid.dim(); ++a) {
    const Scalar inv_h = Scalar(1) / grid.spacing(a);
    const auto& fa = flux[a];
    detail::for_each_interior_face(grid, a, [&](std::ptrdiff_t l, std::ptrdiff_t r) {
      const Scalar q = fa[l] * inv_h;
      div[l] += q;
      div[r] -= q;
    });
  }
  return div;
}

template <typename Scalar>
FaceFluxes<Scalar> face_fluxes(const State<Scalar>& state, const ModelParams<Scalar>& params,
                               const Grid<Scalar>& grid, Advection scheme) {
  const FaceField<Scalar> gw = grad_w_faces(state.w, grid);
  return {species_flux(state.u, params.chi1, gw, grid, scheme),
          species_flux(state.v, params.chi2, gw, grid, scheme), diffusive_flux(state.w, grid)};
}

template <typename Scalar>
Rates<Scalar> rhs(const State<Scalar>& state, const ModelParams<Scalar>& params, const Grid<Scalar>& grid,
                  const SchemeOptions<Scalar>& scheme) {
  const FaceFluxes<Scalar> f = face_fluxes(state, params, grid, scheme.advection);
  Rates<Scalar> r;
  r.du = -divergence(f.u, grid);
  r.dv = -divergence(f.v, grid);
  r.dw = -divergence(f.w, grid) - (params.alpha * state.u + params.beta * state.v) * state.w;
  return r;
}

/// Explicit-Euler step size from the diffusive, advective and absorption limits.
template <typename Scalar>
Scalar stable_dt(const State<Scalar>& state, const ModelParams<Scalar>& params, const Grid<Scalar>& grid,
                 const SchemeOptions<Scalar>& scheme) {
  const Scalar tiny = std::numeric_limits<Scalar>::min();
  const Scalar h = grid.min_spacing();
  const Scalar diffusive = h * h / Scalar(2 * grid.dim());

  const FaceField<Scalar> gw = grad_w_faces(state.w, grid);
  Scalar gmax(0);
  for (int a = 0; a < grid.dim(); ++a) gmax = std::max(gmax, gw[a].abs().maxCoeff());
  const Scalar advective = h / std::max(params.chi_max() * gmax, tiny);

  const Scalar rate = (params.alpha * state.u + params.beta * state.v).maxCoeff();
  const Scalar absorption = Scalar(1) / std::max(rate, tiny);

  const Scalar dt = scheme.cfl_safety * std::min({diffusive, advective, absorption});
  return std::min(dt, scheme.dt_max);
}

/// One forward-Euler step. Throws PositivityViolation if any density or the
/// signal drops below -1e-12, NumericalBlowup on non-finite values.
template <typename Scalar>
State<Scalar> step(const State<Scalar>& state, Scalar dt, const ModelParams<Scalar>& params,
                   const Grid<Scalar>& grid, const SchemeOptions<Scalar>& scheme) {
  if (!(dt >= Scalar(kMinTimeStep)))
    throw StepSizeError("time step " + std::to_string(static_cast<double>(dt)) + " below floor");
  const Rates<Scalar> r = rhs(state, params, grid, scheme);
  State<Scalar> next{state.t + dt, state.u + dt * r.du, state.v + dt * r.dv, state.w + dt * r.dw};

  const Scalar neg_tol(1e-12);
  const Scalar clip_tol(1e-14);
  const auto check = [&](Field<Scalar>& f, const char* name, bool clip) {
    for (std::ptrdiff_t c = 0; c < f.size(); ++c) {
      const Scalar x = f[c];
      if (!std::isfinite(static_cast<double>(x))) throw NumericalBlowup(name, c);
      if (x < Scalar(0)) {
        if (x < -neg_tol)
          throw PositivityViolation(std::string("positivity violation in ") + name + " at cell " +
                                    std::to_string(c) + " (reduce dt or switch to upwind)");
        if (clip && x >= -clip_tol) f[c] = Scalar(0);
      }
    }
  };
  check(next.u, "u", false);
  check(next.v, "v", false);
  check(next.w, "w", true);
  return next;
}

}  // namespace chemolab
