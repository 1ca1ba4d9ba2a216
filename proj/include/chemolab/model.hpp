#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chemolab {

/// Cell-indexed field. Layout is row-major with the x index fastest.
template <typename Scalar>
using Field = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Fieldd = Field<double>;

class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidInitialData : public std::invalid_argument {
public:
  InvalidInitialData(const std::string& what, std::ptrdiff_t cell)
      : std::invalid_argument(what + " (cell " + std::to_string(cell) + ")"), cell_(cell) {}

  std::ptrdiff_t cell() const noexcept { return cell_; }

private:
  std::ptrdiff_t cell_;
};

/// Chemotactic sensitivities and consumption rates, all strictly positive.
template <typename Scalar>
struct ModelParams {
  Scalar chi1{1};
  Scalar chi2{1};
  Scalar alpha{1};
  Scalar beta{1};

  static ModelParams make(Scalar chi1, Scalar chi2, Scalar alpha, Scalar beta) {
    const auto check = [](Scalar x, const char* name) {
      if (!(x > Scalar(0)) || !std::isfinite(static_cast<double>(x)))
        throw ParameterError(std::string(name) + " must be positive and finite");
    };
    check(chi1, "chi1");
    check(chi2, "chi2");
    check(alpha, "alpha");
    check(beta, "beta");
    return ModelParams{chi1, chi2, alpha, beta};
  }

  Scalar chi_max() const { return chi1 > chi2 ? chi1 : chi2; }
};

using ModelParamsd = ModelParams<double>;

/// Uniform cell-centered mesh on the box (0,L_0) x ... x (0,L_{dim-1}).
/// Unused axes carry one cell of unit length so loops can always run in 3D.
template <typename Scalar>
class Grid {
public:
  Grid() = default;

  static Grid make(int dim, const std::array<Scalar, 3>& lengths, const std::array<int, 3>& cells) {
    if (dim < 1 || dim > 3) throw ParameterError("grid dimension must be 1, 2 or 3");
    Grid g;
    g.dim_ = dim;
    for (int a = 0; a < 3; ++a) {
      if (a < dim) {
        if (!(lengths[a] > Scalar(0)) || !std::isfinite(static_cast<double>(lengths[a])))
          throw ParameterError("grid length on axis " + std::to_string(a) + " must be positive");
        if (cells[a] < 2)
          throw ParameterError("grid needs at least 2 cells on axis " + std::to_string(a));
        g.lengths_[a] = lengths[a];
        g.cells_[a] = cells[a];
      } else {
        g.lengths_[a] = Scalar(1);
        g.cells_[a] = 1;
      }
      g.spacing_[a] = g.lengths_[a] / Scalar(g.cells_[a]);
    }
    g.volume_element_ = Scalar(1);
    for (int a = 0; a < dim; ++a) g.volume_element_ *= g.spacing_[a];
    g.strides_ = {1, g.cells_[0], g.cells_[0] * g.cells_[1]};
    return g;
  }

  /// Convenience for cubes and squares: same length and cell count on every axis.
  static Grid uniform(int dim, Scalar length, int cells) {
    return make(dim, {length, length, length}, {cells, cells, cells});
  }

  int dim() const { return dim_; }
  Scalar length(int axis) const { return lengths_[axis]; }
  int cells(int axis) const { return cells_[axis]; }
  Scalar spacing(int axis) const { return spacing_[axis]; }
  std::ptrdiff_t stride(int axis) const { return strides_[axis]; }
  Scalar volume_element() const { return volume_element_; }
  std::ptrdiff_t size() const {
    return std::ptrdiff_t(cells_[0]) * cells_[1] * cells_[2];
  }
  Scalar volume() const {
    Scalar v(1);
    for (int a = 0; a < dim_; ++a) v *= lengths_[a];
    return v;
  }
  Scalar min_spacing() const {
    Scalar h = spacing_[0];
    for (int a = 1; a < dim_; ++a) h = spacing_[a] < h ? spacing_[a] : h;
    return h;
  }

  std::ptrdiff_t index(int i, int j = 0, int k = 0) const {
    return i + strides_[1] * j + strides_[2] * k;
  }

  /// Cell-center coordinate along one axis.
  Scalar center(int axis, int i) const { return (Scalar(i) + Scalar(0.5)) * spacing_[axis]; }

  /// Samples f(x, y, z) at every cell center; unused coordinates are passed as 0.
  template <typename Fn>
  Field<Scalar> sample(Fn&& f) const {
    Field<Scalar> out(size());
    for (int k = 0; k < cells_[2]; ++k)
      for (int j = 0; j < cells_[1]; ++j)
        for (int i = 0; i < cells_[0]; ++i) {
          const Scalar x = center(0, i);
          const Scalar y = dim_ > 1 ? center(1, j) : Scalar(0);
          const Scalar z = dim_ > 2 ? center(2, k) : Scalar(0);
          out[index(i, j, k)] = f(x, y, z);
        }
    return out;
  }

  /// Same box with every axis refined by `factor`.
  Grid refined(int factor) const {
    std::array<int, 3> c = cells_;
    for (int a = 0; a < dim_; ++a) c[a] *= factor;
    return make(dim_, lengths_, c);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int dim_{1};
  std::array<Scalar, 3> lengths_{1, 1, 1};
  std::array<int, 3> cells_{2, 1, 1};
  std::array<Scalar, 3> spacing_{Scalar(0.5), 1, 1};
  std::array<std::ptrdiff_t, 3> strides_{1, 2, 2};
  Scalar volume_element_{Scalar(0.5)};
};

using Gridd = Grid<double>;

/// Cell averages of the two population densities and the signal at time t.
template <typename Scalar>
struct State {
  Scalar t{0};
  Field<Scalar> u;
  Field<Scalar> v;
  Field<Scalar> w;
};

using Stated = State<double>;

template <typename Scalar>
struct InitialData {
  Field<Scalar> u;
  Field<Scalar> v;
  Field<Scalar> w;
  Scalar u_mean{0};
  Scalar v_mean{0};
  Scalar w_max{0};
};

using InitialDatad = InitialData<double>;

/// Requires u0 > 0, v0 > 0, w0 >= 0 and finite in every cell; records the
/// spatial means of u0, v0 and the sup-norm of w0.
template <typename Scalar>
InitialData<Scalar> validate_initial_data(const Field<Scalar>& u0, const Field<Scalar>& v0,
                                          const Field<Scalar>& w0, const Grid<Scalar>& grid) {
  const auto n = grid.size();
  if (u0.size() != n || v0.size() != n || w0.size() != n)
    throw ParameterError("initial fields do not match the grid size " + std::to_string(n));

  InitialData<Scalar> out{u0, v0, w0, Scalar(0), Scalar(0), Scalar(0)};
  Scalar su(0), sv(0);
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    if (!std::isfinite(static_cast<double>(u0[c])) || !std::isfinite(static_cast<double>(v0[c])) ||
        !std::isfinite(static_cast<double>(w0[c])))
      throw InvalidInitialData("non-finite initial value", c);
    if (!(u0[c] > Scalar(0)) || !(v0[c] > Scalar(0)))
      throw InvalidInitialData("non-positive initial density", c);
    if (w0[c] < Scalar(0)) throw InvalidInitialData("negative initial signal", c);
    su += u0[c];
    sv += v0[c];
    out.w_max = w0[c] > out.w_max ? w0[c] : out.w_max;
  }
  out.u_mean = su / Scalar(n);
  out.v_mean = sv / Scalar(n);
  return out;
}

template <typename Scalar>
struct ThresholdReport {
  Scalar m1{0};
  Scalar m2{0};
  Scalar bound{0};
  bool within{true};
};

/// Smallness condition for global boundedness: max(chi_i * |w0|_inf) < sqrt(2/n) * pi.
template <typename Scalar>
ThresholdReport<Scalar> threshold_check(const ModelParams<Scalar>& params, Scalar w0_max, int n) {
  if (w0_max < Scalar(0)) throw ParameterError("w0_max must be nonnegative");
  if (n < 1) throw ParameterError("spatial dimension must be at least 1");
  using std::sqrt;
  ThresholdReport<Scalar> r;
  r.m1 = params.chi1 * w0_max;
  r.m2 = params.chi2 * w0_max;
  r.bound = sqrt(Scalar(2) / Scalar(n)) * std::numbers::pi_v<Scalar>;
  r.within = (r.m1 > r.m2 ? r.m1 : r.m2) < r.bound;
  return r;
}

}  // namespace chemolab
