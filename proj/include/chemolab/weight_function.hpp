#pragma once

// Tangent-kernel weight function phi(s) = exp(z(s)) used to build a weighted
// L^p energy (1/p) * int u^p phi(chi * w) that stays bounded below the
// chemotactic threshold, together with the explicit (p, eps) construction
// that certifies a given signal amplitude M.

#include "chemolab/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chemolab {

class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

template <typename Scalar>
struct WeightCoefficients {
  Scalar a, b, c, d;
};

namespace detail {

template <typename Scalar>
void check_weight_params(Scalar p, Scalar eps) {
  if (!(p > Scalar(1))) throw ParameterError("weight exponent p must exceed 1");
  if (!(eps > Scalar(0) && eps < Scalar(1))) throw ParameterError("weight eps must lie in (0,1)");
}

// 1 + (p-1) eps - p eps^2, written as (1 - eps)(1 + p eps) to avoid cancellation.
template <typename Scalar>
Scalar reduced_discriminant(Scalar p, Scalar eps) {
  return (Scalar(1) - eps) * (Scalar(1) + p * eps);
}

}  // namespace detail

template <typename Scalar>
WeightCoefficients<Scalar> coefficients(Scalar p, Scalar eps) {
  detail::check_weight_params(p, eps);
  const Scalar q = p - Scalar(1);
  return {q * q, Scalar(-4) * q * eps, Scalar(4) / p * (Scalar(1) + q * eps),
          Scalar(4) / p * q * (Scalar(1) - eps)};
}

/// Supremum of admissible amplitudes M for the given (p, eps).
template <typename Scalar>
Scalar admissible_bound(Scalar p, Scalar eps) {
  detail::check_weight_params(p, eps);
  using std::atan;
  using std::sqrt;
  const Scalar half_pi = std::numbers::pi_v<Scalar> / Scalar(2);
  return Scalar(2) / sqrt(p) * sqrt((Scalar(1) - eps) / (Scalar(1) + p * eps)) *
         (half_pi + atan(sqrt(p / detail::reduced_discriminant(p, eps)) * eps));
}

/// phi(s) = exp(z(s)) on [0, m], with
///   z(s)  = -(b/2c) s + (sqrt(disc)/2c) * int_0^s tan(kappa t + theta0) dt,
///   kappa = sqrt(disc) / (2d),  theta0 = atan(b / sqrt(disc)),  disc = 4ac - b^2.
template <typename Scalar>
class WeightFunction {
public:
  Scalar p() const { return p_; }
  Scalar eps() const { return eps_; }
  Scalar m() const { return m_; }
  Scalar a() const { return coef_.a; }
  Scalar b() const { return coef_.b; }
  Scalar c() const { return coef_.c; }
  Scalar d() const { return coef_.d; }
  Scalar disc() const { return disc_; }
  Scalar theta0() const { return theta0_; }
  Scalar kappa() const { return kappa_; }

  /// Phase kappa*s + theta0 of the tangent; stays inside (-pi/2, pi/2) on [0, m].
  Scalar phase(Scalar s) const { return kappa_ * s + theta0_; }

  Scalar z(Scalar s) const {
    check_domain(s);
    using std::cos;
    using std::log;
    // int_0^s tan(kappa t + theta0) dt = -(1/kappa) log(cos(phase(s)) / cos(theta0)),
    // and sqrt(disc) / (2 c kappa) = d / c.
    return -coef_.b / (Scalar(2) * coef_.c) * s -
           coef_.d / coef_.c * (log(cos(phase(s))) - log(cos(theta0_)));
  }

  Scalar z_prime(Scalar s) const {
    check_domain(s);
    using std::tan;
    return -coef_.b / (Scalar(2) * coef_.c) + sqrt_disc_ / (Scalar(2) * coef_.c) * tan(phase(s));
  }

  Scalar z_second(Scalar s) const {
    const Scalar zp = z_prime(s);
    return (coef_.a + coef_.b * zp + coef_.c * zp * zp) / coef_.d;
  }

  Scalar phi(Scalar s) const {
    using std::exp;
    return exp(z(s));
  }

  Scalar phi_prime(Scalar s) const { return phi(s) * z_prime(s); }

  Scalar phi_second(Scalar s) const {
    const Scalar zp = z_prime(s);
    return phi(s) * (z_second(s) + zp * zp);
  }

  /// |(p-1)phi - 2phi'| - 2 sqrt((p-1)(1-eps) phi (phi''/p - phi')); identically zero.
  /// The radicand is clipped at zero when its negative part is rounding noise
  /// (within 1e-12 relative to the terms that produce it).
  Scalar identity_residual(Scalar s) const {
    using std::abs;
    using std::sqrt;
    const Scalar f = phi(s);
    const Scalar fp = phi_prime(s);
    const Scalar fpp = phi_second(s);
    const Scalar q = p_ - Scalar(1);
    const Scalar gap = fpp / p_ - fp;
    Scalar radicand = q * (Scalar(1) - eps_) * f * gap;
    if (radicand < Scalar(0)) {
      const Scalar scale = q * (Scalar(1) - eps_) * f * (abs(fpp / p_) + abs(fp));
      const Scalar floor = Scalar(1e-12) * (scale > Scalar(1) ? scale : Scalar(1));
      if (radicand < -floor)
        throw std::logic_error("negative radicand " + std::to_string(static_cast<double>(radicand)) +
                               " in weight identity at s=" + std::to_string(static_cast<double>(s)));
      radicand = Scalar(0);
    }
    return abs(q * f - Scalar(2) * fp) - Scalar(2) * sqrt(radicand);
  }

  template <typename S>
  friend WeightFunction<S> make_weight(S p, S eps, S m);

private:
  void check_domain(Scalar s) const {
    if (!(s >= Scalar(0) && s <= m_))
      throw DomainError("weight argument " + std::to_string(static_cast<double>(s)) +
                        " outside [0, " + std::to_string(static_cast<double>(m_)) + "]");
  }

  Scalar p_{}, eps_{}, m_{};
  WeightCoefficients<Scalar> coef_{};
  Scalar disc_{}, sqrt_disc_{}, theta0_{}, kappa_{};
};

using WeightFunctiond = WeightFunction<double>;

/// Builds phi on [0, m]. Fails when m is not strictly below admissible_bound(p, eps)
/// (ties within 1e-12 are rejected too: the tangent would reach its pole).
template <typename Scalar>
WeightFunction<Scalar> make_weight(Scalar p, Scalar eps, Scalar m) {
  detail::check_weight_params(p, eps);
  if (!(m >= Scalar(0))) throw ParameterError("weight amplitude m must be nonnegative");
  const Scalar bound = admissible_bound(p, eps);
  if (!(m < bound - Scalar(1e-12)))
    throw ParameterError("admissibility condition violated: m = " + std::to_string(static_cast<double>(m)) +
                         " is not below " + std::to_string(static_cast<double>(bound)));
  using std::atan;
  using std::sqrt;
  WeightFunction<Scalar> wf;
  wf.p_ = p;
  wf.eps_ = eps;
  wf.m_ = m;
  wf.coef_ = coefficients(p, eps);
  const Scalar q = p - Scalar(1);
  wf.disc_ = Scalar(16) * q * q / p * detail::reduced_discriminant(p, eps);
  wf.sqrt_disc_ = sqrt(wf.disc_);
  wf.theta0_ = atan(wf.coef_.b / wf.sqrt_disc_);
  wf.kappa_ = wf.sqrt_disc_ / (Scalar(2) * wf.coef_.d);
  return wf;
}

template <typename Scalar>
Scalar z_eval(const WeightFunction<Scalar>& wf, Scalar s) { return wf.z(s); }
template <typename Scalar>
Scalar phi_eval(const WeightFunction<Scalar>& wf, Scalar s) { return wf.phi(s); }
template <typename Scalar>
Scalar phi_prime(const WeightFunction<Scalar>& wf, Scalar s) { return wf.phi_prime(s); }
template <typename Scalar>
Scalar phi_second(const WeightFunction<Scalar>& wf, Scalar s) { return wf.phi_second(s); }
template <typename Scalar>
Scalar phi_identity_residual(const WeightFunction<Scalar>& wf, Scalar s) {
  return wf.identity_residual(s);
}

/// eps = (pi^2 - (n/2) M^2) / (2 (pi^2 + (n/2)^2 M^2)), the choice that makes
/// M = (2/sqrt(n/2)) sqrt((1-2eps)/(1+2eps n/2)) pi/2 hold exactly.
template <typename Scalar>
Scalar epsilon_for_threshold(Scalar m, int n) {
  using std::sqrt;
  if (n < 1) throw ParameterError("spatial dimension must be at least 1");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(m >= Scalar(0))) throw ParameterError("amplitude must be nonnegative");
  if (!(m < sqrt(Scalar(2) / Scalar(n)) * pi))
    throw ParameterError("amplitude is above threshold sqrt(2/n)*pi");
  const Scalar h = Scalar(n) / Scalar(2);
  return (pi * pi - h * m * m) / (Scalar(2) * (pi * pi + h * h * m * m));
}

/// Right-hand side of the identity that epsilon_for_threshold inverts.
template <typename Scalar>
Scalar threshold_amplitude(Scalar eps, int n) {
  using std::sqrt;
  const Scalar h = Scalar(n) / Scalar(2);
  return Scalar(2) / sqrt(h) * sqrt((Scalar(1) - Scalar(2) * eps) / (Scalar(1) + Scalar(2) * eps * h)) *
         std::numbers::pi_v<Scalar> / Scalar(2);
}

/// Positive root p of m^2 = (1 - eps) pi^2 / (p (1 + eps p)), i.e. of
/// eps p^2 + p - K = 0 with K = pi^2 (1 - eps) / m^2.
template <typename Scalar>
Scalar p_for_equality(Scalar m, Scalar eps) {
  using std::sqrt;
  if (!(m > Scalar(0))) throw ParameterError("amplitude must be positive");
  if (!(eps > Scalar(0) && eps < Scalar(1))) throw ParameterError("eps must lie in (0,1)");
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar k = pi * pi * (Scalar(1) - eps) / (m * m);
  // Rationalized quadratic root: no cancellation as eps -> 0 (p -> K).
  const Scalar p = Scalar(2) * k / (Scalar(1) + sqrt(Scalar(1) + Scalar(4) * eps * k));
  if (!(p > Scalar(0)) || !std::isfinite(static_cast<double>(p)))
    throw ParameterError("no positive root for p");
  return p;
}

}  // namespace chemolab
