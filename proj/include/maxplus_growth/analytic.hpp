#pragma once

/**
 * @file analytic.hpp
 * @brief Closed forms for the 2x2 diagonal max-plus system
 *
 *     x(k) = max(alpha_k + x(k-1), y(k-1))
 *     y(k) = max(x(k-1), beta_k + y(k-1)),      z(0) = (0, 0),
 *
 * with alpha_k ~ Exp(mu) and beta_k ~ Exp(nu) independent.
 *
 * Y(k) = y(k) - x(k) has the two-sided exponential law
 *
 *     Psi_k(t) = c1 e^{mu t}          t <= 0
 *              = 1 - c2 e^{-nu t}     t >  0,
 *
 * and the coefficient pair (c1, c2) evolves under a scalar affine map whose
 * fixed point gives the stationary law Psi. Z(k) = ||z(k)|| - ||z(k-1)||
 * converges in law to Z with CDF Phi, and the growth rate is lambda = E[Z].
 *
 * Supported rate domain is [1e-3, 1e3]; exponentials are evaluated directly.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "maxplus_growth/quadrature.hpp"

namespace mpgrowth {

/// Rates of the exponential diagonal entries: alpha ~ Exp(mu), beta ~ Exp(nu).
class RateParams {
 public:
  RateParams(double mu, double nu) : mu_(mu), nu_(nu) {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("mu must be > 0 (got " + std::to_string(mu) + ")");
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw std::invalid_argument("nu must be > 0 (got " + std::to_string(nu) + ")");
  }

  double mu() const { return mu_; }
  double nu() const { return nu_; }
  double min_rate() const { return std::min(mu_, nu_); }
  RateParams swapped() const { return {nu_, mu_}; }

  bool operator==(const RateParams&) const = default;

 private:
  double mu_;
  double nu_;
};

/// Coefficients of a two-sided exponential CDF; c1 + c2 = 1 for every law
/// produced here (continuity at t = 0).
struct PsiCoefficients {
  double c1 = 0.5;
  double c2 = 0.5;
};

namespace analytic {

inline double exp_cdf(double rate, double t) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  return t <= 0.0 ? 0.0 : -std::expm1(-rate * t);
}

inline double exp_pdf(double rate, double t) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  return t < 0.0 ? 0.0 : rate * std::exp(-rate * t);
}

/// Law of Y(1) = beta_1 - alpha_1.
inline PsiCoefficients psi1(const RateParams& p) {
  const double s = p.mu() + p.nu();
  return {p.nu() / s, p.mu() / s};
}

/// mu nu \int\int Psi(u - v) e^{-mu u - nu v} du dv over the positive quadrant,
/// for Psi in two-sided exponential form.
inline double weighted_integral(const RateParams& p, const PsiCoefficients& c) {
  const double s = p.mu() + p.nu();
  const double a = p.mu() * p.nu() / (s * s);
  return a * (c.c1 - c.c2) + p.nu() / s;
}

/// One step of the recursion Psi_{k-1} -> Psi_k in coefficient form.
inline PsiCoefficients psi_next(const RateParams& p, const PsiCoefficients& c) {
  const double c1 = weighted_integral(p, c);
  return {c1, 1.0 - c1};
}

/// Coefficients of Psi_k, k >= 1.
inline PsiCoefficients psi_k(const RateParams& p, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  PsiCoefficients c = psi1(p);
  for (std::size_t i = 1; i < k; ++i) c = psi_next(p, c);
  return c;
}

/// Stationary law: the fixed point of psi_next.
inline PsiCoefficients psi_limit(const RateParams& p) {
  const double mu2 = p.mu() * p.mu();
  const double nu2 = p.nu() * p.nu();
  return {nu2 / (mu2 + nu2), mu2 / (mu2 + nu2)};
}

/// Factor by which |c1^(k) - c1*| shrinks per step: 2 mu nu / (mu + nu)^2 <= 1/2.
inline double contraction_ratio(const RateParams& p) {
  const double s = p.mu() + p.nu();
  return 2.0 * p.mu() * p.nu() / (s * s);
}

/// t = 0 is evaluated on the left branch.
inline double psi_eval(const RateParams& p, const PsiCoefficients& c, double t) {
  if (t <= 0.0) return c.c1 * std::exp(p.mu() * t);
  return 1.0 - c.c2 * std::exp(-p.nu() * t);
}

/// CDF of the limiting increment Z.
///
/// Obtained by substituting the stationary Psi into
///   Phi(t) = G(t) (1 - \int_0^inf Psi(u) f(u+t) du) + F(t) \int_0^inf Psi(-u) g(u+t) du.
/// The mu nu e^{-(mu+nu)t} term enters with a minus sign, which makes Phi(0) = 0.
inline double phi_cdf(const RateParams& p, double t) {
  if (t <= 0.0) return 0.0;
  const double mu = p.mu();
  const double nu = p.nu();
  const double q = mu * mu + nu * nu;
  const double r = (mu * mu + mu * nu + nu * nu) / (mu + nu);
  // q = r (mu + nu) - mu nu, so 1 - tail / q can be written with expm1 and
  // keeps full precision for small t.
  const double mass = -r * (nu * std::expm1(-mu * t) + mu * std::expm1(-nu * t)) +
                      mu * nu * std::expm1(-(mu + nu) * t);
  return std::clamp(mass / q, 0.0, 1.0);
}

inline double phi_pdf(const RateParams& p, double t) {
  if (t < 0.0) return 0.0;
  const double mu = p.mu();
  const double nu = p.nu();
  const double q = mu * mu + nu * nu;
  const double r = (mu * mu + mu * nu + nu * nu) / (mu + nu);
  const double bracket =
      r * (std::exp(-mu * t) + std::exp(-nu * t)) - (mu + nu) * std::exp(-(mu + nu) * t);
  return std::max(0.0, mu * nu / q * bracket);
}

inline double lambda_closed(const RateParams& p) {
  const double mu = p.mu();
  const double nu = p.nu();
  const double mu2 = mu * mu;
  const double nu2 = nu * nu;
  const double num = mu2 * mu2 + mu2 * mu * nu + mu2 * nu2 + mu * nu2 * nu + nu2 * nu2;
  return num / (mu * nu * (mu + nu) * (mu2 + nu2));
}

/// lambda = \int_0^inf t phi(t) dt by composite Simpson over [0, T],
/// T = 40 / min(mu, nu), widened until the neglected tail is below rel_tol * lambda.
inline double lambda_by_quadrature(const RateParams& p, double rel_tol) {
  if (!(rel_tol > 0.0) || rel_tol > 1e-2)
    throw std::invalid_argument("rel_tol must lie in (0, 1e-2]");
  const double m = p.min_rate();
  auto integrand = [&p](double t) { return t * phi_pdf(p, t); };

  quadrature::SimpsonOptions opt;
  opt.rel_tol = rel_tol / 10.0;
  double upper = 40.0 / m;
  for (int widen = 0; widen < 8; ++widen) {
    const double value = quadrature::simpson_doubling(integrand, 0.0, upper, opt);
    // phi decays at least like e^{-m t}: \int_T^inf t phi <= phi(T) (T/m + 1/m^2).
    const double tail = phi_pdf(p, upper) * (upper / m + 1.0 / (m * m));
    if (tail <= rel_tol * value) return value;
    upper *= 1.5;
  }
  throw quadrature::QuadratureError("lambda quadrature: tail did not fall below tolerance", 0.0);
}

}  // namespace analytic
}  // namespace mpgrowth
