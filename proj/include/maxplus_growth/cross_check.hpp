#pragma once

// Cross-validation battery behind `maxplus-growth verify`: each check compares
// two independent routes to the same quantity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "maxplus_growth/analytic.hpp"
#include "maxplus_growth/fixed_point.hpp"
#include "maxplus_growth/quadrature.hpp"

namespace mpgrowth::cross_check {

struct CheckResult {
  std::string name;
  bool passed = false;
  double delta = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Options {
  double quad_tol = 1e-8;         // relative, lambda quadrature
  double grid_tol = 1e-4;         // sup-norm, grid solver vs analytic Psi
  double lambda_grid_tol = 2e-3;  // relative, lambda from the grid solution
  double phi_tol = 1e-8;          // sup-norm, closed-form Phi vs quadrature of the Phi equation
};

/// Phi(t) by direct quadrature of
///   G(t) (1 - \int_0^inf Psi(u) f(u+t) du) + F(t) \int_0^inf Psi(-u) g(u+t) du
/// with Psi the stationary law.
inline double phi_by_quadrature(const RateParams& p, double t) {
  if (t <= 0.0) return 0.0;
  const PsiCoefficients c = analytic::psi_limit(p);
  const double upper = 40.0 / p.min_rate();
  quadrature::SimpsonOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-15;
  const double right = quadrature::simpson_doubling(
      [&](double u) { return analytic::psi_eval(p, c, u) * analytic::exp_pdf(p.mu(), u + t); }, 0.0, upper, opt);
  const double left = quadrature::simpson_doubling(
      [&](double u) { return analytic::psi_eval(p, c, -u) * analytic::exp_pdf(p.nu(), u + t); }, 0.0, upper, opt);
  return analytic::exp_cdf(p.nu(), t) * (1.0 - right) + analytic::exp_cdf(p.mu(), t) * left;
}

inline CheckResult check_lambda_quadrature(const RateParams& p, const Options& o) {
  const double closed = analytic::lambda_closed(p);
  const double quad = analytic::lambda_by_quadrature(p, o.quad_tol);
  const double rel = std::abs(quad - closed) / closed;
  return {"lambda_closed_vs_quadrature", rel <= o.quad_tol, rel, o.quad_tol,
          "closed=" + std::to_string(closed) + " quadrature=" + std::to_string(quad)};
}

inline CheckResult check_psi2(const RateParams& p) {
  const double mu = p.mu();
  const double nu = p.nu();
  const double s3 = (mu + nu) * (mu + nu) * (mu + nu);
  const double c1 = nu * nu * (3.0 * mu + nu) / s3;
  const double c2 = mu * mu * (mu + 3.0 * nu) / s3;
  const PsiCoefficients got = analytic::psi_next(p, analytic::psi1(p));
  const double d = std::max(std::abs(got.c1 - c1), std::abs(got.c2 - c2));
  return {"psi2_coefficients", d <= 1e-12, d, 1e-12, "c1=" + std::to_string(got.c1)};
}

inline CheckResult check_psi_iteration(const RateParams& p) {
  PsiCoefficients c = analytic::psi1(p);
  std::size_t k = 1;
  for (; k < 200; ++k) {
    const PsiCoefficients n = analytic::psi_next(p, c);
    const double step = std::abs(n.c1 - c.c1);
    c = n;
    if (step < 1e-15) break;
  }
  const PsiCoefficients lim = analytic::psi_limit(p);
  const double d = std::max(std::abs(c.c1 - lim.c1), std::abs(c.c2 - lim.c2));
  return {"psi_iteration_limit", d <= 1e-10, d, 1e-10, "iterations=" + std::to_string(k)};
}

inline CheckResult check_grid_solver(const RateParams& p, const Options& o) {
  const auto solved = fixedpoint::solve_fixed_point(p);
  const PsiCoefficients lim = analytic::psi_limit(p);
  double sup = 0.0;
  for (std::size_t i = 0; i < solved.psi.size(); ++i)
    sup = std::max(sup, std::abs(solved.psi.values[i] - analytic::psi_eval(p, lim, solved.psi.t(i))));
  const double lam = fixedpoint::lambda_from_grid(p, solved.psi);
  const double closed = analytic::lambda_closed(p);
  const double rel = std::abs(lam - closed) / closed;
  return {"grid_solver_vs_analytic", sup <= o.grid_tol && rel <= o.lambda_grid_tol, sup, o.grid_tol,
          "iterations=" + std::to_string(solved.iterations) + " lambda_grid=" + std::to_string(lam) +
              " lambda_rel_err=" + std::to_string(rel)};
}

inline CheckResult check_phi_shape(const RateParams& p) {
  const std::size_t n = 10000;
  const double upper = 40.0 / p.min_rate();
  const double at_zero = analytic::phi_cdf(p, 0.0);
  double worst_drop = 0.0;
  double prev = at_zero;
  for (std::size_t i = 1; i < n; ++i) {
    const double v = analytic::phi_cdf(p, upper * static_cast<double>(i) / static_cast<double>(n - 1));
    worst_drop = std::max(worst_drop, prev - v);
    prev = v;
  }
  const double d = std::abs(at_zero) + worst_drop;
  return {"phi_cdf_shape", at_zero == 0.0 && worst_drop <= 0.0, d, 0.0,
          "phi(0)=" + std::to_string(at_zero) + " phi(end)=" + std::to_string(prev)};
}

inline CheckResult check_phi_equation(const RateParams& p, const Options& o) {
  const std::size_t n = 201;
  const double upper = 20.0 / p.min_rate();
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = upper * static_cast<double>(i) / static_cast<double>(n - 1);
    sup = std::max(sup, std::abs(analytic::phi_cdf(p, t) - phi_by_quadrature(p, t)));
  }
  return {"phi_vs_integral_equation", sup <= o.phi_tol, sup, o.phi_tol, "points=" + std::to_string(n)};
}

inline std::vector<CheckResult> run_all(const RateParams& p, const Options& o = {}) {
  return {check_lambda_quadrature(p, o), check_psi2(p),         check_psi_iteration(p),
          check_grid_solver(p, o),       check_phi_shape(p),    check_phi_equation(p, o)};
}

}  // namespace mpgrowth::cross_check
