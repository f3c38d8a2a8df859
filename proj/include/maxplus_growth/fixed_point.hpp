#pragma once

/**
 * @file fixed_point.hpp
 * @brief Ansatz-free solution of the Psi recursion on a tabulated grid.
 *
 * The double integral mu nu \int\int Psi(u - v) e^{-mu u - nu v} du dv over the
 * positive quadrant collapses, with w = u - v, to mu nu \int Psi(w) K(w) dw where
 *
 *     K(w) = e^{-mu w} / (mu + nu)   w >= 0
 *          = e^{ nu w} / (mu + nu)   w <  0.
 *
 * Each iteration computes I = mu nu \int Psi K by the composite trapezoid rule
 * over the grid, corrected for the kink at w = 0 (Psi = 0 left of the grid,
 * 1 right of it), and emits
 *
 *     Psi'(t) = I e^{mu t}                    t <= 0
 *             = 1 - (1 - I) e^{-nu t}         t >  0.
 *
 * Nothing here assumes Psi is two-sided exponential; only the output of a
 * single step has that shape.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "maxplus_growth/analytic.hpp"
#include "maxplus_growth/quadrature.hpp"

namespace mpgrowth::fixedpoint {

class GridTooNarrow : public std::runtime_error {
 public:
  GridTooNarrow(const std::string& what, double required_t_min, double required_t_max)
      : std::runtime_error(what), required_t_min_(required_t_min), required_t_max_(required_t_max) {}
  double required_t_min() const { return required_t_min_; }
  double required_t_max() const { return required_t_max_; }

 private:
  double required_t_min_;
  double required_t_max_;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_delta)
      : std::runtime_error(what), last_delta_(last_delta) {}
  double last_delta() const { return last_delta_; }

 private:
  double last_delta_;
};

struct GridSpec {
  double t_min = -30.0;
  double t_max = 30.0;
  double step = 0.005;
  double tol = 1e-10;
  std::size_t max_iter = 200;

  /// Number of intervals; (t_max - t_min) / step must be integral.
  std::size_t intervals() const {
    return static_cast<std::size_t>(std::llround((t_max - t_min) / step));
  }
  std::size_t size() const { return intervals() + 1; }

  double t(std::size_t i) const {
    const double v = t_min + static_cast<double>(i) * step;
    return std::abs(v) < 1e-9 * step ? 0.0 : v;
  }

  void validate() const {
    if (!(t_min < 0.0) || !(t_max > 0.0))
      throw std::invalid_argument("grid must satisfy t_min < 0 < t_max");
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be > 0");
    const double count = (t_max - t_min) / step;
    if (std::abs(count - std::round(count)) > 1e-6 * std::max(1.0, count))
      throw std::invalid_argument("(t_max - t_min) / step must be an integer");
    if (std::round(count) < 10.0) throw std::invalid_argument("grid needs at least 10 intervals");
    if (!(tol >= 1e-12)) throw std::invalid_argument("grid tol must be >= 1e-12");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be >= 1");
  }
};

/// Range +-30/min(mu,nu), step 0.005/min(mu,nu), tol 1e-10, 200 iterations.
inline GridSpec default_grid(const RateParams& p) {
  const double m = p.min_rate();
  return GridSpec{-30.0 / m, 30.0 / m, 0.005 / m, 1e-10, 200};
}

/// Tabulated CDF, values[i] = Psi(spec.t(i)); 0 to the left of the grid and 1 to the right.
struct GridCdf {
  GridSpec spec;
  std::vector<double> values;

  double t(std::size_t i) const { return spec.t(i); }
  std::size_t size() const { return values.size(); }

  void validate(double slack = 1e-12) const {
    if (values.size() != spec.size()) throw std::invalid_argument("grid cdf size mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!(values[i] >= -slack && values[i] <= 1.0 + slack))
        throw std::invalid_argument("grid cdf value out of [0,1] at index " + std::to_string(i));
      if (i > 0 && values[i] + slack < values[i - 1])
        throw std::invalid_argument("grid cdf decreasing at index " + std::to_string(i));
    }
  }
};

template <class F>
GridCdf tabulate(const GridSpec& spec, F&& cdf) {
  spec.validate();
  GridCdf g{spec, std::vector<double>(spec.size())};
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = cdf(spec.t(i));
  return g;
}

inline GridCdf tabulate(const GridSpec& spec, const RateParams& p, const PsiCoefficients& c) {
  return tabulate(spec, [&](double t) { return analytic::psi_eval(p, c, t); });
}

inline double difference_kernel(const RateParams& p, double w) {
  const double s = p.mu() + p.nu();
  return w >= 0.0 ? std::exp(-p.mu() * w) / s : std::exp(p.nu() * w) / s;
}

/// Kernel mass mu nu \int K outside [t_min, t_max], left and right.
struct TailMass {
  double left;
  double right;
};

inline TailMass kernel_tail_mass(const RateParams& p, const GridSpec& spec) {
  const double s = p.mu() + p.nu();
  return {p.mu() / s * std::exp(p.nu() * spec.t_min), p.nu() / s * std::exp(-p.mu() * spec.t_max)};
}

inline void check_grid_width(const RateParams& p, const GridSpec& spec) {
  const TailMass tails = kernel_tail_mass(p, spec);
  if (tails.left <= spec.tol && tails.right <= spec.tol) return;
  const double s = p.mu() + p.nu();
  // Smallest range whose tail masses are both within tol.
  const double need_min = std::min(spec.t_min, std::log(spec.tol * s / p.mu()) / p.nu());
  const double need_max = std::max(spec.t_max, -std::log(spec.tol * s / p.nu()) / p.mu());
  throw GridTooNarrow("grid too narrow: kernel tail mass (left " + std::to_string(tails.left) +
                          ", right " + std::to_string(tails.right) + ") exceeds tol; widen to t_min <= " +
                          std::to_string(need_min) + " and t_max >= " + std::to_string(need_max),
                      need_min, need_max);
}

/// I = mu nu \int Psi(w) K(w) dw with the grid tail conventions.
inline double recursion_integral(const RateParams& p, const GridCdf& psi) {
  check_grid_width(p, psi.spec);
  std::vector<double> integrand(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i)
    integrand[i] = psi.values[i] * difference_kernel(p, psi.t(i));
  const double h = psi.spec.step;
  double inside = quadrature::trapezoid(integrand, h);
  // The integrand has a derivative jump at w = 0. When 0 is a node, the
  // Euler-Maclaurin term h^2/12 [f'(0-) - f'(0+)] is removed using one-sided
  // second-order differences; the ends of the grid carry negligible mass.
  const auto i0 = static_cast<std::size_t>(std::llround(-psi.spec.t_min / h));
  if (psi.t(i0) == 0.0 && i0 >= 2 && i0 + 2 < psi.size()) {
    const double* f = integrand.data() + i0;
    const double left = (3.0 * f[0] - 4.0 * f[-1] + f[-2]) / (2.0 * h);
    const double right = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    inside -= h * h / 12.0 * (left - right);
  }
  // Psi = 1 right of the grid contributes exactly its kernel mass.
  const double right = kernel_tail_mass(p, psi.spec).right;
  return p.mu() * p.nu() * inside + right;
}

inline GridCdf emit_from_integral(const RateParams& p, const GridSpec& spec, double integral) {
  return tabulate(spec, [&](double t) {
    if (t <= 0.0) return integral * std::exp(p.mu() * t);
    return integral - (1.0 - integral) * std::expm1(-p.nu() * t);
  });
}

inline GridCdf apply_recursion(const RateParams& p, const GridCdf& psi) {
  const double integral = recursion_integral(p, psi);
  if (!(integral > 0.0 && integral < 1.0))
    throw std::runtime_error("recursion integral left (0,1): " + std::to_string(integral));
  return emit_from_integral(p, psi.spec, integral);
}

struct FixedPointResult {
  GridCdf psi;
  std::size_t iterations = 0;
  double last_delta = 0.0;
};

inline double sup_distance(const GridCdf& a, const GridCdf& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

/// Iterates apply_recursion from the tabulated Psi_1 until the sup-norm change
/// drops below spec.tol. The optional observer sees every iterate.
inline FixedPointResult solve_fixed_point(
    const RateParams& p, const GridSpec& spec,
    const std::function<void(std::size_t, const GridCdf&)>& observer = {}) {
  spec.validate();
  GridCdf cur = tabulate(spec, p, analytic::psi1(p));
  if (observer) observer(1, cur);
  double delta = INFINITY;
  for (std::size_t it = 1; it <= spec.max_iter; ++it) {
    GridCdf next = apply_recursion(p, cur);
    delta = sup_distance(next, cur);
    cur = std::move(next);
    if (observer) observer(it + 1, cur);
    if (delta < spec.tol) return {std::move(cur), it, delta};
  }
  throw NonConvergence("fixed-point iteration did not converge in " +
                           std::to_string(spec.max_iter) + " iterations (last sup delta " +
                           std::to_string(delta) + ")",
                       delta);
}

inline FixedPointResult solve_fixed_point(const RateParams& p) {
  return solve_fixed_point(p, default_grid(p));
}

/// Trapezoid of psi(t) * weight(t) over [a, b] clipped to the grid, with
/// linear interpolation at cut points that fall between nodes.
template <class W>
double integrate_on_grid(const GridCdf& psi, double a, double b, W&& weight) {
  const GridSpec& s = psi.spec;
  a = std::max(a, s.t_min);
  b = std::min(b, s.t_max);
  if (!(b > a)) return 0.0;
  auto value_at = [&](double t) {
    const double x = (t - s.t_min) / s.step;
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, static_cast<double>(psi.size() - 2)));
    const double frac = x - static_cast<double>(i);
    return psi.values[i] + frac * (psi.values[i + 1] - psi.values[i]);
  };
  const double eps = 1e-9 * s.step;
  const auto first = static_cast<std::size_t>(std::ceil((a - s.t_min) / s.step - 1e-9));
  const auto last = static_cast<std::size_t>(std::floor((b - s.t_min) / s.step + 1e-9));

  double acc = 0.0;
  double prev_t = a;
  double prev_f = value_at(a) * weight(a);
  for (std::size_t i = first; i <= last && i < psi.size(); ++i) {
    const double t = psi.t(i);
    if (t <= prev_t + eps) {
      prev_t = t;
      prev_f = psi.values[i] * weight(t);
      continue;
    }
    const double f = psi.values[i] * weight(t);
    acc += 0.5 * (prev_f + f) * (t - prev_t);
    prev_t = t;
    prev_f = f;
  }
  if (b > prev_t + eps) acc += 0.5 * (prev_f + value_at(b) * weight(b)) * (b - prev_t);
  return acc;
}

/// Phi tabulated at s_j = j * step, j = 0 .. J, with s_J <= t_max.
struct PhiTable {
  double step = 0.0;
  std::vector<double> cdf;
};

/// Builds Phi from a Psi grid:
///   Phi(t) = G(t) (1 - \int_0^inf Psi(u) f(u+t) du) + F(t) \int_0^inf Psi(-u) g(u+t) du.
/// Since f(u+t) = e^{-mu t} f(u) (and likewise g), both integrals reduce to
/// two grid quadratures independent of t.
inline PhiTable phi_from_grid(const RateParams& p, const GridCdf& psi) {
  check_grid_width(p, psi.spec);
  const double mu = p.mu();
  const double nu = p.nu();
  const double upper = psi.spec.t_max;
  // \int_0^inf Psi(u) mu e^{-mu u} du; Psi = 1 beyond the grid.
  const double right = integrate_on_grid(psi, 0.0, upper, [mu](double u) { return mu * std::exp(-mu * u); }) +
                       std::exp(-mu * upper);
  // \int_0^inf Psi(-u) nu e^{-nu u} du = \int_{-inf}^0 Psi(w) nu e^{nu w} dw; Psi = 0 beyond.
  const double left = integrate_on_grid(psi, psi.spec.t_min, 0.0, [nu](double w) { return nu * std::exp(nu * w); });

  PhiTable out;
  out.step = psi.spec.step;
  const auto count = static_cast<std::size_t>(std::floor(upper / out.step + 1e-9)) + 1;
  out.cdf.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) * out.step;
    const double g_cdf = analytic::exp_cdf(nu, t);
    const double f_cdf = analytic::exp_cdf(mu, t);
    out.cdf[j] = g_cdf * (1.0 - std::exp(-mu * t) * right) + f_cdf * std::exp(-nu * t) * left;
  }
  return out;
}

/// lambda = E[Z] = \int_0^inf (1 - Phi(t)) dt.
inline double lambda_from_grid(const RateParams& p, const GridCdf& psi) {
  const PhiTable phi = phi_from_grid(p, psi);
  std::vector<double> survival(phi.cdf.size());
  std::transform(phi.cdf.begin(), phi.cdf.end(), survival.begin(), [](double v) { return 1.0 - v; });
  return quadrature::trapezoid(survival, phi.step);
}

}  // namespace mpgrowth::fixedpoint
