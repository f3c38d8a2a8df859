#pragma once

// Small quadrature helpers shared by the analytic and grid code paths.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace mpgrowth::quadrature {

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double last_delta)
      : std::runtime_error(what), last_delta_(last_delta) {}
  double last_delta() const { return last_delta_; }

 private:
  double last_delta_;
};

struct SimpsonOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;            // accepted when |delta| < abs_tol even if the value is ~0
  std::size_t min_panels = 256;    // even
  std::size_t max_doublings = 22;  // 256 * 2^22 ~ 1e9 evaluations is the hard budget
};

/// Composite Simpson on [a, b], doubling the panel count until two successive
/// estimates differ by less than rel_tol * |estimate| (or abs_tol).
template <class F>
double simpson_doubling(F&& f, double a, double b, const SimpsonOptions& opt = {}) {
  if (!(b > a)) return 0.0;
  std::size_t n = opt.min_panels < 2 ? 2 : opt.min_panels + (opt.min_panels % 2);

  // Reuse function values across doublings: keep the sums of end points,
  // of even interior points and of odd interior points.
  const double ends = f(a) + f(b);
  double evens = 0.0;
  double odds = 0.0;
  {
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 1; i < n; ++i) {
      const double v = f(a + static_cast<double>(i) * h);
      (i % 2 == 0 ? evens : odds) += v;
    }
  }
  auto estimate = [&](std::size_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    return h / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
  };

  double prev = estimate(n);
  double delta = INFINITY;
  for (std::size_t d = 0; d < opt.max_doublings; ++d) {
    // New points are the midpoints of the current panels; they become the odd set.
    const double h_new = (b - a) / static_cast<double>(2 * n);
    double mids = 0.0;
    for (std::size_t i = 0; i < n; ++i) mids += f(a + static_cast<double>(2 * i + 1) * h_new);
    evens += odds;
    odds = mids;
    n *= 2;
    const double cur = estimate(n);
    delta = std::abs(cur - prev);
    if (delta <= opt.rel_tol * std::abs(cur) || delta < opt.abs_tol) return cur;
    prev = cur;
  }
  throw QuadratureError("composite Simpson did not converge within " +
                            std::to_string(opt.max_doublings) + " doublings (last delta " +
                            std::to_string(delta) + ")",
                        delta);
}

/// Composite trapezoid over uniformly spaced samples.
inline double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
  return acc * h;
}

}  // namespace mpgrowth::quadrature
