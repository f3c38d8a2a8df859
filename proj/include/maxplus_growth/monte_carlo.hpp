#pragma once

/**
 * @file monte_carlo.hpp
 * @brief Seeded simulation of z(k) = A(k) (x) z(k-1) with A(k) = [[alpha_k, 0], [0, beta_k]].
 *
 * Every trial owns a RandomStream derived from (base_seed, trial_index), so a
 * trial's trajectory does not depend on which thread runs it, and results are
 * aggregated in trial-index order.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "maxplus_growth/analytic.hpp"

namespace mpgrowth::montecarlo {

/// Uniform variates from std::mt19937_64 seeded through std::seed_seq with the
/// 32-bit words of (base_seed, stream_index). Both engine and seed_seq are
/// fully specified by the standard, and u = (bits >> 11) * 2^-53 avoids the
/// implementation-defined std::uniform_real_distribution.
class RandomStream {
 public:
  static constexpr std::string_view generator_id = "mt19937_64/seed_seq(base_seed,stream_index)/v1";

  RandomStream(std::uint64_t base_seed, std::uint64_t stream_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(stream_index),
                      static_cast<std::uint32_t>(stream_index >> 32)};
    engine_.seed(seq);
  }

  /// Next uniform in [0, 1).
  double next_uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

template <class S>
concept UniformSource = requires(S s) {
  { s.next_uniform() } -> std::convertible_to<double>;
};

/// Inverse transform: -ln(1 - u) / rate.
inline double exp_from_uniform(double u, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  return -std::log1p(-u) / rate;
}

template <UniformSource S>
double sample_exp(S& stream, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  return exp_from_uniform(stream.next_uniform(), rate);
}

struct State {
  double x;
  double y;
  bool operator==(const State&) const = default;
};

/// x' = max(alpha + x, y), y' = max(x, beta + y)
constexpr State step(double x, double y, double alpha, double beta) {
  return {std::max(alpha + x, y), std::max(x, beta + y)};
}

struct Draws {
  double alpha;
  double beta;
};

struct StepSample {
  std::size_t k;
  double value;
};

struct Recording {
  std::vector<std::size_t> at;  // step indices (1-based) where Y(k) and Z(k) are kept
  bool increments = false;      // keep every Z(k)
};

struct TrajectoryResult {
  double lambda_hat = 0.0;  // ||z(K)|| / K
  double norm = 0.0;        // ||z(K)||
  std::vector<StepSample> y_samples;
  std::vector<StepSample> z_samples;
  std::vector<double> z_increments;
};

/// Runs K steps from z(0) = (0, 0). `draw()` yields (alpha_k, beta_k).
///
/// The state is carried as (x - ||z||, y - ||z||) together with ||z||. The
/// dynamics are homogeneous, so this is the same trajectory; ||z(k)|| is then
/// literally ||z(k-1)|| + Z(k), which makes sum_k Z(k) == ||z(K)|| hold bit for bit.
template <class Draw>
TrajectoryResult run_trajectory(std::size_t steps, Draw&& draw, const Recording& rec = {}) {
  if (steps == 0) throw std::invalid_argument("steps must be >= 1");
  std::vector<std::size_t> at = rec.at;
  std::sort(at.begin(), at.end());
  at.erase(std::unique(at.begin(), at.end()), at.end());

  TrajectoryResult out;
  if (rec.increments) out.z_increments.reserve(steps);
  out.y_samples.reserve(at.size());
  out.z_samples.reserve(at.size());

  double x = 0.0;
  double y = 0.0;
  double norm = 0.0;
  auto next_rec = at.begin();
  for (std::size_t k = 1; k <= steps; ++k) {
    const Draws d = draw();
    const State s = step(x, y, d.alpha, d.beta);
    const double z = std::max(s.x, s.y);
    norm += z;
    if (rec.increments) out.z_increments.push_back(z);
    while (next_rec != at.end() && *next_rec < k) ++next_rec;
    if (next_rec != at.end() && *next_rec == k) {
      out.y_samples.push_back({k, s.y - s.x});
      out.z_samples.push_back({k, z});
    }
    x = s.x - z;
    y = s.y - z;
  }
  out.norm = norm;
  out.lambda_hat = norm / static_cast<double>(steps);
  return out;
}

template <UniformSource S>
TrajectoryResult run_trajectory(const RateParams& p, std::size_t steps, S& stream,
                                const Recording& rec = {}) {
  return run_trajectory(
      steps,
      [&] {
        const double alpha = sample_exp(stream, p.mu());
        const double beta = sample_exp(stream, p.nu());
        return Draws{alpha, beta};
      },
      rec);
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};

inline Estimate estimate_from(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  if (samples.size() == 1) return {mean, 0.0, 1};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n), samples.size()};
}

struct SimConfig {
  RateParams params{1.0, 1.0};
  std::size_t steps = 10000;
  std::size_t trials = 200;
  std::uint64_t base_seed = 42;
  std::vector<std::size_t> record_y_at;
  bool record_z = false;

  void validate() const {
    if (steps == 0) throw std::invalid_argument("steps must be >= 1");
    if (trials == 0) throw std::invalid_argument("trials must be >= 1");
    for (std::size_t k : record_y_at)
      if (k == 0 || k > steps)
        throw std::invalid_argument("record_y_at entries must lie in [1, steps]");
  }
};

struct SimulationResult {
  Estimate estimate;
  std::vector<TrajectoryResult> trajectories;  // indexed by trial

  /// Y(k) (or Z(k)) across trials, in trial order.
  std::vector<double> y_at(std::size_t k) const { return collect(k, &TrajectoryResult::y_samples); }
  std::vector<double> z_at(std::size_t k) const { return collect(k, &TrajectoryResult::z_samples); }

 private:
  std::vector<double> collect(std::size_t k, std::vector<StepSample> TrajectoryResult::*field) const {
    std::vector<double> out;
    out.reserve(trajectories.size());
    for (const auto& tr : trajectories)
      for (const auto& s : tr.*field)
        if (s.k == k) out.push_back(s.value);
    return out;
  }
};

/// Worker count: hardware concurrency, capped by MAXPLUS_THREADS when set.
inline unsigned resolve_thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MAXPLUS_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw std::invalid_argument(std::string("MAXPLUS_THREADS must be a positive integer (got '") + env + "')");
    return std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return hw;
}

/// Runs `trials` trajectories; make_draw(trial_index) builds the per-trial
/// draw callable. threads == 0 means resolve_thread_count().
template <class DrawFactory>
SimulationResult simulate_with(std::size_t steps, std::size_t trials, const Recording& rec,
                               DrawFactory&& make_draw, unsigned threads = 0) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (threads == 0) threads = resolve_thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trials));

  SimulationResult out;
  out.trajectories.resize(trials);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto draw = make_draw(i);
      out.trajectories[i] = run_trajectory(steps, draw, rec);
    }
  };
  if (threads <= 1) {
    work(0, trials);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (trials + threads - 1) / threads;
    for (std::size_t b = 0; b < trials; b += chunk) pool.emplace_back(work, b, std::min(trials, b + chunk));
  }

  std::vector<double> lambdas(trials);
  for (std::size_t i = 0; i < trials; ++i) lambdas[i] = out.trajectories[i].lambda_hat;
  out.estimate = estimate_from(lambdas);
  return out;
}

inline SimulationResult simulate(const SimConfig& cfg, unsigned threads = 0) {
  cfg.validate();
  const Recording rec{cfg.record_y_at, cfg.record_z};
  const RateParams p = cfg.params;
  return simulate_with(
      cfg.steps, cfg.trials, rec,
      [&](std::size_t trial) {
        return [stream = RandomStream(cfg.base_seed, trial), p]() mutable {
          const double alpha = sample_exp(stream, p.mu());
          const double beta = sample_exp(stream, p.nu());
          return Draws{alpha, beta};
        };
      },
      threads);
}

inline Estimate estimate_lambda(const SimConfig& cfg, unsigned threads = 0) {
  SimConfig bare = cfg;
  bare.record_y_at.clear();
  bare.record_z = false;
  return simulate(bare, threads).estimate;
}

/// One-sample Kolmogorov-Smirnov distance
///   D_n = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
template <class Cdf>
double ks_statistic(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample set");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

/// Asymptotic 95% critical value of D_n.
inline double ks_threshold_95(std::size_t n) { return 1.358 / std::sqrt(static_cast<double>(n)); }

}  // namespace mpgrowth::montecarlo
