// maxplus-growth: growth rate and stationary laws of the 2x2 diagonal
// stochastic max-plus system, by closed form, grid iteration and simulation.
//
// Exit codes: 0 success, 1 verification or runtime failure,
//             2 usage/validation error, 3 inconsistent flag combination.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxplus_growth/maxplus_growth.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace mpgrowth;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInconsistent = 3;

struct UsageError : std::runtime_error {
  int code;
  UsageError(const std::string& what, int c) : std::runtime_error(what), code(c) {}
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Meta {
  Meta(std::string cmd, std::string inv, RateParams p, std::optional<std::uint64_t> s = std::nullopt,
       std::string gen = "none")
      : command(std::move(cmd)), invocation(std::move(inv)), params(p), seed(s), generator(std::move(gen)) {}

  std::string command;
  std::string invocation;
  RateParams params;
  std::optional<std::uint64_t> seed;
  std::string generator;
  json settings = json::object();

  json to_json() const {
    json j;
    j["tool"] = "maxplus-growth";
    j["version"] = version;
    j["schema_version"] = json_schema_version;
    j["command"] = command;
    j["invocation"] = invocation;
    j["params"] = {{"mu", params.mu()}, {"nu", params.nu()}};
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["generator"] = generator;
    j["settings"] = settings;
    j["timestamp"] = utc_timestamp();
    return j;
  }

  void write_csv_header(std::ostream& os) const {
    os << "# tool: maxplus-growth " << version << "\n"
       << "# command: " << invocation << "\n"
       << "# mu: " << exact(params.mu()) << "\n"
       << "# nu: " << exact(params.nu()) << "\n"
       << "# seed: " << (seed ? std::to_string(*seed) : std::string("none")) << "\n"
       << "# generator: " << generator << "\n";
    for (const auto& [key, value] : settings.items()) os << "# " << key << ": " << value.dump() << "\n";
    os << "# timestamp: " << utc_timestamp() << "\n";
  }
};

struct Rates {
  double mu = 0.0;
  double nu = 0.0;
  RateParams params() const {
    try {
      return RateParams(mu, nu);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what(), kExitUsage);
    }
  }
};

void add_rates(CLI::App* cmd, Rates& r) {
  cmd->add_option("--mu", r.mu, "rate of alpha_k (1/time)")->required();
  cmd->add_option("--nu", r.nu, "rate of beta_k (1/time)")->required();
}

struct CurveGrid {
  double t_min;
  double t_max;
  double step;

  std::size_t points() const {
    if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(step > 0.0) || !(t_max > t_min))
      throw UsageError("invalid grid: need finite t_min < t_max and step > 0", kExitUsage);
    const double n = std::floor((t_max - t_min) / step + 1e-9) + 1.0;
    if (n > 1e7) throw UsageError("invalid grid: more than 1e7 points", kExitUsage);
    return static_cast<std::size_t>(n);
  }
  double t(std::size_t i) const {
    const double v = t_min + static_cast<double>(i) * step;
    return std::abs(v) < 1e-9 * step ? 0.0 : v;
  }
  json to_json() const { return {{"t_min", t_min}, {"t_max", t_max}, {"step", step}}; }
};

void add_grid(CLI::App* cmd, CurveGrid& g) {
  cmd->add_option("--t-min", g.t_min, "first grid point")->capture_default_str();
  cmd->add_option("--t-max", g.t_max, "last grid point")->capture_default_str();
  cmd->add_option("--step", g.step, "grid spacing")->capture_default_str();
}

/// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

// --- lambda ---------------------------------------------------------------

struct LambdaArgs {
  Rates rates;
  bool json = false;
};

int run_lambda(const LambdaArgs& a, const std::string& invocation) {
  const RateParams p = a.rates.params();
  const double lambda = analytic::lambda_closed(p);
  if (a.json) {
    json out;
    out["lambda"] = lambda;
    out["meta"] = Meta{"lambda", invocation, p}.to_json();
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << fixed(lambda, 12) << "\n";
  }
  return kExitOk;
}

// --- psi ------------------------------------------------------------------

struct PsiArgs {
  Rates rates;
  std::optional<std::size_t> k;
  bool limit = false;
  CurveGrid grid{-5.0, 5.0, 0.01};
  std::string out;
};

int run_psi(const PsiArgs& a, const std::string& invocation) {
  if (a.k && a.limit) throw UsageError("--k and --limit are mutually exclusive", kExitInconsistent);
  if (!a.k && !a.limit) throw UsageError("one of --k or --limit is required", kExitUsage);
  if (a.k && *a.k == 0) throw UsageError("k must be >= 1", kExitUsage);
  const RateParams p = a.rates.params();
  const std::size_t n = a.grid.points();
  const PsiCoefficients c = a.limit ? analytic::psi_limit(p) : analytic::psi_k(p, *a.k);

  Meta meta{"psi", invocation, p};
  meta.settings["law"] = a.limit ? json("limit") : json(*a.k);
  meta.settings["grid"] = a.grid.to_json();
  Output out(a.out);
  std::ostream& os = out.stream();
  meta.write_csv_header(os);
  os << "# c1=" << fixed(c.c1, 12) << "\n"
     << "# c2=" << fixed(c.c2, 12) << "\n"
     << "t,psi\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a.grid.t(i);
    os << fixed(t, 6) << "," << fixed(analytic::psi_eval(p, c, t), 12) << "\n";
  }
  return kExitOk;
}

// --- phi ------------------------------------------------------------------

struct PhiArgs {
  Rates rates;
  CurveGrid grid{0.0, 10.0, 0.01};
  std::string out;
};

int run_phi(const PhiArgs& a, const std::string& invocation) {
  const RateParams p = a.rates.params();
  const std::size_t n = a.grid.points();
  Meta meta{"phi", invocation, p};
  meta.settings["grid"] = a.grid.to_json();
  Output out(a.out);
  std::ostream& os = out.stream();
  meta.write_csv_header(os);
  os << "t,phi_cdf,phi_pdf\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a.grid.t(i);
    os << fixed(t, 6) << "," << fixed(analytic::phi_cdf(p, t), 12) << ","
       << fixed(analytic::phi_pdf(p, t), 12) << "\n";
  }
  return kExitOk;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  Rates rates;
  std::size_t steps = 10000;
  std::size_t trials = 200;
  std::uint64_t seed = 42;
  std::optional<std::size_t> record_y_at;
  std::string ks_against;
};

int run_simulate(const SimulateArgs& a, const std::string& invocation) {
  if (!a.ks_against.empty() && !a.record_y_at)
    throw UsageError("--ks-against requires --record-y-at", kExitInconsistent);
  const RateParams p = a.rates.params();
  montecarlo::SimConfig cfg;
  cfg.params = p;
  cfg.steps = a.steps;
  cfg.trials = a.trials;
  cfg.base_seed = a.seed;
  if (a.record_y_at) cfg.record_y_at = {*a.record_y_at};
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what(), kExitUsage);
  }

  unsigned threads = 0;
  try {
    threads = montecarlo::resolve_thread_count();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what(), kExitUsage);
  }
  const auto sim = montecarlo::simulate(cfg, threads);

  json out;
  out["lambda_mean"] = sim.estimate.mean;
  out["std_error"] = sim.estimate.std_error;
  out["n"] = sim.estimate.n;
  out["lambda_closed"] = analytic::lambda_closed(p);
  if (!a.ks_against.empty()) {
    const std::size_t k = *a.record_y_at;
    double d = 0.0;
    if (a.ks_against == "phi") {
      const auto z = sim.z_at(k);
      d = montecarlo::ks_statistic(z, [&](double t) { return analytic::phi_cdf(p, t); });
    } else {
      const PsiCoefficients c = a.ks_against == "psi" ? analytic::psi_limit(p) : analytic::psi_k(p, k);
      const auto y = sim.y_at(k);
      d = montecarlo::ks_statistic(y, [&](double t) { return analytic::psi_eval(p, c, t); });
    }
    const double threshold = montecarlo::ks_threshold_95(cfg.trials);
    out["ks"] = {{"against", a.ks_against}, {"k", k},           {"n", cfg.trials},
                 {"D", d},                  {"threshold", threshold}, {"below_threshold", d <= threshold}};
  }
  Meta meta{"simulate", invocation, p, a.seed, std::string(montecarlo::RandomStream::generator_id)};
  meta.settings = {{"steps", cfg.steps}, {"trials", cfg.trials}};
  if (a.record_y_at) meta.settings["record_y_at"] = *a.record_y_at;
  out["meta"] = meta.to_json();
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

// --- verify ---------------------------------------------------------------

struct VerifyArgs {
  Rates rates;
  cross_check::Options options;
  bool json = false;
};

int run_verify(const VerifyArgs& a, const std::string& invocation) {
  const RateParams p = a.rates.params();
  if (!(a.options.quad_tol > 0.0) || a.options.quad_tol > 1e-2)
    throw UsageError("--quad-tol must lie in (0, 1e-2]", kExitUsage);
  if (!(a.options.grid_tol > 0.0)) throw UsageError("--grid-tol must be > 0", kExitUsage);

  const auto results = cross_check::run_all(p, a.options);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  const bool ok = passed == results.size();

  if (a.json) {
    json out;
    out["passed"] = ok;
    out["checks"] = json::array();
    for (const auto& r : results)
      out["checks"].push_back({{"name", r.name},
                               {"passed", r.passed},
                               {"delta", r.delta},
                               {"threshold", r.threshold},
                               {"detail", r.detail}});
    Meta meta{"verify", invocation, p};
    const auto grid = fixedpoint::default_grid(p);
    meta.settings = {{"quad_tol", a.options.quad_tol},
                     {"grid_tol", a.options.grid_tol},
                     {"lambda_grid_tol", a.options.lambda_grid_tol},
                     {"phi_tol", a.options.phi_tol},
                     {"grid", {{"t_min", grid.t_min}, {"t_max", grid.t_max}, {"step", grid.step},
                               {"tol", grid.tol}, {"max_iter", grid.max_iter}}}};
    out["meta"] = meta.to_json();
    std::cout << out.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      char line[256];
      std::snprintf(line, sizeof line, "%s %-28s delta=%.3e threshold=%.3e", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.delta, r.threshold);
      std::cout << line << "  " << r.detail << "\n";
    }
    std::cout << passed << "/" << results.size() << " checks passed\n";
  }
  return ok ? kExitOk : kExitFailed;
}

std::string join_args(int argc, char** argv) {
  std::ostringstream os;
  os << "maxplus-growth";
  for (int i = 1; i < argc; ++i) os << " " << argv[i];
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth rate and stationary laws of a 2x2 diagonal stochastic max-plus system"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  LambdaArgs lambda_args;
  auto* lambda_cmd = app.add_subcommand("lambda", "closed-form mean growth rate");
  add_rates(lambda_cmd, lambda_args.rates);
  lambda_cmd->add_flag("--json", lambda_args.json, "emit JSON");

  PsiArgs psi_args;
  auto* psi_cmd = app.add_subcommand("psi", "CSV of the law of Y(k) = y(k) - x(k)");
  add_rates(psi_cmd, psi_args.rates);
  psi_cmd->add_option("--k", psi_args.k, "step index k >= 1");
  psi_cmd->add_flag("--limit", psi_args.limit, "stationary law");
  add_grid(psi_cmd, psi_args.grid);
  psi_cmd->add_option("--out", psi_args.out, "output path (default stdout)");

  PhiArgs phi_args;
  auto* phi_cmd = app.add_subcommand("phi", "CSV of the limiting increment law Phi and its density");
  add_rates(phi_cmd, phi_args.rates);
  add_grid(phi_cmd, phi_args.grid);
  phi_cmd->add_option("--out", phi_args.out, "output path (default stdout)");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of lambda (JSON)");
  add_rates(sim_cmd, sim_args.rates);
  sim_cmd->add_option("--steps", sim_args.steps, "steps K per trajectory")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--trials", sim_args.trials, "independent trajectories N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "base seed")->capture_default_str();
  sim_cmd->add_option("--record-y-at", sim_args.record_y_at, "record Y(k) and Z(k) at this step");
  sim_cmd->add_option("--ks-against", sim_args.ks_against, "KS test of the recorded samples")
      ->check(CLI::IsMember({"psi", "psik", "phi"}));

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "run the cross-validation battery");
  add_rates(verify_cmd, verify_args.rates);
  verify_cmd->add_option("--quad-tol", verify_args.options.quad_tol, "relative tolerance, lambda quadrature")
      ->capture_default_str();
  verify_cmd->add_option("--grid-tol", verify_args.options.grid_tol, "sup-norm tolerance, grid solver")
      ->capture_default_str();
  verify_cmd->add_flag("--json", verify_args.json, "emit JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string invocation = join_args(argc, argv);
  try {
    if (*lambda_cmd) return run_lambda(lambda_args, invocation);
    if (*psi_cmd) return run_psi(psi_args, invocation);
    if (*phi_cmd) return run_phi(phi_args, invocation);
    if (*sim_cmd) return run_simulate(sim_args, invocation);
    if (*verify_cmd) return run_verify(verify_args, invocation);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
