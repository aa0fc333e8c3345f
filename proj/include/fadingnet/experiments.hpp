#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include "fadingnet/centralized.hpp"
#include "fadingnet/decentralized.hpp"
#include "fadingnet/fading.hpp"
#include "fadingnet/network.hpp"
#include "fadingnet/scaling.hpp"

namespace fadingnet {

enum class Scenario { Strategy1Threshold, Strategy1TopK, Strategy2, ThresholdSweep, NSweep, TradeoffCurves };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Strategy1Threshold: return "strategy1_threshold";
    case Scenario::Strategy1TopK: return "strategy1_topk";
    case Scenario::Strategy2: return "strategy2";
    case Scenario::ThresholdSweep: return "threshold_sweep";
    case Scenario::NSweep: return "n_sweep";
    case Scenario::TradeoffCurves: return "tradeoff_curves";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& text) {
  for (Scenario s : {Scenario::Strategy1Threshold, Scenario::Strategy1TopK, Scenario::Strategy2,
                     Scenario::ThresholdSweep, Scenario::NSweep, Scenario::TradeoffCurves}) {
    if (text == to_string(s)) {
      return s;
    }
  }
  throw ConfigError("unknown scenario '" + text + "'");
}

inline std::string to_string(CliqueSolver s) {
  switch (s) {
    case CliqueSolver::Auto: return "auto";
    case CliqueSolver::Exact: return "exact";
    case CliqueSolver::Greedy: return "greedy";
  }
  return "?";
}

inline CliqueSolver parse_solver(const std::string& text) {
  if (text == "auto") return CliqueSolver::Auto;
  if (text == "exact") return CliqueSolver::Exact;
  if (text == "greedy") return CliqueSolver::Greedy;
  throw ConfigError("unknown clique solver '" + text + "'");
}

/// Everything needed to replay an experiment. Field names double as the keys
/// of the flat config file. `t` and `delta` left empty mean "auto".
struct ExperimentConfig {
  Scenario scenario = Scenario::Strategy1Threshold;
  std::vector<std::uint64_t> n{1000};
  std::string model = "rayleigh";
  double M = 0.0;
  double S = 1.0;
  double P = 1.0;
  double eta = 1.0;
  std::optional<std::vector<double>> t;
  std::size_t k = 0;
  double alpha = 0.5;
  std::optional<double> delta;
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
  std::string output;
  std::string solver = "auto";

  FadingModel fading_model() const {
    if (model == "rayleigh") {
      return FadingModel::rayleigh();
    }
    if (model == "lognormal") {
      return FadingModel::lognormal(M, S);
    }
    throw std::invalid_argument("unknown fading model '" + model + "' (expected rayleigh or lognormal)");
  }
};


namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) {
    parts.push_back(trim(part));
  }
  return parts;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated keys
/// are errors.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    line = detail::trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.emplace(key, value).second) {
      throw ConfigError("config key '" + key + "' given twice");
    }
    if (key == "scenario") {
      cfg.scenario = parse_scenario(value);
    } else if (key == "n") {
      cfg.n.clear();
      for (const auto& part : detail::split(value, ',')) {
        cfg.n.push_back(detail::parse_number<std::uint64_t>(key, part));
      }
    } else if (key == "model") {
      cfg.model = value;
    } else if (key == "M") {
      cfg.M = detail::parse_number<double>(key, value);
    } else if (key == "S") {
      cfg.S = detail::parse_number<double>(key, value);
    } else if (key == "P") {
      cfg.P = detail::parse_number<double>(key, value);
    } else if (key == "eta") {
      cfg.eta = detail::parse_number<double>(key, value);
    } else if (key == "t") {
      if (value == "auto") {
        cfg.t.reset();
      } else {
        std::vector<double> ts;
        for (const auto& part : detail::split(value, ',')) {
          ts.push_back(detail::parse_number<double>(key, part));
        }
        cfg.t = ts;
      }
    } else if (key == "k") {
      cfg.k = detail::parse_number<std::size_t>(key, value);
    } else if (key == "alpha") {
      cfg.alpha = detail::parse_number<double>(key, value);
    } else if (key == "delta") {
      if (value == "auto") {
        cfg.delta.reset();
      } else {
        cfg.delta = detail::parse_number<double>(key, value);
      }
    } else if (key == "trials") {
      cfg.trials = detail::parse_number<std::size_t>(key, value);
    } else if (key == "master_seed") {
      cfg.master_seed = detail::parse_number<std::uint64_t>(key, value);
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "solver") {
      cfg.solver = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return parse_config(in);
}

/// Rejects configurations no scenario can run.
inline void validate(const ExperimentConfig& cfg) {
  if (cfg.n.empty()) {
    throw ConfigError("n must list at least one network size");
  }
  for (std::uint64_t n : cfg.n) {
    if (n == 0) {
      throw ConfigError("n must be positive");
    }
  }
  try {
    (void)cfg.fading_model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  (void)parse_solver(cfg.solver);
  if (!(cfg.P > 0.0) || !(cfg.eta >= 0.0)) {
    throw ConfigError("need P > 0 and eta >= 0");
  }
  if (cfg.scenario != Scenario::TradeoffCurves && cfg.trials == 0) {
    throw ConfigError("trials must be positive");
  }
  if (cfg.t) {
    if (cfg.t->empty()) {
      throw ConfigError("t list is empty");
    }
    for (double t : *cfg.t) {
      if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ConfigError("t must be finite and nonnegative");
      }
    }
  }
  if (cfg.scenario == Scenario::Strategy2) {
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
      throw ConfigError("alpha must lie in (0, 1)");
    }
    if (cfg.delta && !(*cfg.delta > 0.0)) {
      throw ConfigError("delta must be positive");
    }
    if (cfg.model != "rayleigh") {
      throw ConfigError("strategy2 is only defined for rayleigh fading");
    }
  }
  if (cfg.scenario == Scenario::Strategy1TopK) {
    for (std::uint64_t n : cfg.n) {
      if (cfg.k > n) {
        throw ConfigError("k exceeds n");
      }
    }
  }
}

/// One fully resolved (n, policy) cell of an experiment.
struct TrialPlan {
  Scenario scenario = Scenario::Strategy1Threshold;
  std::size_t n = 1;
  FadingModel model = FadingModel::rayleigh();
  double power = 1.0;
  double noise = 1.0;
  double t = std::numeric_limits<double>::quiet_NaN();
  std::size_t k = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  CliqueSolver solver = CliqueSolver::Auto;
  bool t_was_auto = false;
  bool delta_was_auto = false;

  NetworkParams params() const { return NetworkParams(n, power, noise); }
};

/// Expands sweeps and resolves "auto" values: t through optimize_threshold,
/// delta through optimize_delta.
inline std::vector<TrialPlan> resolve_plans(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<TrialPlan> plans;
  if (cfg.scenario == Scenario::TradeoffCurves) {
    return plans;
  }
  const FadingModel model = cfg.fading_model();
  const CliqueSolver solver = parse_solver(cfg.solver);
  for (std::uint64_t n : cfg.n) {
    TrialPlan base;
    base.scenario = cfg.scenario;
    base.n = static_cast<std::size_t>(n);
    base.model = model;
    base.power = cfg.P;
    base.noise = cfg.eta;
    base.solver = solver;
    switch (cfg.scenario) {
      case Scenario::Strategy1Threshold:
      case Scenario::ThresholdSweep:
      case Scenario::NSweep: {
        if (cfg.t) {
          for (double t : *cfg.t) {
            TrialPlan p = base;
            p.t = t;
            plans.push_back(p);
          }
        } else {
          TrialPlan p = base;
          if (n < 2) {
            throw ConfigError("t = auto needs n >= 2");
          }
          p.t = optimize_threshold(static_cast<double>(n), model).t_star;
          p.t_was_auto = true;
          plans.push_back(p);
        }
        break;
      }
      case Scenario::Strategy1TopK: {
        TrialPlan p = base;
        p.k = cfg.k;
        plans.push_back(p);
        break;
      }
      case Scenario::Strategy2: {
        TrialPlan p = base;
        p.alpha = cfg.alpha;
        if (cfg.delta) {
          p.delta = *cfg.delta;
        } else {
          p.delta = optimize_delta(cfg.alpha).delta_star;
          p.delta_was_auto = true;
        }
        p.t = CentralizedConfig(static_cast<double>(n), cfg.alpha, p.delta).threshold();
        plans.push_back(p);
        break;
      }
      case Scenario::TradeoffCurves: break;
    }
  }
  return plans;
}

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One simulated channel realization. NaN marks a column that does not apply
/// to the scenario.
struct TrialRecord {
  std::size_t trial = 0;
  std::size_t n = 0;
  std::string model;
  double t = kNaN;
  double delta = kNaN;
  std::size_t k = 0;
  double sum_rate = 0.0;
  double rate_per_link = 0.0;
  double mean_interference = 0.0;
  double bound = kNaN;
  double prediction = kNaN;
  /// Smallest realized rate among active links (NaN when none are active).
  double min_active_rate = kNaN;
  /// Strategy 2 only: per-link floor log(1 + t / (rho + (k - 1) delta)).
  double rate_floor = kNaN;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

class TrialError : public std::runtime_error {
 public:
  TrialError(std::size_t trial, const std::string& what)
      : std::runtime_error("trial " + std::to_string(trial) + ": " + what), trial_(trial) {}
  std::size_t trial() const noexcept { return trial_; }

 private:
  std::size_t trial_;
};

namespace detail {

inline Seed solver_seed(std::uint64_t master, std::size_t trial) {
  return Seed{rng::mix64(master ^ 0xc2b2ae3d27d4eb4fULL), trial};
}

inline void fill_rates(TrialRecord& rec, const ActiveLinkReport& report) {
  rec.k = report.active_count();
  rec.sum_rate = report.sum_rate;
  rec.rate_per_link = report.rate_per_link;
  rec.mean_interference = report.mean_interference();
  if (!report.rates.empty()) {
    rec.min_active_rate = *std::min_element(report.rates.begin(), report.rates.end());
  }
}

// Independent recomputation of the threshold active set through the dense
// power-vector path, used as a spot check.
inline void spot_check_threshold(const LazyChannel& channel, const std::vector<std::size_t>& active, double t,
                                 const NetworkParams& params) {
  const PowerVector p = strategy1_activate(channel, t, params);
  if (p.active_indices() != active) {
    throw std::logic_error("threshold active set disagrees with independent recomputation");
  }
}

}  // namespace detail

/// Runs trial `index` of a resolved plan. Fully determined by
/// (plan, master_seed, index).
inline TrialRecord run_trial(const TrialPlan& plan, std::uint64_t master_seed, std::size_t index) {
  try {
    const LazyChannel channel(plan.n, plan.model, Seed{master_seed, index});
    const NetworkParams params = plan.params();
    TrialRecord rec;
    rec.trial = index;
    rec.n = plan.n;
    rec.model = plan.model.name();
    switch (plan.scenario) {
      case Scenario::Strategy1Threshold:
      case Scenario::ThresholdSweep:
      case Scenario::NSweep: {
        const std::vector<std::size_t> active = strategy1_active_links(channel, plan.t);
        if (index % 100 == 0) {
          detail::spot_check_threshold(channel, active, plan.t, params);
        }
        const ActiveLinkReport report = evaluate_active(channel, std::span<const std::size_t>(active), params);
        detail::fill_rates(rec, report);
        rec.t = plan.t;
        rec.bound = jensen_bound_from(rec.k, rec.mean_interference, plan.t, params.rho());
        rec.prediction = analytic_sum_rate(static_cast<double>(plan.n), plan.t, plan.model);
        break;
      }
      case Scenario::Strategy1TopK: {
        const std::vector<std::size_t> active = topk_links(channel, plan.k);
        const ActiveLinkReport report = evaluate_active(channel, std::span<const std::size_t>(active), params);
        detail::fill_rates(rec, report);
        // Largest inactive direct gain plays the role of the threshold.
        double threshold = 0.0;
        if (plan.k < plan.n) {
          std::vector<char> on(plan.n, 0);
          for (std::size_t i : active) {
            on[i] = 1;
          }
          for (std::size_t i = 0; i < plan.n; ++i) {
            if (on[i] == 0) {
              threshold = std::max(threshold, channel.gain(i, i));
            }
          }
        }
        rec.t = threshold;
        const bool strict = std::all_of(active.begin(), active.end(),
                                        [&](std::size_t i) { return channel.gain(i, i) > threshold; });
        if (strict) {
          rec.bound = jensen_bound_from(rec.k, rec.mean_interference, threshold, params.rho());
        }
        if (plan.k >= 1 && plan.n >= 2) {
          rec.prediction = regime_classify(static_cast<double>(plan.n), static_cast<double>(plan.k)).predicted_sum_rate;
        }
        break;
      }
      case Scenario::Strategy2: {
        const CentralizedConfig config(static_cast<double>(plan.n), plan.alpha, plan.delta);
        const Strategy2Outcome outcome = strategy2_run(channel, static_cast<double>(plan.n), config, plan.solver,
                                                       detail::solver_seed(master_seed, index), params);
        const ActiveLinkReport report =
            evaluate_active(channel, std::span<const std::size_t>(outcome.clique.members), params);
        detail::fill_rates(rec, report);
        rec.t = config.threshold();
        rec.delta = plan.delta;
        rec.rate_floor = strategy2_rate_floor(config.threshold(), params.rho(), rec.k, plan.delta);
        rec.bound = static_cast<double>(rec.k) * rec.rate_floor;
        rec.prediction = centralized_predictions(plan.alpha, plan.delta).coefficient * std::log(static_cast<double>(plan.n));
        break;
      }
      case Scenario::TradeoffCurves:
        throw std::invalid_argument("tradeoff_curves has no trials");
    }
    return rec;
  } catch (const TrialError&) {
    throw;
  } catch (const std::exception& e) {
    throw TrialError(index, e.what());
  }
}

/// Convenience form: resolves the config and runs trial `index` of its first
/// (n, policy) cell.
inline TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t index) {
  const std::vector<TrialPlan> plans = resolve_plans(cfg);
  if (plans.empty()) {
    throw std::invalid_argument("run_trial: scenario has no trials");
  }
  return run_trial(plans.front(), cfg.master_seed, index);
}

/// Sample mean, sample standard deviation and 95% normal half-width.
struct AggregateRecord {
  std::string metric;
  double mean = 0.0;
  double sd = 0.0;
  double ci95_halfwidth = 0.0;
  std::size_t trials = 0;
};

inline AggregateRecord aggregate(const std::string& metric, std::span<const double> values) {
  AggregateRecord a;
  a.metric = metric;
  a.trials = values.size();
  if (values.empty()) {
    a.mean = a.sd = a.ci95_halfwidth = kNaN;
    return a;
  }
  // Shifted by the first value so constant columns give sd exactly 0.
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v - shift;
  }
  const double offset = sum / static_cast<double>(values.size());
  a.mean = shift + offset;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - shift - offset;
      ss += d * d;
    }
    a.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  a.ci95_halfwidth = 1.96 * a.sd / std::sqrt(static_cast<double>(values.size()));
  return a;
}

inline const std::vector<std::string>& aggregate_metrics() {
  static const std::vector<std::string> names{"k", "sum_rate", "rate_per_link", "mean_interference", "bound",
                                              "prediction"};
  return names;
}

inline double metric_value(const TrialRecord& r, const std::string& metric) {
  if (metric == "k") return static_cast<double>(r.k);
  if (metric == "sum_rate") return r.sum_rate;
  if (metric == "rate_per_link") return r.rate_per_link;
  if (metric == "mean_interference") return r.mean_interference;
  if (metric == "bound") return r.bound;
  if (metric == "prediction") return r.prediction;
  throw std::invalid_argument("unknown metric '" + metric + "'");
}

/// Aggregates of every metric over `records`; NaN entries (columns that do
/// not apply) are skipped.
inline std::vector<AggregateRecord> aggregate_records(std::span<const TrialRecord> records,
                                                      const std::string& suffix = "") {
  std::vector<AggregateRecord> out;
  for (const std::string& metric : aggregate_metrics()) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const TrialRecord& r : records) {
      const double v = metric_value(r, metric);
      if (!std::isnan(v)) {
        values.push_back(v);
      }
    }
    if (!values.empty()) {
      out.push_back(aggregate(metric + suffix, values));
    }
  }
  return out;
}

struct PlanResult {
  TrialPlan plan;
  std::vector<TrialRecord> records;
  std::vector<AggregateRecord> aggregates;

  const AggregateRecord& metric(const std::string& name) const {
    for (const auto& a : aggregates) {
      if (a.metric == name || a.metric.rfind(name + "|", 0) == 0) {
        return a;
      }
    }
    throw std::out_of_range("no aggregate named '" + name + "'");
  }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<PlanResult> plans;
  TradeoffCurve centralized_curve;
  std::vector<DecentralizedPoint> decentralized_curve;
};

/// Runs `count` trials of a plan on `workers` threads. Records land in
/// index order, so the result does not depend on the worker count.
inline std::vector<TrialRecord> run_trials(const TrialPlan& plan, std::uint64_t master_seed, std::size_t count,
                                           unsigned workers = 0) {
  if (workers == 0) {
    workers = std::max(1U, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::vector<TrialRecord> records(count);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<std::size_t> failed_index;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        records[i] = run_trial(plan, master_seed, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return records;
}

namespace detail {

inline std::string short_number(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(6);
  out << v;
  return out.str();
}

inline std::string plan_suffix(const TrialPlan& plan, bool multi) {
  if (!multi) {
    return "";
  }
  std::string s = "|n=" + std::to_string(plan.n);
  if (!std::isnan(plan.t) && plan.scenario != Scenario::Strategy2) {
    s += "|t=" + short_number(plan.t);
  }
  return s;
}

}  // namespace detail

/// Decimal scientific notation with 9 significant digits; empty for NaN.
inline std::string format_real(double v) {
  if (std::isnan(v)) {
    return "";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 8);
  return std::string(buf, res.ptr);
}

/// Shortest round-trip representation, for replay parameters.
inline std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kTrialHeader =
    "trial,n,model,t,delta,k,sum_rate,rate_per_link,mean_interference,bound,prediction";
inline constexpr const char* kAggregateHeader = "metric,mean,sd,ci95_halfwidth,trials";
inline constexpr const char* kTradeoffHeader = "scheme,alpha,delta_star,kappa,lambda";

inline void write_trial_csv(std::ostream& out, std::span<const PlanResult> plans) {
  out << kTrialHeader << '\n';
  for (const PlanResult& plan : plans) {
    for (const TrialRecord& r : plan.records) {
      out << r.trial << ',' << r.n << ',' << r.model << ',' << format_real(r.t) << ',' << format_real(r.delta) << ','
          << r.k << ',' << format_real(r.sum_rate) << ',' << format_real(r.rate_per_link) << ','
          << format_real(r.mean_interference) << ',' << format_real(r.bound) << ',' << format_real(r.prediction)
          << '\n';
    }
  }
}

/// Aggregate rows followed by `param.*` rows carrying the replay parameters
/// (master seed and every resolved auto value) in the mean column.
inline void write_aggregate_csv(std::ostream& out, const ExperimentResult& result) {
  out << kAggregateHeader << '\n';
  for (const PlanResult& plan : result.plans) {
    for (const AggregateRecord& a : plan.aggregates) {
      out << a.metric << ',' << format_real(a.mean) << ',' << format_real(a.sd) << ','
          << format_real(a.ci95_halfwidth) << ',' << a.trials << '\n';
    }
  }
  const ExperimentConfig& cfg = result.config;
  out << "param.scenario," << to_string(cfg.scenario) << ",,,\n";
  out << "param.master_seed," << cfg.master_seed << ",,,\n";
  out << "param.model," << cfg.model << ",,,\n";
  if (cfg.model == "lognormal") {
    out << "param.M," << format_exact(cfg.M) << ",,,\n";
    out << "param.S," << format_exact(cfg.S) << ",,,\n";
  }
  out << "param.P," << format_exact(cfg.P) << ",,,\n";
  out << "param.eta," << format_exact(cfg.eta) << ",,,\n";
  out << "param.trials," << cfg.trials << ",,,\n";
  const bool multi = result.plans.size() > 1;
  for (const PlanResult& plan : result.plans) {
    const std::string suffix = detail::plan_suffix(plan.plan, multi);
    if (!std::isnan(plan.plan.t)) {
      out << "param.t" << suffix << ',' << format_exact(plan.plan.t) << ",,,\n";
    }
    if (!std::isnan(plan.plan.delta)) {
      out << "param.delta" << suffix << ',' << format_exact(plan.plan.delta) << ",,,\n";
    }
    if (!std::isnan(plan.plan.alpha)) {
      out << "param.alpha" << suffix << ',' << format_exact(plan.plan.alpha) << ",,,\n";
    }
    if (plan.plan.scenario == Scenario::Strategy1TopK) {
      out << "param.k" << suffix << ',' << plan.plan.k << ",,,\n";
    }
  }
}

inline void write_tradeoff_csv(std::ostream& out, std::span<const DecentralizedPoint> decentralized,
                               std::span<const TradeoffPoint> centralized) {
  out << kTradeoffHeader << '\n';
  for (const DecentralizedPoint& p : decentralized) {
    out << "dec,,," << format_real(p.kappa) << ',' << format_real(p.lambda) << '\n';
  }
  for (const TradeoffPoint& p : centralized) {
    out << "cent," << format_real(p.alpha) << ',' << format_real(p.delta_star) << ',' << format_real(p.kappa) << ','
        << format_real(p.lambda) << '\n';
  }
}

/// Sibling path of the aggregate table: "runs/r.csv" -> "runs/r.aggregate.csv".
inline std::filesystem::path aggregate_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  p += ".aggregate" + ext;
  return p;
}

/// Writes several files so that either all of them appear or none do: each is
/// written to "<path>.tmp" first and renamed once every write succeeded.
class AtomicFileSet {
 public:
  AtomicFileSet() = default;
  AtomicFileSet(const AtomicFileSet&) = delete;
  AtomicFileSet& operator=(const AtomicFileSet&) = delete;
  ~AtomicFileSet() {
    if (!committed_) {
      std::error_code ec;
      for (const auto& [tmp, final_path] : files_) {
        std::filesystem::remove(tmp, ec);
      }
    }
  }

  template <typename Writer>
  void add(const std::filesystem::path& path, const Writer& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    files_.emplace_back(tmp, path);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.imbue(std::locale::classic());
    writer(out);
    out.flush();
    if (!out) {
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) {
      std::filesystem::rename(tmp, final_path);
    }
    committed_ = true;
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
  bool committed_ = false;
};

/// Runs every trial of every resolved plan, aggregates, and (when
/// cfg.output is set) writes the per-trial and aggregate tables, or the
/// tradeoff table for the tradeoff scenario.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned workers = 0) {
  ExperimentResult result;
  result.config = cfg;
  if (cfg.scenario == Scenario::TradeoffCurves) {
    validate(cfg);
    result.centralized_curve = tradeoff_centralized();
    result.decentralized_curve = tradeoff_decentralized_curve();
  } else {
    const std::vector<TrialPlan> plans = resolve_plans(cfg);
    const bool multi = plans.size() > 1;
    for (const TrialPlan& plan : plans) {
      PlanResult pr;
      pr.plan = plan;
      pr.records = run_trials(plan, cfg.master_seed, cfg.trials, workers);
      pr.aggregates = aggregate_records(pr.records, detail::plan_suffix(plan, multi));
      result.plans.push_back(std::move(pr));
    }
  }
  if (!cfg.output.empty()) {
    const std::filesystem::path out(cfg.output);
    AtomicFileSet files;
    if (cfg.scenario == Scenario::TradeoffCurves) {
      files.add(out, [&](std::ostream& os) {
        write_tradeoff_csv(os, result.decentralized_curve, result.centralized_curve.points);
      });
    } else {
      files.add(out, [&](std::ostream& os) { write_trial_csv(os, result.plans); });
    }
    files.add(aggregate_path(out), [&](std::ostream& os) { write_aggregate_csv(os, result); });
    files.commit();
  }
  return result;
}

enum class PredictionKind {
  /// mean k against n q(t)
  ActiveCountVsExpected,
  /// mean k against (log n)^2 / 2 (Rayleigh)
  ActiveCountVsRayleigh,
  /// mean rate-per-link against 2 / log n (Rayleigh)
  RatePerLinkVsRayleigh,
  /// mean sum-rate against nq log(1 + t / (mu nq))
  SumRateVsAnalytic,
};

struct Band {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

inline Band default_band(PredictionKind kind) {
  switch (kind) {
    case PredictionKind::ActiveCountVsExpected: return {0.98, 1.02};
    case PredictionKind::ActiveCountVsRayleigh: return {0.85, 1.15};
    case PredictionKind::RatePerLinkVsRayleigh: return {0.8, 1.25};
    case PredictionKind::SumRateVsAnalytic: return {0.9, std::numeric_limits<double>::infinity()};
  }
  return {};
}

struct ComparisonReport {
  std::string metric;
  double empirical = 0.0;
  double ci95_halfwidth = 0.0;
  double analytic = 0.0;
  double ratio = 0.0;
  double difference = 0.0;
  Band band;
  bool within_band = false;
};

inline ComparisonReport compare_to_prediction(const PlanResult& plan, PredictionKind kind,
                                              std::optional<Band> band = std::nullopt) {
  const TrialPlan& p = plan.plan;
  const double n = static_cast<double>(p.n);
  std::string metric;
  double analytic = 0.0;
  switch (kind) {
    case PredictionKind::ActiveCountVsExpected:
      metric = "k";
      analytic = n * tail_probability(p.model, p.t);
      break;
    case PredictionKind::ActiveCountVsRayleigh:
      metric = "k";
      analytic = rayleigh_predictions(n).k_pred;
      break;
    case PredictionKind::RatePerLinkVsRayleigh:
      metric = "rate_per_link";
      analytic = rayleigh_predictions(n).lambda_pred;
      break;
    case PredictionKind::SumRateVsAnalytic:
      metric = "sum_rate";
      analytic = analytic_sum_rate(n, p.t, p.model);
      break;
  }
  const AggregateRecord& agg = plan.metric(metric);
  ComparisonReport r;
  r.metric = metric;
  r.empirical = agg.mean;
  r.ci95_halfwidth = agg.ci95_halfwidth;
  r.analytic = analytic;
  r.ratio = agg.mean / analytic;
  r.difference = agg.mean - analytic;
  r.band = band.value_or(default_band(kind));
  r.within_band = r.ratio >= r.band.lower && r.ratio <= r.band.upper;
  return r;
}

}  // namespace fadingnet
