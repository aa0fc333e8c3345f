#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fadingnet/fadingnet.hpp"

namespace fn = fadingnet;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::string model = "rayleigh";
  double M = 0.0;
  double S = 1.0;

  fn::FadingModel build() const {
    if (model == "rayleigh") {
      return fn::FadingModel::rayleigh();
    }
    if (model == "lognormal") {
      return fn::FadingModel::lognormal(M, S);
    }
    throw UsageError("--model must be rayleigh or lognormal");
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
  cmd->add_option("--model", flags.model, "Fading model: rayleigh or lognormal")
      ->check(CLI::IsMember({"rayleigh", "lognormal"}));
  cmd->add_option("--M,--location", flags.M, "Log-normal location parameter");
  cmd->add_option("--S,--scale", flags.S, "Log-normal scale parameter")->check(CLI::PositiveNumber);
}

/// Writes to `path`, or standard output when it is empty.
template <typename Writer>
void emit(const std::string& path, const Writer& writer) {
  if (path.empty()) {
    std::cout.imbue(std::locale::classic());
    writer(std::cout);
    return;
  }
  fn::AtomicFileSet files;
  files.add(path, writer);
  files.commit();
}

std::vector<std::uint64_t> parse_sizes(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) {
      throw UsageError("--n: cannot parse '" + part + "'");
    }
    if (v == 0) {
      throw UsageError("--n must be a positive integer");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw UsageError("--n is empty");
  }
  return out;
}

struct SimulateFlags {
  std::string config;
  std::string scenario;
  ModelFlags model;
  std::string n;
  std::string t;
  std::size_t k = 0;
  double alpha = 0.5;
  std::string delta;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::string solver = "auto";
  double P = 1.0;
  double eta = 1.0;
  unsigned workers = 0;
};

int run_simulate(CLI::App* cmd, const SimulateFlags& f) {
  fn::ExperimentConfig cfg;
  const std::vector<std::string> inline_flags{"--scenario", "--model", "--M", "--S", "--n", "--t", "--k",
                                              "--alpha", "--delta", "--trials", "--seed", "--out", "--solver",
                                              "--P", "--eta"};
  if (!f.config.empty()) {
    for (const std::string& name : inline_flags) {
      if (cmd->count(name) > 0) {
        throw UsageError("--config cannot be combined with inline flag " + name);
      }
    }
    cfg = fn::load_config(f.config);
  } else {
    if (!f.scenario.empty()) {
      cfg.scenario = fn::parse_scenario(f.scenario);
    } else if (cmd->count("--alpha") > 0 || cmd->count("--delta") > 0) {
      cfg.scenario = fn::Scenario::Strategy2;
    } else if (cmd->count("--k") > 0) {
      cfg.scenario = fn::Scenario::Strategy1TopK;
    }
    if (!f.n.empty()) {
      cfg.n = parse_sizes(f.n);
    }
    cfg.model = f.model.model;
    cfg.M = f.model.M;
    cfg.S = f.model.S;
    cfg.P = f.P;
    cfg.eta = f.eta;
    if (!f.t.empty() && f.t != "auto") {
      cfg.t = fn::parse_config_text("t = " + f.t).t;
    }
    cfg.k = f.k;
    cfg.alpha = f.alpha;
    if (!f.delta.empty() && f.delta != "auto") {
      cfg.delta = fn::parse_config_text("delta = " + f.delta).delta;
    }
    cfg.trials = f.trials;
    cfg.master_seed = f.seed;
    cfg.output = f.out;
    cfg.solver = f.solver;
  }

  const fn::ExperimentResult result = fn::run_experiment(cfg, f.workers);

  std::cout << "scenario " << fn::to_string(cfg.scenario) << ", model " << cfg.model << ", master seed "
            << cfg.master_seed << '\n';
  if (cfg.scenario == fn::Scenario::TradeoffCurves) {
    std::cout << "decentralized points: " << result.decentralized_curve.size()
              << ", centralized points: " << result.centralized_curve.points.size() << '\n';
    for (const auto& w : result.centralized_curve.warnings) {
      std::cout << "warning: " << w << '\n';
    }
  }
  for (const fn::PlanResult& plan : result.plans) {
    std::cout << "n = " << plan.plan.n;
    if (!std::isnan(plan.plan.t)) {
      std::cout << ", t = " << fn::format_exact(plan.plan.t) << (plan.plan.t_was_auto ? " (auto)" : "");
    }
    if (!std::isnan(plan.plan.delta)) {
      std::cout << ", delta = " << fn::format_exact(plan.plan.delta) << (plan.plan.delta_was_auto ? " (auto)" : "");
    }
    std::cout << '\n';
    for (const fn::AggregateRecord& a : plan.aggregates) {
      std::cout << "  " << std::left << std::setw(36) << a.metric << " mean " << std::setw(14) << fn::format_real(a.mean)
                << " +/- " << fn::format_real(a.ci95_halfwidth) << "  (" << a.trials << " trials)\n";
    }
  }
  if (!cfg.output.empty()) {
    std::cout << "wrote " << cfg.output << " and " << fn::aggregate_path(cfg.output).string() << '\n';
  }
  return kOk;
}

struct Sweep {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t steps = 0;
};

Sweep parse_sweep(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos) {
    throw UsageError("--sweep-t must look like MIN:MAX:STEPS");
  }
  Sweep s;
  try {
    std::size_t used = 0;
    const std::string lo = text.substr(0, first);
    const std::string hi = text.substr(first + 1, second - first - 1);
    const std::string steps = text.substr(second + 1);
    s.lo = std::stod(lo, &used);
    if (used != lo.size()) throw std::invalid_argument(lo);
    s.hi = std::stod(hi, &used);
    if (used != hi.size()) throw std::invalid_argument(hi);
    const long long st = std::stoll(steps, &used);
    if (used != steps.size() || st < 2) throw std::invalid_argument(steps);
    s.steps = static_cast<std::size_t>(st);
  } catch (const std::exception&) {
    throw UsageError("--sweep-t must look like MIN:MAX:STEPS with STEPS >= 2");
  }
  if (!(s.lo >= 0.0) || !(s.hi > s.lo)) {
    throw UsageError("--sweep-t needs 0 <= MIN < MAX");
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput scaling simulator for on-off power allocation in fading wireless networks"};
  app.require_subcommand(1);

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a seeded Monte Carlo experiment");
  simulate->add_option("--config", sim.config, "Flat key = value experiment file");
  simulate->add_option("--scenario", sim.scenario,
                       "strategy1_threshold | strategy1_topk | strategy2 | threshold_sweep | n_sweep | tradeoff_curves");
  add_model_flags(simulate, sim.model);
  simulate->add_option("--n,--links", sim.n, "Number of links (comma-separated list for sweeps)");
  simulate->add_option("--t,--threshold", sim.t, "Activation threshold, list, or 'auto'");
  simulate->add_option("--k,--active-links", sim.k, "Active-link count for top-k activation");
  simulate->add_option("--alpha,--pool-exponent", sim.alpha, "Candidate-pool exponent in (0, 1)");
  simulate->add_option("--delta,--cross-gain-cap", sim.delta, "Cross-gain cap or 'auto'");
  simulate->add_option("--trials", sim.trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed,--master-seed", sim.seed, "Master seed");
  simulate->add_option("--out,--output", sim.out, "Per-trial CSV path (aggregate goes next to it)");
  simulate->add_option("--solver", sim.solver, "Clique solver: auto | exact | greedy")
      ->check(CLI::IsMember({"auto", "exact", "greedy"}));
  simulate->add_option("--P,--power", sim.P, "Peak transmit power")->check(CLI::PositiveNumber);
  simulate->add_option("--eta,--noise", sim.eta, "Noise variance")->check(CLI::NonNegativeNumber);
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = available parallelism)");

  ModelFlags analytic_model;
  double analytic_n = 0.0;
  std::string sweep_text;
  std::string analytic_out;
  CLI::App* analytic = app.add_subcommand("analytic", "Tabulate the analytic sum-rate curve R(t)");
  add_model_flags(analytic, analytic_model);
  analytic->add_option("--n,--links", analytic_n, "Number of links (may be non-integer)")
      ->required()
      ->check(CLI::Range(1.0, 1e300));
  analytic->add_option("--sweep-t", sweep_text, "MIN:MAX:STEPS (STEPS grid points)")->required();
  analytic->add_option("--out,--output", analytic_out, "CSV path (standard output if omitted)");

  ModelFlags opt_model;
  double opt_n = 0.0;
  std::string opt_out;
  CLI::App* opt_threshold = app.add_subcommand("optimize-threshold", "Maximize the analytic sum-rate over t");
  add_model_flags(opt_threshold, opt_model);
  opt_threshold->add_option("--n,--links", opt_n, "Number of links")->required()->check(CLI::Range(2.0, 1e300));
  opt_threshold->add_option("--out,--output", opt_out, "CSV path for the optimum");

  double delta_alpha = 0.5;
  std::string delta_out;
  CLI::App* opt_delta = app.add_subcommand("optimize-delta", "Maximize the centralized sum-rate coefficient over delta");
  opt_delta->add_option("--alpha,--pool-exponent", delta_alpha, "Candidate-pool exponent in (0, 1)")->required();
  opt_delta->add_option("--out,--output", delta_out, "CSV path for the optimum");

  std::string scheme = "both";
  std::string tradeoff_out;
  CLI::App* tradeoff = app.add_subcommand("tradeoff", "Emit rate-per-link vs active-link tradeoff curves");
  tradeoff->add_option("--scheme", scheme, "dec | cent | both")->check(CLI::IsMember({"dec", "cent", "both"}));
  tradeoff->add_option("--out,--output", tradeoff_out, "CSV path (standard output if omitted)");

  double regime_n = 0.0;
  std::vector<double> regime_k;
  CLI::App* regimes = app.add_subcommand("regimes", "Classify (n, k) into sum-rate regimes");
  regimes->add_option("--n,--links", regime_n, "Number of links")->required()->check(CLI::Range(2.0, 1e300));
  regimes->add_option("--k,--active-links", regime_k, "Active-link counts (default: representative set)")->delimiter(',');

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run the quick consistency bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*simulate) {
      return run_simulate(simulate, sim);
    }
    if (*analytic) {
      const fn::FadingModel model = analytic_model.build();
      const Sweep sweep = parse_sweep(sweep_text);
      emit(analytic_out, [&](std::ostream& os) {
        os << "t,q,sum_rate\n";
        for (std::size_t i = 0; i < sweep.steps; ++i) {
          const double t = (i + 1 == sweep.steps)
                               ? sweep.hi
                               : sweep.lo + (sweep.hi - sweep.lo) * static_cast<double>(i) /
                                                static_cast<double>(sweep.steps - 1);
          os << fn::format_real(t) << ',' << fn::format_real(fn::tail_probability(model, t)) << ','
             << fn::format_real(fn::analytic_sum_rate(analytic_n, t, model)) << '\n';
        }
      });
      return kOk;
    }
    if (*opt_threshold) {
      const fn::FadingModel model = opt_model.build();
      const fn::ThresholdOptimum best = fn::optimize_threshold(opt_n, model);
      std::cout << "t* = " << fn::format_exact(best.t_star) << "\nR* = " << fn::format_exact(best.R_star) << '\n';
      if (opt_n >= 3.0) {
        const fn::ScalingPrediction closed = model.is_rayleigh()
                                                 ? fn::rayleigh_predictions(opt_n)
                                                 : fn::lognormal_predictions(opt_n, model.location(), model.scale());
        std::cout << "closed-form t* = " << fn::format_exact(closed.t_star)
                  << ", R* = " << fn::format_exact(closed.R_star) << ", k = " << fn::format_exact(closed.k_pred)
                  << ", lambda = " << fn::format_exact(closed.lambda_pred) << '\n';
      }
      if (!opt_out.empty()) {
        emit(opt_out, [&](std::ostream& os) {
          os << "n,model,t_star,R_star\n"
             << fn::format_real(opt_n) << ',' << model.name() << ',' << fn::format_real(best.t_star) << ','
             << fn::format_real(best.R_star) << '\n';
        });
      }
      return kOk;
    }
    if (*opt_delta) {
      const fn::DeltaOptimum best = fn::optimize_delta(delta_alpha);
      std::cout << "delta* = " << fn::format_exact(best.delta_star)
                << "\nkappa = " << fn::format_exact(best.prediction.kappa)
                << "\nlambda = " << fn::format_exact(best.prediction.lambda)
                << "\ncoefficient = " << fn::format_exact(best.prediction.coefficient) << '\n';
      if (!delta_out.empty()) {
        emit(delta_out, [&](std::ostream& os) {
          os << "alpha,delta_star,kappa,lambda,coefficient\n"
             << fn::format_real(delta_alpha) << ',' << fn::format_real(best.delta_star) << ','
             << fn::format_real(best.prediction.kappa) << ',' << fn::format_real(best.prediction.lambda) << ','
             << fn::format_real(best.prediction.coefficient) << '\n';
        });
      }
      return kOk;
    }
    if (*tradeoff) {
      std::vector<fn::DecentralizedPoint> dec;
      fn::TradeoffCurve cent;
      if (scheme != "cent") {
        dec = fn::tradeoff_decentralized_curve();
      }
      if (scheme != "dec") {
        cent = fn::tradeoff_centralized();
        for (const auto& w : cent.warnings) {
          std::cerr << "warning: skipped " << w << '\n';
        }
      }
      emit(tradeoff_out, [&](std::ostream& os) { fn::write_tradeoff_csv(os, dec, cent.points); });
      return kOk;
    }
    if (*regimes) {
      std::vector<double> ks = regime_k;
      const double l = std::log(regime_n);
      if (ks.empty()) {
        ks = {std::max(1.0, std::ceil(0.1 * l)), std::ceil(l), std::ceil(l * l), std::ceil(std::sqrt(regime_n)),
              std::ceil(regime_n / l)};
      }
      std::cout << std::left << std::setw(14) << "k" << std::setw(12) << "regime" << std::setw(18) << "R_pred"
                << "R_pred/log n\n";
      for (double k : ks) {
        const fn::RegimeResult r = fn::regime_classify(regime_n, k);
        std::cout << std::setw(14) << fn::format_exact(k) << std::setw(12) << fn::to_string(r.label) << std::setw(18)
                  << fn::format_real(r.predicted_sum_rate) << fn::format_real(r.predicted_sum_rate / l) << '\n';
      }
      return kOk;
    }
    if (*selfcheck) {
      return fn::run_selfcheck(std::cout) ? kOk : kDomainError;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const fn::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}
