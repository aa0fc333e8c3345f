#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "fadingnet/centralized.hpp"
#include "fadingnet/decentralized.hpp"
#include "fadingnet/fading.hpp"
#include "fadingnet/graph.hpp"
#include "fadingnet/network.hpp"
#include "fadingnet/scaling.hpp"

namespace fadingnet {

struct SelfCheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double elapsed_ms = 0.0;
};

namespace selfcheck {

inline std::string check_moments() {
  const std::uint64_t draws = 200000;
  for (const FadingModel& model : {FadingModel::rayleigh(), FadingModel::lognormal(0.0, 0.5)}) {
    const std::uint64_t key = rng::stream_key(Seed{11, 0});
    double sum = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
      const double u1 = rng::to_open_closed(rng::draw(key, 2 * i));
      const double u2 = rng::to_closed_open(rng::draw(key, 2 * i + 1));
      sum += model.transform(u1, u2);
    }
    const double mean = sum / static_cast<double>(draws);
    const double se = std::sqrt(model.variance() / static_cast<double>(draws));
    if (std::abs(mean - model.mean()) > 5.0 * se) {
      return model.name() + " sample mean " + std::to_string(mean) + " vs " + std::to_string(model.mean());
    }
  }
  return {};
}

inline std::string check_jensen() {
  const FadingModel model = FadingModel::rayleigh();
  const std::size_t n = 200;
  const NetworkParams params(n);
  const double t = optimize_threshold(static_cast<double>(n), model).t_star;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const ChannelMatrix g = sample_channel_matrix(n, model, Seed{23, r});
    const PowerVector p = strategy1_activate(g, t, params);
    const double exact = evaluate(g, p, params).sum_rate;
    const double bound = jensen_bound(g, p, t, params);
    if (exact < bound) {
      return "instance " + std::to_string(r) + ": sum-rate below the Jensen bound";
    }
  }
  return {};
}

inline std::string check_edge_probability() {
  const double delta = 1.0;
  const std::size_t pairs = 100000;
  const LazyChannel ch(2 * pairs, FadingModel::rayleigh(), Seed{31, 0});
  std::size_t edges = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    edges += (ch.gain(2 * i, 2 * i + 1) <= delta && ch.gain(2 * i + 1, 2 * i) <= delta) ? 1 : 0;
  }
  const double pi = edge_probability(delta);
  const double freq = static_cast<double>(edges) / static_cast<double>(pairs);
  const double sd = std::sqrt(pi * (1.0 - pi) / static_cast<double>(pairs));
  if (std::abs(freq - pi) > 4.0 * sd) {
    return "edge frequency " + std::to_string(freq) + " vs " + std::to_string(pi);
  }
  return {};
}

inline std::string check_graph_symmetry() {
  const std::size_t n = 60;
  for (std::uint64_t r = 0; r < 10; ++r) {
    const ChannelMatrix g = sample_channel_matrix(n, FadingModel::rayleigh(), Seed{41, r});
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
      pool[i] = i;
    }
    const InterferenceGraph graph = build_graph(g, std::span<const std::size_t>(pool), 1.0);
    if (!is_well_formed(graph)) {
      return "built graph " + std::to_string(r) + " is not symmetric with an empty diagonal";
    }
  }
  return {};
}

inline std::size_t brute_force_clique(const InterferenceGraph& g) {
  const std::size_t m = g.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < m; ++v) {
      if ((mask >> v) & 1U) {
        members.push_back(v);
      }
    }
    if (members.size() > best && is_clique_positions(g, members)) {
      best = members.size();
    }
  }
  return best;
}

inline std::string check_exact_clique() {
  for (std::uint64_t r = 0; r < 20; ++r) {
    const InterferenceGraph g = random_graph(12, 0.5, Seed{53, r});
    const std::size_t exact = max_clique_exact(g).size;
    const std::size_t brute = brute_force_clique(g);
    if (exact != brute) {
      return "graph " + std::to_string(r) + ": solver " + std::to_string(exact) + " vs enumeration " +
             std::to_string(brute);
    }
  }
  return {};
}

}  // namespace selfcheck

/// Quick consistency bundle. Prints one line per check and returns true iff
/// all passed.
inline bool run_selfcheck(std::ostream& out, std::vector<SelfCheckResult>* results = nullptr) {
  const std::vector<std::pair<std::string, std::function<std::string()>>> checks{
      {"fading distribution moments", selfcheck::check_moments},
      {"jensen inequality (100 instances)", selfcheck::check_jensen},
      {"edge probability", selfcheck::check_edge_probability},
      {"interference graph symmetry", selfcheck::check_graph_symmetry},
      {"exact clique vs enumeration", selfcheck::check_exact_clique},
  };
  bool all = true;
  for (const auto& [name, check] : checks) {
    SelfCheckResult r;
    r.name = name;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.detail = check();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = e.what();
      r.passed = false;
    }
    r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << std::to_string(r.elapsed_ms) << " ms)";
    if (!r.passed) {
      out << ": " << r.detail;
    }
    out << '\n';
    all = all && r.passed;
    if (results != nullptr) {
      results->push_back(r);
    }
  }
  return all;
}

}  // namespace fadingnet
