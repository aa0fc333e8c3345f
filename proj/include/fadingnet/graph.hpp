#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "fadingnet/rng.hpp"

namespace fadingnet {

/// Undirected graph over candidate links. Vertex positions 0..m-1 map to
/// link indices through `vertices`; adjacency is an m x m row-major 0/1 grid.
struct InterferenceGraph {
  std::vector<std::size_t> vertices;
  std::vector<std::uint8_t> adjacency;
  /// Model edge probability (NaN when not derived from a fading model).
  double pi = std::numeric_limits<double>::quiet_NaN();

  InterferenceGraph() = default;
  explicit InterferenceGraph(std::vector<std::size_t> links)
      : vertices(std::move(links)), adjacency(vertices.size() * vertices.size(), 0) {}

  std::size_t size() const noexcept { return vertices.size(); }
  bool adjacent(std::size_t a, std::size_t b) const noexcept { return adjacency[a * vertices.size() + b] != 0; }

  void connect(std::size_t a, std::size_t b) {
    if (a == b) {
      throw std::invalid_argument("InterferenceGraph: self loops are not allowed");
    }
    adjacency[a * size() + b] = 1;
    adjacency[b * size() + a] = 1;
  }

  std::size_t degree(std::size_t a) const noexcept {
    std::size_t d = 0;
    for (std::size_t b = 0; b < size(); ++b) {
      d += adjacent(a, b) ? 1 : 0;
    }
    return d;
  }

  std::size_t edge_count() const noexcept {
    std::size_t e = 0;
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t b = a + 1; b < size(); ++b) {
        e += adjacent(a, b) ? 1 : 0;
      }
    }
    return e;
  }
};

/// Symmetric with an empty diagonal.
inline bool is_well_formed(const InterferenceGraph& g) {
  if (g.adjacency.size() != g.size() * g.size()) {
    return false;
  }
  for (std::size_t a = 0; a < g.size(); ++a) {
    if (g.adjacent(a, a)) {
      return false;
    }
    for (std::size_t b = a + 1; b < g.size(); ++b) {
      if (g.adjacent(a, b) != g.adjacent(b, a)) {
        return false;
      }
    }
  }
  return true;
}

/// G(k, pi): each of the k(k-1)/2 pairs is an edge independently with
/// probability pi. Vertices are labelled 0..k-1.
inline InterferenceGraph random_graph(std::size_t k, double pi, const Seed& seed) {
  if (!(pi >= 0.0 && pi <= 1.0)) {
    throw std::invalid_argument("random_graph: pi must lie in [0, 1]");
  }
  std::vector<std::size_t> labels(k);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  InterferenceGraph g(std::move(labels));
  g.pi = pi;
  rng::Stream stream(seed);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (stream.uniform() < pi) {
        g.connect(a, b);
      }
    }
  }
  return g;
}

enum class CliqueMethod { Exact, Greedy };

struct CliqueResult {
  /// Link indices of the clique, ascending.
  std::vector<std::size_t> members;
  std::size_t size = 0;
  CliqueMethod method = CliqueMethod::Exact;
  double predicted_size = std::numeric_limits<double>::quiet_NaN();
};

/// Asymptotic clique number of G(k, pi): 2 log k / log(1/pi).
inline double clique_number_prediction(double k, double pi) {
  if (!(pi > 0.0 && pi < 1.0)) {
    throw std::invalid_argument("clique_number_prediction: pi must lie strictly inside (0, 1)");
  }
  if (!(k >= 2.0)) {
    throw std::invalid_argument("clique_number_prediction: k must be at least 2");
  }
  return 2.0 * std::log(k) / std::log(1.0 / pi);
}

/// True when every pair of the given vertex positions is adjacent.
inline bool is_clique_positions(const InterferenceGraph& g, const std::vector<std::size_t>& positions) {
  for (std::size_t a = 0; a < positions.size(); ++a) {
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      if (positions[a] == positions[b] || !g.adjacent(positions[a], positions[b])) {
        return false;
      }
    }
  }
  return true;
}

/// Same check on link indices (the form stored in CliqueResult).
inline bool is_clique(const InterferenceGraph& g, const std::vector<std::size_t>& links) {
  std::vector<std::size_t> positions;
  positions.reserve(links.size());
  for (std::size_t link : links) {
    const auto it = std::find(g.vertices.begin(), g.vertices.end(), link);
    if (it == g.vertices.end()) {
      return false;
    }
    positions.push_back(static_cast<std::size_t>(it - g.vertices.begin()));
  }
  return is_clique_positions(g, positions);
}

namespace detail {

inline CliqueResult finish_clique(const InterferenceGraph& g, const std::vector<std::size_t>& positions,
                                  CliqueMethod method) {
  if (!is_clique_positions(g, positions)) {
    throw std::logic_error("clique solver produced a non-clique");
  }
  CliqueResult out;
  out.method = method;
  out.members.reserve(positions.size());
  for (std::size_t p : positions) {
    out.members.push_back(g.vertices[p]);
  }
  std::sort(out.members.begin(), out.members.end());
  out.size = out.members.size();
  if (g.size() >= 2 && g.pi > 0.0 && g.pi < 1.0) {
    out.predicted_size = clique_number_prediction(static_cast<double>(g.size()), g.pi);
  }
  return out;
}

/// Branch and bound with greedy-coloring bounds (Tomita-Seki MCQ).
class ExactCliqueSearch {
 public:
  explicit ExactCliqueSearch(const InterferenceGraph& g) : g_(g) {}

  std::vector<std::size_t> run() {
    std::vector<std::size_t> candidates(g_.size());
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    std::vector<std::size_t> degree(g_.size());
    for (std::size_t v = 0; v < g_.size(); ++v) {
      degree[v] = g_.degree(v);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
    if (!candidates.empty()) {
      best_ = {candidates.front()};
    }
    std::vector<std::size_t> current;
    expand(current, candidates);
    return best_;
  }

 private:
  // Greedy sequential coloring of `candidates` in their given order. Returns
  // the vertices regrouped by color class with the color count of each.
  void color_sort(const std::vector<std::size_t>& candidates, std::vector<std::size_t>& order,
                  std::vector<std::size_t>& colors) const {
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t v : candidates) {
      std::size_t c = 0;
      for (; c < classes.size(); ++c) {
        bool clash = false;
        for (std::size_t w : classes[c]) {
          if (g_.adjacent(v, w)) {
            clash = true;
            break;
          }
        }
        if (!clash) {
          break;
        }
      }
      if (c == classes.size()) {
        classes.emplace_back();
      }
      classes[c].push_back(v);
    }
    order.clear();
    colors.clear();
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t v : classes[c]) {
        order.push_back(v);
        colors.push_back(c + 1);
      }
    }
  }

  void expand(std::vector<std::size_t>& current, const std::vector<std::size_t>& candidates) {
    std::vector<std::size_t> order;
    std::vector<std::size_t> colors;
    color_sort(candidates, order, colors);
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + colors[idx] <= best_.size()) {
        return;
      }
      const std::size_t v = order[idx];
      current.push_back(v);
      std::vector<std::size_t> next;
      for (std::size_t j = 0; j < idx; ++j) {
        if (g_.adjacent(v, order[j])) {
          next.push_back(order[j]);
        }
      }
      if (next.empty()) {
        if (current.size() > best_.size()) {
          best_ = current;
        }
      } else {
        expand(current, next);
      }
      current.pop_back();
    }
  }

  const InterferenceGraph& g_;
  std::vector<std::size_t> best_;
};

}  // namespace detail

inline constexpr std::size_t kExactCliqueCap = 150;

/// Maximum clique by branch and bound. Graphs above `cap` vertices are
/// rejected; use max_clique_greedy for those.
inline CliqueResult max_clique_exact(const InterferenceGraph& g, std::size_t cap = kExactCliqueCap) {
  if (g.size() > cap) {
    throw std::invalid_argument("max_clique_exact: graph has " + std::to_string(g.size()) +
                                " vertices, above the exact-solver cap of " + std::to_string(cap));
  }
  return detail::finish_clique(g, detail::ExactCliqueSearch(g).run(), CliqueMethod::Exact);
}

/// Randomized degree-ordered greedy. Restart 0 starts from the highest-degree
/// vertex and breaks ties by position; later restarts start from a uniformly
/// random vertex and break ties at random. Each step adds the candidate with
/// the most neighbours among the remaining candidates. The best clique wins;
/// equal sizes go to the lexicographically smallest member set.
inline CliqueResult max_clique_greedy(const InterferenceGraph& g, std::size_t restarts, const Seed& seed) {
  const std::size_t m = g.size();
  std::vector<std::size_t> best_links;
  if (m == 0 || restarts == 0) {
    return detail::finish_clique(g, {}, CliqueMethod::Greedy);
  }
  rng::Stream stream(seed);
  std::vector<std::size_t> best_positions;
  for (std::size_t r = 0; r < restarts; ++r) {
    std::vector<std::size_t> clique;
    std::size_t start = 0;
    if (r == 0) {
      std::size_t best_degree = 0;
      for (std::size_t v = 0; v < m; ++v) {
        const std::size_t d = g.degree(v);
        if (v == 0 || d > best_degree) {
          best_degree = d;
          start = v;
        }
      }
    } else {
      start = static_cast<std::size_t>(stream.below(m));
    }
    clique.push_back(start);
    std::vector<std::size_t> candidates;
    for (std::size_t v = 0; v < m; ++v) {
      if (v != start && g.adjacent(start, v)) {
        candidates.push_back(v);
      }
    }
    while (!candidates.empty()) {
      std::vector<std::size_t> inner(candidates.size(), 0);
      std::size_t top = 0;
      for (std::size_t a = 0; a < candidates.size(); ++a) {
        for (std::size_t b = 0; b < candidates.size(); ++b) {
          if (a != b && g.adjacent(candidates[a], candidates[b])) {
            ++inner[a];
          }
        }
        top = std::max(top, inner[a]);
      }
      std::vector<std::size_t> tied;
      for (std::size_t a = 0; a < candidates.size(); ++a) {
        if (inner[a] == top) {
          tied.push_back(a);
        }
      }
      const std::size_t pick = (r == 0) ? tied.front() : tied[static_cast<std::size_t>(stream.below(tied.size()))];
      const std::size_t v = candidates[pick];
      clique.push_back(v);
      std::vector<std::size_t> next;
      for (std::size_t w : candidates) {
        if (w != v && g.adjacent(v, w)) {
          next.push_back(w);
        }
      }
      candidates = std::move(next);
    }
    std::vector<std::size_t> links;
    for (std::size_t p : clique) {
      links.push_back(g.vertices[p]);
    }
    std::sort(links.begin(), links.end());
    if (best_positions.empty() || links.size() > best_links.size() ||
        (links.size() == best_links.size() && links < best_links)) {
      best_links = std::move(links);
      best_positions = std::move(clique);
    }
  }
  return detail::finish_clique(g, best_positions, CliqueMethod::Greedy);
}

}  // namespace fadingnet
