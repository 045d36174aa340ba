#include "gemd/synth.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "gemd/rng.hpp"

namespace gemd {

LabeledGraph sbm_graph(const SbmSpec& spec, std::uint64_t seed) {
  const int n = spec.nodes;
  if (n < 1) throw std::invalid_argument("sbm_graph: nodes must be >= 1");
  if (spec.blocks < 1 || spec.blocks > n)
    throw std::invalid_argument("sbm_graph: blocks must lie in [1, nodes]");

  LabeledGraph out;
  out.block_of.resize(n);
  for (int i = 0; i < n; ++i)
    out.block_of[i] = static_cast<int>(static_cast<std::int64_t>(i) * spec.blocks / n);

  std::vector<WeightedArc> arcs;
  CounterRng rng(seed, 0x58b3);
  std::vector<double> propensity(n, 1.0);
  if (spec.hub_exponent > 0.0) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      double u = rng.next_double();
      while (u <= 0.0) u = rng.next_double();
      propensity[i] = std::min(spec.hub_cap, std::pow(u, -spec.hub_exponent));
      mean += propensity[i];
    }
    mean /= n;
    for (double& t : propensity) t /= mean;  // keep the average density
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double base =
          out.block_of[i] == out.block_of[j] ? spec.within_prob : spec.between_prob;
      const double prob = std::min(1.0, base * propensity[i] * propensity[j]);
      if (rng.next_double() >= prob) continue;
      double w = 1.0;
      if (spec.weight_log_sigma > 0.0)
        w = std::exp(spec.weight_log_sigma * rng.next_gaussian());
      arcs.push_back({i, j, w});
    }
  }
  out.graph = Graph::build_indexed(n, std::move(arcs), /*directed=*/false);
  return out;
}

CircleGraph social_circles_graph(const CircleSpec& spec, std::uint64_t seed) {
  const int n = spec.nodes;
  if (n < 3) throw std::invalid_argument("social_circles_graph: nodes must be >= 3");
  if (spec.circles < 2 || spec.memberships_per_node < 1 ||
      spec.memberships_per_node > spec.circles)
    throw std::invalid_argument("social_circles_graph: bad circle counts");
  if (spec.ring_span < 1) throw std::invalid_argument("social_circles_graph: ring_span >= 1");

  CounterRng rng(seed, 0x52);
  CircleGraph out;
  out.memberships.resize(n);
  std::vector<std::vector<int>> of_circle(spec.circles);
  for (int i = 0; i < n; ++i) {
    auto& mine = out.memberships[i];
    while (static_cast<int>(mine.size()) < spec.memberships_per_node) {
      const int c = static_cast<int>(rng.next_below(spec.circles));
      if (std::find(mine.begin(), mine.end(), c) == mine.end()) {
        mine.push_back(c);
        of_circle[c].push_back(i);
      }
    }
    std::sort(mine.begin(), mine.end());
  }

  auto weight = [&rng, &spec]() {
    return spec.weight_log_sigma > 0.0 ? std::exp(spec.weight_log_sigma * rng.next_gaussian())
                                       : 1.0;
  };
  std::vector<WeightedArc> arcs;
  for (int c = 0; c < spec.circles; ++c) {
    auto& ring = of_circle[c];
    for (int i = static_cast<int>(ring.size()) - 1; i > 0; --i)
      std::swap(ring[i], ring[rng.next_below(i + 1)]);
    const int sz = static_cast<int>(ring.size());
    if (sz < 3) continue;
    for (int i = 0; i < sz; ++i)
      for (int s = 1; s <= spec.ring_span; ++s)
        arcs.push_back({ring[i], ring[(i + s) % sz], weight()});
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < spec.noise_prob) arcs.push_back({i, j, weight()});

  out.graph = Graph::build_indexed(n, std::move(arcs), /*directed=*/false);
  return out;
}

Graph random_pair_graph(int nodes, std::size_t edges, std::uint64_t seed) {
  if (nodes < 2) throw std::invalid_argument("random_pair_graph: nodes must be >= 2");
  const std::size_t max_edges =
      static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes - 1) / 2;
  if (edges > max_edges)
    throw std::invalid_argument("random_pair_graph: more edges than distinct pairs");

  CounterRng rng(seed, 0x9a17);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges * 2);
  std::vector<WeightedArc> arcs;
  arcs.reserve(edges);
  while (arcs.size() < edges) {
    int a = static_cast<int>(rng.next_below(nodes));
    int b = static_cast<int>(rng.next_below(nodes));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
    if (!seen.insert(key).second) continue;
    arcs.push_back({a, b, 1.0});
  }
  return Graph::build_indexed(nodes, std::move(arcs), /*directed=*/false);
}

}  // namespace gemd
