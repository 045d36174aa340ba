#pragma once

#include <cstdint>
#include <vector>

#include "gemd/graph.hpp"

namespace gemd {

// Planted-partition generator. Nodes fall into `blocks` contiguous groups;
// each unordered pair draws an edge with the within- or between-block
// probability. weight_log_sigma > 0 makes weights log-normal exp(sigma * z)
// instead of 1. hub_exponent > 0 draws per-node propensities u^-beta
// (capped) that multiply the pair probability, planting the hub/degree
// heterogeneity typical of social graphs.
struct SbmSpec {
  int nodes = 0;
  int blocks = 2;
  double within_prob = 0.1;
  double between_prob = 0.01;
  double weight_log_sigma = 0.0;
  double hub_exponent = 0.0;  // beta in [0, 1); 0 = homogeneous degrees
  double hub_cap = 8.0;
};

struct LabeledGraph {
  Graph graph;
  std::vector<int> block_of;  // per node
};

LabeledGraph sbm_graph(const SbmSpec& spec, std::uint64_t seed);

// Undirected graph with exactly `edges` distinct node pairs, unit weights.
// Used for scaling sweeps at a fixed edges-per-node ratio.
Graph random_pair_graph(int nodes, std::size_t edges, std::uint64_t seed);

// Overlapping social circles. Every node joins `memberships_per_node`
// circles; each circle's members form a ring wired to the next `ring_span`
// members, so circle cohesion is spread over multiple hops instead of being
// readable from a single neighborhood. A sparse uniform noise layer joins
// the circles, and weights are log-normal. Labels are the (multi-label)
// circle memberships.
struct CircleSpec {
  int nodes = 240;
  int circles = 12;
  int memberships_per_node = 2;
  int ring_span = 1;
  double noise_prob = 0.008;
  double weight_log_sigma = 3.0;
};

struct CircleGraph {
  Graph graph;
  std::vector<std::vector<int>> memberships;  // per node, sorted
};

CircleGraph social_circles_graph(const CircleSpec& spec, std::uint64_t seed);

}  // namespace gemd
