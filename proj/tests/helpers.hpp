#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gemd/graph.hpp"
#include "gemd/rng.hpp"

namespace testutil {

using gemd::Graph;
using gemd::WeightedArc;

inline Graph path_graph(int n) {
  std::vector<WeightedArc> arcs;
  for (int i = 0; i + 1 < n; ++i) arcs.push_back({i, i + 1, 1.0});
  return Graph::build_indexed(n, std::move(arcs), false);
}

inline Graph complete_graph(int n) {
  std::vector<WeightedArc> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) arcs.push_back({i, j, 1.0});
  return Graph::build_indexed(n, std::move(arcs), false);
}

// Center is node 0.
inline Graph star_graph(int leaves) {
  std::vector<WeightedArc> arcs;
  for (int i = 1; i <= leaves; ++i) arcs.push_back({0, i, 1.0});
  return Graph::build_indexed(leaves + 1, std::move(arcs), false);
}

inline Graph triangle() { return complete_graph(3); }

// Two disjoint cliques of `half` nodes each; log_sigma > 0 draws log-normal
// edge weights.
inline Graph two_cliques(int half, std::uint64_t seed = 0, double log_sigma = 0.0) {
  gemd::CounterRng rng(seed, 0x2c11);
  std::vector<WeightedArc> arcs;
  auto add_clique = [&](int base) {
    for (int i = 0; i < half; ++i)
      for (int j = i + 1; j < half; ++j) {
        const double w = log_sigma > 0.0 ? std::exp(log_sigma * rng.next_gaussian()) : 1.0;
        arcs.push_back({base + i, base + j, w});
      }
  };
  add_clique(0);
  add_clique(half);
  return Graph::build_indexed(2 * half, std::move(arcs), false);
}

// Random graph with i.i.d. arc coin flips; weights uniform in [0.5, 1.5].
// Directed graphs may contain dangling nodes.
inline Graph random_graph(int n, double prob, bool directed, std::uint64_t seed) {
  gemd::CounterRng rng(seed, 0x79d3);
  std::vector<WeightedArc> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!directed && j < i) continue;
      if (rng.next_double() < prob) arcs.push_back({i, j, 0.5 + rng.next_double()});
    }
  }
  return Graph::build_indexed(n, std::move(arcs), directed);
}

// Uniform random recursive tree on n nodes.
inline Graph random_tree(int n, std::uint64_t seed) {
  gemd::CounterRng rng(seed, 0x7ee5);
  std::vector<WeightedArc> arcs;
  for (int i = 1; i < n; ++i)
    arcs.push_back({static_cast<int>(rng.next_below(i)), i, 1.0});
  return Graph::build_indexed(n, std::move(arcs), false);
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  static std::uint64_t counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("gemd_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name, const std::string& content) {
  auto p = dir / name;
  std::ofstream out(p);
  out << content;
  return p;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
