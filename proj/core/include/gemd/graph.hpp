#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gemd {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  std::size_t line;
};

// What the transition matrix (and a walker) does on a node without
// out-edges: keep it alive on a self-loop, or let the row be zero.
enum class DanglingPolicy { self_loop, zero_row };

struct WeightedArc {
  int src;
  int dst;
  double weight;
};

struct DegreeView {
  std::span<const double> out_degree;
};

// Sparse weighted directed graph in CSR layout. Undirected graphs are stored
// symmetrically (every edge present as two arcs). Immutable once built and
// safe to read from any number of threads.
class Graph {
 public:
  Graph() = default;

  // `edges` uses external string ids; internal indices are assigned in
  // first-appearance order. Duplicate (src, dst) pairs have weights summed.
  static Graph build(std::vector<std::pair<std::string, std::string>> endpoints,
                     std::vector<double> weights, bool directed);
  // Indexed variant used by synthetic generators; node ids become "0".."n-1".
  static Graph build_indexed(int n, std::vector<WeightedArc> arcs, bool directed);

  int node_count() const noexcept { return n_; }
  bool directed() const noexcept { return directed_; }
  std::size_t arc_count() const noexcept { return targets_.size(); }

  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::span<const double> neighbor_weights(int v) const {
    return {weights_.data() + offsets_[v], weights_.data() + offsets_[v + 1]};
  }
  // Prefix sums of neighbor_weights(v); back() is the weighted out-degree.
  std::span<const double> neighbor_weight_prefix(int v) const {
    return {weight_prefix_.data() + offsets_[v], weight_prefix_.data() + offsets_[v + 1]};
  }

  double out_degree(int v) const { return out_degree_[v]; }
  DegreeView degrees() const { return {out_degree_}; }
  bool is_dangling(int v) const { return offsets_[v] == offsets_[v + 1]; }

  // Neighbors in the undirected view (union of in- and out-arcs), sorted.
  std::span<const int> und_neighbors(int v) const {
    return {und_targets_.data() + und_offsets_[v], und_targets_.data() + und_offsets_[v + 1]};
  }
  bool und_adjacent(int a, int b) const;

  double arc_weight(int src, int dst) const;  // 0 when absent

  const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
  const std::string& node_id(int v) const { return node_ids_[v]; }
  // -1 when the id is unknown.
  int index_of(const std::string& id) const;

 private:
  int n_ = 0;
  bool directed_ = true;
  std::vector<std::int64_t> offsets_;
  std::vector<int> targets_;  // sorted within each row
  std::vector<double> weights_;
  std::vector<double> weight_prefix_;
  std::vector<double> out_degree_;
  std::vector<std::int64_t> und_offsets_;
  std::vector<int> und_targets_;
  std::vector<std::string> node_ids_;
  std::unordered_map<std::string, int> id_index_;

  void finalize(std::vector<WeightedArc> arcs);
};

// Edge-list file: UTF-8 text, `#` comment lines skipped, fields separated by
// tabs or spaces: `src dst [weight]`, missing weight = 1. For undirected
// input every edge is stored in both directions; duplicates are summed.
// Malformed lines raise ParseError with the 1-based line number.
Graph load_edge_list(const std::string& path, bool directed);

// Inverse of load_edge_list: undirected graphs emit each edge once (src <=
// dst), directed graphs emit every arc. Weights are printed round-trip exact.
void write_edge_list(const Graph& g, const std::string& path);

class ProximityMatrix;  // matrix.hpp

// Row-stochastic P = D^-1 A; dangling rows per policy.
ProximityMatrix transition_matrix(const Graph& g, DanglingPolicy policy = DanglingPolicy::self_loop);

// L = D - A.
ProximityMatrix laplacian(const Graph& g);

// Double-sweep BFS lower bound on the unweighted, undirected-view diameter,
// maximized over `samples` seeded start nodes. On disconnected graphs the
// sweep stays inside the components the starts land in.
int estimate_diameter(const Graph& g, int samples, std::uint64_t seed);

}  // namespace gemd
