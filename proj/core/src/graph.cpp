#include "gemd/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <queue>
#include <utility>

#include "gemd/matrix.hpp"
#include "gemd/rng.hpp"

namespace gemd {

namespace {

// Splits on runs of tabs/spaces; returns up to 4 fields (3 valid + overflow).
int split_fields(const std::string& line, std::string_view out[4]) {
  int count = 0;
  std::size_t i = 0;
  const std::size_t len = line.size();
  while (i < len) {
    while (i < len && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= len) break;
    std::size_t start = i;
    while (i < len && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (count < 4) out[count] = std::string_view(line).substr(start, i - start);
    ++count;
  }
  return count;
}

double parse_weight(std::string_view s, std::size_t line_no) {
  double w = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, w);
  if (ec != std::errc() || ptr != end)
    throw ParseError("non-numeric edge weight '" + std::string(s) + "'", line_no);
  if (!(w > 0.0) || !std::isfinite(w))
    throw ParseError("edge weight must be positive and finite, got '" + std::string(s) + "'",
                     line_no);
  return w;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void Graph::finalize(std::vector<WeightedArc> arcs) {
  // Sort by (src, dst), sum duplicates, then build CSR.
  std::sort(arcs.begin(), arcs.end(), [](const WeightedArc& a, const WeightedArc& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < arcs.size();) {
    WeightedArc acc = arcs[i];
    std::size_t j = i + 1;
    while (j < arcs.size() && arcs[j].src == acc.src && arcs[j].dst == acc.dst) {
      acc.weight += arcs[j].weight;
      ++j;
    }
    arcs[out++] = acc;
    i = j;
  }
  arcs.resize(out);

  offsets_.assign(n_ + 1, 0);
  targets_.resize(arcs.size());
  weights_.resize(arcs.size());
  weight_prefix_.resize(arcs.size());
  for (const auto& a : arcs) ++offsets_[a.src + 1];
  for (int v = 0; v < n_; ++v) offsets_[v + 1] += offsets_[v];
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    targets_[i] = arcs[i].dst;
    weights_[i] = arcs[i].weight;
  }
  out_degree_.assign(n_, 0.0);
  for (int v = 0; v < n_; ++v) {
    double acc = 0.0;
    for (auto i = offsets_[v]; i < offsets_[v + 1]; ++i) {
      acc += weights_[i];
      weight_prefix_[i] = acc;
    }
    out_degree_[v] = acc;
  }

  // Undirected view: union of arcs in both orientations, deduped.
  std::vector<std::pair<int, int>> und;
  und.reserve(arcs.size() * 2);
  for (const auto& a : arcs) {
    und.emplace_back(a.src, a.dst);
    und.emplace_back(a.dst, a.src);
  }
  std::sort(und.begin(), und.end());
  und.erase(std::unique(und.begin(), und.end()), und.end());
  und_offsets_.assign(n_ + 1, 0);
  und_targets_.resize(und.size());
  for (const auto& [s, d] : und) ++und_offsets_[s + 1];
  for (int v = 0; v < n_; ++v) und_offsets_[v + 1] += und_offsets_[v];
  for (std::size_t i = 0; i < und.size(); ++i) und_targets_[i] = und[i].second;
}

Graph Graph::build(std::vector<std::pair<std::string, std::string>> endpoints,
                   std::vector<double> weights, bool directed) {
  Graph g;
  g.directed_ = directed;
  std::vector<WeightedArc> arcs;
  arcs.reserve(endpoints.size() * (directed ? 1 : 2));
  auto intern = [&g](const std::string& id) {
    auto [it, inserted] = g.id_index_.try_emplace(id, static_cast<int>(g.node_ids_.size()));
    if (inserted) g.node_ids_.push_back(id);
    return it->second;
  };
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    const int s = intern(endpoints[i].first);
    const int d = intern(endpoints[i].second);
    arcs.push_back({s, d, weights[i]});
    if (!directed && s != d) arcs.push_back({d, s, weights[i]});
  }
  g.n_ = static_cast<int>(g.node_ids_.size());
  g.finalize(std::move(arcs));
  return g;
}

Graph Graph::build_indexed(int n, std::vector<WeightedArc> arcs, bool directed) {
  Graph g;
  g.directed_ = directed;
  g.n_ = n;
  g.node_ids_.reserve(n);
  for (int v = 0; v < n; ++v) {
    g.node_ids_.push_back(std::to_string(v));
    g.id_index_.emplace(g.node_ids_.back(), v);
  }
  if (!directed) {
    const std::size_t m = arcs.size();
    arcs.reserve(m * 2);
    for (std::size_t i = 0; i < m; ++i)
      if (arcs[i].src != arcs[i].dst) arcs.push_back({arcs[i].dst, arcs[i].src, arcs[i].weight});
  }
  for (const auto& a : arcs)
    if (a.src < 0 || a.src >= n || a.dst < 0 || a.dst >= n)
      throw std::invalid_argument("arc endpoint out of range");
  g.finalize(std::move(arcs));
  return g;
}

bool Graph::und_adjacent(int a, int b) const {
  auto row = und_neighbors(a);
  return std::binary_search(row.begin(), row.end(), b);
}

double Graph::arc_weight(int src, int dst) const {
  auto row = neighbors(src);
  auto it = std::lower_bound(row.begin(), row.end(), dst);
  if (it == row.end() || *it != dst) return 0.0;
  return weights_[offsets_[src] + (it - row.begin())];
}

int Graph::index_of(const std::string& id) const {
  auto it = id_index_.find(id);
  return it == id_index_.end() ? -1 : it->second;
}

Graph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  std::vector<std::pair<std::string, std::string>> endpoints;
  std::vector<double> weights;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view fields[4];
    // Full-line comments only; '#' is a legal id character elsewhere.
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const int n = split_fields(line, fields);
    if (n < 2 || n > 3)
      throw ParseError("expected `src dst [weight]`, got " + std::to_string(n) + " fields",
                       line_no);
    const double w = n == 3 ? parse_weight(fields[2], line_no) : 1.0;
    endpoints.emplace_back(std::string(fields[0]), std::string(fields[1]));
    weights.push_back(w);
  }
  return Graph::build(std::move(endpoints), std::move(weights), directed);
}

void write_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (int v = 0; v < g.node_count(); ++v) {
    auto nbrs = g.neighbors(v);
    auto ws = g.neighbor_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (!g.directed() && nbrs[i] < v) continue;  // each undirected edge once
      out << g.node_id(v) << '\t' << g.node_id(nbrs[i]) << '\t' << format_double(ws[i]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ProximityMatrix transition_matrix(const Graph& g, DanglingPolicy policy) {
  const int n = g.node_count();
  if (n < 1) throw std::invalid_argument("transition_matrix: empty graph");
  SparseRM p(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.arc_count() + n);
  for (int v = 0; v < n; ++v) {
    if (g.is_dangling(v)) {
      if (policy == DanglingPolicy::self_loop) trips.emplace_back(v, v, 1.0);
      continue;
    }
    const double d = g.out_degree(v);
    auto nbrs = g.neighbors(v);
    auto ws = g.neighbor_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) trips.emplace_back(v, nbrs[i], ws[i] / d);
  }
  p.setFromTriplets(trips.begin(), trips.end());
  return {std::move(p), ProximityKind::transition};
}

ProximityMatrix laplacian(const Graph& g) {
  const int n = g.node_count();
  if (n < 1) throw std::invalid_argument("laplacian: empty graph");
  SparseRM l(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.arc_count() + n);
  for (int v = 0; v < n; ++v) {
    if (g.out_degree(v) != 0.0) trips.emplace_back(v, v, g.out_degree(v));
    auto nbrs = g.neighbors(v);
    auto ws = g.neighbor_weights(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) trips.emplace_back(v, nbrs[i], -ws[i]);
  }
  l.setFromTriplets(trips.begin(), trips.end());
  return {std::move(l), ProximityKind::laplacian};
}

namespace {

// BFS in the undirected view; returns (farthest node, depth). Ties broken
// toward the smallest index so sweeps are deterministic.
std::pair<int, int> bfs_farthest(const Graph& g, int start) {
  std::vector<int> dist(g.node_count(), -1);
  std::queue<int> q;
  dist[start] = 0;
  q.push(start);
  int best = start, best_d = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    if (dist[v] > best_d) {
      best_d = dist[v];
      best = v;
    }
    for (int u : g.und_neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  return {best, best_d};
}

}  // namespace

int estimate_diameter(const Graph& g, int samples, std::uint64_t seed) {
  if (g.node_count() < 1) throw std::invalid_argument("estimate_diameter: empty graph");
  if (samples < 1) throw std::invalid_argument("estimate_diameter: samples must be >= 1");
  CounterRng rng(seed, 0x6d1a);
  int best = 0;
  for (int s = 0; s < samples; ++s) {
    const int start = static_cast<int>(rng.next_below(g.node_count()));
    auto [far_node, d1] = bfs_farthest(g, start);
    auto [ignored, d2] = bfs_farthest(g, far_node);
    (void)ignored;
    best = std::max({best, d1, d2});
  }
  return best;
}

const char* to_string(ProximityKind kind) {
  switch (kind) {
    case ProximityKind::adjacency: return "adjacency";
    case ProximityKind::laplacian: return "laplacian";
    case ProximityKind::transition: return "transition";
    case ProximityKind::fst: return "fst";
    case ProximityKind::ist: return "ist";
    case ProximityKind::fsmt: return "fsmt";
    case ProximityKind::estimated_fst: return "estimated-fst";
    case ProximityKind::estimated_fsmt: return "estimated-fsmt";
  }
  return "unknown";
}

}  // namespace gemd
