#include "doctest.h"

#include <algorithm>
#include <map>

#include "gemd/graph.hpp"
#include "gemd/matrix.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gemd;

TEST_CASE("edge list loading assigns first-appearance indices and symmetrizes") {
  auto dir = testutil::fresh_temp_dir("load");
  auto path = testutil::write_file(dir, "g.tsv", "a b\nb c\n");
  Graph g = load_edge_list(path.string(), false);
  CHECK(g.node_count() == 3);
  CHECK(g.arc_count() == 4);
  CHECK(g.node_id(0) == "a");
  CHECK(g.node_id(1) == "b");
  CHECK(g.node_id(2) == "c");
  CHECK(g.arc_weight(0, 1) == 1.0);
  CHECK(g.arc_weight(1, 0) == 1.0);
  CHECK(g.arc_weight(2, 1) == 1.0);
}

TEST_CASE("duplicate edges sum their weights") {
  auto dir = testutil::fresh_temp_dir("dup");
  auto path = testutil::write_file(dir, "g.tsv", "a b 2\na b 3\n");
  Graph g = load_edge_list(path.string(), true);
  CHECK(g.node_count() == 2);
  CHECK(g.arc_count() == 1);
  CHECK(g.arc_weight(0, 1) == 5.0);
}

TEST_CASE("comments, blank lines and tab/space mixing are accepted") {
  auto dir = testutil::fresh_temp_dir("mix");
  auto path = testutil::write_file(dir, "g.tsv", "# header\n\na\tb\t0.5\nb c\n  # more\n");
  Graph g = load_edge_list(path.string(), true);
  CHECK(g.node_count() == 3);
  CHECK(g.arc_weight(0, 1) == 0.5);
}

TEST_CASE("empty file gives an empty graph") {
  auto dir = testutil::fresh_temp_dir("empty");
  auto path = testutil::write_file(dir, "g.tsv", "");
  Graph g = load_edge_list(path.string(), false);
  CHECK(g.node_count() == 0);
  CHECK_THROWS_AS(transition_matrix(g), std::invalid_argument);
}

TEST_CASE("malformed lines report the line number") {
  auto dir = testutil::fresh_temp_dir("bad");
  SUBCASE("wrong field count") {
    auto path = testutil::write_file(dir, "g.tsv", "a b\nx\n");
    CHECK_THROWS_WITH_AS(load_edge_list(path.string(), false),
                         doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("non-numeric weight") {
    auto path = testutil::write_file(dir, "g.tsv", "a b heavy\n");
    CHECK_THROWS_AS(load_edge_list(path.string(), false), ParseError);
  }
  SUBCASE("non-positive weight") {
    auto path = testutil::write_file(dir, "g.tsv", "a b 1\nc d -2\n");
    try {
      load_edge_list(path.string(), false);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
}

TEST_CASE("self-loops are kept and contribute to degree") {
  auto dir = testutil::fresh_temp_dir("self");
  auto path = testutil::write_file(dir, "g.tsv", "a a 2\na b\n");
  Graph g = load_edge_list(path.string(), false);
  CHECK(g.arc_weight(0, 0) == 2.0);  // stored once, not doubled
  CHECK(g.out_degree(0) == 3.0);
}

TEST_CASE("round trip preserves the arc multiset") {
  auto dir = testutil::fresh_temp_dir("rt");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (bool directed : {false, true}) {
      Graph g = testutil::random_graph(17, 0.2, directed, seed);
      auto path = dir / ("g_" + std::to_string(seed) + (directed ? "_d" : "_u") + ".tsv");
      write_edge_list(g, path.string());
      Graph h = load_edge_list(path.string(), directed);
      REQUIRE(h.arc_count() == g.arc_count());  // isolated nodes carry no arcs
      std::map<std::pair<std::string, std::string>, double> got, want;
      for (int v = 0; v < g.node_count(); ++v) {
        auto nb = g.neighbors(v);
        auto ws = g.neighbor_weights(v);
        for (std::size_t i = 0; i < nb.size(); ++i)
          want[{g.node_id(v), g.node_id(nb[i])}] = ws[i];
      }
      for (int v = 0; v < h.node_count(); ++v) {
        auto nb = h.neighbors(v);
        auto ws = h.neighbor_weights(v);
        for (std::size_t i = 0; i < nb.size(); ++i)
          got[{h.node_id(v), h.node_id(nb[i])}] = ws[i];
      }
      CHECK(got == want);
    }
  }
}

TEST_CASE("transition matrix of a 2-node swap graph") {
  Graph g = testutil::path_graph(2);
  ProximityMatrix p = transition_matrix(g);
  CHECK(p.coeff(0, 0) == 0.0);
  CHECK(p.coeff(0, 1) == 1.0);
  CHECK(p.coeff(1, 0) == 1.0);
}

TEST_CASE("transition matrix of a triangle is uniform") {
  ProximityMatrix p = transition_matrix(testutil::triangle());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(p.coeff(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
}

TEST_CASE("transition matrix of the 3-leaf star matches the dense oracle") {
  Graph g = testutil::star_graph(3);
  ProximityMatrix p = transition_matrix(g);
  Eigen::MatrixXd want = oracle::dense_transition(g);
  CHECK((p.to_dense() - want).cwiseAbs().maxCoeff() == 0.0);
  for (int j = 1; j <= 3; ++j) CHECK(p.coeff(0, j) == doctest::Approx(1.0 / 3));
  for (int i = 1; i <= 3; ++i) CHECK(p.coeff(i, 0) == 1.0);
}

TEST_CASE("dangling policies") {
  Graph g = Graph::build_indexed(2, {{0, 1, 1.0}}, true);  // node 1 dangling
  ProximityMatrix keep = transition_matrix(g, DanglingPolicy::self_loop);
  CHECK(keep.coeff(1, 1) == 1.0);
  ProximityMatrix drop = transition_matrix(g, DanglingPolicy::zero_row);
  CHECK(drop.row_sums()(1) == 0.0);
}

TEST_CASE("transition rows are stochastic on random graphs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = testutil::random_graph(23, 0.15, seed % 2 == 0, seed);
    Eigen::VectorXd sums = transition_matrix(g).row_sums();
    for (int i = 0; i < g.node_count(); ++i) CHECK(std::abs(sums(i) - 1.0) < 1e-12);
  }
}

TEST_CASE("laplacian examples") {
  SUBCASE("2-node unit edge") {
    ProximityMatrix l = laplacian(testutil::path_graph(2));
    CHECK(l.coeff(0, 0) == 1.0);
    CHECK(l.coeff(0, 1) == -1.0);
    CHECK(l.coeff(1, 0) == -1.0);
    CHECK(l.coeff(1, 1) == 1.0);
  }
  SUBCASE("isolated node row and column are zero") {
    Graph g = Graph::build_indexed(3, {{0, 1, 1.0}}, false);
    ProximityMatrix l = laplacian(g);
    for (int j = 0; j < 3; ++j) {
      CHECK(l.coeff(2, j) == 0.0);
      CHECK(l.coeff(j, 2) == 0.0);
    }
  }
  SUBCASE("triangle") {
    ProximityMatrix l = laplacian(testutil::triangle());
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(l.coeff(i, j) == (i == j ? 2.0 : -1.0));
  }
  SUBCASE("row sums vanish on undirected graphs") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      Graph g = testutil::random_graph(19, 0.3, false, seed);
      Eigen::VectorXd sums = laplacian(g).row_sums();
      CHECK(sums.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("diameter estimate: path and complete graphs") {
  CHECK(estimate_diameter(testutil::path_graph(5), 3, 1) == 4);
  CHECK(estimate_diameter(testutil::complete_graph(4), 3, 1) == 1);
}

TEST_CASE("diameter estimate is a lower bound and exact on trees") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const int n = 20 + static_cast<int>(seed) * 25;  // up to 195
    Graph tree = testutil::random_tree(n, seed);
    const int exact = oracle::bfs_diameter_exact(tree);
    const int est = estimate_diameter(tree, 2, seed);
    CHECK(est == exact);  // double sweep is exact on trees
  }
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = testutil::random_graph(40, 0.08, false, seed);
    const int exact = oracle::bfs_diameter_exact(g);
    const int est = estimate_diameter(g, 4, seed);
    CHECK(est <= exact);
    CHECK(est >= 1);
  }
}

TEST_CASE("diameter estimate is deterministic for a fixed seed") {
  Graph g = testutil::random_graph(60, 0.05, false, 9);
  CHECK(estimate_diameter(g, 5, 123) == estimate_diameter(g, 5, 123));
}

TEST_CASE("proximity triple dump") {
  auto dir = testutil::fresh_temp_dir("dump");
  ProximityMatrix p = transition_matrix(testutil::path_graph(3));
  auto path = dir / "p.tsv";
  p.dump_triples(path.string());
  const std::string text = testutil::read_file(path);
  CHECK(text == "0\t1\t1\n1\t0\t0.5\n1\t2\t0.5\n2\t1\t1\n");
}
