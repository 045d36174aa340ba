#include "doctest.h"

#include <cmath>
#include <numeric>

#include "gemd/eval.hpp"
#include "gemd/rng.hpp"
#include "gemd/synth.hpp"
#include "gemd/ultimatewalk.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gemd;

TEST_CASE("label file loading") {
  auto dir = testutil::fresh_temp_dir("labels");
  auto gpath = testutil::write_file(dir, "g.tsv", "a b\nb c\nc d\n");
  Graph g = load_edge_list(gpath.string(), false);
  SUBCASE("labels map to contiguous ids") {
    auto lpath = testutil::write_file(dir, "l.tsv", "# comment\na\tred,blue\nb\tblue\nd\tgreen\n");
    LabelSet set = load_labels(lpath.string(), g);
    CHECK(set.label_count == 3);
    CHECK(set.label_names == std::vector<std::string>{"red", "blue", "green"});
    CHECK(set.labels[g.index_of("a")] == std::vector<int>{0, 1});
    CHECK(set.labels[g.index_of("b")] == std::vector<int>{1});
    CHECK(set.labels[g.index_of("c")].empty());
    CHECK(set.labeled_nodes() == std::vector<int>{0, 1, 3});
  }
  SUBCASE("unknown node ids are parse errors with the line") {
    auto lpath = testutil::write_file(dir, "l.tsv", "a\tred\nzz\tblue\n");
    CHECK_THROWS_WITH_AS(load_labels(lpath.string(), g), doctest::Contains("line 2"), ParseError);
  }
}

TEST_CASE("binary logistic regression separates a separable toy set") {
  Eigen::MatrixXd x(6, 1);
  x << -3, -2, -1.5, 1.5, 2, 3;
  Eigen::VectorXd y(6);
  y << -1, -1, -1, 1, 1, 1;
  BinaryLogReg model = train_logreg_binary(x, y, 1.0);
  for (int i = 0; i < 6; ++i) {
    const double p = logreg_predict_prob(model, x.row(i).transpose());
    CHECK((p > 0.5) == (y(i) > 0));
  }
}

TEST_CASE("an all-negative label trains an intercept-driven never-likely model") {
  CounterRng rng(5);
  Eigen::MatrixXd x(12, 3);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = rng.next_gaussian();
  Eigen::VectorXd y = Eigen::VectorXd::Constant(12, -1.0);
  BinaryLogReg model = train_logreg_binary(x, y, 1.0);
  for (int i = 0; i < 12; ++i)
    CHECK(logreg_predict_prob(model, x.row(i).transpose()) < 0.5);
}

TEST_CASE("newton solution matches a gradient-descent reference on the same objective") {
  CounterRng rng(9);
  Eigen::MatrixXd x(20, 4);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = rng.next_gaussian();
    y(i) = rng.next_double() < 0.5 ? -1.0 : 1.0;
  }
  const double reg = 0.7;
  BinaryLogReg model = train_logreg_binary(x, y, reg);
  double newton_obj = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double z = y(i) * (x.row(i).dot(model.w) + model.b);
    newton_obj += z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
  }
  newton_obj = newton_obj / 20 + 0.5 * reg * model.w.squaredNorm();
  const double reference = oracle::logreg_gd_reference(x, y, reg);
  CHECK(newton_obj == doctest::Approx(reference).epsilon(1e-6));
}

TEST_CASE("duplicating every training node leaves the decision functions unchanged") {
  CounterRng rng(15);
  Eigen::MatrixXd x(10, 3);
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = rng.next_gaussian();
    y(i) = i % 2 == 0 ? 1.0 : -1.0;
  }
  Eigen::MatrixXd x2(20, 3);
  Eigen::VectorXd y2(20);
  x2 << x, x;
  y2 << y, y;
  BinaryLogReg a = train_logreg_binary(x, y, 1.0);
  BinaryLogReg b = train_logreg_binary(x2, y2, 1.0);
  CHECK((a.w - b.w).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(a.b - b.b) < 1e-6);
}

TEST_CASE("ovr trainer flags labels with no positive example") {
  Eigen::MatrixXd x(4, 2);
  x << 1, 0, 0, 1, 1, 1, 0, 0;
  std::vector<std::vector<int>> targets = {{0}, {1}, {0, 1}, {0}};
  OvrLogReg model = train_ovr_logreg(x, targets, 3, 1.0);  // label 2 absent
  CHECK(model.skipped_labels == 1);
  CHECK_FALSE(model.has_positive[2]);
  std::vector<int> ks = {3, 3, 3, 3};
  auto pred = predict_multilabel(model, x, ks);
  for (const auto& set : pred) {
    CHECK(set.size() == 3);  // k clamps to label_count; untrained label ranks last
    CHECK(std::find(set.begin(), set.end(), 2) != set.end());
  }
  std::vector<int> k1 = {1, 1, 1, 1};
  for (const auto& set : predict_multilabel(model, x, k1))
    CHECK(std::find(set.begin(), set.end(), 2) == set.end());
}

TEST_CASE("multilabel prediction rules") {
  OvrLogReg model;
  model.weights = Eigen::MatrixXd::Zero(3, 2);
  model.weights << 1, 0, 0, 1, 0.5, 0.5;
  model.intercepts = Eigen::VectorXd::Zero(3);
  model.has_positive = {true, true, true};
  Eigen::MatrixXd x(1, 2);

  SUBCASE("k equal to the label count predicts everything") {
    x << 0.3, -0.9;
    std::vector<int> ks = {3};
    CHECK(predict_multilabel(model, x, ks)[0] == std::vector<int>{0, 1, 2});
  }
  SUBCASE("unique maximum wins at k = 1") {
    x << 2.0, -1.0;
    std::vector<int> ks = {1};
    CHECK(predict_multilabel(model, x, ks)[0] == std::vector<int>{0});
  }
  SUBCASE("ties at the cut go to the lower label id") {
    x << 1.0, 1.0;  // scores: 1, 1, 1 -> all tied
    std::vector<int> ks = {2};
    CHECK(predict_multilabel(model, x, ks)[0] == std::vector<int>{0, 1});
  }
}

TEST_CASE("f1 score examples") {
  SUBCASE("perfect prediction") {
    std::vector<std::vector<int>> t = {{0}, {1}, {0, 1}};
    F1Scores s = f1_scores(t, t, 2);
    CHECK(s.macro == doctest::Approx(1.0));
    CHECK(s.micro == doctest::Approx(1.0));
  }
  SUBCASE("half the positives, no false positives") {
    std::vector<std::vector<int>> truth = {{0}, {0}, {0}, {0}};
    std::vector<std::vector<int>> pred = {{0}, {0}, {}, {}};
    F1Scores s = f1_scores(truth, pred, 1);
    CHECK(s.micro == doctest::Approx(2.0 / 3));
  }
  SUBCASE("random instance matches the scratch oracle") {
    CounterRng rng(25);
    std::vector<std::vector<int>> truth(50), pred(50);
    for (int i = 0; i < 50; ++i) {
      for (int l = 0; l < 5; ++l) {
        if (rng.next_double() < 0.3) truth[i].push_back(l);
        if (rng.next_double() < 0.3) pred[i].push_back(l);
      }
      if (truth[i].empty()) truth[i].push_back(static_cast<int>(rng.next_below(5)));
    }
    F1Scores s = f1_scores(truth, pred, 5);
    auto [macro, micro] = oracle::f1_scratch(truth, pred, 5);
    CHECK(s.macro == doctest::Approx(macro).epsilon(1e-12));
    CHECK(s.micro == doctest::Approx(micro).epsilon(1e-12));
  }
  SUBCASE("vacuous labels contribute zero to the macro mean") {
    std::vector<std::vector<int>> truth = {{0}};
    std::vector<std::vector<int>> pred = {{0}};
    F1Scores s = f1_scores(truth, pred, 4);  // labels 1..3 vacuous
    CHECK(s.macro == doctest::Approx(0.25));
    CHECK(s.micro == doctest::Approx(1.0));
  }
}

TEST_CASE("f1 is invariant under node order and label relabeling") {
  CounterRng rng(35);
  std::vector<std::vector<int>> truth(30), pred(30);
  for (int i = 0; i < 30; ++i) {
    for (int l = 0; l < 4; ++l) {
      if (rng.next_double() < 0.4) truth[i].push_back(l);
      if (rng.next_double() < 0.4) pred[i].push_back(l);
    }
    if (truth[i].empty()) truth[i].push_back(0);
  }
  F1Scores base = f1_scores(truth, pred, 4);

  // node permutation
  std::vector<int> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 29; i > 0; --i) std::swap(perm[i], perm[rng.next_below(i + 1)]);
  std::vector<std::vector<int>> t2(30), p2(30);
  for (int i = 0; i < 30; ++i) {
    t2[i] = truth[perm[i]];
    p2[i] = pred[perm[i]];
  }
  F1Scores shuffled = f1_scores(t2, p2, 4);
  CHECK(shuffled.macro == doctest::Approx(base.macro).epsilon(1e-12));
  CHECK(shuffled.micro == doctest::Approx(base.micro).epsilon(1e-12));

  // label relabeling: 0<->3, 1<->2
  auto relabel = [](std::vector<std::vector<int>> sets) {
    const int map[4] = {3, 2, 1, 0};
    for (auto& s : sets) {
      for (auto& l : s) l = map[l];
      std::sort(s.begin(), s.end());
    }
    return sets;
  };
  F1Scores relabeled = f1_scores(relabel(truth), relabel(pred), 4);
  CHECK(relabeled.macro == doctest::Approx(base.macro).epsilon(1e-12));
  CHECK(relabeled.micro == doctest::Approx(base.micro).epsilon(1e-12));
}

namespace {

LabeledGraph small_sbm(int nodes, int blocks, double win, double cross, std::uint64_t seed) {
  SbmSpec spec;
  spec.nodes = nodes;
  spec.blocks = blocks;
  spec.within_prob = win;
  spec.between_prob = cross;
  return sbm_graph(spec, seed);
}

}  // namespace

TEST_CASE("one-hot label features are a near-perfect upper anchor") {
  LabeledGraph lg = small_sbm(60, 3, 0.2, 0.05, 41);
  LabelSet labels = labels_from_blocks(lg.block_of, 3);
  EmbedFn one_hot = [&labels](const Graph& g) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.node_count(), labels.label_count);
    for (int i = 0; i < g.node_count(); ++i)
      for (int l : labels.labels[i]) f(i, l) = 1.0;
    return f;
  };
  ExperimentConfig exp;
  exp.repeats = 10;
  ExperimentReport report = run_experiment(lg.graph, labels, one_hot, exp);
  CHECK(report.micro_mean >= 0.95);
}

TEST_CASE("all-zero features fall to the label-prior baseline") {
  LabeledGraph lg = small_sbm(60, 3, 0.2, 0.05, 43);
  LabelSet labels = labels_from_blocks(lg.block_of, 3);
  EmbedFn zeros = [](const Graph& g) {
    return Eigen::MatrixXd::Zero(g.node_count(), 4).eval();
  };
  ExperimentConfig exp;
  exp.repeats = 10;
  ExperimentReport report = run_experiment(lg.graph, labels, zeros, exp);
  // Prior-only prediction: every node gets the most frequent label; with
  // 3 equal blocks that is micro ~ 1/3 and macro ~ 1/3 of a single-label F1.
  CHECK(report.macro_mean <= 0.40);
  CHECK(report.micro_mean <= 0.45);
}

TEST_CASE("experiment reports are reproducible for a fixed seed") {
  LabeledGraph lg = small_sbm(50, 2, 0.25, 0.03, 47);
  LabelSet labels = labels_from_blocks(lg.block_of, 2);
  EmbedFn noisy = [](const Graph& g) {
    CounterRng rng(7);
    Eigen::MatrixXd f(g.node_count(), 3);
    for (int i = 0; i < g.node_count(); ++i)
      for (int j = 0; j < 3; ++j) f(i, j) = rng.next_gaussian();
    return f;
  };
  ExperimentConfig exp;
  exp.repeats = 6;
  ExperimentReport a = run_experiment(lg.graph, labels, noisy, exp);
  ExperimentReport b = run_experiment(lg.graph, labels, noisy, exp);
  CHECK(a.macro_runs == b.macro_runs);
  CHECK(a.micro_runs == b.micro_runs);
}

TEST_CASE("embedding a clusterable sbm classifies well") {
  LabeledGraph lg = small_sbm(200, 2, 0.1, 0.01, 53);
  // The instance itself is near-trivially clusterable: a spectral cut agrees
  // with the planted blocks almost everywhere.
  const std::vector<int> cut = oracle::spectral_two_block(lg.graph);
  int agree = 0;
  for (int i = 0; i < 200; ++i) agree += cut[i] == lg.block_of[i];
  const double agreement = std::max(agree, 200 - agree) / 200.0;
  CHECK(agreement >= 0.95);

  LabelSet labels = labels_from_blocks(lg.block_of, 2);
  WalkConfig cfg;
  cfg.dim = 8;
  EmbedFn embed = [&cfg](const Graph& g) {
    return ultimatewalk_closed(g, cfg).concatenated();
  };
  ExperimentConfig exp;
  exp.ratio = 0.5;
  exp.repeats = 20;
  ExperimentReport report = run_experiment(lg.graph, labels, embed, exp);
  CHECK(report.micro_mean >= 0.9);
}

TEST_CASE("run_experiment validates inputs") {
  LabeledGraph lg = small_sbm(20, 2, 0.4, 0.1, 3);
  LabelSet labels = labels_from_blocks(lg.block_of, 2);
  EmbedFn flat = [](const Graph& g) {
    return Eigen::MatrixXd::Zero(g.node_count(), 2).eval();
  };
  ExperimentConfig exp;
  exp.ratio = 1.5;
  CHECK_THROWS_AS(run_experiment(lg.graph, labels, flat, exp), std::invalid_argument);
  exp.ratio = 0.5;
  LabelSet single;
  single.label_count = 1;
  single.labels.assign(20, {0});
  single.label_names = {"only"};
  CHECK_THROWS_WITH_AS(run_experiment(lg.graph, single, flat, exp),
                       doctest::Contains("2 distinct"), std::invalid_argument);
  EmbedFn poisoned = [](const Graph& g) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.node_count(), 2);
    f(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return f;
  };
  CHECK_THROWS_WITH_AS(run_experiment(lg.graph, labels, poisoned, exp),
                       doctest::Contains("finite"), std::invalid_argument);
}

TEST_CASE("splits that strand a label are counted as warnings") {
  LabeledGraph lg = small_sbm(40, 2, 0.4, 0.1, 71);
  LabelSet labels = labels_from_blocks(lg.block_of, 2);
  labels.label_count = 3;
  labels.label_names.push_back("rare");
  labels.labels[0] = {0, 2};  // a single node carries the third label
  EmbedFn one_hot = [&labels](const Graph& g) {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(g.node_count(), 3);
    for (int i = 0; i < g.node_count(); ++i)
      for (int l : labels.labels[i]) f(i, l) = 1.0;
    return f;
  };
  ExperimentConfig exp;
  exp.ratio = 0.5;
  exp.repeats = 12;
  ExperimentReport report = run_experiment(lg.graph, labels, one_hot, exp);
  // Roughly half the splits put the lone carrier in the test set.
  CHECK(report.skipped_label_events > 0);
  CHECK(report.skipped_label_events < 12);
}

TEST_CASE("sweep emits one row per grid point and a p-q grid for memory") {
  LabeledGraph lg = small_sbm(30, 2, 0.4, 0.05, 61);
  LabelSet labels = labels_from_blocks(lg.block_of, 2);
  WalkConfig base;
  base.dim = 4;
  base.trials = 10;
  ExperimentConfig exp;
  exp.repeats = 2;

  std::vector<double> lens = {1, 3};
  auto rows = ablation_sweep(SweepAxis::walk_length, lens, lg.graph, labels, base,
                             EmbedMode::closed, exp);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == "1");
  CHECK(rows[1].value == "3");

  std::vector<double> mem = {0.5, 2};
  auto mem_rows = ablation_sweep(SweepAxis::memory, mem, lg.graph, labels, base,
                                 EmbedMode::scalable, exp);
  REQUIRE(mem_rows.size() == 4);
  CHECK(mem_rows[0].value == "p=0.5,q=0.5");
  CHECK(mem_rows[3].value == "p=2,q=2");

  auto dir = testutil::fresh_temp_dir("sweep");
  const std::string path = (dir / "s.tsv").string();
  write_sweep_tsv(mem_rows, path);
  const std::string text = testutil::read_file(path);
  CHECK(text.rfind("value\tmacro_mean", 0) == 0);
}

TEST_CASE("sweep axis parser") {
  CHECK(parse_sweep_axis("gamma") == SweepAxis::gamma);
  CHECK(parse_sweep_axis("walk-length") == SweepAxis::walk_length);
  CHECK(parse_sweep_axis("memory") == SweepAxis::memory);
  CHECK_THROWS_AS(parse_sweep_axis("nope"), std::invalid_argument);
}
