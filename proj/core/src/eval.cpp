#include "gemd/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gemd/rng.hpp"
#include "gemd/ultimatewalk.hpp"

namespace gemd {

std::vector<int> LabelSet::labeled_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!labels[i].empty()) out.push_back(static_cast<int>(i));
  return out;
}

LabelSet load_labels(const std::string& path, std::span<const std::string> node_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  std::unordered_map<std::string, int> index;
  index.reserve(node_ids.size());
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    index.emplace(node_ids[i], static_cast<int>(i));
  LabelSet set;
  set.labels.resize(node_ids.size());
  std::unordered_map<std::string, int> label_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::stringstream ss(line);
    std::string node, rest;
    if (!std::getline(ss, node, '\t') || !std::getline(ss, rest))
      throw ParseError("expected `node<TAB>label1,label2,...`", line_no);
    while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ')) rest.pop_back();
    const auto it = index.find(node);
    if (it == index.end()) throw ParseError("unknown node id '" + node + "'", line_no);
    const int v = it->second;
    std::stringstream ls(rest);
    std::string name;
    while (std::getline(ls, name, ',')) {
      if (name.empty()) throw ParseError("empty label name", line_no);
      auto [it, inserted] = label_ids.try_emplace(name, set.label_count);
      if (inserted) {
        ++set.label_count;
        set.label_names.push_back(name);
      }
      set.labels[v].push_back(it->second);
    }
    if (set.labels[v].empty()) throw ParseError("node '" + node + "' carries no labels", line_no);
    std::sort(set.labels[v].begin(), set.labels[v].end());
    set.labels[v].erase(std::unique(set.labels[v].begin(), set.labels[v].end()),
                        set.labels[v].end());
  }
  return set;
}

LabelSet load_labels(const std::string& path, const Graph& g) {
  return load_labels(path, g.node_ids());
}

LabelSet labels_from_blocks(std::span<const int> block_of, int block_count) {
  LabelSet set;
  set.label_count = block_count;
  set.labels.resize(block_of.size());
  for (std::size_t i = 0; i < block_of.size(); ++i) set.labels[i] = {block_of[i]};
  for (int b = 0; b < block_count; ++b) set.label_names.push_back(std::to_string(b));
  return set;
}

namespace {

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

// log(1 + exp(-z)) without overflow on either tail.
inline double log1p_exp_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double logreg_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w, double b, double reg) {
  const Eigen::VectorXd z = y.cwiseProduct(((x * w).array() + b).matrix());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) loss += log1p_exp_neg(z(i));
  loss /= static_cast<double>(z.size());
  return loss + 0.5 * reg * w.squaredNorm();
}

}  // namespace

BinaryLogReg train_logreg_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 double reg) {
  const Eigen::Index n = x.rows(), d = x.cols();
  if (n < 1 || d < 1) throw std::invalid_argument("logreg: empty problem");
  if (!x.allFinite()) throw std::invalid_argument("logreg: features must be finite");
  if (!(reg >= 0.0)) throw std::invalid_argument("logreg: negative regularization");

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  double obj = logreg_objective(x, y, w, b, reg);

  constexpr double kGradTol = 1e-6;
  constexpr int kMaxIters = 200;
  for (int it = 0; it < kMaxIters; ++it) {
    const Eigen::VectorXd margins = (x * w).array() + b;
    // sigma(-z) weights for the gradient, sigma(z)(1-sigma(z)) for the Hessian
    Eigen::VectorXd gv(n), hv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z = y(i) * margins(i);
      const double s = sigmoid(-z);
      gv(i) = -y(i) * s;
      hv(i) = s * (1.0 - s);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    Eigen::VectorXd grad_w = (x.transpose() * gv) * inv_n + reg * w;
    const double grad_b = gv.sum() * inv_n;
    const double gnorm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
    if (gnorm < kGradTol) break;

    Eigen::MatrixXd h(d + 1, d + 1);
    const Eigen::MatrixXd xw = x.array().colwise() * hv.array();
    h.topLeftCorner(d, d) = (x.transpose() * xw) * inv_n;
    h.topLeftCorner(d, d).diagonal().array() += reg;
    h.block(0, d, d, 1) = (xw.colwise().sum() * inv_n).transpose();
    h.block(d, 0, 1, d) = xw.colwise().sum() * inv_n;
    h(d, d) = hv.sum() * inv_n;
    h.diagonal().array() += 1e-10;

    Eigen::VectorXd g_full(d + 1);
    g_full.head(d) = grad_w;
    g_full(d) = grad_b;
    const Eigen::VectorXd dir = -h.ldlt().solve(g_full);

    // Backtracking line search with the Armijo condition.
    const double slope = g_full.dot(dir);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd w_new = w + t * dir.head(d);
      const double b_new = b + t * dir(d);
      const double obj_new = logreg_objective(x, y, w_new, b_new, reg);
      if (std::isfinite(obj_new) && obj_new <= obj + 1e-4 * t * slope) {
        w = w_new;
        b = b_new;
        obj = obj_new;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return {std::move(w), b};
}

double logreg_predict_prob(const BinaryLogReg& model, const Eigen::VectorXd& x) {
  return sigmoid(model.w.dot(x) + model.b);
}

OvrLogReg train_ovr_logreg(const Eigen::MatrixXd& x, const std::vector<std::vector<int>>& targets,
                           int label_count, double reg) {
  const Eigen::Index n = x.rows();
  if (static_cast<Eigen::Index>(targets.size()) != n)
    throw std::invalid_argument("train_ovr_logreg: target count does not match rows");
  if (!x.allFinite()) throw std::invalid_argument("train_ovr_logreg: features must be finite");

  if (!(reg >= 0.0)) throw std::invalid_argument("train_ovr_logreg: negative regularization");

  OvrLogReg model;
  model.weights = Eigen::MatrixXd::Zero(label_count, x.cols());
  model.intercepts = Eigen::VectorXd::Zero(label_count);
  model.has_positive.assign(label_count, false);

  std::vector<Eigen::VectorXd> ys(label_count, Eigen::VectorXd::Constant(n, -1.0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (int l : targets[i]) {
      ys[l](i) = 1.0;
      model.has_positive[l] = true;
    }

#pragma omp parallel for schedule(dynamic)
  for (int l = 0; l < label_count; ++l) {
    const BinaryLogReg m = train_logreg_binary(x, ys[l], reg);
    model.weights.row(l) = m.w.transpose();
    model.intercepts(l) = m.b;
  }
  for (int l = 0; l < label_count; ++l)
    if (!model.has_positive[l]) ++model.skipped_labels;
  return model;
}

std::vector<std::vector<int>> predict_multilabel(const OvrLogReg& model,
                                                 const Eigen::MatrixXd& x,
                                                 std::span<const int> k_per_node) {
  const Eigen::Index n = x.rows();
  if (static_cast<std::size_t>(n) != k_per_node.size())
    throw std::invalid_argument("predict_multilabel: k_per_node size mismatch");
  const int label_count = static_cast<int>(model.weights.rows());
  const Eigen::MatrixXd scores =
      (x * model.weights.transpose()).rowwise() + model.intercepts.transpose();

  std::vector<std::vector<int>> out(n);
  std::vector<int> order(label_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = std::min(k_per_node[i], label_count);
    if (k < 1) throw std::invalid_argument("predict_multilabel: k_per_node must be >= 1");
    std::iota(order.begin(), order.end(), 0);
    // Untrained labels rank below everything; ties take the lower id.
    auto rank = [&](int a, int b) {
      const bool ta = model.has_positive[a], tb = model.has_positive[b];
      if (ta != tb) return ta;
      const double sa = scores(i, a), sb = scores(i, b);
      if (sa != sb) return sa > sb;
      return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), rank);
    std::vector<int> chosen(order.begin(), order.begin() + k);
    std::sort(chosen.begin(), chosen.end());
    out[i] = std::move(chosen);
  }
  return out;
}

F1Scores f1_scores(const std::vector<std::vector<int>>& truth,
                   const std::vector<std::vector<int>>& predicted, int label_count) {
  if (truth.size() != predicted.size())
    throw std::invalid_argument("f1_scores: node sets differ");
  std::vector<std::int64_t> tp(label_count, 0), fp(label_count, 0), fn(label_count, 0);
  std::vector<int> inter;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    inter.clear();
    std::set_intersection(truth[i].begin(), truth[i].end(), predicted[i].begin(),
                          predicted[i].end(), std::back_inserter(inter));
    for (int l : inter) ++tp[l];
    for (int l : truth[i])
      if (!std::binary_search(predicted[i].begin(), predicted[i].end(), l)) ++fn[l];
    for (int l : predicted[i])
      if (!std::binary_search(truth[i].begin(), truth[i].end(), l)) ++fp[l];
  }
  double macro = 0.0;
  std::int64_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (int l = 0; l < label_count; ++l) {
    const double denom = static_cast<double>(2 * tp[l] + fp[l] + fn[l]);
    macro += denom > 0.0 ? 2.0 * static_cast<double>(tp[l]) / denom : 0.0;
    tp_all += tp[l];
    fp_all += fp[l];
    fn_all += fn[l];
  }
  macro /= std::max(1, label_count);
  const double micro_denom = static_cast<double>(2 * tp_all + fp_all + fn_all);
  const double micro = micro_denom > 0.0 ? 2.0 * static_cast<double>(tp_all) / micro_denom : 0.0;
  return {macro, micro};
}

namespace {

void mean_sd(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  sd = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

ExperimentReport run_experiment(const Graph& g, const LabelSet& labels, const EmbedFn& embed,
                                const ExperimentConfig& exp) {
  const Eigen::MatrixXd features = embed(g);
  if (features.rows() != g.node_count())
    throw std::invalid_argument("run_experiment: embedding row count mismatch");
  return run_experiment(features, labels, exp);
}

ExperimentReport run_experiment(const Eigen::MatrixXd& features, const LabelSet& labels,
                                const ExperimentConfig& exp) {
  if (!(exp.ratio > 0.0 && exp.ratio < 1.0))
    throw std::invalid_argument("run_experiment: ratio must lie in (0, 1)");
  if (exp.repeats < 1) throw std::invalid_argument("run_experiment: repeats must be >= 1");
  if (features.rows() != static_cast<Eigen::Index>(labels.labels.size()))
    throw std::invalid_argument("run_experiment: feature rows do not match label rows");
  // Validate up front: the repeat loop below runs under OpenMP, where a
  // thrown exception would terminate instead of propagate.
  if (!features.allFinite())
    throw std::invalid_argument("run_experiment: features must be finite");
  if (!(exp.reg >= 0.0)) throw std::invalid_argument("run_experiment: negative regularization");
  const std::vector<int> labeled = labels.labeled_nodes();
  if (labeled.size() < 2)
    throw std::invalid_argument("run_experiment: need at least 2 labeled nodes");
  {
    std::vector<bool> seen(labels.label_count, false);
    int distinct = 0;
    for (int v : labeled)
      for (int l : labels.labels[v])
        if (!seen[l]) {
          seen[l] = true;
          ++distinct;
        }
    if (distinct < 2)
      throw std::invalid_argument("run_experiment: need at least 2 distinct labels");
  }

  ExperimentReport report;
  report.repeats = exp.repeats;
  report.macro_runs.resize(exp.repeats);
  report.micro_runs.resize(exp.repeats);
  std::vector<int> skipped(exp.repeats, 0);

  const int n_labeled = static_cast<int>(labeled.size());
  int n_train = static_cast<int>(std::lround(exp.ratio * n_labeled));
  n_train = std::clamp(n_train, 1, n_labeled - 1);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < exp.repeats; ++r) {
    std::vector<int> order = labeled;
    CounterRng rng(exp.seed, 0xe5a1, static_cast<std::uint64_t>(r));
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      const std::size_t j = rng.next_below(i + 1);
      std::swap(order[i], order[j]);
    }

    Eigen::MatrixXd x_train(n_train, features.cols());
    std::vector<std::vector<int>> y_train(n_train);
    for (int i = 0; i < n_train; ++i) {
      x_train.row(i) = features.row(order[i]);
      y_train[i] = labels.labels[order[i]];
    }
    const int n_test = n_labeled - n_train;
    Eigen::MatrixXd x_test(n_test, features.cols());
    std::vector<std::vector<int>> y_test(n_test);
    std::vector<int> k_per_node(n_test);
    for (int i = 0; i < n_test; ++i) {
      x_test.row(i) = features.row(order[n_train + i]);
      y_test[i] = labels.labels[order[n_train + i]];
      k_per_node[i] = static_cast<int>(y_test[i].size());
    }

    const OvrLogReg model = train_ovr_logreg(x_train, y_train, labels.label_count, exp.reg);
    skipped[r] = model.skipped_labels;
    const auto predicted = predict_multilabel(model, x_test, k_per_node);
    const F1Scores f1 = f1_scores(y_test, predicted, labels.label_count);
    report.macro_runs[r] = f1.macro;
    report.micro_runs[r] = f1.micro;
  }

  for (int s : skipped) report.skipped_label_events += s;
  mean_sd(report.macro_runs, report.macro_mean, report.macro_sd);
  mean_sd(report.micro_runs, report.micro_mean, report.micro_sd);
  return report;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "walk_length" || name == "walk-length") return SweepAxis::walk_length;
  if (name == "gamma") return SweepAxis::gamma;
  if (name == "memory") return SweepAxis::memory;
  throw std::invalid_argument("unknown sweep axis '" + name +
                              "' (expected walk_length, gamma, or memory)");
}

namespace {

std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

EmbedFn make_embed_fn(const WalkConfig& cfg, EmbedMode mode, double gamma) {
  return [cfg, mode, gamma](const Graph& g) {
    const EmbeddingPair pair = mode == EmbedMode::closed
                                   ? ultimatewalk_closed(g, cfg, gamma)
                                   : ultimatewalk_scalable(g, cfg, gamma);
    return pair.concatenated();
  };
}

}  // namespace

std::vector<SweepRow> ablation_sweep(SweepAxis axis, std::span<const double> grid,
                                     const Graph& g, const LabelSet& labels,
                                     const WalkConfig& base, EmbedMode mode,
                                     const ExperimentConfig& exp) {
  if (grid.empty()) throw std::invalid_argument("ablation_sweep: empty grid");
  std::vector<SweepRow> rows;
  switch (axis) {
    case SweepAxis::walk_length:
      for (double v : grid) {
        WalkConfig cfg = base;
        cfg.walk_length = static_cast<int>(std::lround(v));
        rows.push_back({format_value(v), run_experiment(g, labels, make_embed_fn(cfg, mode, 0.0), exp)});
      }
      break;
    case SweepAxis::gamma:
      for (double v : grid)
        rows.push_back({format_value(v), run_experiment(g, labels, make_embed_fn(base, mode, v), exp)});
      break;
    case SweepAxis::memory:
      for (double p : grid) {
        for (double q : grid) {
          WalkConfig cfg = base;
          cfg.p = p;
          cfg.q = q;
          rows.push_back({"p=" + format_value(p) + ",q=" + format_value(q),
                          run_experiment(g, labels, make_embed_fn(cfg, mode, 0.0), exp)});
        }
      }
      break;
  }
  return rows;
}

void write_sweep_tsv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "value\tmacro_mean\tmacro_sd\tmicro_mean\tmicro_sd\n";
  for (const auto& row : rows) {
    out << row.value << '\t' << format_value(row.report.macro_mean) << '\t'
        << format_value(row.report.macro_sd) << '\t' << format_value(row.report.micro_mean)
        << '\t' << format_value(row.report.micro_sd) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gemd
