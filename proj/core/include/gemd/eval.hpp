#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gemd/graph.hpp"
#include "gemd/matrix.hpp"
#include "gemd/walk_config.hpp"

namespace gemd {

// Multi-label node targets. Label ids are contiguous in [0, label_count);
// nodes with an empty set are unlabeled and excluded from experiments.
struct LabelSet {
  std::vector<std::vector<int>> labels;  // per node, sorted ascending
  int label_count = 0;
  std::vector<std::string> label_names;

  std::vector<int> labeled_nodes() const;
};

// Label file: `node<TAB>label1,label2,...`, `#` comments skipped. Node ids
// are resolved against the given id list (or the graph's); unknown ids raise
// ParseError.
LabelSet load_labels(const std::string& path, std::span<const std::string> node_ids);
LabelSet load_labels(const std::string& path, const Graph& g);
LabelSet labels_from_blocks(std::span<const int> block_of, int block_count);

// One-vs-rest L2-regularized logistic regression, trained per label by
// damped Newton iterations to gradient norm < 1e-6. The objective is the
// average log loss plus (reg/2)||w||^2 with an unregularized intercept.
struct OvrLogReg {
  Eigen::MatrixXd weights;       // label_count x d
  Eigen::VectorXd intercepts;    // label_count
  std::vector<bool> has_positive;  // labels seen at least once in training
  int skipped_labels = 0;          // labels with no positive training example
};

// One binary problem; y entries are +1/-1.
struct BinaryLogReg {
  Eigen::VectorXd w;
  double b = 0.0;
};
BinaryLogReg train_logreg_binary(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double reg);
double logreg_predict_prob(const BinaryLogReg& model, const Eigen::VectorXd& x);

OvrLogReg train_ovr_logreg(const Eigen::MatrixXd& x,
                           const std::vector<std::vector<int>>& targets, int label_count,
                           double reg);

// For node i, the k_per_node[i] labels with the highest predicted
// probability; ties at the cut take the lower label id. Labels that had no
// positive training example are never predicted.
std::vector<std::vector<int>> predict_multilabel(const OvrLogReg& model,
                                                 const Eigen::MatrixXd& x,
                                                 std::span<const int> k_per_node);

struct F1Scores {
  double macro = 0.0;
  double micro = 0.0;
};

// Per-label precision/recall F1. Macro averages over all label ids (labels
// with no true and no predicted instance contribute 0); micro pools counts.
F1Scores f1_scores(const std::vector<std::vector<int>>& truth,
                   const std::vector<std::vector<int>>& predicted, int label_count);

struct ExperimentConfig {
  double ratio = 0.5;   // labeled fraction used for training
  int repeats = 20;
  std::uint64_t seed = 42;
  double reg = 0.01;    // lambda of the average-loss objective; ~ LibLinear C=1 at n~100
};

// Node features handed to the classifier, one row per node.
using EmbedFn = std::function<Eigen::MatrixXd(const Graph&)>;

struct ExperimentReport {
  double macro_mean = 0.0, macro_sd = 0.0;
  double micro_mean = 0.0, micro_sd = 0.0;
  int repeats = 0;
  int skipped_label_events = 0;  // label-without-training-example warnings, summed over splits
  std::vector<double> macro_runs, micro_runs;
};

// Embeds once, then scores `repeats` seeded train/test splits of the labeled
// nodes. Reproducible for a fixed seed.
ExperimentReport run_experiment(const Graph& g, const LabelSet& labels, const EmbedFn& embed,
                                const ExperimentConfig& exp);
// Same protocol on precomputed per-node features.
ExperimentReport run_experiment(const Eigen::MatrixXd& features, const LabelSet& labels,
                                const ExperimentConfig& exp);

enum class SweepAxis { walk_length, gamma, memory };
SweepAxis parse_sweep_axis(const std::string& name);

enum class EmbedMode { closed, scalable };

struct SweepRow {
  std::string value;  // grid point, e.g. "7", "-0.5", or "p=0.1,q=2"
  ExperimentReport report;
};

// Reruns the experiment at every grid point with everything else fixed.
// walk_length and gamma sweep their scalar; memory sweeps the full p x q
// grid of the given values.
std::vector<SweepRow> ablation_sweep(SweepAxis axis, std::span<const double> grid,
                                     const Graph& g, const LabelSet& labels,
                                     const WalkConfig& base, EmbedMode mode,
                                     const ExperimentConfig& exp);

// TSV: value, macro mean/sd, micro mean/sd.
void write_sweep_tsv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace gemd
