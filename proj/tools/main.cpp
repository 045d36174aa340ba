// gemd: graph embedding via warped proximity factorization, plus the
// node-classification evaluation harness. Subcommands: embed, eval, sweep,
// bench. All randomness is seeded; default runs are reproducible.

#include <omp.h>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gemd/eval.hpp"
#include "gemd/graph.hpp"
#include "gemd/synth.hpp"
#include "gemd/ultimatewalk.hpp"
#include "gemd/warping.hpp"
#include "digest.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("empty list: '" + csv + "'");
  return out;
}

struct EmbedOptions {
  std::string input;
  std::string output;
  int dim = 64;
  std::string walk_length = "7";  // integer or "auto"
  int trials = 50;
  int splits = 1;
  double p = 1.0;
  double q = 1.0;
  std::string gamma = "0";  // float or "auto"
  double clip_c = 100.0;
  std::uint64_t seed = 42;
  std::string mode = "scalable";
  bool directed = false;
  std::string dump_proximity;
  std::string manifest_path;
  std::string from_manifest;
};

gemd::WalkConfig walk_config_of(const EmbedOptions& o, int resolved_length) {
  gemd::WalkConfig cfg;
  cfg.walk_length = resolved_length;
  cfg.trials = o.trials;
  cfg.splits = o.splits;
  cfg.p = o.p;
  cfg.q = o.q;
  cfg.clip_c = o.clip_c;
  cfg.seed = o.seed;
  cfg.dim = o.dim;
  return cfg;
}

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

int cmd_embed(EmbedOptions o) {
  std::string expect_digest;
  if (!o.from_manifest.empty()) {
    std::ifstream in(o.from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest: " + o.from_manifest);
    json m = json::parse(in);
    const json& c = m.at("config");
    o.input = m.at("input").at("path").get<std::string>();
    if (o.output.empty()) o.output = m.at("output").at("path").get<std::string>();
    expect_digest = m.at("output").at("digest").get<std::string>();
    o.dim = c.at("dim").get<int>();
    o.walk_length = std::to_string(c.at("walk_length").get<int>());
    o.trials = c.at("trials").get<int>();
    o.splits = c.at("splits").get<int>();
    o.p = c.at("p").get<double>();
    o.q = c.at("q").get<double>();
    o.gamma = std::to_string(c.at("gamma").get<double>());
    o.clip_c = c.at("clip_c").get<double>();
    o.seed = c.at("seed").get<std::uint64_t>();
    o.mode = c.at("mode").get<std::string>();
    o.directed = c.at("directed").get<bool>();
  }
  if (o.input.empty() || o.output.empty())
    throw std::runtime_error("embed needs --input and --output");

  const auto t_load = Clock::now();
  const gemd::Graph g = gemd::load_edge_list(o.input, o.directed);
  if (g.node_count() == 0) throw std::runtime_error("input graph is empty: " + o.input);
  const double load_seconds = seconds_since(t_load);

  int length = 0;
  if (o.walk_length == "auto") {
    length = std::max(1, gemd::estimate_diameter(g, 8, o.seed));
    std::cout << "walk length auto: estimated diameter " << length << "\n";
  } else {
    length = std::stoi(o.walk_length);
  }
  const gemd::WalkConfig cfg = walk_config_of(o, length);
  gemd::validate(cfg);

  const auto t_embed = Clock::now();
  const bool closed = o.mode == "closed";
  if (!closed && o.mode != "scalable")
    throw std::runtime_error("unknown mode '" + o.mode + "' (closed|scalable)");

  double gamma = 0.0;
  if (o.gamma == "auto") {
    const gemd::ProximityMatrix pi = closed
                                         ? gemd::closed_form_proximity(g, cfg)
                                         : gemd::estimated_split_proximity(g, cfg, 0);
    const gemd::AutoGammaResult r = gemd::auto_gamma(pi, 100000, cfg.seed);
    if (!r.bracketed)
      std::cerr << "warning: no zero-skewness point in [-1, 1]; using gamma = " << r.gamma
                << " (skewness " << r.skew << ")\n";
    gamma = r.gamma;
    std::cout << "gamma auto: " << gamma << "\n";
  } else {
    gamma = std::stod(o.gamma);
  }

  if (!o.dump_proximity.empty()) {
    const gemd::ProximityMatrix pi = closed ? gemd::closed_form_proximity(g, cfg)
                                            : gemd::estimated_split_proximity(g, cfg, 0);
    pi.dump_triples(o.dump_proximity);
  }

  const gemd::EmbeddingPair pair = closed ? gemd::ultimatewalk_closed(g, cfg, gamma)
                                          : gemd::ultimatewalk_scalable(g, cfg, gamma);
  const double embed_seconds = seconds_since(t_embed);

  const auto t_write = Clock::now();
  gemd::write_embedding(o.output, g.node_ids(), pair);
  const double write_seconds = seconds_since(t_write);

  const std::string out_digest = gemd::cli::file_digest(o.output);
  json manifest = {
      {"tool", "gemd"},
      {"version", kToolVersion},
      {"command", "embed"},
      {"config",
       {{"mode", o.mode},
        {"dim", o.dim},
        {"walk_length", length},
        {"walk_length_arg", o.walk_length},
        {"trials", o.trials},
        {"splits", o.splits},
        {"p", o.p},
        {"q", o.q},
        {"gamma", gamma},
        {"gamma_arg", o.gamma},
        {"clip_c", o.clip_c},
        {"seed", o.seed},
        {"directed", o.directed}}},
      {"input",
       {{"path", o.input},
        {"digest", gemd::cli::file_digest(o.input)},
        {"nodes", g.node_count()},
        {"arcs", g.arc_count()}}},
      {"output", {{"path", o.output}, {"digest", out_digest}}},
      {"timings",
       {{"load_seconds", load_seconds},
        {"embed_seconds", embed_seconds},
        {"write_seconds", write_seconds}}},
  };
  const std::string manifest_path =
      o.manifest_path.empty() ? o.output + ".manifest.json" : o.manifest_path;
  write_file_atomically(manifest_path, manifest.dump(2) + "\n");

  std::cout << "embedded " << g.node_count() << " nodes (" << g.arc_count() << " arcs) at dim "
            << o.dim << " via " << o.mode << " mode\n"
            << "embedding: " << o.output << "\n"
            << "manifest:  " << manifest_path << "\n"
            << "digest:    " << out_digest << "\n";

  if (!expect_digest.empty()) {
    if (out_digest == expect_digest) {
      std::cout << "manifest re-run: digest matches\n";
    } else {
      std::cerr << "manifest re-run: digest mismatch (expected " << expect_digest << ")\n";
      return 1;
    }
  }
  return 0;
}

void print_report(const gemd::ExperimentReport& report) {
  std::cout << "repeats:  " << report.repeats << "\n";
  std::cout << "macro-f1: " << report.macro_mean << " +/- " << report.macro_sd << "\n";
  std::cout << "micro-f1: " << report.micro_mean << " +/- " << report.micro_sd << "\n";
  if (report.skipped_label_events > 0)
    std::cout << "warnings: " << report.skipped_label_events
              << " label-without-training-example events\n";
}

std::string report_tsv(const gemd::ExperimentReport& report) {
  std::ostringstream out;
  out << "repeat\tmacro_f1\tmicro_f1\n";
  for (int r = 0; r < report.repeats; ++r)
    out << r << '\t' << report.macro_runs[r] << '\t' << report.micro_runs[r] << '\n';
  return out.str();
}

int cmd_eval(const std::string& embedding_path, const std::string& labels_path, double ratio,
             int repeats, std::uint64_t seed, double reg, const std::string& out_path) {
  const gemd::NamedEmbedding emb = gemd::read_embedding(embedding_path);
  const gemd::LabelSet labels = gemd::load_labels(labels_path, emb.node_ids);
  Eigen::MatrixXd features(emb.f.rows(), emb.f.cols() + emb.f_hat.cols());
  features << emb.f, emb.f_hat;

  gemd::ExperimentConfig exp;
  exp.ratio = ratio;
  exp.repeats = repeats;
  exp.seed = seed;
  exp.reg = reg;
  const gemd::ExperimentReport report = gemd::run_experiment(features, labels, exp);
  print_report(report);
  const std::string tsv = report_tsv(report);
  if (out_path.empty()) {
    std::cout << "\n" << tsv;
  } else {
    write_file_atomically(out_path, tsv);
    std::cout << "per-repeat table: " << out_path << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& input, const std::string& labels_path, bool directed,
              const std::string& axis_name, const std::string& grid_csv, EmbedOptions base,
              double ratio, int repeats, double reg, const std::string& out_path) {
  const gemd::Graph g = gemd::load_edge_list(input, directed);
  const gemd::LabelSet labels = gemd::load_labels(labels_path, g);
  const gemd::SweepAxis axis = gemd::parse_sweep_axis(axis_name);
  const std::vector<double> grid = parse_grid(grid_csv);

  int length = base.walk_length == "auto" ? std::max(1, gemd::estimate_diameter(g, 8, base.seed))
                                          : std::stoi(base.walk_length);
  const gemd::WalkConfig cfg = walk_config_of(base, length);
  gemd::validate(cfg);
  const gemd::EmbedMode mode =
      base.mode == "closed" ? gemd::EmbedMode::closed : gemd::EmbedMode::scalable;

  gemd::ExperimentConfig exp;
  exp.ratio = ratio;
  exp.repeats = repeats;
  exp.seed = base.seed;
  exp.reg = reg;

  const auto rows = gemd::ablation_sweep(axis, grid, g, labels, cfg, mode, exp);
  std::ostringstream tsv;
  tsv << "value\tmacro_mean\tmacro_sd\tmicro_mean\tmicro_sd\n";
  for (const auto& row : rows)
    tsv << row.value << '\t' << row.report.macro_mean << '\t' << row.report.macro_sd << '\t'
        << row.report.micro_mean << '\t' << row.report.micro_sd << '\n';
  if (out_path.empty()) {
    std::cout << tsv.str();
  } else {
    write_file_atomically(out_path, tsv.str());
    std::cout << "sweep table: " << out_path << " (" << rows.size() << " rows)\n";
  }
  return 0;
}

int cmd_bench(const std::string& sizes_csv, int avg_degree, EmbedOptions base,
              const std::string& out_path) {
  std::vector<std::size_t> sizes;
  for (double v : parse_grid(sizes_csv)) sizes.push_back(static_cast<std::size_t>(v));
  const gemd::WalkConfig cfg = walk_config_of(base, std::stoi(base.walk_length));
  gemd::validate(cfg);
  gemd::GraphGenerator gen = [avg_degree](std::size_t edges, std::uint64_t seed) {
    const int nodes = std::max<int>(2, static_cast<int>(edges / avg_degree));
    return gemd::random_pair_graph(nodes, edges, seed);
  };
  const auto rows = gemd::benchmark_scaling(gen, sizes, cfg);
  std::ostringstream tsv;
  tsv << "edges\tseconds\n";
  for (const auto& row : rows) tsv << row.edges << '\t' << row.seconds << '\n';
  if (out_path.empty()) {
    std::cout << tsv.str();
  } else {
    write_file_atomically(out_path, tsv.str());
    std::cout << "bench table: " << out_path << " (" << rows.size() << " rows)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph embedding via warped proximity factorization"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "cap worker threads (0 = hardware default)");

  EmbedOptions eo;
  CLI::App* embed = app.add_subcommand("embed", "embed a graph from an edge list");
  embed->add_option("--input", eo.input, "edge-list file");
  embed->add_option("--output", eo.output, "embedding output file");
  embed->add_option("--dim", eo.dim, "embedding dimension K")->capture_default_str();
  embed->add_option("--walk-length", eo.walk_length, "walk length L, or 'auto' (graph diameter)")
      ->capture_default_str();
  embed->add_option("--trials", eo.trials, "random-walk trials m per node")
      ->capture_default_str();
  embed->add_option("--splits", eo.splits, "data splits T (averaged; must divide trials)")
      ->capture_default_str();
  embed->add_option("--p", eo.p, "return factor")->capture_default_str();
  embed->add_option("--q", eo.q, "in-out factor")->capture_default_str();
  embed->add_option("--gamma", eo.gamma, "warp nonlinearity, or 'auto' (zero skewness)")
      ->capture_default_str();
  embed->add_option("--clip-c", eo.clip_c, "log-of-zero clip constant")->capture_default_str();
  embed->add_option("--seed", eo.seed, "random seed")->capture_default_str();
  embed->add_option("--mode", eo.mode, "closed|scalable")->capture_default_str();
  embed->add_flag("--directed", eo.directed, "treat the input as directed");
  embed->add_option("--dump-proximity", eo.dump_proximity,
                    "dump the proximity matrix as i<TAB>j<TAB>value triples");
  embed->add_option("--manifest", eo.manifest_path,
                    "manifest path (default <output>.manifest.json)");
  embed->add_option("--from-manifest", eo.from_manifest,
                    "re-run the configuration recorded in a manifest and verify the digest");

  std::string eval_embedding, eval_labels, eval_out;
  double eval_ratio = 0.5, eval_reg = 0.01;
  int eval_repeats = 20;
  std::uint64_t eval_seed = 42;
  CLI::App* eval = app.add_subcommand("eval", "multi-label node classification");
  eval->add_option("--embedding", eval_embedding, "embedding file")->required();
  eval->add_option("--labels", eval_labels, "label file `node<TAB>l1,l2,...`")->required();
  eval->add_option("--ratio", eval_ratio, "labeled training fraction")->capture_default_str();
  eval->add_option("--repeats", eval_repeats, "random splits to average")->capture_default_str();
  eval->add_option("--seed", eval_seed, "random seed")->capture_default_str();
  eval->add_option("--reg", eval_reg, "L2 strength of the average-loss objective")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "per-repeat TSV path (default: stdout)");

  std::string sweep_input, sweep_labels, sweep_axis, sweep_grid, sweep_out;
  double sweep_ratio = 0.5, sweep_reg = 0.01;
  int sweep_repeats = 20;
  EmbedOptions so;
  CLI::App* sweep = app.add_subcommand("sweep", "rerun the experiment along one parameter axis");
  sweep->add_option("--input", sweep_input, "edge-list file")->required();
  sweep->add_option("--labels", sweep_labels, "label file")->required();
  sweep->add_option("--axis", sweep_axis, "walk_length|gamma|memory")->required();
  sweep->add_option("--grid", sweep_grid, "comma-separated grid values")->required();
  sweep->add_flag("--directed", so.directed, "treat the input as directed");
  sweep->add_option("--dim", so.dim, "embedding dimension K")->capture_default_str();
  sweep->add_option("--walk-length", so.walk_length, "walk length L, or 'auto'")
      ->capture_default_str();
  sweep->add_option("--trials", so.trials, "random-walk trials m per node")
      ->capture_default_str();
  sweep->add_option("--splits", so.splits, "data splits T")->capture_default_str();
  sweep->add_option("--p", so.p, "return factor")->capture_default_str();
  sweep->add_option("--q", so.q, "in-out factor")->capture_default_str();
  sweep->add_option("--clip-c", so.clip_c, "log-of-zero clip constant")->capture_default_str();
  sweep->add_option("--seed", so.seed, "random seed")->capture_default_str();
  sweep->add_option("--mode", so.mode, "closed|scalable")->capture_default_str();
  sweep->add_option("--ratio", sweep_ratio, "labeled training fraction")->capture_default_str();
  sweep->add_option("--repeats", sweep_repeats, "random splits to average")
      ->capture_default_str();
  sweep->add_option("--reg", sweep_reg, "L2 strength")->capture_default_str();
  sweep->add_option("--out", sweep_out, "TSV path (default: stdout)");

  std::string bench_sizes, bench_out;
  int bench_avg_degree = 10;
  EmbedOptions bo;
  CLI::App* bench = app.add_subcommand("bench", "time the scalable pipeline over graph sizes");
  bench->add_option("--sizes", bench_sizes, "comma-separated edge counts (1e4,2e4,...)")
      ->required();
  bench->add_option("--avg-degree", bench_avg_degree, "edges per node of generated graphs")
      ->capture_default_str();
  bench->add_option("--dim", bo.dim, "embedding dimension K")->capture_default_str();
  bench->add_option("--walk-length", bo.walk_length, "walk length L")->capture_default_str();
  bench->add_option("--trials", bo.trials, "random-walk trials m per node")
      ->capture_default_str();
  bench->add_option("--seed", bo.seed, "random seed")->capture_default_str();
  bench->add_option("--out", bench_out, "TSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // contract: success 0, any failure 1
  }
  if (workers > 0) omp_set_num_threads(workers);

  try {
    if (*embed) return cmd_embed(eo);
    if (*eval)
      return cmd_eval(eval_embedding, eval_labels, eval_ratio, eval_repeats, eval_seed, eval_reg,
                      eval_out);
    if (*sweep)
      return cmd_sweep(sweep_input, sweep_labels, so.directed, sweep_axis, sweep_grid, so,
                       sweep_ratio, sweep_repeats, sweep_reg, sweep_out);
    if (*bench) return cmd_bench(bench_sizes, bench_avg_degree, bo, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "gemd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
