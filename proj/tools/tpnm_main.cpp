// tpnm: temporal link prediction over time-parameterized networks.
//
// Subcommands: synth, stats, train, predict, evaluate, ablation,
// correlate, bench. Each writes its artifacts into --out-dir and prints a
// single summary line on stdout; diagnostics go to stderr.
//
// Exit codes: 0 ok, 2 parse error, 3 numeric failure, 4 usage error,
// 5 domain error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tpnm/tpnm.hpp"

namespace fs = std::filesystem;

namespace {

struct InputOptions {
  std::string path;
  std::string kind = "activity";  // activity | edge-list
  std::string catalog_path;
  bool group_by_source = false;
  bool sort_on_disorder = false;
  bool strict_timestamps = false;
};

struct CommonConfig {
  tpnm::Hyperparams hp;
  bool beta_set = false;
  std::string scheme = "tp-initial";
  int threads = 1;
  bool snapshot_window = false;
  std::string out_dir = ".";
  std::string format = "csv";
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--input", in.path, "Input dataset file")->required();
  cmd->add_option("--input-kind", in.kind, "Input format: activity or edge-list")
      ->check(CLI::IsMember({"activity", "edge-list"}))
      ->capture_default_str();
  cmd->add_option("--catalog", in.catalog_path,
                  "Node catalog CSV (id,label[,revisitable])");
  cmd->add_flag("--group-by-source", in.group_by_source,
                "Edge lists: one instance per source node");
  cmd->add_flag("--sort", in.sort_on_disorder,
                "Sort out-of-order rows instead of rejecting them");
  cmd->add_flag("--strict-timestamps", in.strict_timestamps,
                "Reject duplicate timestamps instead of nudging by +1s");
}

void add_model_flags(CLI::App* cmd, CommonConfig& cfg) {
  cmd->add_option("--alpha", cfg.hp.alpha,
                  "Temporal range of the neighborhood (window radius)")
      ->capture_default_str();
  cmd->add_option("--lambda", cfg.hp.lambda0, "Initial learning rate")
      ->capture_default_str();
  cmd->add_option("--beta", cfg.hp.beta, "Predictive influence threshold in [0,1)")
      ->each([&cfg](const std::string&) { cfg.beta_set = true; });
  cmd->add_option("--gamma", cfg.hp.gamma, "SGD momentum")->capture_default_str();
  cmd->add_option("--M", cfg.hp.max_iterations, "Maximum training iterations")
      ->capture_default_str();
  cmd->add_option("--k", cfg.hp.latent_dim, "Latent dimension")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.hp.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--scheme", cfg.scheme,
                  "Weight scheme: adjacency, tp-initial or tp-recent")
      ->check(CLI::IsMember({"adjacency", "tp-initial", "tp-recent"}))
      ->capture_default_str();
  cmd->add_option("--threads", cfg.threads, "Worker threads for per-instance stages")
      ->capture_default_str();
  cmd->add_flag("--snapshot-window", cfg.snapshot_window,
                "Sum the data term over the trailing alpha-window of event "
                "prefixes (KONECT-style data)");
  cmd->add_option("--out-dir", cfg.out_dir, "Artifact output directory")
      ->capture_default_str();
  cmd->add_option("--format", cfg.format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void require_beta(const CommonConfig& cfg) {
  if (!cfg.beta_set) throw tpnm::UsageError("--beta is required");
}

tpnm::TrainOptions train_options(const CommonConfig& cfg) {
  tpnm::TrainOptions opts;
  opts.scheme = tpnm::scheme_from_string(cfg.scheme);
  opts.threads = cfg.threads;
  opts.snapshot_window = cfg.snapshot_window;
  return opts;
}

tpnm::Dataset load_input(const InputOptions& in) {
  tpnm::LoadOptions opts;
  opts.group_by_source = in.group_by_source;
  opts.sort_on_disorder = in.sort_on_disorder;
  opts.strict_timestamps = in.strict_timestamps;
  std::vector<std::string> warnings;
  opts.warnings = &warnings;

  tpnm::Dataset ds;
  if (in.kind == "edge-list") {
    ds = tpnm::load_edge_list(in.path, opts);
  } else {
    std::optional<tpnm::CatalogFile> catalog;
    if (!in.catalog_path.empty()) catalog = tpnm::load_node_catalog(in.catalog_path);
    ds = tpnm::load_activity_csv(in.path, catalog, opts);
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return ds;
}

std::string artifact_path(const CommonConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

void write_dataset_csv(const tpnm::Dataset& ds, const std::string& data_path,
                       const std::string& catalog_path) {
  std::string body = "instance_id,activity_id,timestamp\n";
  for (const auto& seq : ds.instances)
    for (const auto& ev : seq.events)
      body += seq.instance_id + "," + std::to_string(ev.node) + "," +
              std::to_string(ev.t) + "\n";
  tpnm::write_text_file(data_path, body);

  std::string cat = "id,label,revisitable\n";
  for (const auto& node : ds.catalog.nodes())
    cat += std::to_string(node.id) + "," + node.label + "," +
           (node.revisitable ? "true" : "false") + "\n";
  tpnm::write_text_file(catalog_path, cat);
}

int run(int argc, char** argv) {
  CLI::App app{"Temporal link prediction with time-parameterized matrices"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.get_config_formatter_base()->valueSeparator('=');

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic activity dataset");
  struct {
    std::string preset = "activity";
    std::size_t instances = 1000;
    std::size_t nodes = 12;
    double missing_rate = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
  } synth_cfg;
  synth->add_option("--preset", synth_cfg.preset,
                    "activity, branching, deterministic or shuffled")
      ->check(CLI::IsMember({"activity", "branching", "deterministic", "shuffled"}))
      ->capture_default_str();
  synth->add_option("--instances", synth_cfg.instances, "Instance count")
      ->capture_default_str();
  synth->add_option("--nodes", synth_cfg.nodes,
                    "Node count (deterministic/shuffled presets)")
      ->capture_default_str();
  synth->add_option("--missing-rate", synth_cfg.missing_rate,
                    "Activity drop probability in [0,1)")
      ->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed, "RNG seed")->capture_default_str();
  synth->add_option("--out-dir", synth_cfg.out_dir, "Output directory")
      ->capture_default_str();

  // ---- stats ----
  auto* stats = app.add_subcommand("stats", "Dataset statistics (Table-III style)");
  InputOptions stats_in;
  add_input_flags(stats, stats_in);
  std::string stats_out_dir = ".";
  std::string stats_format = "csv";
  stats->add_option("--out-dir", stats_out_dir, "Artifact output directory")
      ->capture_default_str();
  stats->add_option("--format", stats_format, "Report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // ---- train ----
  auto* train_cmd = app.add_subcommand("train", "Train a TPNM factor model");
  InputOptions train_in;
  CommonConfig train_cfg;
  add_input_flags(train_cmd, train_in);
  add_model_flags(train_cmd, train_cfg);

  // ---- predict ----
  auto* predict = app.add_subcommand(
      "predict", "Rank next-node candidates at one or more query times");
  struct {
    std::string model_path;
    std::string instance_path;
    std::string catalog_path;
    std::string instance_id;
    std::vector<std::int64_t> at;
    std::string out_dir = ".";
  } predict_cfg;
  predict->add_option("--model", predict_cfg.model_path, "Trained model file")
      ->required();
  predict->add_option("--instance", predict_cfg.instance_path,
                      "Activity CSV holding the instance to continue")
      ->required();
  predict->add_option("--instance-id", predict_cfg.instance_id,
                      "Instance to use when the file holds several");
  predict->add_option("--at", predict_cfg.at,
                      "Query time(s); each must be >= the last event time")
      ->required();
  predict->add_option("--out-dir", predict_cfg.out_dir, "Output directory")
      ->capture_default_str();

  // ---- evaluate ----
  auto* evaluate = app.add_subcommand(
      "evaluate", "Leave-last-node-out AUC protocol over a dataset");
  InputOptions eval_in;
  CommonConfig eval_cfg;
  add_input_flags(evaluate, eval_in);
  add_model_flags(evaluate, eval_cfg);

  // ---- ablation ----
  auto* ablation = app.add_subcommand(
      "ablation", "Per-epoch RMSE for adjacency vs TP-initial vs TP-recent");
  InputOptions abl_in;
  CommonConfig abl_cfg;
  add_input_flags(ablation, abl_in);
  add_model_flags(ablation, abl_cfg);

  // ---- correlate ----
  auto* correlate = app.add_subcommand(
      "correlate", "Pearson correlation matrix with hierarchical clustering");
  InputOptions corr_in;
  add_input_flags(correlate, corr_in);
  std::string corr_scheme = "tp-initial";
  std::string corr_out_dir = ".";
  correlate->add_option("--scheme", corr_scheme, "adjacency, tp-initial or tp-recent")
      ->check(CLI::IsMember({"adjacency", "tp-initial", "tp-recent"}))
      ->capture_default_str();
  correlate->add_option("--out-dir", corr_out_dir, "Output directory")
      ->capture_default_str();

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "Training wall-time per dataset size");
  CommonConfig bench_cfg;
  std::vector<std::size_t> bench_sizes;
  double bench_missing = 0.44;
  add_model_flags(bench, bench_cfg);
  bench->add_option("--sizes", bench_sizes, "Ascending instance counts")
      ->required()
      ->delimiter(',');
  bench->add_option("--missing-rate", bench_missing,
                    "Synthetic activity drop probability")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 4;
  }

  if (*synth) {
    tpnm::SyntheticConfig cfg;
    if (synth_cfg.preset == "activity")
      cfg = tpnm::presets::activity_workflow(synth_cfg.instances,
                                             synth_cfg.missing_rate, synth_cfg.seed);
    else if (synth_cfg.preset == "branching")
      cfg = tpnm::presets::branching_workflow(synth_cfg.instances,
                                              synth_cfg.missing_rate, synth_cfg.seed);
    else if (synth_cfg.preset == "deterministic")
      cfg = tpnm::presets::deterministic_successor(synth_cfg.nodes,
                                                   synth_cfg.instances, synth_cfg.seed);
    else
      cfg = tpnm::presets::shuffled_successor(synth_cfg.nodes, synth_cfg.instances,
                                              synth_cfg.seed);
    const auto ds = tpnm::synthesize(cfg);
    fs::create_directories(synth_cfg.out_dir);
    const auto data_path = (fs::path(synth_cfg.out_dir) / "dataset.csv").string();
    const auto catalog_path = (fs::path(synth_cfg.out_dir) / "catalog.csv").string();
    write_dataset_csv(ds, data_path, catalog_path);
    std::cout << "synth: wrote " << ds.instances.size() << " instances to "
              << data_path << " (catalog " << catalog_path << ")\n";
    return 0;
  }

  if (*stats) {
    const auto ds = load_input(stats_in);
    const auto s = tpnm::dataset_stats(ds);
    fs::create_directories(stats_out_dir);
    const auto path =
        (fs::path(stats_out_dir) / ("stats." + stats_format)).string();
    tpnm::write_text_file(path, stats_format == "json" ? tpnm::stats_to_json(s)
                                                       : tpnm::stats_to_csv(s));
    std::cout << "stats: nodes=" << s.total_nodes << " avg_degree="
              << tpnm::format_float(s.average_degree) << " absent:observed="
              << tpnm::format_ratio(s.absent_count, s.observed_count) << " -> "
              << path << "\n";
    return 0;
  }

  if (*train_cmd) {
    require_beta(train_cfg);
    const auto ds = load_input(train_in);
    const auto result = tpnm::train(ds, train_cfg.hp, train_options(train_cfg));
    const auto model_path = artifact_path(train_cfg, "model.json");
    const auto log_path = artifact_path(train_cfg, "train_log.csv");
    tpnm::save_model(result.model, model_path);
    tpnm::write_text_file(log_path, tpnm::training_log_to_csv(result.log));
    std::cout << "train: epochs=" << result.epochs
              << (result.converged ? " (converged)" : " (max iterations)")
              << " final_rmse=" << tpnm::format_float(result.log.back().rmse)
              << " -> " << model_path << "\n";
    return 0;
  }

  if (*predict) {
    const auto model = tpnm::load_model(predict_cfg.model_path);
    std::optional<tpnm::CatalogFile> catalog;  // instance ids resolve via model
    tpnm::LoadOptions lopts;
    auto instances = tpnm::load_activity_csv(predict_cfg.instance_path, catalog, lopts);
    const tpnm::EventSequence* seq = nullptr;
    if (!predict_cfg.instance_id.empty()) {
      for (const auto& s : instances.instances)
        if (s.instance_id == predict_cfg.instance_id) seq = &s;
      if (!seq)
        throw tpnm::UsageError("instance id '" + predict_cfg.instance_id +
                               "' not present in " + predict_cfg.instance_path);
    } else if (instances.instances.size() == 1) {
      seq = &instances.instances.front();
    } else {
      throw tpnm::UsageError("file holds " +
                             std::to_string(instances.instances.size()) +
                             " instances; pick one with --instance-id");
    }

    std::string body = "query_time,rank,node_id,label,score\n";
    for (const auto at : predict_cfg.at) {
      const auto ranked = tpnm::predict_next(model, *seq, at);
      for (std::size_t i = 0; i < ranked.size(); ++i)
        body += std::to_string(at) + "," + std::to_string(i + 1) + "," +
                std::to_string(ranked[i].node) + "," +
                model.catalog.at(ranked[i].node).label + "," +
                tpnm::format_float(ranked[i].score) + "\n";
    }
    fs::create_directories(predict_cfg.out_dir);
    const auto path = (fs::path(predict_cfg.out_dir) / "predictions.csv").string();
    tpnm::write_text_file(path, body);
    std::cout << "predict: " << predict_cfg.at.size() << " query time(s) for instance "
              << seq->instance_id << " -> " << path << "\n";
    return 0;
  }

  if (*evaluate) {
    require_beta(eval_cfg);
    const auto ds = load_input(eval_in);
    std::vector<std::string> warnings;
    const auto report =
        tpnm::auc_protocol(ds, eval_cfg.hp, train_options(eval_cfg), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    const auto rows_path = artifact_path(eval_cfg, "evaluate_instances.csv");
    tpnm::write_text_file(rows_path, tpnm::auc_report_to_csv(report));
    const auto summary_path =
        artifact_path(eval_cfg, "evaluate." + eval_cfg.format);
    if (eval_cfg.format == "json") {
      tpnm::write_text_file(summary_path, tpnm::auc_report_to_json(report));
    } else {
      std::string csv = "auc,positives,negatives,skipped,stage_hits,stage_total\n";
      csv += tpnm::format_float(report.auc) + "," +
             std::to_string(report.positives) + "," +
             std::to_string(report.negatives) + "," +
             std::to_string(report.skipped) + "," +
             std::to_string(report.stage_hits) + "," +
             std::to_string(report.stage_total) + "\n";
      tpnm::write_text_file(summary_path, csv);
    }
    std::cout << "evaluate: auc=" << tpnm::format_float(report.auc) << " positives="
              << report.positives << " negatives=" << report.negatives << " -> "
              << summary_path << "\n";
    return 0;
  }

  if (*ablation) {
    require_beta(abl_cfg);
    const auto ds = load_input(abl_in);
    const auto result = tpnm::ablation_curves(ds, abl_cfg.hp, train_options(abl_cfg));
    const auto path = artifact_path(abl_cfg, "ablation.csv");
    tpnm::write_text_file(path, tpnm::ablation_to_csv(result));
    std::cout << "ablation: final rmse adjacency="
              << tpnm::format_float(result.final_rmse(tpnm::WeightScheme::Adjacency))
              << " tp-initial="
              << tpnm::format_float(result.final_rmse(tpnm::WeightScheme::TPInitial))
              << " tp-recent="
              << tpnm::format_float(result.final_rmse(tpnm::WeightScheme::TPRecent))
              << " -> " << path << "\n";
    return 0;
  }

  if (*correlate) {
    const auto ds = load_input(corr_in);
    const auto report =
        tpnm::correlation_analysis(ds, tpnm::scheme_from_string(corr_scheme));
    fs::create_directories(corr_out_dir);
    const auto path = (fs::path(corr_out_dir) / "correlation.csv").string();
    tpnm::write_text_file(path, tpnm::correlation_to_csv(report, ds.catalog));
    std::cout << "correlate: scheme=" << corr_scheme << " undefined_pairs="
              << report.undefined_pairs.size() << " -> " << path << "\n";
    return 0;
  }

  if (*bench) {
    require_beta(bench_cfg);
    const auto report = tpnm::runtime_bench(bench_sizes, bench_cfg.hp,
                                            train_options(bench_cfg), bench_missing);
    const auto path = artifact_path(bench_cfg, "bench.csv");
    tpnm::write_text_file(path, tpnm::bench_to_csv(report));
    std::cout << "bench: per-instance ratio="
              << tpnm::format_float(report.per_instance_ratio)
              << (report.roughly_linear ? " (roughly linear)" : " (super-linear)")
              << " -> " << path << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tpnm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
