#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "autostyle/cli.hpp"
#include "autostyle/error.hpp"

using namespace autostyle;

namespace {

/// Flag values are collected as raw strings and replayed over the config
/// file through apply_config_value, so flags and files share one parser and
/// flags always win.
struct PendingConfig {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_config_flags(CLI::App* cmd, PendingConfig& pending) {
  cmd->add_option("--config", pending.config_path,
                  "key=value configuration file");
  const auto kv = [cmd, &pending](const std::string& flag,
                                  const std::string& key, const char* help) {
    cmd->add_option_function<std::string>(
        flag,
        [&pending, key](const std::string& v) {
          pending.overrides.emplace_back(key, v);
        },
        help);
  };
  const auto on = [cmd, &pending](const std::string& flag,
                                  const std::string& key,
                                  const std::string& value, const char* help) {
    cmd->add_flag_callback(
        flag,
        [&pending, key, value] { pending.overrides.emplace_back(key, value); },
        help);
  };

  kv("--gamma", "gamma", "gamma exponent applied during preprocessing (2.2)");
  on("--expand-gamma", "gamma_compress", "false",
     "apply 1/gamma instead of gamma when converting to Lab");
  kv("--clip", "clip", "luminance stretch clip fraction (0.005)");
  kv("--lambda-r", "lambda_r", "chroma covariance diagonal floor (7.5)");
  kv("--tau", "tau", "tone displacement cap (0.4)");
  on("--literal-tau", "literal_tau", "true",
     "divide by min(tau, displacement) instead of capping");
  kv("--l-th", "l_th", "face correction trigger threshold (0.3)");
  kv("--gamma-th", "gamma_th", "strongest face correction exponent (0.5)");
  kv("--alpha-r", "alpha_r", "face spatial kernel falloff (0.45)");
  kv("--alpha-c", "alpha_c", "face chroma kernel falloff (0.001)");
  kv("--lambda-l", "lambda_l", "luminance kernel bandwidth (0.005)");
  kv("--lambda-c", "lambda_c", "chroma kernel bandwidth (0.05)");
  kv("--epsilon", "epsilon", "mean regularizer in the chroma distance (1.0)");
  on("--normalize-luma", "normalize_luma", "true",
     "normalize the luminance distance by its dimension");
  kv("--n-clusters", "n_clusters", "nearest semantic clusters to merge (3)");
  kv("--threshold", "threshold", "diversity threshold on chroma distance (7.5)");
  kv("--k-outputs", "k_outputs", "stylized outputs per input (5)");
  kv("-k,--clusters", "k", "k for collection clustering (8)");
  kv("--seed", "seed", "clustering seed (0)");
  kv("--format", "format", "output image format: png or jpeg");
  kv("--jpeg-quality", "jpeg_quality", "JPEG quality 1-100 (90)");
}

CliConfig resolve_config(const PendingConfig& pending) {
  CliConfig cfg;
  if (!pending.config_path.empty()) load_config_file(cfg, pending.config_path);
  for (const auto& [key, value] : pending.overrides)
    apply_config_value(cfg, key, value);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Automatic photo stylization: index a photo collection, rank "
               "curated styles per semantic cluster, and transfer diverse "
               "color/tone looks onto new photographs."};
  app.require_subcommand(1);

  BuildIndexArgs build_args;
  PendingConfig build_cfg;
  CLI::App* build = app.add_subcommand(
      "build-index", "Cluster a photo collection and rank styles per cluster");
  build->add_option("--photos", build_args.photos_dir, "photo collection directory")
      ->required();
  build->add_option("--styles", build_args.styles_dir, "style exemplar directory")
      ->required();
  build->add_option("--features", build_args.features_dir,
                    "directory with features.json and external feature files");
  build->add_option("--out", build_args.out_dir, "output index directory")
      ->required();
  add_config_flags(build, build_cfg);

  StylizeArgs stylize_args;
  PendingConfig stylize_cfg;
  CLI::App* stylize = app.add_subcommand(
      "stylize", "Select diverse styles for an input and render them");
  stylize->add_option("--index", stylize_args.index_dir, "index directory")
      ->required();
  stylize->add_option("--input", stylize_args.input_path, "input image")
      ->required();
  stylize->add_option("--out-dir", stylize_args.out_dir, "output directory")
      ->required();
  stylize->add_option("--faces", stylize_args.faces_path,
                      "face sidecar JSON ([{\"cx\",\"cy\",\"r\"}])");
  add_config_flags(stylize, stylize_cfg);

  TransferArgs transfer_args;
  PendingConfig transfer_cfg;
  CLI::App* transfer = app.add_subcommand(
      "transfer", "Transfer one style image's look onto an input image");
  transfer->add_option("--input", transfer_args.input_path, "input image")
      ->required();
  transfer->add_option("--style", transfer_args.style_path, "style image")
      ->required();
  transfer->add_option("--out", transfer_args.out_path, "output image path")
      ->required();
  transfer->add_option("--faces", transfer_args.faces_path,
                       "face sidecar JSON");
  add_config_flags(transfer, transfer_cfg);

  RankArgs rank_args;
  PendingConfig rank_cfg;
  CLI::App* rank = app.add_subcommand(
      "rank", "Print the merged style ranking for an input image");
  rank->add_option("--index", rank_args.index_dir, "index directory")
      ->required();
  rank->add_option("--input", rank_args.input_path, "input image")->required();
  rank->add_option("--top", rank_args.top, "rows to print (10)");
  rank->add_flag("--json", rank_args.json, "machine-readable output");
  add_config_flags(rank, rank_cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) {
      build_args.config = resolve_config(build_cfg);
      return cmd_build_index(build_args, std::cout, std::cerr);
    }
    if (stylize->parsed()) {
      stylize_args.config = resolve_config(stylize_cfg);
      return cmd_stylize(stylize_args, std::cout, std::cerr);
    }
    if (transfer->parsed()) {
      transfer_args.config = resolve_config(transfer_cfg);
      return cmd_transfer(transfer_args, std::cout, std::cerr);
    }
    if (rank->parsed()) {
      rank_args.config = resolve_config(rank_cfg);
      return cmd_rank(rank_args, std::cout, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
