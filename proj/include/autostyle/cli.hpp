#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "autostyle/imgio.hpp"
#include "autostyle/selection.hpp"
#include "autostyle/similarity.hpp"
#include "autostyle/transfer.hpp"

namespace autostyle {

/// Every tunable of the pipeline in one bundle. Defaults reproduce the
/// reference parameterization.
struct CliConfig {
  TransferConfig transfer;
  SimilarityParams similarity;
  SelectionConfig selection;
  uint32_t kmeans_k = 8;
  uint64_t seed = 0;
  ImageFormat out_format = ImageFormat::png;
  int jpeg_quality = 90;
};

/// Applies one `key=value` assignment (config files and command-line
/// overrides share the key vocabulary). Throws InvalidConfig for unknown
/// keys or unparsable values.
void apply_config_value(CliConfig& cfg, const std::string& key,
                        const std::string& value);

/// Reads a `key=value` per line file ('#' starts a comment).
void load_config_file(CliConfig& cfg, const std::string& path);

/// Collects every range violation at once (empty means valid).
std::vector<std::string> validate_config(const CliConfig& cfg);

/// Parses a face sidecar: JSON array of {"cx": int, "cy": int, "r": int}.
std::vector<FaceRegion> parse_face_regions(const std::string& path);

struct BuildIndexArgs {
  std::string photos_dir;
  std::string styles_dir;
  std::string features_dir;  // empty: use the builtin semantic feature
  std::string out_dir;
  CliConfig config;
};

struct StylizeArgs {
  std::string index_dir;
  std::string input_path;
  std::string out_dir;
  std::string faces_path;  // empty: no face regions
  CliConfig config;
};

struct TransferArgs {
  std::string input_path;
  std::string style_path;
  std::string out_path;
  std::string faces_path;
  CliConfig config;
};

struct RankArgs {
  std::string index_dir;
  std::string input_path;
  uint32_t top = 10;
  bool json = false;
  CliConfig config;
};

/// Offline stage: scan photo and style directories, extract features and
/// descriptors, cluster, vote, persist. Returns 0 on success, 1 on empty or
/// invalid inputs, 2 when writing the index fails.
int cmd_build_index(const BuildIndexArgs& args, std::ostream& out,
                    std::ostream& err);

/// Online stage: select up to k diverse styles for the input and write the
/// stylized outputs plus report.json. Returns 0 on success (short selections
/// warn but still succeed), 1 on missing inputs, 2 when writing fails.
int cmd_stylize(const StylizeArgs& args, std::ostream& out, std::ostream& err);

/// Direct one-to-one transfer between an input and a style image.
int cmd_transfer(const TransferArgs& args, std::ostream& out,
                 std::ostream& err);

/// Prints the merged style ranking for the input's nearest clusters.
int cmd_rank(const RankArgs& args, std::ostream& out, std::ostream& err);

}  // namespace autostyle
