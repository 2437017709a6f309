#include "autostyle/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "autostyle/catalog.hpp"
#include "autostyle/error.hpp"

namespace autostyle {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_ms(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration<double, std::milli>(to - from).count();
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::invalid_config,
                "configuration key '" + key + "': cannot parse '" + value +
                    "' as a number");
  }
}

uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const uint64_t v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-')
      throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::invalid_config,
                "configuration key '" + key + "': cannot parse '" + value +
                    "' as a nonnegative integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on")
    return true;
  if (value == "false" || value == "0" || value == "no" || value == "off")
    return false;
  throw Error(Errc::invalid_config,
              "configuration key '" + key + "': cannot parse '" + value +
                  "' as a boolean");
}

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// sorted for run-to-run determinism; directory iteration order is not
std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (it->is_regular_file() && has_image_extension(it->path()))
      files.push_back(it->path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.generic_string() < b.generic_string();
            });
  return files;
}

StyleDescriptor descriptor_of_image(const RgbImage& img,
                                    const TransferConfig& cfg) {
  const PreparedInput prep = prepare_input(img, cfg);
  return {prep.chroma, prep.luma};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// everything that changes index content participates in the fingerprint
std::string canonical_params(const CliConfig& cfg, const std::string& feature_kind,
                             uint32_t dim) {
  std::string s = "v1;feature=" + feature_kind + ";dim=" + std::to_string(dim) +
                  ";k=" + std::to_string(cfg.kmeans_k) +
                  ";seed=" + std::to_string(cfg.seed) +
                  ";gamma=" + format_double(cfg.transfer.effective_gamma()) +
                  ";clip=" + format_double(cfg.transfer.clip_fraction) +
                  ";lambda_l=" + format_double(cfg.similarity.lambda_l) +
                  ";lambda_c=" + format_double(cfg.similarity.lambda_c) +
                  ";epsilon=" + format_double(cfg.similarity.epsilon) +
                  ";normalize_luma=" +
                  (cfg.similarity.normalize_luma_distance ? "1" : "0");
  return s;
}

int report_config_errors(const CliConfig& cfg, std::ostream& err) {
  const std::vector<std::string> violations = validate_config(cfg);
  for (const std::string& v : violations) err << "config error: " << v << "\n";
  return violations.empty() ? 0 : 1;
}

ImageFormat format_for_path(const fs::path& p, ImageFormat fallback) {
  std::string ext = p.extension().string();
  if (!ext.empty() && ext.front() == '.') ext.erase(ext.begin());
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  try {
    return parse_image_format(ext);
  } catch (const Error&) {
    return fallback;
  }
}

}  // namespace

void apply_config_value(CliConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "gamma")
    cfg.transfer.gamma = parse_double(key, value);
  else if (key == "gamma_compress")
    cfg.transfer.gamma_compress = parse_bool(key, value);
  else if (key == "clip")
    cfg.transfer.clip_fraction = parse_double(key, value);
  else if (key == "lambda_r")
    cfg.transfer.lambda_r = parse_double(key, value);
  else if (key == "tau")
    cfg.transfer.tau = parse_double(key, value);
  else if (key == "literal_tau")
    cfg.transfer.literal_tau_rule = parse_bool(key, value);
  else if (key == "l_th")
    cfg.transfer.face.l_th = parse_double(key, value);
  else if (key == "gamma_th")
    cfg.transfer.face.gamma_th = parse_double(key, value);
  else if (key == "alpha_r")
    cfg.transfer.face.alpha_r = parse_double(key, value);
  else if (key == "alpha_c")
    cfg.transfer.face.alpha_c = parse_double(key, value);
  else if (key == "lambda_l")
    cfg.similarity.lambda_l = parse_double(key, value);
  else if (key == "lambda_c")
    cfg.similarity.lambda_c = parse_double(key, value);
  else if (key == "epsilon")
    cfg.similarity.epsilon = parse_double(key, value);
  else if (key == "normalize_luma")
    cfg.similarity.normalize_luma_distance = parse_bool(key, value);
  else if (key == "n_clusters")
    cfg.selection.n_clusters = uint32_t(parse_unsigned(key, value));
  else if (key == "threshold")
    cfg.selection.diversity_threshold = parse_double(key, value);
  else if (key == "k_outputs")
    cfg.selection.k_outputs = uint32_t(parse_unsigned(key, value));
  else if (key == "k")
    cfg.kmeans_k = uint32_t(parse_unsigned(key, value));
  else if (key == "seed")
    cfg.seed = parse_unsigned(key, value);
  else if (key == "format")
    cfg.out_format = parse_image_format(value);
  else if (key == "jpeg_quality")
    cfg.jpeg_quality = int(parse_unsigned(key, value));
  else
    throw Error(Errc::invalid_config, "unknown configuration key '" + key + "'");
}

void load_config_file(CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    if (!fs::exists(path))
      throw Error(Errc::file_not_found, path + ": no such config file");
    throw Error(Errc::io_error, path + ": cannot open config file");
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(),
               line.end());
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::invalid_config,
                  path + ":" + std::to_string(lineno) +
                      ": expected key=value, got '" + line + "'");
    const auto trim = [&](std::string s) {
      s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
      s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
      return s;
    };
    apply_config_value(cfg, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
}

std::vector<std::string> validate_config(const CliConfig& cfg) {
  std::vector<std::string> bad;
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  need(std::isfinite(cfg.transfer.gamma) && cfg.transfer.gamma > 0.0,
       "gamma must be a positive number");
  need(cfg.transfer.clip_fraction >= 0.0 && cfg.transfer.clip_fraction < 0.5,
       "clip must lie in [0, 0.5)");
  need(std::isfinite(cfg.transfer.lambda_r) && cfg.transfer.lambda_r > 0.0,
       "lambda_r must be positive");
  need(cfg.transfer.tau > 0.0 && cfg.transfer.tau <= 1.0,
       "tau must lie in (0, 1]");
  need(cfg.transfer.face.l_th >= 0.0 && cfg.transfer.face.l_th <= 1.0,
       "l_th must lie in [0, 1]");
  need(cfg.transfer.face.gamma_th > 0.0 && cfg.transfer.face.gamma_th <= 1.0,
       "gamma_th must lie in (0, 1]");
  need(cfg.transfer.face.alpha_r >= 0.0, "alpha_r must be nonnegative");
  need(cfg.transfer.face.alpha_c >= 0.0, "alpha_c must be nonnegative");
  need(std::isfinite(cfg.similarity.lambda_l) && cfg.similarity.lambda_l > 0.0,
       "lambda_l must be positive");
  need(std::isfinite(cfg.similarity.lambda_c) && cfg.similarity.lambda_c > 0.0,
       "lambda_c must be positive");
  need(cfg.similarity.epsilon >= 0.0, "epsilon must be nonnegative");
  need(cfg.selection.n_clusters >= 1, "n_clusters must be at least 1");
  need(std::isfinite(cfg.selection.diversity_threshold) &&
           cfg.selection.diversity_threshold >= 0.0,
       "threshold must be a nonnegative number");
  need(cfg.selection.k_outputs >= 1, "k_outputs must be at least 1");
  need(cfg.kmeans_k >= 1, "k must be at least 1");
  need(cfg.jpeg_quality >= 1 && cfg.jpeg_quality <= 100,
       "jpeg_quality must lie in [1, 100]");
  return bad;
}

std::vector<FaceRegion> parse_face_regions(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    if (!fs::exists(path))
      throw Error(Errc::file_not_found, path + ": no such face sidecar");
    throw Error(Errc::io_error, path + ": cannot open face sidecar");
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::invalid_format, path + ": " + std::string(e.what()));
  }
  if (!root.is_array())
    throw Error(Errc::invalid_format, path + ": expected a JSON array of faces");
  std::vector<FaceRegion> faces;
  for (const json& f : root) {
    if (!f.is_object() || !f.contains("cx") || !f.contains("cy") ||
        !f.contains("r") || !f["cx"].is_number_integer() ||
        !f["cy"].is_number_integer() || !f["r"].is_number_integer())
      throw Error(Errc::invalid_format,
                  path + ": each face needs integer cx, cy, r");
    faces.push_back(
        {f["cx"].get<int>(), f["cy"].get<int>(), f["r"].get<int>()});
  }
  return faces;
}

int cmd_build_index(const BuildIndexArgs& args, std::ostream& out,
                    std::ostream& err) {
  if (report_config_errors(args.config, err)) return 1;

  const std::vector<fs::path> photo_files = list_images(args.photos_dir);
  const std::vector<fs::path> style_files = list_images(args.styles_dir);
  if (photo_files.empty()) {
    err << "error: no photographs found in '" << args.photos_dir << "'\n";
    return 1;
  }
  if (style_files.empty()) {
    err << "error: no style images found in '" << args.styles_dir << "'\n";
    return 1;
  }

  // optional external features: one manifest maps photo paths to ids and
  // ids to feature files
  std::map<uint32_t, SemanticFeature> external;
  std::map<std::string, uint32_t> path_to_id;
  const bool use_external = !args.features_dir.empty();
  if (use_external) {
    const fs::path manifest_path = fs::path(args.features_dir) / "features.json";
    try {
      external = load_external_features(args.features_dir, manifest_path.string());
      std::ifstream in(manifest_path);
      const json manifest = json::parse(in);
      if (manifest.contains("images"))
        for (const auto& [rel, id] : manifest.at("images").items())
          path_to_id[rel] = id.get<uint32_t>();
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const json::exception& e) {
      err << "error: " << manifest_path.string() << ": " << e.what() << "\n";
      return 1;
    }
  }

  std::vector<std::pair<SemanticFeature, StyleDescriptor>> collection;
  std::vector<SemanticFeature> features;
  size_t photos_skipped = 0;
  for (const fs::path& file : photo_files) {
    std::optional<SemanticFeature> feature;
    if (use_external) {
      const std::string rel =
          fs::relative(file, args.photos_dir).generic_string();
      const auto id_it = path_to_id.find(rel);
      if (id_it == path_to_id.end()) {
        err << "warning: skipping '" << rel << "': not listed in features.json\n";
        ++photos_skipped;
        continue;
      }
      const auto feat_it = external.find(id_it->second);
      if (feat_it == external.end()) {
        err << "warning: skipping '" << rel << "': no feature for id "
            << id_it->second << "\n";
        ++photos_skipped;
        continue;
      }
      feature = feat_it->second;
    }
    try {
      const RgbImage img = decode_image(file.string());
      if (!feature) feature = builtin_semantic_feature(img);
      collection.emplace_back(*feature,
                              descriptor_of_image(img, args.config.transfer));
      features.push_back(std::move(*feature));
    } catch (const Error& e) {
      err << "warning: skipping '" << file.string() << "': " << e.what() << "\n";
      ++photos_skipped;
    }
  }
  if (collection.empty()) {
    err << "error: no usable photographs in '" << args.photos_dir << "'\n";
    return 1;
  }
  if (collection.size() < args.config.kmeans_k) {
    err << "error: k=" << args.config.kmeans_k << " exceeds the "
        << collection.size() << " usable photographs\n";
    return 1;
  }

  std::vector<StyleEntry> styles;
  size_t styles_skipped = 0;
  for (const fs::path& file : style_files) {
    try {
      const RgbImage img = decode_image(file.string());
      StyleEntry entry;
      entry.style_id = uint32_t(styles.size());
      entry.descriptor = descriptor_of_image(img, args.config.transfer);
      entry.source_path = fs::relative(file, args.styles_dir).generic_string();
      styles.push_back(std::move(entry));
    } catch (const Error& e) {
      err << "warning: skipping style '" << file.string() << "': " << e.what()
          << "\n";
      ++styles_skipped;
    }
  }
  if (styles.empty()) {
    err << "error: no usable style images in '" << args.styles_dir << "'\n";
    return 1;
  }

  StyleIndex index;
  index.model =
      kmeans_cluster(features, args.config.kmeans_k, args.config.seed);
  index.rankings = build_ranking(index.model, collection, styles,
                                 args.config.similarity);
  index.styles = std::move(styles);
  index.fingerprint = fingerprint_string(canonical_params(
      args.config, use_external ? "external" : "builtin", index.model.dim));

  try {
    save_index(index, args.out_dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<size_t> occupancy(index.model.k, 0);
  for (const SemanticFeature& f : features)
    ++occupancy[assign_cluster(f, index.model)];

  out << "photographs: " << collection.size() << " (" << photos_skipped
      << " skipped)\n";
  out << "styles: " << index.styles.size() << " (" << styles_skipped
      << " skipped)\n";
  out << "k: " << index.model.k << "\n";
  out << "occupancy:";
  for (size_t c : occupancy) out << " " << c;
  out << "\n";
  out << "index written to '" << args.out_dir << "'\n";
  return 0;
}

int cmd_stylize(const StylizeArgs& args, std::ostream& out, std::ostream& err) {
  if (report_config_errors(args.config, err)) return 1;

  StyleIndex index;
  RgbImage input;
  std::vector<FaceRegion> faces;
  try {
    index = load_index(args.index_dir);
    input = decode_image(args.input_path);
    if (!args.faces_path.empty()) faces = parse_face_regions(args.faces_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const auto t_feature0 = Clock::now();
  const SemanticFeature feature = builtin_semantic_feature(input);
  const auto t_feature1 = Clock::now();

  std::vector<SelectedStyle> selected;
  const auto t_select0 = Clock::now();
  try {
    selected = select_styles(
        input, index, [&](const RgbImage&) { return feature; },
        args.config.selection);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  const auto t_select1 = Clock::now();

  struct Output {
    uint32_t style_id;
    float score;
    ToneCurveParams tone;
    std::string filename;
    RgbImage image;
  };
  std::vector<Output> outputs;

  const auto t_transfer0 = Clock::now();
  const PreparedInput prep = prepare_input(input, args.config.transfer);
  const std::string stem = fs::path(args.input_path).stem().string();
  const char* ext = args.config.out_format == ImageFormat::png ? "png" : "jpg";
  for (size_t rank = 0; rank < selected.size(); ++rank) {
    const SelectedStyle& pick = selected[rank];
    TransferDetails details;
    RgbImage img = transfer_prepared(prep, pick.entry.descriptor, faces,
                                     args.config.transfer, &details);
    outputs.push_back({pick.entry.style_id, pick.score, details.tone,
                       stem + "_style" + std::to_string(rank + 1) + "_" +
                           std::to_string(pick.entry.style_id) + "." + ext,
                       std::move(img)});
  }
  const auto t_transfer1 = Clock::now();

  std::vector<std::vector<double>> pairwise(
      selected.size(), std::vector<double>(selected.size(), 0.0));
  for (size_t i = 0; i < selected.size(); ++i)
    for (size_t j = i + 1; j < selected.size(); ++j)
      pairwise[i][j] = pairwise[j][i] =
          frechet(selected[i].entry.descriptor.chroma,
                  selected[j].entry.descriptor.chroma);

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);
  if (ec) {
    err << "error: cannot create '" << args.out_dir << "': " << ec.message()
        << "\n";
    return 2;
  }
  try {
    for (const Output& o : outputs)
      encode_image(o.image, (fs::path(args.out_dir) / o.filename).string(),
                   args.config.out_format, args.config.jpeg_quality);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  json report;
  report["input"] = args.input_path;
  report["selected"] = json::array();
  for (const Output& o : outputs) {
    json entry;
    entry["style_id"] = o.style_id;
    entry["score"] = o.score;
    entry["m"] = o.tone.m;
    entry["delta"] = o.tone.delta;
    entry["output"] = o.filename;
    report["selected"].push_back(std::move(entry));
  }
  report["pairwise_frechet"] = pairwise;
  report["timings_ms"]["feature"] = elapsed_ms(t_feature0, t_feature1);
  report["timings_ms"]["select"] = elapsed_ms(t_select0, t_select1);
  report["timings_ms"]["transfer_total"] = elapsed_ms(t_transfer0, t_transfer1);
  if (selected.size() < args.config.selection.k_outputs) {
    const std::string warning =
        "only " + std::to_string(selected.size()) + " of " +
        std::to_string(args.config.selection.k_outputs) +
        " requested styles are mutually diverse at threshold " +
        format_double(args.config.selection.diversity_threshold);
    report["warning"] = warning;
    err << "warning: " << warning << "\n";
  }

  const fs::path report_path = fs::path(args.out_dir) / "report.json";
  std::ofstream report_out(report_path, std::ios::trunc);
  if (!report_out) {
    err << "error: cannot write '" << report_path.string() << "'\n";
    return 2;
  }
  report_out << report.dump(2) << "\n";

  for (const Output& o : outputs)
    out << o.filename << " (style " << o.style_id << ", score " << o.score
        << ")\n";
  out << "report: " << report_path.string() << "\n";
  return 0;
}

int cmd_transfer(const TransferArgs& args, std::ostream& out,
                 std::ostream& err) {
  if (report_config_errors(args.config, err)) return 1;

  try {
    const RgbImage input = decode_image(args.input_path);
    const RgbImage style_img = decode_image(args.style_path);
    std::vector<FaceRegion> faces;
    if (!args.faces_path.empty()) faces = parse_face_regions(args.faces_path);

    const StyleDescriptor style =
        descriptor_of_image(style_img, args.config.transfer);
    TransferDetails details;
    const RgbImage result =
        transfer_style(input, style, faces, args.config.transfer, &details);

    encode_image(result, args.out_path,
                 format_for_path(args.out_path, args.config.out_format),
                 args.config.jpeg_quality);

    const Mat2& T = details.chroma_map.T;
    out << "tone: m=" << details.tone.m << " delta=" << details.tone.delta
        << "\n";
    out << "chroma T: [[" << T.m00 << ", " << T.m01 << "], [" << T.m10 << ", "
        << T.m11 << "]]\n";
    out << "chroma shift: (" << details.chroma_map.mu_in.x << ", "
        << details.chroma_map.mu_in.y << ") -> ("
        << details.chroma_map.mu_style.x << ", "
        << details.chroma_map.mu_style.y << ")\n";
    out << "written '" << args.out_path << "'\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_rank(const RankArgs& args, std::ostream& out, std::ostream& err) {
  if (report_config_errors(args.config, err)) return 1;
  if (args.top < 1) {
    err << "config error: top must be at least 1\n";
    return 1;
  }

  try {
    const StyleIndex index = load_index(args.index_dir);
    const RgbImage input = decode_image(args.input_path);
    const SemanticFeature feature = builtin_semantic_feature(input);
    const std::vector<uint32_t> clusters = nearest_clusters(
        feature, index.model, args.config.selection.n_clusters);
    const std::vector<RankedStyle> merged =
        merge_rankings(index.rankings, clusters);
    const size_t top = std::min<size_t>(args.top, merged.size());

    if (args.json) {
      json doc;
      doc["input"] = args.input_path;
      doc["clusters"] = clusters;
      doc["ranking"] = json::array();
      for (size_t i = 0; i < top; ++i) {
        json row;
        row["style_id"] = merged[i].style_id;
        row["score"] = merged[i].score;
        doc["ranking"].push_back(std::move(row));
      }
      out << doc.dump(2) << "\n";
    } else {
      out << "clusters:";
      for (uint32_t c : clusters) out << " " << c;
      out << "\n";
      for (size_t i = 0; i < top; ++i)
        out << (i + 1) << ". style " << merged[i].style_id << " score "
            << merged[i].score << "\n";
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace autostyle
