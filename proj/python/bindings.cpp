#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "autostyle/catalog.hpp"
#include "autostyle/cli.hpp"
#include "autostyle/error.hpp"
#include "autostyle/imgio.hpp"
#include "autostyle/selection.hpp"
#include "autostyle/similarity.hpp"
#include "autostyle/stylestats.hpp"
#include "autostyle/transfer.hpp"

namespace py = pybind11;
using namespace autostyle;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

RgbImage to_image(const FloatArray& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 3)
    throw py::value_error("expected an (H, W, 3) array");
  const int h = int(arr.shape(0));
  const int w = int(arr.shape(1));
  RgbImage img(w, h);
  const float* src = arr.data();
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    img.r[i] = src[3 * i + 0];
    img.g[i] = src[3 * i + 1];
    img.b[i] = src[3 * i + 2];
  }
  return img;
}

py::array_t<float> from_image(const RgbImage& img) {
  py::array_t<float> arr({img.height, img.width, 3});
  float* dst = arr.mutable_data();
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    dst[3 * i + 0] = img.r[i];
    dst[3 * i + 1] = img.g[i];
    dst[3 * i + 2] = img.b[i];
  }
  return arr;
}

std::vector<FaceRegion> to_faces(
    const std::vector<std::tuple<int, int, int>>& faces) {
  std::vector<FaceRegion> out;
  out.reserve(faces.size());
  for (const auto& [cx, cy, r] : faces) out.push_back({cx, cy, r});
  return out;
}

TransferConfig make_transfer_config(double gamma, bool gamma_compress,
                                    double clip, double lambda_r, double tau,
                                    bool literal_tau) {
  TransferConfig cfg;
  cfg.gamma = gamma;
  cfg.gamma_compress = gamma_compress;
  cfg.clip_fraction = clip;
  cfg.lambda_r = lambda_r;
  cfg.tau = tau;
  cfg.literal_tau_rule = literal_tau;
  return cfg;
}

// wrapper keeping the loaded index plus cheap accessors for python callers
struct PyIndex {
  StyleIndex index;

  uint32_t k() const { return index.model.k; }
  uint32_t dim() const { return index.model.dim; }
  size_t n_styles() const { return index.styles.size(); }
  std::string fingerprint() const { return index.fingerprint; }

  const StyleEntry& entry(uint32_t style_id) const {
    for (const StyleEntry& e : index.styles)
      if (e.style_id == style_id) return e;
    throw Error(Errc::missing_entry,
                "no style with id " + std::to_string(style_id));
  }

  std::vector<std::pair<uint32_t, float>> select(const FloatArray& image,
                                                 uint32_t n_clusters,
                                                 double threshold,
                                                 uint32_t k_outputs) const {
    SelectionConfig cfg;
    cfg.n_clusters = n_clusters;
    cfg.diversity_threshold = threshold;
    cfg.k_outputs = k_outputs;
    const RgbImage img = to_image(image);
    const auto picks = select_styles(
        img, index,
        [](const RgbImage& i) { return builtin_semantic_feature(i); }, cfg);
    std::vector<std::pair<uint32_t, float>> out;
    for (const SelectedStyle& p : picks)
      out.emplace_back(p.entry.style_id, p.score);
    return out;
  }
};

}  // namespace

PYBIND11_MODULE(_autostyle, m) {
  m.doc() = "Photo stylization: Gaussian chroma transfer, parametric tone "
            "curves, style indexing and diverse selection";

  py::register_exception<Error>(m, "AutostyleError");

  py::class_<StyleDescriptor>(m, "Descriptor")
      .def_property_readonly("chroma_mean",
                             [](const StyleDescriptor& d) {
                               py::array_t<double> a(2);
                               a.mutable_data()[0] = d.chroma.mean.x;
                               a.mutable_data()[1] = d.chroma.mean.y;
                               return a;
                             })
      .def_property_readonly("chroma_cov",
                             [](const StyleDescriptor& d) {
                               py::array_t<double> a({2, 2});
                               double* p = a.mutable_data();
                               p[0] = d.chroma.cov.m00;
                               p[1] = d.chroma.cov.m01;
                               p[2] = d.chroma.cov.m10;
                               p[3] = d.chroma.cov.m11;
                               return a;
                             })
      .def_property_readonly("luma",
                             [](const StyleDescriptor& d) {
                               py::array_t<double> a(kLumaFeatureSize);
                               std::memcpy(a.mutable_data(), d.luma.q.data(),
                                           sizeof d.luma.q);
                               return a;
                             })
      .def("__repr__", [](const StyleDescriptor& d) {
        std::ostringstream s;
        s << "Descriptor(chroma_mean=(" << d.chroma.mean.x << ", "
          << d.chroma.mean.y << "))";
        return s.str();
      });

  m.def(
      "describe",
      [](const FloatArray& image, double gamma, bool gamma_compress,
         double clip, double lambda_r, double tau, bool literal_tau) {
        const TransferConfig cfg = make_transfer_config(
            gamma, gamma_compress, clip, lambda_r, tau, literal_tau);
        const PreparedInput prep = prepare_input(to_image(image), cfg);
        return StyleDescriptor{prep.chroma, prep.luma};
      },
      py::arg("image"), py::kw_only(), py::arg("gamma") = 2.2,
      py::arg("gamma_compress") = true, py::arg("clip") = 0.005,
      py::arg("lambda_r") = 7.5, py::arg("tau") = 0.4,
      py::arg("literal_tau") = false,
      "Chroma Gaussian + 32 luminance percentiles of a preprocessed image "
      "((H, W, 3) floats in [0, 1])");

  m.def(
      "transfer",
      [](const FloatArray& image, const StyleDescriptor& style,
         const std::vector<std::tuple<int, int, int>>& faces, double gamma,
         bool gamma_compress, double clip, double lambda_r, double tau,
         bool literal_tau) {
        const TransferConfig cfg = make_transfer_config(
            gamma, gamma_compress, clip, lambda_r, tau, literal_tau);
        return from_image(
            transfer_style(to_image(image), style, to_faces(faces), cfg));
      },
      py::arg("image"), py::arg("style"),
      py::arg("faces") = std::vector<std::tuple<int, int, int>>{},
      py::kw_only(), py::arg("gamma") = 2.2, py::arg("gamma_compress") = true,
      py::arg("clip") = 0.005, py::arg("lambda_r") = 7.5, py::arg("tau") = 0.4,
      py::arg("literal_tau") = false,
      "Apply a style descriptor to an image; faces are (cx, cy, r) circles "
      "in pixel coordinates");

  m.def(
      "transfer_image",
      [](const FloatArray& image, const FloatArray& style,
         const std::vector<std::tuple<int, int, int>>& faces, double gamma,
         bool gamma_compress, double clip, double lambda_r, double tau,
         bool literal_tau) {
        const TransferConfig cfg = make_transfer_config(
            gamma, gamma_compress, clip, lambda_r, tau, literal_tau);
        const PreparedInput style_prep = prepare_input(to_image(style), cfg);
        const StyleDescriptor desc{style_prep.chroma, style_prep.luma};
        return from_image(
            transfer_style(to_image(image), desc, to_faces(faces), cfg));
      },
      py::arg("image"), py::arg("style"),
      py::arg("faces") = std::vector<std::tuple<int, int, int>>{},
      py::kw_only(), py::arg("gamma") = 2.2, py::arg("gamma_compress") = true,
      py::arg("clip") = 0.005, py::arg("lambda_r") = 7.5, py::arg("tau") = 0.4,
      py::arg("literal_tau") = false,
      "Direct image-to-image transfer: the style image is reduced to its "
      "descriptor first");

  m.def(
      "semantic_feature",
      [](const FloatArray& image) {
        const SemanticFeature f = builtin_semantic_feature(to_image(image));
        py::array_t<float> a(py::ssize_t(f.v.size()));
        std::memcpy(a.mutable_data(), f.v.data(), f.v.size() * sizeof(float));
        return a;
      },
      py::arg("image"),
      "512-d L2-normalized content embedding (spatial Lab means + color "
      "histograms)");

  m.def(
      "frechet",
      [](const StyleDescriptor& a, const StyleDescriptor& b) {
        return frechet(a.chroma, b.chroma);
      },
      py::arg("a"), py::arg("b"),
      "Wasserstein-2 distance between the chroma Gaussians");

  m.def(
      "hellinger",
      [](const StyleDescriptor& a, const StyleDescriptor& b, double epsilon) {
        return hellinger(a.chroma, b.chroma, epsilon);
      },
      py::arg("a"), py::arg("b"), py::arg("epsilon") = 1.0,
      "Overlap distance between the chroma Gaussians, in [0, 1]");

  m.def(
      "style_similarity",
      [](const StyleDescriptor& a, const StyleDescriptor& b, double lambda_l,
         double lambda_c, double epsilon) {
        SimilarityParams p;
        p.lambda_l = lambda_l;
        p.lambda_c = lambda_c;
        p.epsilon = epsilon;
        return style_similarity(a, b, p);
      },
      py::arg("a"), py::arg("b"), py::kw_only(),
      py::arg("lambda_l") = 0.005, py::arg("lambda_c") = 0.05,
      py::arg("epsilon") = 1.0,
      "Product of luminance and chrominance kernels, in (0, 1]");

  py::class_<PyIndex>(m, "Index")
      .def_static(
          "load",
          [](const std::string& dir) { return PyIndex{load_index(dir)}; },
          py::arg("dir"), "Load a style index directory")
      .def_property_readonly("k", &PyIndex::k)
      .def_property_readonly("dim", &PyIndex::dim)
      .def_property_readonly("n_styles", &PyIndex::n_styles)
      .def_property_readonly("fingerprint", &PyIndex::fingerprint)
      .def(
          "descriptor",
          [](const PyIndex& self, uint32_t style_id) {
            return self.entry(style_id).descriptor;
          },
          py::arg("style_id"))
      .def(
          "source_path",
          [](const PyIndex& self, uint32_t style_id) {
            return self.entry(style_id).source_path;
          },
          py::arg("style_id"))
      .def("select", &PyIndex::select, py::arg("image"), py::kw_only(),
           py::arg("n_clusters") = 3, py::arg("threshold") = 7.5,
           py::arg("k_outputs") = 5,
           "Rank styles for an image and sample a diverse subset; returns "
           "[(style_id, score), ...]")
      .def("__repr__", [](const PyIndex& self) {
        std::ostringstream s;
        s << "Index(k=" << self.k() << ", n_styles=" << self.n_styles() << ")";
        return s.str();
      });

  m.def(
      "build_index",
      [](const std::string& photos_dir, const std::string& styles_dir,
         const std::string& out_dir, uint32_t k, uint64_t seed,
         const std::string& features_dir) {
        BuildIndexArgs args;
        args.photos_dir = photos_dir;
        args.styles_dir = styles_dir;
        args.out_dir = out_dir;
        args.features_dir = features_dir;
        args.config.kmeans_k = k;
        args.config.seed = seed;
        std::ostringstream out, err;
        if (cmd_build_index(args, out, err) != 0)
          throw std::runtime_error(err.str());
        return out.str();
      },
      py::arg("photos_dir"), py::arg("styles_dir"), py::arg("out_dir"),
      py::kw_only(), py::arg("k") = 8, py::arg("seed") = 0,
      py::arg("features_dir") = std::string(),
      "Cluster a photo collection, rank styles per cluster, and persist the "
      "index; returns the human-readable summary");

  m.def(
      "read_image",
      [](const std::string& path) { return from_image(decode_image(path)); },
      py::arg("path"), "Decode a PNG/JPEG file to an (H, W, 3) float array");

  m.def(
      "write_image",
      [](const std::string& path, const FloatArray& image, int jpeg_quality) {
        ImageFormat fmt = ImageFormat::png;
        if (path.size() >= 4) {
          std::string ext = path.substr(path.find_last_of('.') + 1);
          for (char& c : ext) c = char(std::tolower(c));
          if (ext == "jpg" || ext == "jpeg") fmt = ImageFormat::jpeg;
        }
        encode_image(to_image(image), path, fmt, jpeg_quality);
      },
      py::arg("path"), py::arg("image"), py::kw_only(),
      py::arg("jpeg_quality") = 90,
      "Encode an (H, W, 3) float array as PNG or JPEG (by extension)");

  m.attr("__version__") = "0.1.0";
}
