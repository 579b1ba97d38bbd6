#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scroll/blend.hpp"
#include "scroll/denoiser.hpp"
#include "scroll/errors.hpp"
#include "scroll/fusion.hpp"
#include "scroll/image.hpp"
#include "scroll/layout_predict.hpp"
#include "scroll/metrics.hpp"
#include "scroll/run.hpp"
#include "scroll/tensor_io.hpp"

namespace py = pybind11;
using namespace scroll;

namespace {

LatentCanvas canvas_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3) throw DimensionError("expected an (H, W, C) float32 array");
    LatentCanvas canvas(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                        static_cast<int>(arr.shape(2)));
    std::copy(arr.data(), arr.data() + arr.size(), canvas.data.begin());
    return canvas;
}

py::array_t<float> canvas_to_array(const LatentCanvas& canvas) {
    py::array_t<float> arr({canvas.height, canvas.width, canvas.channels});
    std::copy(canvas.data.begin(), canvas.data.end(), arr.mutable_data());
    return arr;
}

ImageF imagef_from_array(const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3) throw DimensionError("expected an (H, W, C) float32 array");
    ImageF img(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
               static_cast<int>(arr.shape(2)));
    std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
    return img;
}

Layout layout_from_text(const std::string& text) {
    return layout_from_json(nlohmann::json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wide-canvas latent generation: sliding-window fusion, layered "
              "prompt scheduling, toy denoiser/embedder, and metrics.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<PromptParseError>(m, "PromptParseError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<WindowRect>(m, "WindowRect")
        .def(py::init<int, int, int, int>(), py::arg("top"), py::arg("left"),
             py::arg("height"), py::arg("width"))
        .def_readwrite("top", &WindowRect::top)
        .def_readwrite("left", &WindowRect::left)
        .def_readwrite("height", &WindowRect::height)
        .def_readwrite("width", &WindowRect::width)
        .def("__repr__", [](const WindowRect& r) {
            return "WindowRect(top=" + std::to_string(r.top) +
                   ", left=" + std::to_string(r.left) +
                   ", height=" + std::to_string(r.height) +
                   ", width=" + std::to_string(r.width) + ")";
        });

    m.def("region_of",
          [](double x0, double y0, double x1, double y1, int height, int width) {
              return region_of({x0, y0, x1, y1}, {height, width});
          },
          py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"), py::arg("height"),
          py::arg("width"), "Fractional box -> latent rectangle.");

    m.def("plan_windows",
          [](int canvas_h, int canvas_w, int window_h, int window_w, int stride) {
              const WindowPlan plan =
                  plan_windows({canvas_h, canvas_w}, {window_h, window_w}, stride);
              std::vector<std::tuple<int, int, int, int>> out;
              for (const auto& w : plan.windows)
                  out.emplace_back(w.top, w.left, w.height, w.width);
              return out;
          },
          py::arg("canvas_height"), py::arg("canvas_width"), py::arg("window_height"),
          py::arg("window_width"), py::arg("stride"),
          "Sliding-window cover with the edge-flush rule.");

    m.def("edge_matrix",
          [](const std::string& kind, int height, int width, int margin, double sigma,
             double floor) {
              EdgeProfile profile{edge_kind_from_string(kind), margin, sigma, floor};
              const auto w = edge_matrix(profile, {height, width});
              py::array_t<double> arr({height, width});
              std::copy(w.begin(), w.end(), arr.mutable_data());
              return arr;
          },
          py::arg("kind"), py::arg("height"), py::arg("width"), py::arg("margin") = 16,
          py::arg("sigma") = 16.0, py::arg("floor") = 1e-4);

    m.def("fuse_step",
          [](int canvas_h, int canvas_w,
             const std::vector<std::tuple<int, int, int, int>>& windows,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& edge,
             const std::vector<py::array_t<float, py::array::c_style | py::array::forcecast>>& tiles) {
              if (edge.ndim() != 2) throw DimensionError("edge must be a 2-D array");
              const WindowSize window{static_cast<int>(edge.shape(0)),
                                      static_cast<int>(edge.shape(1))};
              WindowPlan plan;
              plan.stride = 1;
              for (const auto& [top, left, h, w] : windows)
                  plan.windows.push_back({top, left, h, w});
              if (tiles.empty()) throw DimensionError("need one tile per window");
              const int channels = static_cast<int>(tiles.front().shape(2));
              std::vector<std::vector<float>> tile_data;
              for (const auto& t : tiles) {
                  if (t.ndim() != 3) throw DimensionError("tiles must be (H, W, C)");
                  tile_data.emplace_back(t.data(), t.data() + t.size());
              }
              const std::vector<double> edge_grid(edge.data(), edge.data() + edge.size());
              const FuseResult fused =
                  fuse_step(LatentCanvas(canvas_h, canvas_w, channels), plan, edge_grid,
                            window, tile_data);
              return canvas_to_array(fused.canvas);
          },
          py::arg("canvas_height"), py::arg("canvas_width"), py::arg("windows"),
          py::arg("edge"), py::arg("tiles"),
          "Edge-weighted per-cell average of denoised window tiles.");

    m.def("parse_weighted_prompt",
          [](const std::string& text) {
              std::vector<std::pair<std::string, double>> out;
              for (const auto& term : parse_weighted_prompt(text))
                  out.emplace_back(term.text, term.weight);
              return out;
          },
          py::arg("text"), "Prompt operator syntax -> [(segment, weight)].");

    m.def("stride_for_step",
          [](const std::string& schedule, int t, int total) {
              return stride_for_step(parse_stride_schedule(schedule), t, total);
          },
          py::arg("schedule"), py::arg("t"), py::arg("total"));

    py::class_<Layout>(m, "Layout")
        .def_static("from_json", &layout_from_text, py::arg("text"))
        .def_static("load", &load_layout, py::arg("path"))
        .def("to_json", [](const Layout& l) { return layout_to_string(l); })
        .def("save", [](const Layout& l, const std::string& path) { save_layout(path, l); })
        .def("repair", [](const Layout& l) { return repair_layout(l); })
        .def("validate", [](const Layout& l) { validate_layout(l); })
        .def_property_readonly("scene_count",
                               [](const Layout& l) { return l.scenes.size(); })
        .def_property_readonly("scene_prompts", [](const Layout& l) {
            std::vector<std::string> out;
            for (const auto& s : l.scenes) out.push_back(s.prompt);
            return out;
        });

    m.def("build_prompt",
          [](const std::string& story, double aspect, int max_scenes) {
              StoryRequest req;
              req.story = story;
              req.aspect = aspect;
              req.max_scenes = max_scenes;
              return build_prompt(req);
          },
          py::arg("story"), py::arg("aspect") = 4.0, py::arg("max_scenes") = 6);

    m.def("predict_layout_fixture",
          [](const std::string& story, const std::string& fixture_path) {
              StoryRequest req;
              req.story = story;
              req.mode = LayoutMode::fixture;
              req.fixture_path = fixture_path;
              return predict_layout(req, nullptr).layout;
          },
          py::arg("story"), py::arg("fixture_path"),
          "Offline layout prediction from a fixture file.");

    py::class_<ToyEmbedder>(m, "ToyEmbedder")
        .def(py::init<>())
        .def("embed_text",
             [](const ToyEmbedder& e, const std::string& text) { return e.embed_text(text).v; })
        .def("embed_image",
             [](const ToyEmbedder& e, const py::array_t<float, py::array::c_style | py::array::forcecast>& img) {
                 return e.embed_image(imagef_from_array(img)).v;
             })
        .def_property_readonly("dim", [](const ToyEmbedder& e) { return e.dim(); });

    py::class_<ToyDenoiser>(m, "ToyDenoiser")
        .def(py::init<>())
        .def("target_for",
             [](const ToyDenoiser& d, const std::vector<double>& embedding) {
                 const auto t = d.target_for(Embedding{embedding});
                 const WindowSize w = d.window();
                 py::array_t<float> arr({w.height, w.width, d.channels()});
                 std::copy(t.begin(), t.end(), arr.mutable_data());
                 return arr;
             })
        .def("step",
             [](const ToyDenoiser& d, const py::array_t<float, py::array::c_style | py::array::forcecast>& tile,
                int t, int total, const std::vector<double>& embedding, std::uint64_t seed) {
                 std::vector<float> data(tile.data(), tile.data() + tile.size());
                 Rng rng(seed);
                 d.step(data, t, total, Embedding{embedding}, rng);
                 py::array_t<float> out({tile.shape(0), tile.shape(1), tile.shape(2)});
                 std::copy(data.begin(), data.end(), out.mutable_data());
                 return out;
             },
             py::arg("tile"), py::arg("t"), py::arg("total"), py::arg("embedding"),
             py::arg("seed") = 0);

    m.def("generate",
          [](const Layout& layout, int height, int width, int steps, std::uint64_t seed,
             const std::string& edge, int margin, double sigma, const std::string& strides,
             double fg_fraction, int bg_every, int threads) {
              const ToyDenoiser toy;
              const ToyEmbedder embedder;
              GenerateConfig config;
              config.dims = {height, width};
              config.steps = steps;
              config.seed = seed;
              config.edge = {edge_kind_from_string(edge), margin, sigma, 1e-4};
              config.strides = strides.empty() ? default_stride_schedule(toy.window())
                                               : parse_stride_schedule(strides);
              config.policy.fg_fraction = fg_fraction;
              config.policy.bg_every = bg_every;
              config.threads = threads;
              const LayerPrompts layers =
                  build_layer_prompts(layout, embedder, config.policy);
              return canvas_to_array(generate(layout, layers, config, toy));
          },
          py::arg("layout"), py::arg("height") = 64, py::arg("width") = 256,
          py::arg("steps") = 50, py::arg("seed") = 0, py::arg("edge") = "cosine",
          py::arg("margin") = 16, py::arg("sigma") = 16.0, py::arg("strides") = "",
          py::arg("fg_fraction") = 0.15, py::arg("bg_every") = 2, py::arg("threads") = 1,
          "Run the toy-backend generation loop and return the latent canvas.");

    m.def("metric_report",
          [](const py::array_t<float, py::array::c_style | py::array::forcecast>& image, const Layout& layout,
             const py::object& ground_truth) {
              const ImageF img = imagef_from_array(image);
              std::optional<ImageF> gt;
              if (!ground_truth.is_none())
                  gt = imagef_from_array(
                      ground_truth.cast<py::array_t<float, py::array::c_style | py::array::forcecast>>());
              const ToyEmbedder embedder;
              const SeamSmoothnessScorer scorer;
              const MetricReport report =
                  compute_report(img, layout, gt ? &*gt : nullptr, embedder, scorer, 64);
              return py::module_::import("json").attr("loads")(
                  report_to_json(report).dump());
          },
          py::arg("image"), py::arg("layout"), py::arg("ground_truth") = py::none(),
          "LGIS, GEV, EA, clip scores (and CSGT with a ground truth) as a dict.");

    m.def("write_tensor",
          [](const std::string& path, const py::array_t<float, py::array::c_style | py::array::forcecast>& arr) {
              write_tensor(path, canvas_from_array(arr));
          },
          py::arg("path"), py::arg("canvas"));
    m.def("read_tensor",
          [](const std::string& path) { return canvas_to_array(read_tensor(path)); },
          py::arg("path"));

    m.def("canvas_to_png",
          [](const std::string& path, const py::array_t<float, py::array::c_style | py::array::forcecast>& arr,
             int scale) { write_png(path, canvas_to_image(canvas_from_array(arr), scale)); },
          py::arg("path"), py::arg("canvas"), py::arg("scale") = 8);

    m.def("read_image",
          [](const std::string& path) {
              const ImageF img = to_float(read_image(path));
              py::array_t<float> arr({img.height, img.width, img.channels});
              std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
              return arr;
          },
          py::arg("path"), "Image file -> (H, W, C) float array in [0,1].");
}
