#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "slicevis/config.hpp"
#include "slicevis/dataset.hpp"
#include "slicevis/error.hpp"
#include "slicevis/eval.hpp"
#include "slicevis/kpi_sim.hpp"

namespace py = pybind11;
using namespace slicevis;

namespace {

Method to_method(const std::string& name) {
    const auto m = method_from_name(name);
    if (!m) throw UsageError("unknown method '" + name + "' (valid: physical, perlin, wallpaper, fractal)");
    return *m;
}

SliceType to_slice(const std::string& name) {
    const auto t = slice_from_name(name);
    if (!t) throw UsageError("unknown slice type '" + name + "' (valid: eMBB, URLLC, mIoT)");
    return *t;
}

Config config_from_text(const std::optional<std::string>& text) {
    if (!text) return Config::defaults();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(*text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

template <typename T>
py::array_t<T> owned_array(std::vector<py::ssize_t> shape, const void* src) {
    py::array_t<T> out(shape);
    std::memcpy(out.mutable_data(), src, static_cast<std::size_t>(out.nbytes()));
    return out;
}

py::array_t<std::uint8_t> images_u8(const Dataset& ds, const std::string& method) {
    const auto a = images_array(ds, to_method(method));
    return owned_array<std::uint8_t>({a.shape.begin(), a.shape.end()}, a.payload.data());
}

py::array_t<float> images_f32(const Dataset& ds, const std::string& method) {
    const auto a = images_array_f32(ds, to_method(method));
    return owned_array<float>({a.shape.begin(), a.shape.end()}, a.payload.data());
}

py::array_t<std::uint8_t> labels(const Dataset& ds) {
    const auto a = labels_array(ds);
    return owned_array<std::uint8_t>({static_cast<py::ssize_t>(ds.size())}, a.payload.data());
}

py::array_t<double> kpis(const Dataset& ds) {
    const Features f = raw_features(ds);
    return owned_array<double>({f.rows(), f.cols()}, f.data());
}

py::array_t<double> patch_array(const ImagePatch& p) {
    const auto n = static_cast<py::ssize_t>(p.side());
    return owned_array<double>({n, n, 3}, p.data().data());
}

NormalizedKpiVector normalized_from(const std::vector<std::optional<double>>& values) {
    if (values.size() != kNumKpis)
        throw UsageError("expected " + std::to_string(kNumKpis) + " normalized KPI values");
    NormalizedKpiVector v;
    for (std::size_t i = 0; i < kNumKpis; ++i) {
        if (!values[i]) {
            v.missing.set(i);
            continue;
        }
        if (!(*values[i] >= 0.0 && *values[i] <= 1.0))
            throw UsageError("normalized values must lie in [0, 1]");
        v.values[i] = *values[i];
    }
    return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of slicevis";

    auto base = py::register_exception<Error>(m, "SliceVisError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<EncodingError>(m, "EncodingError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

    m.attr("KPI_NAMES") = [] {
        py::list names;
        for (std::size_t i = 0; i < kNumKpis; ++i)
            names.append(std::string(kpi_name(static_cast<Kpi>(i))));
        return names;
    }();
    m.attr("METHODS") = py::make_tuple("physical", "perlin", "wallpaper", "fractal");
    m.attr("SLICES") = py::make_tuple("eMBB", "URLLC", "mIoT");

    m.def("default_config_json", [] { return config_text(Config::defaults()); });
    m.def("canonical_config_json",
          [](const std::string& text) { return config_text(config_from_text(text)); },
          py::arg("config_json"));

    py::class_<Dataset>(m, "Dataset")
        .def("__len__", &Dataset::size)
        .def_property_readonly("config_json", [](const Dataset& d) { return config_text(d.config); })
        .def_property_readonly("image_side", [](const Dataset& d) { return d.config.encoders.side; })
        .def_property_readonly("methods",
                               [](const Dataset& d) {
                                   std::vector<std::string> out;
                                   for (auto mm : d.config.methods) out.emplace_back(method_name(mm));
                                   return out;
                               })
        .def("class_counts",
             [](const Dataset& d) {
                 py::dict out;
                 const auto c = d.class_counts();
                 for (auto t : kAllSlices) out[py::str(std::string(slice_name(t)))] = c[index_of(t)];
                 return out;
             })
        .def("labels", &labels)
        .def("kpis", &kpis, "Raw KPIs (N, 10) in physical units; NaN marks missing values")
        .def("images", &images_u8, py::arg("method"))
        .def("images_float", &images_f32, py::arg("method"))
        .def("csv", &csv_text)
        .def("fractal_dimensions",
             [](const Dataset& d) {
                 std::vector<double> out;
                 for (const auto& s : d.samples) out.push_back(s.fractal_dimension);
                 return out;
             })
        .def(
            "write",
            [](const Dataset& d, const std::filesystem::path& root, bool force, bool float_images) {
                return write_dataset(d, root, WriteOptions{force, float_images}).dump();
            },
            py::arg("root"), py::arg("force") = false, py::arg("float_images") = false,
            py::call_guard<py::gil_scoped_release>())
        .def(
            "montage",
            [](const Dataset& d, const std::string& method, std::size_t rows, std::size_t cols,
               const std::filesystem::path& out_dir) {
                return render_montage(d, to_method(method), {rows, cols}, out_dir);
            },
            py::arg("method"), py::arg("rows") = 3, py::arg("cols") = 6, py::arg("out_dir") = ".");

    m.def(
        "generate",
        [](std::size_t count, const std::optional<std::string>& config_json,
           const std::optional<std::uint64_t>& seed,
           const std::optional<std::vector<std::string>>& methods, unsigned workers) {
            Config c = config_from_text(config_json);
            if (seed) c.set_seed(*seed);
            if (methods) {
                c.methods.clear();
                for (const auto& name : *methods) c.methods.push_back(to_method(name));
            }
            py::gil_scoped_release release;
            return generate_dataset(c, count, workers);
        },
        py::arg("count"), py::arg("config_json") = py::none(), py::arg("seed") = py::none(),
        py::arg("methods") = py::none(), py::arg("workers") = 1);

    m.def("load_dataset", &load_dataset, py::arg("root"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "evaluate",
        [](const Dataset& d, const std::optional<std::vector<std::string>>& methods,
           std::uint64_t split_seed, std::size_t k) {
            std::vector<Method> ms = d.config.methods;
            if (methods) {
                ms.clear();
                for (const auto& name : *methods) ms.push_back(to_method(name));
            }
            SplitSpec split;
            split.seed = split_seed;
            EvalOptions opts;
            opts.k = k;
            py::gil_scoped_release release;
            return report_json(run_evaluation(d, ms, split, opts)).dump();
        },
        py::arg("dataset"), py::arg("methods") = py::none(), py::arg("split_seed") = 7,
        py::arg("k") = 5);

    m.def(
        "simulate_kpis",
        [](const std::string& slice, std::size_t count, std::uint64_t seed,
           const std::optional<std::string>& config_json) {
            const Config c = config_from_text(config_json);
            const auto t = to_slice(slice);
            py::array_t<double> out({static_cast<py::ssize_t>(count),
                                     static_cast<py::ssize_t>(kNumKpis)});
            auto view = out.mutable_unchecked<2>();
            for (std::size_t i = 0; i < count; ++i) {
                Rng rng(seed, Stream::kpi, i);
                const auto clean = sample_kpi_vector(t, c.profiles, c.noise, c.correlation, rng);
                const auto k = apply_measurement_model(clean, t, c.profiles, c.noise, rng);
                for (std::size_t j = 0; j < kNumKpis; ++j)
                    view(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) =
                        k.values[j].value_or(std::numeric_limits<double>::quiet_NaN());
            }
            return out;
        },
        py::arg("slice"), py::arg("count"), py::arg("seed") = 0,
        py::arg("config_json") = py::none(),
        "Measured KPI vectors (count, 10) for one slice type; NaN marks missing values");

    m.def(
        "encode",
        [](const std::string& method, const std::vector<std::optional<double>>& normalized,
           const std::string& slice, std::size_t side, std::uint64_t seed) {
            EncoderSuite suite;
            suite.side = side;
            suite.perlin.permutation = Permutation(seed);
            validate(suite);
            Rng rng(seed, Stream::fractal);
            return patch_array(
                suite.encode(to_method(method), normalized_from(normalized), to_slice(slice), rng));
        },
        py::arg("method"), py::arg("normalized"), py::arg("slice") = "eMBB", py::arg("side") = 16,
        py::arg("seed") = 0,
        "Encodes one normalized KPI vector (None for missing) into an (n, n, 3) float patch");

    m.def(
        "perlin2",
        [](double x, double y, std::optional<std::uint64_t> seed) {
            return perlin2(x, y, seed ? Permutation(*seed) : Permutation());
        },
        py::arg("x"), py::arg("y"), py::arg("seed") = py::none());
}
