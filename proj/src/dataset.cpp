#include "slicevis/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "slicevis/error.hpp"
#include "slicevis/io.hpp"
#include "slicevis/kpi_sim.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kGenerator = "slicevis 0.1.0";

std::size_t method_slot(Method m) noexcept { return static_cast<std::size_t>(m); }

}  // namespace

const ImagePatch& Sample::image(Method m) const {
    const auto& img = images[method_slot(m)];
    if (!img) throw UsageError("method '" + std::string(method_name(m)) + "' is not enabled");
    return *img;
}

std::array<std::size_t, kNumSlices> Dataset::class_counts() const noexcept {
    std::array<std::size_t, kNumSlices> counts{};
    for (const auto& s : samples) ++counts[index_of(s.y)];
    return counts;
}

std::vector<SliceType> Dataset::labels() const {
    std::vector<SliceType> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.y);
    return out;
}

std::array<std::size_t, kNumSlices> allocate_classes(const ClassMix& mix, std::size_t count) {
    validate(mix);
    std::array<std::size_t, kNumSlices> counts{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k + 1 < kNumSlices; ++k) {
        counts[k] = static_cast<std::size_t>(std::llround(mix.p[k] * static_cast<double>(count)));
        counts[k] = std::min(counts[k], count - assigned);
        assigned += counts[k];
    }
    counts[kNumSlices - 1] = count - assigned;
    return counts;
}

Sample make_sample(const Config& config, std::uint64_t index, SliceType label) {
    Sample s;
    s.id = index;
    s.y = label;
    Rng kpi_rng(config.master_seed, Stream::kpi, index);
    const auto clean =
        sample_kpi_vector(label, config.profiles, config.noise, config.correlation, kpi_rng);
    s.x = apply_measurement_model(clean, label, config.profiles, config.noise, kpi_rng);
    s.x_norm = normalize(s.x, config.bounds);
    s.fractal_dimension = fractal_settings(s.x_norm, config.encoders.fractal).fractal_dimension;
    for (auto m : config.methods) {
        Rng fractal_rng(config.master_seed, Stream::fractal, index);
        s.images[method_slot(m)] = config.encoders.encode(m, s.x_norm, label, fractal_rng);
    }
    return s;
}

Dataset generate_dataset(const Config& config, std::size_t count, unsigned workers) {
    validate(config);
    if (count < 3) throw UsageError("count: at least 3 samples are required");

    const auto counts = allocate_classes(config.class_mix, count);
    std::vector<SliceType> labels;
    labels.reserve(count);
    for (auto t : kAllSlices) labels.insert(labels.end(), counts[index_of(t)], t);
    Rng shuffle(config.master_seed, Stream::shuffle);
    for (std::size_t i = count - 1; i > 0; --i) std::swap(labels[i], labels[shuffle.below(i + 1)]);

    Dataset ds{config, std::vector<Sample>(count)};
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t i = next++; i < count; i = next++)
                ds.samples[i] = make_sample(config, i, labels[i]);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return ds;
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_text(const Dataset& ds) {
    std::string out = kCsvHeader;
    out += '\n';
    char buf[64];
    for (const auto& s : ds.samples) {
        out += std::to_string(s.id);
        out += ',';
        out += std::to_string(static_cast<int>(s.y));
        for (const auto& v : s.x.values) {
            out += ',';
            if (!v) continue;
            std::snprintf(buf, sizeof buf, "%.6g", *v);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

void export_csv(const Dataset& ds, const fs::path& path) {
    if (ds.samples.empty()) throw UsageError("export_csv: dataset is empty");
    write_file(path, csv_text(ds));
}

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw IntegrityError("kpis.csv: header does not match the expected schema");
    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto where = "kpis.csv line " + std::to_string(line_no);
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 2 + kNumKpis) throw IntegrityError(where + ": expected 12 cells");
        CsvRow row{};
        auto parse_uint = [&](const std::string& cell) {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || p != cell.data() + cell.size())
                throw IntegrityError(where + ": bad integer '" + cell + "'");
            return v;
        };
        row.id = parse_uint(cells[0]);
        auto label = slice_from_code(static_cast<int>(parse_uint(cells[1])));
        if (!label) throw IntegrityError(where + ": unknown slice code '" + cells[1] + "'");
        row.y = *label;
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            const auto& cell = cells[2 + k];
            if (cell.empty()) continue;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size() || !std::isfinite(v))
                throw IntegrityError(where + ": bad number '" + cell + "'");
            row.x.values[k] = v;
        }
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// NPY

NpyArray images_array(const Dataset& ds, Method m) {
    if (!ds.config.enabled(m))
        throw UsageError("method '" + std::string(method_name(m)) + "' is not enabled");
    const std::size_t n = ds.config.encoders.side;
    std::vector<std::uint8_t> bytes;
    bytes.reserve(ds.size() * n * n * 3);
    for (const auto& s : ds.samples)
        for (double v : s.image(m).data()) bytes.push_back(quantize(v));
    return npy_u8({ds.size(), n, n, 3}, std::move(bytes));
}

NpyArray images_array_f32(const Dataset& ds, Method m) {
    if (!ds.config.enabled(m))
        throw UsageError("method '" + std::string(method_name(m)) + "' is not enabled");
    const std::size_t n = ds.config.encoders.side;
    std::vector<float> values;
    values.reserve(ds.size() * n * n * 3);
    for (const auto& s : ds.samples)
        for (double v : s.image(m).data()) values.push_back(static_cast<float>(v));
    return npy_f32({ds.size(), n, n, 3}, values);
}

NpyArray labels_array(const Dataset& ds) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(ds.size());
    for (const auto& s : ds.samples) bytes.push_back(static_cast<std::uint8_t>(s.y));
    return npy_u8({ds.size()}, std::move(bytes));
}

void export_images(const Dataset& ds, Method m, const fs::path& path) {
    write_file(path, npy_encode(images_array(ds, m)));
}

// ---------------------------------------------------------------------------
// Directory layout and manifest

namespace {

const std::array<const char*, 3> kMethodFiles{"kpis.csv", "images.npy", "labels.npy"};

std::string rel(Method m, const char* file) { return std::string(method_name(m)) + "/" + file; }

void ensure_directory(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create directory '" + p.string() + "': " + ec.message());
}

}  // namespace

json write_manifest(const Dataset& ds, const fs::path& root) {
    json m;
    m["format_version"] = kFormatVersion;
    m["master_seed"] = ds.config.master_seed;
    m["sample_count"] = ds.size();
    m["image_side"] = ds.config.encoders.side;
    m["class_mix"] = json::object();
    m["class_counts"] = json::object();
    const auto counts = ds.class_counts();
    for (auto t : kAllSlices) {
        m["class_mix"][std::string(slice_name(t))] = ds.config.class_mix.p[index_of(t)];
        m["class_counts"][std::string(slice_name(t))] = counts[index_of(t)];
    }
    m["methods"] = json::array();
    m["checksums"] = json::object();
    for (auto meth : ds.config.methods) {
        m["methods"].push_back(std::string(method_name(meth)));
        for (const char* f : kMethodFiles)
            m["checksums"][rel(meth, f)] = sha256_file(root / rel(meth, f));
        if (fs::exists(root / rel(meth, "images_f32.npy")))
            m["checksums"][rel(meth, "images_f32.npy")] =
                sha256_file(root / rel(meth, "images_f32.npy"));
    }
    m["config_digest"] = sha256_file(root / "config.json");
    m["created_by"] = kGenerator;
    write_file(root / "manifest.json", m.dump(2) + "\n");
    return m;
}

json write_dataset(const Dataset& ds, const fs::path& root, const WriteOptions& opts) {
    if (ds.samples.empty()) throw UsageError("write_dataset: dataset is empty");
    if (fs::exists(root)) {
        if (!fs::is_directory(root))
            throw IoError("'" + root.string() + "' exists and is not a directory");
        if (!fs::is_empty(root) && !opts.force)
            throw UsageError("output directory '" + root.string() +
                             "' is not empty; pass --force to overwrite");
    }
    ensure_directory(root);
    write_file(root / "config.json", config_text(ds.config));

    const std::string csv = csv_text(ds);
    const auto labels = npy_encode(labels_array(ds));
    for (auto m : ds.config.methods) {
        const fs::path dir = root / std::string(method_name(m));
        ensure_directory(dir);
        write_file(dir / "kpis.csv", csv);
        write_file(dir / "images.npy", npy_encode(images_array(ds, m)));
        write_file(dir / "labels.npy", labels);
        if (opts.float_images)
            write_file(dir / "images_f32.npy", npy_encode(images_array_f32(ds, m)));
        else if (fs::exists(dir / "images_f32.npy"))
            fs::remove(dir / "images_f32.npy");
    }
    return write_manifest(ds, root);
}

Dataset load_dataset(const fs::path& root) {
    const fs::path manifest_path = root / "manifest.json";
    if (!fs::exists(manifest_path))
        throw IntegrityError("manifest.json: missing from '" + root.string() + "'");
    json manifest;
    try {
        const auto bytes = read_file(manifest_path);
        manifest = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw IntegrityError(std::string("manifest.json: unreadable: ") + e.what());
    }

    auto field = [&](const char* key) -> const json& {
        if (!manifest.contains(key)) throw IntegrityError(std::string("manifest.json: missing '") + key + "'");
        return manifest.at(key);
    };
    if (field("format_version") != kFormatVersion)
        throw IntegrityError("manifest.json: unsupported format_version");

    const fs::path config_path = root / "config.json";
    if (!fs::exists(config_path)) throw IntegrityError("config.json: missing");
    const auto config_bytes = read_file(config_path);
    if (sha256_hex(config_bytes) != field("config_digest").get<std::string>())
        throw IntegrityError("config.json: digest does not match manifest");
    Config config;
    try {
        config = config_from_json(json::parse(config_bytes.begin(), config_bytes.end()));
    } catch (const std::exception& e) {
        throw IntegrityError(std::string("config.json: ") + e.what());
    }
    if (field("master_seed").get<std::uint64_t>() != config.master_seed)
        throw IntegrityError("manifest.json: master_seed differs from config.json");
    if (field("image_side").get<std::size_t>() != config.encoders.side)
        throw IntegrityError("manifest.json: image_side differs from config.json");

    std::vector<Method> methods;
    for (const auto& name : field("methods")) {
        auto m = method_from_name(name.get<std::string>());
        if (!m) throw IntegrityError("manifest.json: unknown method " + name.dump());
        methods.push_back(*m);
    }
    if (methods.empty()) throw IntegrityError("manifest.json: no methods listed");
    config.methods = methods;

    const auto count = field("sample_count").get<std::size_t>();
    const auto& checksums = field("checksums");
    const std::size_t n = config.encoders.side;

    auto checked_read = [&](const std::string& name) {
        const fs::path p = root / name;
        if (!fs::exists(p)) throw IntegrityError(name + ": missing (labels/images/kpis expected)");
        auto bytes = read_file(p);
        if (!checksums.contains(name))
            throw IntegrityError(name + ": no checksum recorded in manifest");
        if (sha256_hex(bytes) != checksums.at(name).get<std::string>())
            throw IntegrityError(name + ": checksum mismatch");
        return bytes;
    };

    Dataset ds{config, {}};
    bool first = true;
    for (auto m : methods) {
        const auto csv_bytes = checked_read(rel(m, "kpis.csv"));
        const auto rows = parse_csv(std::string(csv_bytes.begin(), csv_bytes.end()));
        if (rows.size() != count)
            throw IntegrityError(rel(m, "kpis.csv") + ": holds " + std::to_string(rows.size()) +
                                 " rows, manifest says " + std::to_string(count));

        NpyArray labels;
        NpyArray images;
        try {
            labels = npy_decode(checked_read(rel(m, "labels.npy")));
        } catch (const IntegrityError& e) {
            throw IntegrityError(rel(m, "labels.npy") + ": " + e.what());
        }
        try {
            images = npy_decode(checked_read(rel(m, "images.npy")));
        } catch (const IntegrityError& e) {
            throw IntegrityError(rel(m, "images.npy") + ": " + e.what());
        }
        if (labels.dtype != NpyDtype::u1 || labels.shape != std::vector<std::size_t>{count})
            throw IntegrityError(rel(m, "labels.npy") + ": shape does not match sample_count");
        if (images.dtype != NpyDtype::u1 ||
            images.shape != std::vector<std::size_t>{count, n, n, 3})
            throw IntegrityError(rel(m, "images.npy") + ": shape does not match manifest");

        if (first) {
            ds.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                auto& s = ds.samples[i];
                s.id = rows[i].id;
                s.y = rows[i].y;
                s.x = rows[i].x;
                s.x_norm = normalize(s.x, config.bounds);
                s.fractal_dimension =
                    fractal_settings(s.x_norm, config.encoders.fractal).fractal_dimension;
                if (s.id != i)
                    throw IntegrityError(rel(m, "kpis.csv") + ": ids are not 0..N-1 in order");
            }
        } else {
            for (std::size_t i = 0; i < count; ++i)
                if (rows[i].id != ds.samples[i].id || rows[i].y != ds.samples[i].y)
                    throw IntegrityError(rel(m, "kpis.csv") + ": differs from other methods");
        }
        for (std::size_t i = 0; i < count; ++i)
            if (labels.payload[i] != static_cast<std::uint8_t>(ds.samples[i].y))
                throw IntegrityError(rel(m, "labels.npy") + ": disagrees with kpis.csv");

        const std::size_t per = n * n * 3;
        for (std::size_t i = 0; i < count; ++i) {
            ImagePatch patch(n);
            auto dst = patch.data();
            for (std::size_t j = 0; j < per; ++j) dst[j] = images.payload[i * per + j] / 255.0;
            ds.samples[i].images[method_slot(m)] = std::move(patch);
        }
        first = false;
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Montage

fs::path render_montage(const Dataset& ds, Method m, MontageGrid grid, const fs::path& out_dir) {
    const std::size_t tiles = grid.rows * grid.cols;
    if (grid.rows == 0 || grid.cols == 0) throw UsageError("grid: rows and cols must be >= 1");
    if (tiles > ds.size())
        throw UsageError("grid: " + std::to_string(tiles) + " tiles exceed the " +
                         std::to_string(ds.size()) + " available samples");
    if (!ds.config.enabled(m))
        throw UsageError("method '" + std::string(method_name(m)) + "' is not enabled");

    std::array<std::vector<std::size_t>, kNumSlices> by_slice;
    for (std::size_t i = 0; i < ds.size(); ++i) by_slice[index_of(ds.samples[i].y)].push_back(i);

    std::vector<std::size_t> picked;
    std::array<std::size_t, kNumSlices> cursor{};
    while (picked.size() < tiles) {
        for (std::size_t k = 0; k < kNumSlices && picked.size() < tiles; ++k)
            if (cursor[k] < by_slice[k].size()) picked.push_back(by_slice[k][cursor[k]++]);
    }
    std::stable_sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
        return ds.samples[a].y < ds.samples[b].y;
    });

    const std::size_t n = ds.config.encoders.side;
    const std::size_t tile = n * kMontageScale;
    const std::size_t width = grid.cols * tile;
    const std::size_t height = grid.rows * tile;
    std::vector<std::uint8_t> rgb(width * height * 3);
    for (std::size_t t = 0; t < tiles; ++t) {
        const auto& patch = ds.samples[picked[t]].image(m);
        const std::size_t ox = (t % grid.cols) * tile;
        const std::size_t oy = (t / grid.cols) * tile;
        for (std::size_t y = 0; y < tile; ++y)
            for (std::size_t x = 0; x < tile; ++x)
                for (std::size_t c = 0; c < 3; ++c)
                    rgb[((oy + y) * width + ox + x) * 3 + c] =
                        quantize(patch.at(x / kMontageScale, y / kMontageScale, c));
    }

    std::string name = "montage_" + std::string(method_name(m));
    for (auto t : kAllSlices) {
        const auto k = static_cast<std::size_t>(std::count_if(
            picked.begin(), picked.end(), [&](std::size_t i) { return ds.samples[i].y == t; }));
        name += "_" + std::string(slice_name(t)) + std::to_string(k);
    }
    name += ".png";
    ensure_directory(out_dir);
    const fs::path path = out_dir / name;
    write_file(path, png_encode_rgb(width, height, rgb));
    return path;
}

}  // namespace slicevis
