#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "slicevis/config.hpp"
#include "slicevis/encoders.hpp"
#include "slicevis/image.hpp"
#include "slicevis/io.hpp"
#include "slicevis/kpi.hpp"

namespace slicevis {

inline constexpr const char* kFormatVersion = "1.0";

struct Sample {
    std::uint64_t id = 0;
    SliceType y = SliceType::eMBB;
    KpiVector x;
    NormalizedKpiVector x_norm;
    /// Indexed by Method; empty patches for methods that were not enabled.
    std::array<std::optional<ImagePatch>, kAllMethods.size()> images{};
    /// D_f recorded alongside the fractal encoding; not used for rendering.
    double fractal_dimension = 0.0;

    const ImagePatch& image(Method m) const;
};

struct Dataset {
    Config config;
    std::vector<Sample> samples;

    std::size_t size() const noexcept { return samples.size(); }
    std::array<std::size_t, kNumSlices> class_counts() const noexcept;
    std::vector<SliceType> labels() const;
};

/// Exact per-class counts: round(p_k * count) for every class but the last,
/// which takes the remainder.
std::array<std::size_t, kNumSlices> allocate_classes(const ClassMix& mix, std::size_t count);

/// Builds `count` samples. Labels are allocated exactly, then shuffled by
/// the master seed. Each sample draws from generators keyed by its index,
/// so the result is identical for any `workers` value.
Dataset generate_dataset(const Config& config, std::size_t count, unsigned workers = 1);

/// Produces a single sample exactly as generate_dataset would at `index`.
Sample make_sample(const Config& config, std::uint64_t index, SliceType label);

// ---------------------------------------------------------------------------
// Exchange formats
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "id,slice_type,delay_ms,jitter_ms,loss_pct,throughput_mbps,retrans_pct,discard_pct,"
    "rssi_dbm,snr_db,cpu_pct,mem_pct";

std::string csv_text(const Dataset& ds);
void export_csv(const Dataset& ds, const std::filesystem::path& path);

struct CsvRow {
    std::uint64_t id;
    SliceType y;
    KpiVector x;
};
std::vector<CsvRow> parse_csv(const std::string& text);

/// (count, n, n, 3) unsigned 8-bit, quantized with round(v * 255).
NpyArray images_array(const Dataset& ds, Method m);
/// Same layout as images_array but float32 intensities in [0, 1].
NpyArray images_array_f32(const Dataset& ds, Method m);
NpyArray labels_array(const Dataset& ds);
void export_images(const Dataset& ds, Method m, const std::filesystem::path& path);

struct WriteOptions {
    bool force = false;         ///< allow writing into a non-empty directory
    bool float_images = false;  ///< also write images_f32.npy per method
};

/// Writes `<root>/<method>/{kpis.csv, images.npy, labels.npy}`,
/// `<root>/config.json` and `<root>/manifest.json`. Returns the manifest.
nlohmann::json write_dataset(const Dataset& ds, const std::filesystem::path& root,
                             const WriteOptions& opts = {});

/// Builds the manifest for files already present under `root`.
nlohmann::json write_manifest(const Dataset& ds, const std::filesystem::path& root);

/// Verifies the manifest (config digest, per-file checksums, counts, shapes)
/// and reconstructs the dataset. Images come back quantized to 8 bits.
Dataset load_dataset(const std::filesystem::path& root);

// ---------------------------------------------------------------------------
// Montage
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMontageScale = 8;

struct MontageGrid {
    std::size_t rows = 3;
    std::size_t cols = 3;
};

/// Picks rows*cols samples round-robin across slice types, orders them by
/// slice, and tiles them nearest-neighbour upscaled by kMontageScale. The
/// file is written under `out_dir` with the per-class tile counts in its
/// name; the full path is returned.
std::filesystem::path render_montage(const Dataset& ds, Method m, MontageGrid grid,
                                     const std::filesystem::path& out_dir);

}  // namespace slicevis
