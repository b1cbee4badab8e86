#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "slicevis/copula.hpp"
#include "slicevis/encoders.hpp"
#include "slicevis/profile.hpp"

namespace slicevis {

/// The complete model: everything a dataset depends on besides the sample
/// count. Immutable once loaded and safe to share between workers.
struct Config {
    std::uint64_t master_seed = 20250101;
    ClassMix class_mix{};
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    ProfileTable profiles = ProfileTable::defaults();
    NoiseConfig noise{};
    CorrelationModel correlation = CorrelationModel::defaults();
    NormalizationBounds bounds = default_bounds(ProfileTable::defaults());
    EncoderSuite encoders{};
    /// Perlin lattice seed; follows master_seed unless set explicitly.
    std::optional<std::uint64_t> permutation_seed;

    static Config defaults();

    /// Replaces the master seed and re-derives seed-dependent state.
    void set_seed(std::uint64_t seed);

    bool enabled(Method m) const noexcept;
};

/// Parses the JSON configuration schema. Every key is optional; omitted keys
/// take the documented defaults. Errors name the offending field path.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);

/// Canonical serialization. `config_from_json(config_to_json(c))`
/// reproduces `c`.
nlohmann::json config_to_json(const Config& c);

/// Pretty-printed canonical text, the exact bytes stored next to a dataset.
std::string config_text(const Config& c);

/// Re-validates cross-field constraints (profiles present, bounds sane, ...).
void validate(const Config& c);

/// Parses a comma-separated method list such as "wallpaper,fractal".
std::vector<Method> parse_methods(const std::string& csv);

}  // namespace slicevis
