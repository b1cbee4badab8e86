#include "slicevis/encoders.hpp"

#include <cmath>
#include <string>

#include "slicevis/error.hpp"

namespace slicevis {

namespace {
constexpr std::array<std::string_view, 4> kMethodNames{"physical", "perlin", "wallpaper",
                                                       "fractal"};
}

std::string_view method_name(Method m) noexcept {
    return kMethodNames[static_cast<std::size_t>(m)];
}

std::optional<Method> method_from_name(std::string_view name) noexcept {
    for (auto m : kAllMethods)
        if (method_name(m) == name) return m;
    return std::nullopt;
}

void validate(const PhysicalParams& p) {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("encoders.physical.") + field + ": must be > 0");
    };
    if (p.sigma_delta_gain) positive(*p.sigma_delta_gain, "sigma_delta_gain");
    if (p.shift_gain) positive(*p.shift_gain, "shift_gain");
    positive(p.f_j_gain, "f_j_gain");
    positive(p.gamma, "gamma");
    positive(p.stripe_gain, "stripe_gain");
    for (auto t : kAllSlices) {
        if (!(p.smooth_sigma[index_of(t)] >= 0.0))
            throw ConfigError("encoders.physical.smooth_sigma." + std::string(slice_name(t)) +
                              ": must be >= 0");
    }
}

void validate(const PerlinParams& p) {
    for (std::size_t c = 0; c < 3; ++c) {
        if (!(p.base_frequency[c] > 0.0))
            throw ConfigError("encoders.perlin.base_frequency[" + std::to_string(c) +
                              "]: must be > 0");
    }
    if (p.octave_base < 1 || p.octave_gain < 0 || p.octave_base + p.octave_gain > 8)
        throw ConfigError("encoders.perlin: octave count must stay within [1, 8]");
    if (!(p.persistence_base > 1.0))
        throw ConfigError("encoders.perlin.persistence_base: must be > 1");
}

void validate(const WallpaperParams& p) {
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (double w : p.weights[c]) {
            if (!(w >= 0.0))
                throw ConfigError("encoders.wallpaper.weights[" + std::to_string(c) +
                                  "]: weights must be >= 0");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("encoders.wallpaper.weights[" + std::to_string(c) +
                              "]: weights must sum to 1");
    }
    if (!(p.period_1y >= 1.0)) throw ConfigError("encoders.wallpaper.period_1y: must be >= 1");
    if (!(p.period_2x >= 1.0)) throw ConfigError("encoders.wallpaper.period_2x: must be >= 1");
    if (p.period_3 && !(*p.period_3 >= 1.0))
        throw ConfigError("encoders.wallpaper.period_3: must be >= 1");
    if (!(p.resource_gain >= 0.0))
        throw ConfigError("encoders.wallpaper.resource_gain: must be >= 0");
}

void validate(const FractalParams& p) {
    if (p.initial_length && !(*p.initial_length > 0.0))
        throw ConfigError("encoders.fractal.initial_length: must be > 0");
    if (!(p.shrink_base > 0.0)) throw ConfigError("encoders.fractal.shrink_base: must be > 0");
    if (!(p.delay_gain >= 0.0)) throw ConfigError("encoders.fractal.delay_gain: must be >= 0");
    if (!std::isfinite(p.base_angle))
        throw ConfigError("encoders.fractal.base_angle: must be finite");
    if (p.green_depth < 1) throw ConfigError("encoders.fractal.green_depth: must be >= 1");
}

void validate(const EncoderSuite& s) {
    if (s.side < 4) throw ConfigError("image_side: must be >= 4");
    validate(s.physical);
    validate(s.perlin);
    validate(s.wallpaper);
    validate(s.fractal);
}

ImagePatch EncoderSuite::encode(Method m, const NormalizedKpiVector& kpi, SliceType t,
                                Rng& fractal_rng) const {
    switch (m) {
        case Method::physical:
            return encode_physical(kpi, t, physical, side);
        case Method::perlin:
            return encode_perlin(kpi, perlin, side);
        case Method::wallpaper:
            return encode_wallpaper(kpi, wallpaper, side);
        case Method::fractal:
            return encode_fractal(kpi, fractal, side, fractal_rng);
    }
    throw UsageError("unknown encoding method");
}

}  // namespace slicevis
