#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "slicevis/image.hpp"
#include "slicevis/kpi.hpp"
#include "slicevis/perlin.hpp"
#include "slicevis/rng.hpp"

namespace slicevis {

enum class Method : std::uint8_t { physical = 0, perlin, wallpaper, fractal };

inline constexpr std::array<Method, 4> kAllMethods{Method::physical, Method::perlin,
                                                   Method::wallpaper, Method::fractal};

std::string_view method_name(Method m) noexcept;
std::optional<Method> method_from_name(std::string_view name) noexcept;

// ---------------------------------------------------------------------------
// Physically guided encoding
// ---------------------------------------------------------------------------

/// Free constants of the physical encoder. Fields left empty scale with the
/// image side: sigma_delta defaults to n/4 * (0.5 + delay) and shift_gain to
/// n/4 pixels.
struct PhysicalParams {
    std::optional<double> sigma_delta_gain;  ///< pixels, multiplies (0.5 + delay)
    double f_j_gain = 8.0;
    double gamma = 2.0;
    double stripe_gain = 6.0;
    std::optional<double> shift_gain;  ///< pixels
    std::array<double, kNumSlices> smooth_sigma{1.0, 0.3, 0.7};
};

void validate(const PhysicalParams& p);

/// Red: radial delay falloff plus throughput stripes. Green: jitter sinusoid
/// plus retransmission checkerboard. Blue: loss ramp. The diagonal carries
/// the delay*jitter*loss cross term in all channels; the whole patch is
/// rolled right by the RSSI shift and blurred with the slice's kernel.
ImagePatch encode_physical(const NormalizedKpiVector& kpi, SliceType t, const PhysicalParams& p,
                           std::size_t n);

/// Separable Gaussian blur with edge replication. sigma <= 0 is the identity.
Plane gaussian_blur(const Plane& in, double sigma);

// ---------------------------------------------------------------------------
// Perlin encoding
// ---------------------------------------------------------------------------

struct PerlinParams {
    std::array<double, 3> base_frequency{10.0, 8.0, 6.0};  ///< cycles per image (r, g, b)
    int octave_base = 2;
    int octave_gain = 3;
    double persistence_base = 1.5;
    Permutation permutation{};
};

void validate(const PerlinParams& p);

/// Per-sample noise settings derived from the KPIs.
struct PerlinSettings {
    std::array<double, 3> frequency{};  ///< f_r, f_g, f_b
    int octaves = 0;
    double persistence = 0.0;
};

/// f_r = 10(1 + delay + jitter), f_g = 8(1 + throughput), f_b = 6(1 + loss),
/// octaves = 2 + floor(3 throughput), persistence = 1.5 + snr.
PerlinSettings perlin_settings(const NormalizedKpiVector& kpi, const PerlinParams& p) noexcept;

ImagePatch encode_perlin(const NormalizedKpiVector& kpi, const PerlinParams& p, std::size_t n);

// ---------------------------------------------------------------------------
// Wallpaper encoding
// ---------------------------------------------------------------------------

struct WallpaperParams {
    /// weights[c][k] for channel c and basis k; each row sums to 1.
    std::array<std::array<double, 3>, 3> weights{{
        {0.5, 0.3, 0.2},
        {0.2, 0.5, 0.3},
        {0.3, 0.2, 0.5},
    }};
    double period_1y = 4.0;
    double period_2x = 4.0;
    std::optional<double> period_3;  ///< defaults to n/2
    double resource_gain = 1.0;
};

void validate(const WallpaperParams& p);

struct WallpaperPeriods {
    double p1x, p1y, p2x, p2y, p3x, p3y;
};

/// P1x = 2 + floor(5 delay), P2y = 3 + floor(7 throughput); the rest fixed.
WallpaperPeriods wallpaper_periods(const NormalizedKpiVector& kpi, const WallpaperParams& p,
                                   std::size_t n) noexcept;

/// sin(2 pi u) + (floor(u + v) mod 2)
double wallpaper_phi1(double u, double v) noexcept;
/// rect(frac u) * rect(frac v), rect(z) = [z < 0.5]
double wallpaper_phi2(double u, double v) noexcept;
/// exp(-(u^2 + v^2))
double wallpaper_phi3(double u, double v) noexcept;

ImagePatch encode_wallpaper(const NormalizedKpiVector& kpi, const WallpaperParams& p,
                            std::size_t n);

// ---------------------------------------------------------------------------
// Fractal encoding
// ---------------------------------------------------------------------------

struct FractalParams {
    std::optional<double> initial_length;  ///< pixels, defaults to n/4
    double shrink_base = 0.6;
    double delay_gain = 0.2;
    double base_angle = 0.5235987755982988;  ///< pi/6
    double precise_jitter_threshold = 0.05;  ///< below this jitter the angle snaps to pi/2
    int green_depth = 3;
};

void validate(const FractalParams& p);

struct FractalSettings {
    int red_depth = 0;          ///< 3 + floor(3 delay)
    int green_trees = 0;        ///< floor(5 throughput)
    int spokes = 0;             ///< 3 + floor(2 snr)
    int cpu_offshoots = 0;      ///< floor(3 cpu) per red branch
    int mem_connectors = 0;     ///< floor(3 mem) per red branch
    double length_ratio = 0.0;  ///< 0.6 + 0.2 delay
    double bifurcation = 0.0;   ///< delta_theta * (0.8 + 0.2 loss)
    double angle_sigma = 0.0;   ///< 0.2 loss pi
    double fractal_dimension = 0.0;  ///< 1.1 + 0.5 delay; metadata only
};

FractalSettings fractal_settings(const NormalizedKpiVector& kpi, const FractalParams& p) noexcept;

/// Canvas origin is bottom-left. Red: one tree grown upward from the bottom
/// centre. Green: throughput trees along the bottom edge. Blue: SNR spokes
/// from the centre, plus the memory connectors. CPU offshoots go to green.
ImagePatch encode_fractal(const NormalizedKpiVector& kpi, const FractalParams& p, std::size_t n,
                          Rng& rng);

// ---------------------------------------------------------------------------

/// Everything needed to run every encoder at a fixed side length.
struct EncoderSuite {
    std::size_t side = 16;
    PhysicalParams physical{};
    PerlinParams perlin{};
    WallpaperParams wallpaper{};
    FractalParams fractal{};

    ImagePatch encode(Method m, const NormalizedKpiVector& kpi, SliceType t, Rng& fractal_rng) const;
};

void validate(const EncoderSuite& s);

}  // namespace slicevis
