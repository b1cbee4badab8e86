#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "slicevis/encoders.hpp"

namespace slicevis {

namespace {

struct Point {
    double x;
    double y;
};

/// Draws onto a plane in canvas coordinates with the origin bottom-left.
/// Points are stored relative to an integer anchor pixel and rounded with
/// lround, which is odd-symmetric, so mirrored geometry rasterizes to
/// mirrored pixels.
class Canvas {
public:
    explicit Canvas(Plane& plane) : plane_(plane), n_(static_cast<long>(plane.side())) {}

    void segment(long anchor_x, long anchor_y, Point a, Point b, double weight) {
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const long steps =
            std::max({1L, static_cast<long>(std::ceil(std::abs(dx))),
                      static_cast<long>(std::ceil(std::abs(dy)))});
        long last_x = -1;
        long last_y = -1;
        for (long i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(steps);
            const long px = anchor_x + std::lround(a.x + dx * t);
            const long py = anchor_y + std::lround(a.y + dy * t);
            if (px == last_x && py == last_y) continue;
            last_x = px;
            last_y = py;
            if (px < 0 || py < 0 || px >= n_ || py >= n_) continue;
            plane_(static_cast<std::size_t>(px), static_cast<std::size_t>(n_ - 1 - py)) += weight;
        }
    }

private:
    Plane& plane_;
    long n_;
};

struct TreeStyle {
    int depth;
    double ratio;
    double bifurcation;
    double angle_sigma;
    int cpu_offshoots;
    int mem_connectors;
};

struct Tree {
    Canvas& main;
    Canvas* offshoots;   // vertical CPU segments
    Canvas* connectors;  // horizontal memory segments
    long anchor_x;
    long anchor_y;
    TreeStyle style;
    Rng& rng;

    // `tilt` is the branch angle measured from the vertical, positive to the
    // left, so the growth direction is (-sin tilt, cos tilt).
    void grow(Point from, double tilt, double length, int level) {
        const Point to{from.x - length * std::sin(tilt), from.y + length * std::cos(tilt)};
        const double weight = 1.0 / static_cast<double>(level + 1);
        main.segment(anchor_x, anchor_y, from, to, weight);

        if (offshoots != nullptr) {
            for (int j = 1; j <= style.cpu_offshoots; ++j) {
                const Point at = along(from, to, j, style.cpu_offshoots);
                offshoots->segment(anchor_x, anchor_y, at, {at.x, at.y + 0.5 * length}, weight);
            }
        }
        if (connectors != nullptr) {
            for (int j = 1; j <= style.mem_connectors; ++j) {
                const Point at = along(from, to, j, style.mem_connectors);
                const double reach = 0.5 * length;
                if (at.x >= 0.0)
                    connectors->segment(anchor_x, anchor_y, at, {at.x + reach, at.y}, weight);
                if (at.x <= 0.0)
                    connectors->segment(anchor_x, anchor_y, at, {at.x - reach, at.y}, weight);
            }
        }

        if (level + 1 >= style.depth) return;
        const double left_jitter = style.angle_sigma * rng.normal();
        const double right_jitter = style.angle_sigma * rng.normal();
        const double child = length * style.ratio;
        grow(to, tilt + style.bifurcation + left_jitter, child, level + 1);
        grow(to, tilt - style.bifurcation + right_jitter, child, level + 1);
    }

    static Point along(Point a, Point b, int j, int count) {
        const double t = static_cast<double>(j) / static_cast<double>(count + 1);
        return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
    }
};

}  // namespace

FractalSettings fractal_settings(const NormalizedKpiVector& kpi, const FractalParams& p) noexcept {
    const double delay = kpi[Kpi::delay];
    const double loss = kpi[Kpi::loss];
    const double delta_theta =
        kpi[Kpi::jitter] < p.precise_jitter_threshold ? std::numbers::pi / 2.0 : p.base_angle;
    FractalSettings s;
    s.red_depth = 3 + static_cast<int>(std::floor(3.0 * delay));
    s.green_trees = static_cast<int>(std::floor(5.0 * kpi[Kpi::throughput]));
    s.spokes = 3 + static_cast<int>(std::floor(2.0 * kpi[Kpi::snr]));
    s.cpu_offshoots = static_cast<int>(std::floor(3.0 * kpi[Kpi::cpu]));
    s.mem_connectors = static_cast<int>(std::floor(3.0 * kpi[Kpi::mem]));
    s.length_ratio = p.shrink_base + p.delay_gain * delay;
    s.bifurcation = delta_theta * (0.8 + 0.2 * loss);
    s.angle_sigma = 0.2 * loss * std::numbers::pi;
    s.fractal_dimension = 1.1 + 0.5 * delay;
    return s;
}

ImagePatch encode_fractal(const NormalizedKpiVector& kpi, const FractalParams& p, std::size_t n,
                          Rng& rng) {
    const auto s = fractal_settings(kpi, p);
    const double nd = static_cast<double>(n);
    const double l0 = p.initial_length.value_or(nd / 4.0);
    const long half = static_cast<long>(n / 2);

    std::array<Plane, 3> planes{Plane(n), Plane(n), Plane(n)};
    Canvas red(planes[0]);
    Canvas green(planes[1]);
    Canvas blue(planes[2]);

    const TreeStyle red_style{s.red_depth,     s.length_ratio,  s.bifurcation,
                              s.angle_sigma,   s.cpu_offshoots, s.mem_connectors};
    Tree{red, &green, &blue, half, 0, red_style, rng}.grow({0.0, 0.0}, 0.0, l0, 0);

    TreeStyle green_style = red_style;
    green_style.depth = p.green_depth;
    for (int i = 0; i < s.green_trees; ++i) {
        const long root = std::lround(static_cast<double>(i + 1) * nd /
                                      static_cast<double>(s.green_trees + 1));
        Tree{green, nullptr, nullptr, root, 0, green_style, rng}.grow({0.0, 0.0}, 0.0, 0.75 * l0,
                                                                      0);
    }

    const double spoke_length = 0.45 * nd;
    for (int k = 0; k < s.spokes; ++k) {
        const double angle = 2.0 * std::numbers::pi * k / static_cast<double>(s.spokes);
        blue.segment(half, half, {0.0, 0.0},
                     {-spoke_length * std::sin(angle), spoke_length * std::cos(angle)}, 0.5);
    }
    return finalize_patch(planes, "fractal");
}

}  // namespace slicevis
