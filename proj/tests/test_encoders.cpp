#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "slicevis/config.hpp"
#include "slicevis/dataset.hpp"
#include "slicevis/encoders.hpp"
#include "slicevis/error.hpp"

using namespace slicevis;

namespace {

NormalizedKpiVector tilde(std::initializer_list<std::pair<Kpi, double>> set) {
    NormalizedKpiVector v;
    for (auto [k, x] : set) v[k] = x;
    return v;
}

double mean_abs_diff(const ImagePatch& a, const ImagePatch& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.data()[i] - b.data()[i]);
    return s / static_cast<double>(a.size());
}

PhysicalParams raw_physical() {
    PhysicalParams p;
    p.smooth_sigma = {0.0, 0.0, 0.0};
    return p;
}

}  // namespace

TEST_SUITE("perlin2") {
    const Permutation ref;

    TEST_CASE("zero on lattice points") {
        CHECK(perlin2(3.0, 7.0, ref) == 0.0);
        for (int x = -5; x < 5; ++x)
            for (int y = -5; y < 5; ++y) CHECK(perlin2(x, y, ref) == 0.0);
    }

    TEST_CASE("bounded by sqrt(2)/2 over random probes") {
        Rng rng(42, Stream::kpi);
        double worst = 0.0;
        for (int i = 0; i < 1000000; ++i) {
            const double v = perlin2(rng.uniform(-64, 64), rng.uniform(-64, 64), ref);
            worst = std::max(worst, std::abs(v));
        }
        CHECK(worst <= 0.7072);
        CHECK(worst > 0.3);
    }

    TEST_CASE("different permutation seeds give different fields") {
        const Permutation a(1), b(2);
        double diff = 0.0;
        for (int i = 0; i < 64; ++i)
            for (int j = 0; j < 64; ++j) {
                const double x = 0.37 * i + 0.11, y = 0.37 * j + 0.23;
                diff = std::max(diff, std::abs(perlin2(x, y, a) - perlin2(x, y, b)));
            }
        CHECK(diff > 0.1);
    }

    TEST_CASE("continuity") {
        Rng rng(7, Stream::kpi);
        for (int i = 0; i < 10000; ++i) {
            const double x = rng.uniform(-20, 20), y = rng.uniform(-20, 20);
            CHECK(std::abs(perlin2(x + 1e-7, y, ref) - perlin2(x, y, ref)) < 1e-5);
        }
    }

    TEST_CASE("permutation tables") {
        std::array<std::uint8_t, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = static_cast<std::uint8_t>(255 - i);
        CHECK_NOTHROW(Permutation{t});
        t[3] = t[4];
        CHECK_THROWS_AS(Permutation{t}, ConfigError);
        CHECK(Permutation(9) == Permutation(9));
        CHECK_FALSE(Permutation(9) == Permutation(10));
    }
}

TEST_SUITE("physical") {
    TEST_CASE("all-zero vector is black") {
        PhysicalParams p;
        const auto img = encode_physical(NormalizedKpiVector{}, SliceType::eMBB, p, 16);
        for (double v : img.data()) CHECK(v == 0.0);
    }

    TEST_CASE("radial term at centre and corner") {
        constexpr std::size_t n = 17;
        const auto img = encode_physical(tilde({{Kpi::delay, 1.0}, {Kpi::rssi, 1.0}}),
                                         SliceType::eMBB, raw_physical(), n);
        const double sigma = n / 4.0 * 1.5;
        const double h = n / 2.0 - 0.5;
        CHECK(img.at(8, 8, 0) == doctest::Approx(1.0));
        const double corner = std::exp(-(2 * h * h) / (2 * sigma * sigma));
        CHECK(img.at(0, 0, 0) == doctest::Approx(corner).epsilon(1e-12));
        CHECK(img.at(n - 1, 0, 0) == doctest::Approx(corner).epsilon(1e-12));
        CHECK(img.at(n - 1, n - 1, 0) == doctest::Approx(corner).epsilon(1e-12));
        // Green and blue carry nothing for this vector.
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                CHECK(img.at(x, y, 1) == 0.0);
                CHECK(img.at(x, y, 2) == 0.0);
            }
    }

    TEST_CASE("blue ramp rows") {
        constexpr std::size_t n = 16;
        const auto img = encode_physical(tilde({{Kpi::loss, 1.0}, {Kpi::rssi, 1.0}}),
                                         SliceType::eMBB, raw_physical(), n);
        for (std::size_t x = 0; x < n; ++x) {
            CHECK(img.at(x, 0, 2) == 0.0);
            CHECK(img.at(x, n - 1, 2) == doctest::Approx(std::pow((n - 1.0) / n, 2)));
        }
    }

    TEST_CASE("diagonal cross term") {
        constexpr std::size_t n = 16;
        const auto base = tilde({{Kpi::delay, 0.5}, {Kpi::loss, 0.5}, {Kpi::rssi, 1.0}});
        auto with_j = base;
        with_j[Kpi::jitter] = 0.5;
        auto p = raw_physical();
        p.f_j_gain = 0.0;  // isolate the cross term from the jitter wave
        const auto a = encode_physical(base, SliceType::eMBB, p, n);
        const auto b = encode_physical(with_j, SliceType::eMBB, p, n);
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t c = 0; c < 3; ++c) {
                    const double expected = x == y ? 0.125 : 0.0;
                    CHECK(b.at(x, y, c) - a.at(x, y, c) ==
                          doctest::Approx(expected).epsilon(1e-12));
                }
    }

    TEST_CASE("rssi shift wraps the patch horizontally") {
        constexpr std::size_t n = 16;
        const auto strong = tilde({{Kpi::delay, 0.7}, {Kpi::loss, 0.4}, {Kpi::jitter, 0.3},
                                   {Kpi::rssi, 1.0}});
        auto weak = strong;
        weak[Kpi::rssi] = 0.5;  // floor(4 * 0.5) = 2 pixels
        const auto a = encode_physical(strong, SliceType::URLLC, raw_physical(), n);
        const auto b = encode_physical(weak, SliceType::URLLC, raw_physical(), n);
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t c = 0; c < 3; ++c)
                    CHECK(b.at((x + 2) % n, y, c) == a.at(x, y, c));
    }

    TEST_CASE("blue row means are non-decreasing") {
        Rng rng(3, Stream::kpi);
        for (int trial = 0; trial < 50; ++trial) {
            const auto v = tilde({{Kpi::loss, rng.uniform(0.01, 1.0)}, {Kpi::rssi, rng.uniform()},
                                  {Kpi::throughput, rng.uniform()}});
            const auto img = encode_physical(v, kAllSlices[trial % 3], PhysicalParams{}, 16);
            double prev = -1.0;
            for (std::size_t y = 0; y < 16; ++y) {
                double m = 0;
                for (std::size_t x = 0; x < 16; ++x) m += img.at(x, y, 2);
                CHECK(m >= prev - 1e-12);
                prev = m;
            }
        }
    }

    TEST_CASE("slice smoothing differs") {
        const auto v = tilde({{Kpi::delay, 0.3}, {Kpi::jitter, 0.4}, {Kpi::retrans, 0.6},
                              {Kpi::throughput, 0.5}, {Kpi::rssi, 0.6}});
        const auto a = encode_physical(v, SliceType::eMBB, PhysicalParams{}, 16);
        const auto b = encode_physical(v, SliceType::URLLC, PhysicalParams{}, 16);
        CHECK(mean_abs_diff(a, b) > 0.0);
    }

    TEST_CASE("gaussian blur preserves constants") {
        Plane p(8);
        for (std::size_t y = 0; y < 8; ++y)
            for (std::size_t x = 0; x < 8; ++x) p(x, y) = 0.4;
        const auto q = gaussian_blur(p, 1.3);
        for (double v : q.data()) CHECK(v == doctest::Approx(0.4));
    }
}

TEST_SUITE("perlin encoder") {
    TEST_CASE("derived settings") {
        PerlinParams p;
        auto s = perlin_settings(NormalizedKpiVector{}, p);
        CHECK(s.frequency[0] == 10.0);
        CHECK(s.frequency[1] == 8.0);
        CHECK(s.frequency[2] == 6.0);
        CHECK(s.octaves == 2);
        CHECK(s.persistence == 1.5);
        s = perlin_settings(tilde({{Kpi::throughput, 1.0}}), p);
        CHECK(s.frequency[1] == 16.0);
        CHECK(s.octaves == 5);
        s = perlin_settings(tilde({{Kpi::snr, 1.0}, {Kpi::loss, 0.5}}), p);
        CHECK(s.persistence == 2.5);
        CHECK(s.frequency[2] == 9.0);
    }

    TEST_CASE("red frequency strictly increasing in delay + jitter") {
        PerlinParams p;
        double prev = -1;
        for (int i = 0; i <= 20; ++i) {
            const double f =
                perlin_settings(tilde({{Kpi::delay, i / 20.0}, {Kpi::jitter, i / 40.0}}), p)
                    .frequency[0];
            CHECK(f > prev);
            prev = f;
        }
    }

    TEST_CASE("determinism and seed dependence") {
        const auto v = tilde({{Kpi::delay, 0.3}, {Kpi::throughput, 0.5}, {Kpi::snr, 0.2}});
        PerlinParams a;
        a.permutation = Permutation(1);
        PerlinParams b;
        b.permutation = Permutation(2);
        CHECK(encode_perlin(v, a, 16) == encode_perlin(v, a, 16));
        CHECK(mean_abs_diff(encode_perlin(v, a, 16), encode_perlin(v, b, 16)) > 0.0);
    }

    TEST_CASE("intensities stay in range without clamping saturation") {
        Rng rng(5, Stream::kpi);
        PerlinParams p;
        for (int trial = 0; trial < 200; ++trial) {
            NormalizedKpiVector v;
            for (auto& x : v.values) x = rng.uniform();
            const auto img = encode_perlin(v, p, 16);
            for (double x : img.data()) {
                CHECK(x > 0.0);
                CHECK(x < 1.0);
            }
        }
    }
}

TEST_SUITE("wallpaper") {
    TEST_CASE("basis functions") {
        CHECK(wallpaper_phi1(0.25, 0.0) == doctest::Approx(1.0));
        CHECK(wallpaper_phi1(0.0, 1.2) == doctest::Approx(1.0));
        CHECK(wallpaper_phi1(0.0, 2.2) == doctest::Approx(0.0));
        CHECK(wallpaper_phi2(0.2, 1.3) == 1.0);
        CHECK(wallpaper_phi2(0.6, 0.3) == 0.0);
        CHECK(wallpaper_phi3(0.0, 0.0) == 1.0);
        CHECK(wallpaper_phi3(1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
    }

    TEST_CASE("period substitution") {
        WallpaperParams p;
        auto per = wallpaper_periods(tilde({{Kpi::delay, 0.6}, {Kpi::throughput, 0.99}}), p, 16);
        CHECK(per.p1x == 5.0);
        CHECK(per.p2y == 9.0);
        CHECK(per.p1y == 4.0);
        CHECK(per.p2x == 4.0);
        CHECK(per.p3x == 8.0);
        CHECK(per.p3y == 8.0);
        double prev = 0;
        for (int i = 0; i <= 100; ++i) {
            const double p1 =
                wallpaper_periods(tilde({{Kpi::delay, i / 100.0}}), p, 16).p1x;
            CHECK(p1 >= prev);
            prev = p1;
        }
    }

    TEST_CASE("zero resources leave the pure basis sum") {
        // Oracle: evaluate the basis sum directly with default weights.
        WallpaperParams p;
        constexpr std::size_t n = 16;
        const auto v = tilde({{Kpi::delay, 0.2}, {Kpi::throughput, 0.4}, {Kpi::rssi, 0.5}});
        const auto img = encode_wallpaper(v, p, n);
        const double p1x = 3, p2y = 5, p3 = 8, scale = 1.1 - 0.5;
        const double c = (n - 1) / 2.0;
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                const std::array<double, 3> phi{
                    wallpaper_phi1(x / p1x, y / 4.0), wallpaper_phi2(x / 4.0, y / p2y),
                    wallpaper_phi3((x - c) / p3 * scale, (y - c) / p3 * scale)};
                for (std::size_t ch = 0; ch < 3; ++ch) {
                    double s = 0;
                    for (std::size_t k = 0; k < 3; ++k) s += p.weights[ch][k] * phi[k];
                    CHECK(img.at(x, y, ch) == doctest::Approx(std::clamp(s, 0.0, 1.0)));
                }
            }
    }

    TEST_CASE("channel specialization") {
        WallpaperParams p;
        for (std::size_t c = 0; c < 3; ++c) {
            for (std::size_t k = 0; k < 3; ++k)
                if (k != c) CHECK(p.weights[c][c] > p.weights[c][k]);
        }
    }
}

TEST_SUITE("fractal") {
    TEST_CASE("derived settings") {
        FractalParams p;
        auto s = fractal_settings(tilde({{Kpi::delay, 1.0}, {Kpi::snr, 1.0}}), p);
        CHECK(s.red_depth == 6);
        CHECK(s.spokes == 5);
        CHECK(s.length_ratio == doctest::Approx(0.8));
        CHECK(s.fractal_dimension == doctest::Approx(1.6));
        s = fractal_settings(NormalizedKpiVector{}, p);
        CHECK(s.length_ratio == 0.6);
        CHECK(s.angle_sigma == 0.0);
        CHECK(s.bifurcation == doctest::Approx(std::numbers::pi / 2 * 0.8));  // jitter snap
        s = fractal_settings(tilde({{Kpi::jitter, 0.5}, {Kpi::loss, 1.0},
                                    {Kpi::throughput, 0.7}, {Kpi::cpu, 0.7},
                                    {Kpi::mem, 0.34}}),
                             p);
        CHECK(s.bifurcation == doctest::Approx(std::numbers::pi / 6));
        CHECK(s.angle_sigma == doctest::Approx(0.2 * std::numbers::pi));
        CHECK(s.green_trees == 3);
        CHECK(s.cpu_offshoots == 2);
        CHECK(s.mem_connectors == 1);
    }

    TEST_CASE("zero loss renders a mirror-symmetric red tree") {
        for (std::size_t n : {17u, 33u, 65u}) {
            for (double delay : {0.0, 0.4, 1.0}) {
                const auto v = tilde({{Kpi::delay, delay}, {Kpi::jitter, 0.4}});
                Rng rng(1, Stream::fractal);
                const auto img = encode_fractal(v, FractalParams{}, n, rng);
                double left = 0, right = 0, total = 0;
                for (std::size_t y = 0; y < n; ++y)
                    for (std::size_t x = 0; x < n; ++x) {
                        CHECK(img.at(x, y, 0) == img.at(n - 1 - x, y, 0));
                        if (x < n / 2) left += img.at(x, y, 0);
                        if (x > n / 2) right += img.at(x, y, 0);
                        total += img.at(x, y, 0);
                    }
                CHECK(left == doctest::Approx(right).epsilon(1e-12));
                CHECK(total > 0.0);
            }
        }
    }

    TEST_CASE("deterministic for a fixed stream, varies across streams when lossy") {
        const auto v = tilde({{Kpi::delay, 0.5}, {Kpi::jitter, 0.4}, {Kpi::loss, 0.8},
                              {Kpi::throughput, 0.5}, {Kpi::snr, 0.5}});
        Rng a(3, Stream::fractal, 1), b(3, Stream::fractal, 1), c(3, Stream::fractal, 2);
        const auto ia = encode_fractal(v, FractalParams{}, 32, a);
        CHECK(ia == encode_fractal(v, FractalParams{}, 32, b));
        CHECK(mean_abs_diff(ia, encode_fractal(v, FractalParams{}, 32, c)) > 0.0);
    }
}

TEST_SUITE("finalize") {
    TEST_CASE("clamp and quantize") {
        std::array<Plane, 3> raw{Plane(4), Plane(4), Plane(4)};
        raw[0](0, 0) = 1.7;
        raw[1](0, 0) = -0.2;
        raw[2](0, 0) = 0.5;
        const auto img = finalize_patch(raw, "test");
        CHECK(img.at(0, 0, 0) == 1.0);
        CHECK(img.at(0, 0, 1) == 0.0);
        CHECK(quantize(img.at(0, 0, 2)) == 128);
        CHECK(quantize(1.0) == 255);
        CHECK(quantize(0.0) == 0);
        for (int i = 0; i < 255; ++i) CHECK(quantize(i / 255.0) <= quantize((i + 1) / 255.0));
    }

    TEST_CASE("non-finite input names the encoder") {
        std::array<Plane, 3> raw{Plane(4), Plane(4), Plane(4)};
        raw[1](2, 3) = std::nan("");
        try {
            finalize_patch(raw, "wallpaper");
            FAIL("expected EncodingError");
        } catch (const EncodingError& e) {
            CHECK(std::string(e.what()).find("wallpaper") != std::string::npos);
        }
    }
}

TEST_SUITE("all encoders") {
    const EncoderSuite suite{};

    // Which tilde inputs each encoder reads. Everything else must be ignored.
    bool uses(Method m, Kpi k) {
        switch (m) {
            case Method::physical:
                return k == Kpi::delay || k == Kpi::jitter || k == Kpi::loss ||
                       k == Kpi::throughput || k == Kpi::retrans || k == Kpi::rssi;
            case Method::perlin:
                return k == Kpi::delay || k == Kpi::jitter || k == Kpi::loss ||
                       k == Kpi::throughput || k == Kpi::snr;
            case Method::wallpaper:
                return k == Kpi::delay || k == Kpi::throughput || k == Kpi::rssi ||
                       k == Kpi::cpu || k == Kpi::mem;
            case Method::fractal:
                return k == Kpi::delay || k == Kpi::jitter || k == Kpi::loss ||
                       k == Kpi::throughput || k == Kpi::snr || k == Kpi::cpu ||
                       k == Kpi::mem;
        }
        return false;
    }

    TEST_CASE("sensitivity to a 0.5 change in each used input") {
        NormalizedKpiVector base;
        base.values.fill(0.2);
        base[Kpi::jitter] = 0.02;
        for (auto m : kAllMethods) {
            Rng r0(1, Stream::fractal, 0);
            const auto ref = suite.encode(m, base, SliceType::mIoT, r0);
            for (std::size_t k = 0; k < kNumKpis; ++k) {
                auto v = base;
                v.values[k] += 0.5;
                Rng r1(1, Stream::fractal, 0);
                const double d = mean_abs_diff(ref, suite.encode(m, v, SliceType::mIoT, r1));
                INFO(method_name(m), " ", kpi_name(static_cast<Kpi>(k)));
                if (uses(m, static_cast<Kpi>(k)))
                    CHECK(d > 0.0);
                else
                    CHECK(d == 0.0);
            }
        }
    }

    TEST_CASE("range over random inputs") {
        Rng rng(10, Stream::kpi);
        for (int trial = 0; trial < 100; ++trial) {
            NormalizedKpiVector v;
            for (auto& x : v.values) x = rng.uniform();
            for (auto m : kAllMethods) {
                Rng fr(2, Stream::fractal, static_cast<std::uint64_t>(trial));
                const auto img = suite.encode(m, v, kAllSlices[trial % 3], fr);
                CHECK(img.side() == 16);
                for (double x : img.data()) {
                    CHECK(x >= 0.0);
                    CHECK(x <= 1.0);
                }
            }
        }
    }

    TEST_CASE("mean patches separate the slices") {
        // 300 samples per slice through the full pipeline. The smallest
        // distance measured at the default seed is about 2.3 (perlin eMBB-mIoT).
        const auto cfg = Config::defaults();
        std::array<std::array<std::vector<double>, kNumSlices>, 4> mean;
        for (auto& per : mean)
            for (auto& v : per) v.assign(16 * 16 * 3, 0.0);
        for (auto t : kAllSlices)
            for (std::uint64_t i = 0; i < 300; ++i) {
                const auto s = make_sample(cfg, i, t);
                for (auto m : kAllMethods) {
                    const auto& img = s.image(m);
                    for (std::size_t p = 0; p < img.size(); ++p)
                        mean[static_cast<std::size_t>(m)][index_of(t)][p] += img.data()[p] / 300.0;
                }
            }
        for (auto m : kAllMethods)
            for (std::size_t a = 0; a < kNumSlices; ++a)
                for (std::size_t b = a + 1; b < kNumSlices; ++b) {
                    double d2 = 0;
                    for (std::size_t p = 0; p < 16 * 16 * 3; ++p) {
                        const double d = mean[static_cast<std::size_t>(m)][a][p] -
                                         mean[static_cast<std::size_t>(m)][b][p];
                        d2 += d * d;
                    }
                    INFO(method_name(m), " ", a, "-", b, " L2=", std::sqrt(d2));
                    CHECK(std::sqrt(d2) > 1.0);
                }
    }
}
