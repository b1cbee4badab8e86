#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "slicevis/copula.hpp"
#include "slicevis/error.hpp"
#include "slicevis/kpi_sim.hpp"

using namespace slicevis;

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
}

NoiseConfig quiet() {
    NoiseConfig n;
    n.alpha = 0.0;
    n.contamination_prob = 0.0;
    n.outlier_prob = 0.0;
    return n;
}

ProfileTable zero_sigma() {
    auto t = ProfileTable::defaults();
    for (auto& s : t.slices)
        for (auto& m : s->kpis) m.sigma = 0.0;
    return t;
}

}  // namespace

TEST_SUITE("slice sampling") {
    TEST_CASE("default mix intervals") {
        const ClassMix mix;
        CHECK(sample_slice_type(0.05, mix) == SliceType::eMBB);
        CHECK(sample_slice_type(0.25, mix) == SliceType::URLLC);
        CHECK(sample_slice_type(0.999, mix) == SliceType::mIoT);
        CHECK(sample_slice_type(0.0, mix) == SliceType::eMBB);
        CHECK(sample_slice_type(0.2, mix) == SliceType::URLLC);
        CHECK(sample_slice_type(0.31, mix) == SliceType::mIoT);
    }

    TEST_CASE("invalid mix is a configuration error") {
        CHECK_THROWS_AS(sample_slice_type(0.5, ClassMix{{0.5, 0.5, 0.5}}), ConfigError);
        CHECK_THROWS_AS(sample_slice_type(0.5, ClassMix{{-0.1, 0.4, 0.7}}), ConfigError);
    }

    TEST_CASE("slice codes are stable") {
        CHECK(static_cast<int>(SliceType::eMBB) == 0);
        CHECK(static_cast<int>(SliceType::URLLC) == 1);
        CHECK(static_cast<int>(SliceType::mIoT) == 2);
    }
}

TEST_SUITE("copula") {
    TEST_CASE("identity model gives uncorrelated uniforms") {
        const auto model = CorrelationModel::identity();
        Rng rng(11, Stream::kpi);
        constexpr std::size_t n = 100000;
        std::array<std::vector<double>, kNumKpis> cols;
        for (std::size_t i = 0; i < n; ++i) {
            const auto u = gaussian_copula_sample(model, rng);
            for (std::size_t k = 0; k < kNumKpis; ++k) {
                CHECK_UNARY(u[k] > 0.0);
                CHECK_UNARY(u[k] < 1.0);
                cols[k].push_back(u[k]);
            }
        }
        for (std::size_t a = 0; a < kNumKpis; ++a)
            for (std::size_t b = a + 1; b < kNumKpis; ++b)
                CHECK(std::abs(pearson(cols[a], cols[b])) <= 0.02);
    }

    TEST_CASE("delay-jitter rank correlation matches the Gaussian copula closed form") {
        const auto model = CorrelationModel::defaults();
        const double rho = model.matrix()(0, 1);
        CHECK(rho == doctest::Approx(0.7).epsilon(1e-3));
        const double expected = 6.0 / std::numbers::pi * std::asin(rho / 2.0);

        Rng rng(12, Stream::kpi);
        std::vector<double> d, j;
        for (int i = 0; i < 100000; ++i) {
            const auto u = gaussian_copula_sample(model, rng);
            d.push_back(u[0]);
            j.push_back(u[1]);
        }
        const double spearman = pearson(ranks(d), ranks(j));
        CHECK(std::abs(spearman - expected) <= 0.03);
    }

    TEST_CASE("fixed stream gives identical output") {
        const auto model = CorrelationModel::defaults();
        Rng a(5, Stream::kpi, 3);
        Rng b(5, Stream::kpi, 3);
        CHECK(gaussian_copula_sample(model, a) == gaussian_copula_sample(model, b));
    }

    TEST_CASE("matrix validation and repair") {
        CorrelationMatrix m = CorrelationMatrix::Identity();
        m(0, 1) = 0.5;
        CHECK_THROWS_AS(CorrelationModel{m}, ConfigError);  // asymmetric
        m(1, 0) = 0.5;
        m(2, 2) = 0.9;
        CHECK_THROWS_AS(CorrelationModel{m}, ConfigError);  // diagonal
        m(2, 2) = 1.0;
        m(3, 4) = m(4, 3) = 1.5;
        CHECK_THROWS_AS(CorrelationModel{m}, ConfigError);  // range

        // Pairwise-consistent but jointly impossible: a~b, a~c strongly, b~c strongly negative.
        const auto bad = CorrelationModel::from_pairs(
            {{Kpi::delay, Kpi::jitter, 0.95}, {Kpi::delay, Kpi::loss, 0.95},
             {Kpi::jitter, Kpi::loss, -0.95}});
        CHECK(bad.repaired());
        const auto& r = bad.matrix();
        CHECK((r - r.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < 10; ++i) CHECK(r(i, i) == 1.0);
        CHECK(r.cwiseAbs().maxCoeff() <= 1.0);
        Eigen::SelfAdjointEigenSolver<CorrelationMatrix> eig(r);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        CHECK_FALSE(CorrelationModel::defaults().repaired());
    }
}

TEST_SUITE("kpi vectors") {
    TEST_CASE("URLLC nominal values come back exactly with zero spread") {
        const auto table = zero_sigma();
        Rng rng(1, Stream::kpi);
        const auto k = sample_kpi_vector(SliceType::URLLC, table, quiet(),
                                         CorrelationModel::defaults(), rng);
        CHECK(*k[Kpi::delay] == 0.5);
        CHECK(*k[Kpi::jitter] == 0.1);
        CHECK(*k[Kpi::loss] == 0.001);
        CHECK(*k[Kpi::throughput] == 5.0);
    }

    TEST_CASE("variation stays inside +-alpha of mu") {
        const auto table = zero_sigma();
        auto noise = quiet();
        noise.alpha = 0.15;
        Rng rng(2, Stream::kpi);
        for (auto t : kAllSlices)
            for (int i = 0; i < 2000; ++i) {
                const auto k = sample_kpi_vector(t, table, noise, CorrelationModel::defaults(), rng);
                for (std::size_t j = 0; j < kNumKpis; ++j) {
                    const double mu = table.at(t).kpis[j].mu;
                    CHECK(std::abs(*k.values[j] - mu) <= 0.15 * std::abs(mu) + 1e-12);
                }
            }
    }

    TEST_CASE("eMBB means without contamination") {
        auto noise = NoiseConfig{};
        noise.contamination_prob = 0.0;
        const auto table = ProfileTable::defaults();
        Rng rng(3, Stream::kpi);
        double delay = 0, tput = 0;
        constexpr int n = 100000;
        for (int i = 0; i < n; ++i) {
            const auto k = sample_kpi_vector(SliceType::eMBB, table, noise,
                                             CorrelationModel::defaults(), rng);
            delay += *k[Kpi::delay];
            tput += *k[Kpi::throughput];
        }
        CHECK(std::abs(delay / n - 10.0) <= 0.2);
        CHECK(std::abs(tput / n - 200.0) <= 2.0);
    }

    TEST_CASE("eMBB means with default contamination follow the mixture") {
        // Oracle: with probability 1-p the eMBB profile, otherwise one of the
        // other two uniformly. Variation and copula are mean-preserving.
        const auto table = ProfileTable::defaults();
        const NoiseConfig noise;
        const double p = noise.contamination_prob;
        auto mixture = [&](Kpi k) {
            return (1 - p) * table.at(SliceType::eMBB)[k].mu +
                   p / 2 * (table.at(SliceType::URLLC)[k].mu + table.at(SliceType::mIoT)[k].mu);
        };
        Rng rng(4, Stream::kpi);
        double delay = 0, tput = 0;
        constexpr int n = 100000;
        for (int i = 0; i < n; ++i) {
            const auto k = sample_kpi_vector(SliceType::eMBB, table, noise,
                                             CorrelationModel::defaults(), rng);
            delay += *k[Kpi::delay];
            tput += *k[Kpi::throughput];
        }
        CHECK(mixture(Kpi::delay) == doctest::Approx(10.305));
        CHECK(std::abs(delay / n - mixture(Kpi::delay)) <= 0.2);
        CHECK(std::abs(tput / n - mixture(Kpi::throughput)) <= 2.5);
    }

    TEST_CASE("contamination never changes the slice passed in, only the profile") {
        auto noise = quiet();
        noise.contamination_prob = 1.0;
        const auto table = zero_sigma();
        Rng rng(9, Stream::kpi);
        for (int i = 0; i < 200; ++i) {
            const auto k = sample_kpi_vector(SliceType::URLLC, table, noise,
                                             CorrelationModel::defaults(), rng);
            const double d = *k[Kpi::delay];
            CHECK((d == 10.0 || d == 50.0));
        }
    }

    TEST_CASE("outliers only inflate one KPI by a Weibull factor") {
        auto noise = quiet();
        noise.outlier_prob = 1.0;
        const auto table = zero_sigma();
        Rng rng(10, Stream::kpi);
        for (int i = 0; i < 500; ++i) {
            const auto k = sample_kpi_vector(SliceType::eMBB, table, noise,
                                             CorrelationModel::defaults(), rng);
            int changed = 0;
            for (std::size_t j = 0; j < kNumKpis; ++j) {
                const double mu = table.at(SliceType::eMBB).kpis[j].mu;
                if (*k.values[j] != mu) {
                    ++changed;
                    const auto d = kpi_domain(static_cast<Kpi>(j));
                    const double factor = *k.values[j] / mu;
                    if (*k.values[j] > d.lo && *k.values[j] < d.hi) CHECK(factor > 1.0);
                }
            }
            CHECK(changed <= 1);
        }
    }

    TEST_CASE("missing profile is a configuration error") {
        auto table = ProfileTable::defaults();
        table.slices[index_of(SliceType::mIoT)].reset();
        Rng rng(1, Stream::kpi);
        CHECK_THROWS_AS(sample_kpi_vector(SliceType::mIoT, table, NoiseConfig{},
                                          CorrelationModel::defaults(), rng),
                        ConfigError);
    }

    TEST_CASE("clamped domains hold under heavy noise") {
        auto table = ProfileTable::defaults();
        for (auto& s : table.slices)
            for (auto& m : s->kpis) m.sigma *= 20.0;
        NoiseConfig noise;
        noise.noise_scale = 0.3;
        Rng rng(8, Stream::kpi);
        for (int i = 0; i < 5000; ++i) {
            const auto t = kAllSlices[static_cast<std::size_t>(i % 3)];
            auto k = sample_kpi_vector(t, table, noise, CorrelationModel::defaults(), rng);
            k = apply_measurement_model(k, t, table, noise, rng);
            for (std::size_t j = 0; j < kNumKpis; ++j) {
                if (!k.values[j]) continue;
                const auto d = kpi_domain(static_cast<Kpi>(j));
                CHECK(std::isfinite(*k.values[j]));
                CHECK(*k.values[j] >= d.lo);
                CHECK(*k.values[j] <= d.hi);
            }
        }
    }
}

TEST_SUITE("measurement model") {
    TEST_CASE("beta = 1 drops everything") {
        NoiseConfig noise;
        noise.beta = 1.0;
        Rng rng(1, Stream::kpi);
        const auto table = ProfileTable::defaults();
        const auto clean = sample_kpi_vector(SliceType::eMBB, table, noise,
                                             CorrelationModel::defaults(), rng);
        const auto k = apply_measurement_model(clean, SliceType::eMBB, table, noise, rng);
        CHECK(k.missing_count() == kNumKpis);
    }

    TEST_CASE("missing fraction converges to beta") {
        const NoiseConfig noise;
        const auto table = ProfileTable::defaults();
        Rng rng(2, Stream::kpi);
        std::size_t missing = 0;
        constexpr std::size_t n = 100000;
        for (std::size_t i = 0; i < n; ++i) {
            const auto clean = sample_kpi_vector(SliceType::mIoT, table, noise,
                                                 CorrelationModel::defaults(), rng);
            missing += apply_measurement_model(clean, SliceType::mIoT, table, noise, rng)
                           .missing_count();
        }
        const double frac = static_cast<double>(missing) / static_cast<double>(n * kNumKpis);
        CHECK(frac >= 0.045);
        CHECK(frac <= 0.055);
    }

    TEST_CASE("noise std is noise_scale times sigma") {
        NoiseConfig noise;
        noise.beta = 0.0;
        noise.noise_scale = 0.2;
        const auto table = ProfileTable::defaults();
        Rng rng(3, Stream::kpi);
        double s = 0, ss = 0;
        constexpr int n = 100000;
        for (int i = 0; i < n; ++i) {
            const auto clean = sample_kpi_vector(SliceType::eMBB, table, noise,
                                                 CorrelationModel::defaults(), rng);
            const auto k = apply_measurement_model(clean, SliceType::eMBB, table, noise, rng);
            const double d = *k[Kpi::delay] - *clean[Kpi::delay];
            s += d;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n - (s / n) * (s / n));
        CHECK(std::abs(sd - 0.30) <= 0.02);
    }

    TEST_CASE("missingness is independent of slice type") {
        const NoiseConfig noise;
        const auto table = ProfileTable::defaults();
        std::array<std::array<double, 2>, 3> obs{};
        constexpr int n = 100000;
        Rng rng(4, Stream::kpi);
        for (int i = 0; i < n; ++i) {
            const auto t = kAllSlices[static_cast<std::size_t>(i % 3)];
            const auto clean =
                sample_kpi_vector(t, table, noise, CorrelationModel::defaults(), rng);
            const auto k = apply_measurement_model(clean, t, table, noise, rng);
            const double m = static_cast<double>(k.missing_count());
            obs[index_of(t)][0] += m;
            obs[index_of(t)][1] += kNumKpis - m;
        }
        double total = 0;
        std::array<double, 3> rows{};
        std::array<double, 2> cols{};
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 2; ++c) {
                rows[r] += obs[r][c];
                cols[c] += obs[r][c];
                total += obs[r][c];
            }
        double chi2 = 0;
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 2; ++c) {
                const double e = rows[r] * cols[c] / total;
                chi2 += (obs[r][c] - e) * (obs[r][c] - e) / e;
            }
        const double p = boost::math::cdf(
            boost::math::complement(boost::math::chi_squared_distribution<double>(2.0), chi2));
        CHECK(p > 0.01);
    }
}

TEST_SUITE("normalization") {
    const auto bounds = default_bounds(ProfileTable::defaults());

    TEST_CASE("affine endpoints and clamp") {
        KpiVector k;
        k[Kpi::delay] = 0.0;
        k[Kpi::jitter] = bounds[Kpi::jitter].hi;
        k[Kpi::loss] = 1e6;
        k[Kpi::rssi] = -120.0;
        k[Kpi::snr] = 50.0;
        const auto n = normalize(k, bounds);
        CHECK(n[Kpi::delay] == 0.0);
        CHECK(n[Kpi::jitter] == 1.0);
        CHECK(n[Kpi::loss] == 1.0);
        CHECK(n[Kpi::rssi] == 0.0);
        CHECK(n[Kpi::snr] == 1.0);
    }

    TEST_CASE("decided delay bounds put eMBB nominal at 0.125") {
        CHECK(bounds[Kpi::delay].lo == 0.0);
        CHECK(bounds[Kpi::delay].hi == 80.0);
        KpiVector k;
        k[Kpi::delay] = 10.0;
        CHECK(normalize(k, bounds)[Kpi::delay] == doctest::Approx(0.125).epsilon(1e-15));
    }

    TEST_CASE("all missing gives zeros and a full mask") {
        const auto n = normalize(KpiVector{}, bounds);
        CHECK(n.missing.all());
        for (double v : n.values) CHECK(v == 0.0);
    }

    TEST_CASE("monotone per coordinate and idempotent on unit bounds") {
        std::array<Interval, kNumKpis> unit{};
        unit.fill({0.0, 1.0});
        const NormalizationBounds ub(unit);
        Rng rng(77, Stream::kpi);
        for (int trial = 0; trial < 2000; ++trial) {
            KpiVector a, b;
            for (std::size_t j = 0; j < kNumKpis; ++j) {
                const auto& iv = bounds.all()[j];
                const double span = iv.hi - iv.lo;
                const double x = iv.lo + rng.uniform(-0.5, 1.5) * span;
                a.values[j] = x;
                b.values[j] = x + rng.uniform() * span;
            }
            const auto na = normalize(a, bounds);
            const auto nb = normalize(b, bounds);
            KpiVector again;
            for (std::size_t j = 0; j < kNumKpis; ++j) {
                CHECK(na.values[j] <= nb.values[j]);
                CHECK(na.values[j] >= 0.0);
                CHECK(na.values[j] <= 1.0);
                again.values[j] = na.values[j];
            }
            CHECK(normalize(again, ub).values == na.values);
        }
    }

    TEST_CASE("invalid bounds rejected") {
        std::array<Interval, kNumKpis> b{};
        b.fill({0.0, 1.0});
        b[3] = {2.0, 2.0};
        CHECK_THROWS_AS(NormalizationBounds{b}, ConfigError);
    }
}

TEST_SUITE("rng") {
    TEST_CASE("streams are keyed, not sequential") {
        Rng a(1, Stream::kpi, 10);
        Rng b(1, Stream::kpi, 10);
        Rng c(1, Stream::kpi, 11);
        Rng d(1, Stream::fractal, 10);
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
        CHECK(x != d.next());
    }

    TEST_CASE("uniform ranges") {
        Rng r(3, Stream::kpi);
        for (int i = 0; i < 10000; ++i) {
            const double u = r.uniform();
            CHECK(u >= 0.0);
            CHECK(u < 1.0);
            const double o = r.uniform_open();
            CHECK(o > 0.0);
            CHECK(o < 1.0);
            CHECK(r.below(7) < 7u);
        }
    }
}
