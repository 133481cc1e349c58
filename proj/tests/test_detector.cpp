#include <catch_amalgamated.hpp>

#include "oracles.hpp"

#include "moped/calibrate.hpp"
#include "moped/detector.hpp"
#include "moped/error.hpp"
#include "moped/margins.hpp"
#include "moped/simulate.hpp"

#include <random>

using Catch::Matchers::WithinAbs;
using moped::DetectorConfig;
using moped::DetectorTrace;
using moped::Matrix;
using moped::MultivariateSeries;

namespace {

DetectorTrace make_trace(std::vector<double> values, std::size_t g, double eta = 0.4) {
    DetectorTrace t;
    t.values = std::move(values);
    t.config = DetectorConfig{g, 1, eta};
    return t;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("trace covers t = G .. n - G") {
    std::mt19937_64 rng(1);
    const Matrix x = oracle::pareto_noise(100, 3, rng);
    const auto trace = moped::detector_trace(MultivariateSeries(x), {20, 5, 0.4});
    CHECK(trace.values.size() == 61);
    CHECK(trace.first_time() == 20);
    CHECK(trace.time_at(60) == 80);
    const auto exact = moped::detector_trace(MultivariateSeries(x.topRows(40)), {20, 5, 0.4});
    CHECK(exact.values.size() == 1);
}

TEST_CASE("sliding detector matches the per-window oracle") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t d = 2 + rng() % 4;
        const std::size_t n = 40 + rng() % 400;
        const std::size_t g = 1 + rng() % (n / 2);
        const std::size_t k = 1 + rng() % g;
        const Matrix x = oracle::pareto_noise(n, d, rng);
        const auto trace = moped::detector_trace(MultivariateSeries(x), {g, k, 0.4});
        CHECK(max_abs_diff(trace.values, oracle::detector(x, g, k)) < 1e-10);
    }
}

TEST_CASE("n = 2000, d = 3, G = 200, k = 20 against the oracle") {
    std::mt19937_64 rng(41);
    const Matrix x = oracle::pareto_noise(2000, 3, rng);
    const auto trace = moped::detector_trace(MultivariateSeries(x), {200, 20, 0.4});
    CHECK(max_abs_diff(trace.values, oracle::detector(x, 200, 20)) < 1e-10);
}

TEST_CASE("detector on a reordering matches the oracle on the reordered rows, with radius ties") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 10; ++rep) {
        // integer-valued entries produce many exactly tied radii
        Matrix x(120, 3);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = 1.0 + static_cast<double>(rng() % 4);
        }
        const moped::PreparedSeries prepared{MultivariateSeries(x)};
        const auto order = moped::permutation_order(120, 5, static_cast<std::size_t>(rep));
        const std::size_t g = 10 + rng() % 40;
        const std::size_t k = 1 + rng() % g;
        const auto trace = moped::detector_trace(prepared, {g, k, 0.4}, order);
        CHECK(max_abs_diff(trace.values, oracle::detector(oracle::permute_rows(x, order), g, k)) < 1e-10);
    }
}

TEST_CASE("period-G repetition gives a flat zero trace") {
    std::mt19937_64 rng(2);
    const std::size_t g = 50;
    const Matrix block = oracle::pareto_noise(g, 3, rng);
    Matrix x(4 * g, 3);
    for (int b = 0; b < 4; ++b) x.middleRows(b * g, g) = block;
    const auto trace = moped::detector_trace(MultivariateSeries(x), {g, 10, 0.4});
    for (const double v : trace.values) CHECK(v < 1e-12);
}

TEST_CASE("a dependence change produces a peak near the change") {
    moped::ScenarioSpec spec;
    spec.n = 7000;
    spec.change_points = {2000, 5000};
    const auto sim = moped::generate_scenario(spec, 3);
    const auto series = moped::rank_transform_pareto2(moped::RawSeries(sim.values));
    const auto trace = moped::detector_trace(series, {1000, 100, 0.4});
    std::size_t best = 0;
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        if (trace.time_at(i) <= 3500 && trace.values[i] > trace.values[best]) best = i;
    }
    CHECK(std::abs(static_cast<long>(trace.time_at(best)) - 2000L) <= 400);
}

TEST_CASE("configuration errors") {
    std::mt19937_64 rng(4);
    const MultivariateSeries s(oracle::pareto_noise(99, 2, rng));
    try {
        moped::detector_trace(s, {50, 5, 0.4});
        FAIL("expected SeriesTooShort");
    } catch (const moped::Error& e) {
        CHECK(e.code() == moped::ErrorCode::SeriesTooShort);
        CHECK(std::string(e.what()).find("series too short for bandwidth") != std::string::npos);
    }
    try {
        moped::detector_trace(s, {10, 11, 0.4});
        FAIL("expected RankTooLarge");
    } catch (const moped::Error& e) {
        CHECK(e.code() == moped::ErrorCode::RankTooLarge);
    }
    CHECK_THROWS_AS(moped::detector_trace(s, {10, 5, 1.0}), moped::Error);
}

TEST_CASE("neighbourhood radius") {
    CHECK(DetectorConfig{1500, 1, 0.4}.neighbourhood() == 600);
    CHECK(DetectorConfig{1000, 1, 0.4}.neighbourhood() == 400);
    CHECK(DetectorConfig{7, 1, 0.4}.neighbourhood() == 2);
}

TEST_CASE("eta-criterion") {
    SECTION("nothing above the threshold") {
        const auto t = make_trace(std::vector<double>(30, 0.5), 10);
        CHECK(moped::select_changes(t, 1.0).empty());
    }
    SECTION("single peak") {
        std::vector<double> v(40, 0.1);
        v[17] = 2.0;
        v[16] = v[18] = 1.5;
        const auto cps = moped::select_changes(make_trace(v, 10), 1.0);
        REQUIRE(cps.size() == 1);
        CHECK(cps[0].tau == 27);
        CHECK(cps[0].height == 2.0);
        CHECK(cps[0].bandwidth == 10);
        CHECK_FALSE(cps[0].p_value.has_value());
    }
    SECTION("plateau collapses to its mid-point") {
        std::vector<double> v(40, 0.1);
        for (std::size_t i = 12; i <= 15; ++i) v[i] = 3.0;
        const auto cps = moped::select_changes(make_trace(v, 10), 1.0);
        REQUIRE(cps.size() == 1);
        CHECK(cps[0].tau == 10 + 13);
    }
    SECTION("peaks closer than eta G keep only the larger") {
        std::vector<double> v(60, 0.1);
        v[20] = 2.0;
        v[23] = 3.0;  // eta G = 4
        v[40] = 2.5;
        const auto cps = moped::select_changes(make_trace(v, 10), 1.0);
        REQUIRE(cps.size() == 2);
        CHECK(cps[0].tau == 33);
        CHECK(cps[1].tau == 50);
    }
    SECTION("maxima at the edges of the trace") {
        std::vector<double> v(30, 0.1);
        v.front() = 2.0;
        v.back() = 2.0;
        const auto cps = moped::select_changes(make_trace(v, 10), 1.0);
        REQUIRE(cps.size() == 2);
        CHECK(cps[0].tau == 10);
        CHECK(cps[1].tau == 39);
    }
}

TEST_CASE("selected points exceed the threshold and dominate their neighbourhood") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t g = 5 + rng() % 30;
        std::vector<double> v(1 + rng() % 200);
        // coarse values so ties occur
        for (auto& x : v) x = std::round(u(rng) * 6.0) / 6.0;
        const auto trace = make_trace(v, g);
        const double c = u(rng);
        const auto cps = moped::select_changes(trace, c);
        const auto h = static_cast<long>(trace.config.neighbourhood());
        for (const auto& cp : cps) {
            const long i = static_cast<long>(cp.tau - g);
            CHECK(v[static_cast<std::size_t>(i)] > c);
            for (long s = std::max(0L, i - h); s <= std::min<long>(static_cast<long>(v.size()) - 1, i + h); ++s) {
                CHECK(v[static_cast<std::size_t>(s)] <= v[static_cast<std::size_t>(i)]);
            }
        }
        for (std::size_t a = 1; a < cps.size(); ++a) CHECK(cps[a].tau > cps[a - 1].tau);
    }
}
