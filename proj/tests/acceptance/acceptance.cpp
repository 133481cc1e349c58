// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "oracles.hpp"

#include "moped/calibrate.hpp"
#include "moped/cli.hpp"
#include "moped/detector.hpp"
#include "moped/margins.hpp"
#include "moped/merge.hpp"
#include "moped/metrics.hpp"
#include "moped/simulate.hpp"
#include "moped/tpdm.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace {

using moped::Matrix;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

moped::PreparedSeries prepare(const Matrix& raw) {
    return moped::PreparedSeries(moped::rank_transform_pareto2(moped::RawSeries(raw)));
}

struct Replication {
    std::size_t q_hat;
    double cm;
    double vm;
};

Replication score(std::size_t n, const std::vector<std::size_t>& truth, const moped::ChangePointSet& est) {
    const moped::Segmentation t(n, truth);
    const auto e = moped::segmentation_from(n, est);
    return {est.size(), moped::covering_metric(t, e), moped::v_measure(t, e)};
}

struct Summary {
    double exact = 0.0;  // fraction with q_hat == target
    double cm = 0.0;
    double vm = 0.0;
};

Summary summarise(const std::vector<Replication>& reps, std::size_t target) {
    Summary s;
    for (const auto& r : reps) {
        s.exact += r.q_hat == target ? 1.0 : 0.0;
        s.cm += r.cm;
        s.vm += r.vm;
    }
    const double m = static_cast<double>(reps.size());
    s.exact /= m;
    s.cm /= m;
    s.vm /= m;
    return s;
}

constexpr std::size_t kReplications = 50;

// Scenario replications with MOPED at (G, k) and the default calibration.
std::vector<Replication> moped_replications(moped::ScenarioSpec spec, std::size_t g, std::size_t k,
                                            std::uint64_t seed_base) {
    std::vector<Replication> reps;
    for (std::size_t r = 0; r < kReplications; ++r) {
        const auto sim = moped::generate_scenario(spec, seed_base + r);
        const auto prepared = prepare(sim.values);
        const auto res = moped::run_moped(prepared, {g, k, 0.4}, {200, 0.05, r, 1});
        reps.push_back(score(spec.n, sim.change_points, res.changes));
    }
    return reps;
}

Outcome criterion1() {
    std::mt19937_64 rng(2024);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 20 + rng() % 1981;
        const std::size_t d = 2 + rng() % 4;
        const std::size_t g = 1 + rng() % std::min<std::size_t>(300, n / 2);
        const std::size_t k = 1 + rng() % g;
        const Matrix x = oracle::pareto_noise(n, d, rng);
        const auto fast = moped::detector_trace(moped::MultivariateSeries(x), {g, k, 0.4}).values;
        const auto slow = oracle::detector(x, g, k);
        if (fast.size() != slow.size()) return {false, "trace length mismatch"};
        for (std::size_t t = 0; t < fast.size(); ++t) worst = std::max(worst, std::abs(fast[t] - slow[t]));
    }
    return {worst <= 1e-10, fmt("100 instances, max |fast - oracle| = %.3g (tol 1e-10)", worst)};
}

Outcome criterion2() {
    std::mt19937_64 rng(7);
    double trace_err = 0.0;
    bool symmetric = true;
    bool cauchy_schwarz = true;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = 2 + rng() % 500;
        const std::size_t d = 2 + rng() % 7;
        const Matrix x = oracle::pareto_noise(n, d, rng);
        const moped::MultivariateSeries s(x);
        std::size_t a = rng() % n;
        std::size_t b = rng() % n;
        if (a > b) std::swap(a, b);
        ++b;
        const std::size_t k = 1 + rng() % (b - a);
        const auto sig = moped::estimate_tpdm(s, {a, b}, k).sigma;
        trace_err = std::max(trace_err, std::abs(sig.trace() - static_cast<double>(d)));
        symmetric = symmetric && sig == sig.transpose();
        for (Eigen::Index p = 0; p < sig.rows(); ++p) {
            for (Eigen::Index q = 0; q < sig.cols(); ++q) {
                cauchy_schwarz = cauchy_schwarz && sig(p, q) * sig(p, q) <= sig(p, p) * sig(q, q) * (1.0 + 1e-12);
            }
        }
    }
    const Matrix z = oracle::pareto_noise(1000, 1, rng);
    Matrix dup(1000, 2);
    dup.col(0) = z.col(0);
    dup.col(1) = z.col(0);
    bool complete = true;
    for (const std::size_t k : {1, 37, 50, 999, 1000}) {
        complete = complete && moped::estimate_tpdm(moped::MultivariateSeries(dup), {0, 1000}, k).sigma(0, 1) == 1.0;
    }
    const bool pass = trace_err <= 1e-10 && symmetric && cauchy_schwarz && complete;
    return {pass, fmt("1000 windows: max |trace - d| = %.3g, symmetric %s, Cauchy-Schwarz %s, complete dependence = 1 %s",
                      trace_err, symmetric ? "yes" : "no", cauchy_schwarz ? "yes" : "no", complete ? "yes" : "no")};
}

Outcome criterion3() {
    moped::ScenarioSpec spec;
    spec.q = 1;
    const auto s = summarise(moped_replications(spec, 1500, 150, 3000), 1);
    const bool pass = s.exact >= 0.90 && s.cm >= 0.92 && s.vm >= 0.85;
    return {pass, fmt("scenario 1, q=1: frac(q_hat=1) = %.3f (>= 0.90), mean CM = %.4f (>= 0.92), mean VM = %.4f (>= 0.85)",
                      s.exact, s.cm, s.vm)};
}

Outcome criterion4() {
    moped::ScenarioSpec spec;
    spec.q = 0;
    const auto s = summarise(moped_replications(spec, 1500, 150, 4000), 0);
    return {s.exact >= 0.80, fmt("scenario 1, q=0: frac(q_hat=0) = %.3f (>= 0.80)", s.exact)};
}

Outcome criterion5() {
    moped::ScenarioSpec spec;
    spec.scenario = 2;
    spec.d = 8;
    spec.q = 1;
    spec.omega_seed = 1;
    const auto s = summarise(moped_replications(spec, 1500, 150, 5000), 1);
    const bool pass = s.exact >= 0.75 && s.cm >= 0.85;
    return {pass, fmt("scenario 2, d=8, q=1: frac(q_hat=1) = %.3f (>= 0.75), mean CM = %.4f (>= 0.85)", s.exact, s.cm)};
}

Outcome criterion6() {
    moped::ScenarioSpec spec;
    spec.q = 1;
    spec.rho = 0.2;
    const moped::BandwidthLadder ladder{{500, 1000, 1500}, {0.2, 0.1, 0.05}};
    std::vector<Replication> single;
    std::vector<Replication> multi;
    for (std::size_t r = 0; r < kReplications; ++r) {
        const auto sim = moped::generate_scenario(spec, 6000 + r);
        const auto prepared = prepare(sim.values);
        const moped::PermutationConfig pcfg{200, 0.05, r, 1};
        const auto fixed = moped::run_moped(prepared, {1500, 150, 0.4}, pcfg);
        single.push_back(score(spec.n, sim.change_points, fixed.changes));
        const auto merged = moped::merge_over_bandwidths(prepared, ladder, 0.4, pcfg);
        multi.push_back(score(spec.n, sim.change_points, merged.changes));
    }
    const auto a = summarise(single, 1);
    const auto b = summarise(multi, 1);
    return {b.cm - a.cm >= 0.02,
            fmt("rho=0.2: mean CM multiscale = %.4f, fixed (G=1500, k=150) = %.4f, gain = %.4f (>= 0.02)", b.cm, a.cm,
                b.cm - a.cm)};
}

Outcome criterion7() {
    moped::ScenarioSpec spec;
    spec.n = 7000;
    spec.change_points = {2000, 5000};
    std::size_t hits = 0;
    for (std::size_t r = 0; r < kReplications; ++r) {
        const auto sim = moped::generate_scenario(spec, 7000 + r);
        const auto res = moped::run_moped(prepare(sim.values), {1000, 100, 0.4}, {200, 0.05, r, 1});
        const auto est = moped::locations(res.changes);
        bool ok = est.size() == 2;
        for (std::size_t i = 0; ok && i < 2; ++i) {
            const long diff = static_cast<long>(est[i]) - static_cast<long>(spec.change_points[i]);
            ok = std::abs(diff) <= 400;
        }
        hits += ok ? 1 : 0;
    }
    const double frac = static_cast<double>(hits) / kReplications;
    return {frac >= 0.80, fmt("n=7000, changes {2000, 5000}: both detected within +-400 in %.3f of runs (>= 0.80)", frac)};
}

Outcome criterion8() {
    bool hand = true;
    const std::size_t n = 1000;
    const moped::Segmentation halves(n, {500});
    const moped::Segmentation single(n, {});
    hand = hand && moped::covering_metric(halves, halves) == 1.0 && moped::v_measure(halves, halves) == 1.0;
    hand = hand && std::abs(moped::covering_metric(halves, single) - 0.5) < 1e-12;
    hand = hand && std::abs(moped::covering_metric(single, halves) - 0.5) < 1e-12;
    const auto vm1 = moped::v_measure_components(halves, single);
    hand = hand && vm1.homogeneity == 0.0 && vm1.completeness == 1.0 && vm1.v == 0.0;
    const auto vm2 = moped::v_measure_components(single, halves);
    hand = hand && vm2.homogeneity == 1.0 && vm2.completeness == 0.0 && vm2.v == 0.0;
    const std::vector<long> diffs{-1, -1, 0, 1};
    hand = hand && moped::qhat_distribution(diffs).fractions == std::array<double, 5>{0.0, 0.5, 0.25, 0.25, 0.0};

    std::mt19937_64 rng(8);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t len = 2 + rng() % 49;
        auto draw = [&] {
            std::set<std::size_t> s;
            const std::size_t count = rng() % std::min<std::size_t>(len, 6);
            for (std::size_t c = 0; c < count; ++c) s.insert(1 + rng() % (len - 1));
            return std::vector<std::size_t>(s.begin(), s.end());
        };
        const auto t = draw();
        const auto e = draw();
        const moped::Segmentation st(len, t);
        const moped::Segmentation se(len, e);
        const auto vm = moped::v_measure_components(st, se);
        const auto ref = oracle::v_measure(len, t, e);
        worst = std::max({worst, std::abs(moped::covering_metric(st, se) - oracle::covering(len, t, e)),
                          std::abs(vm.homogeneity - std::clamp(ref.h, 0.0, 1.0)),
                          std::abs(vm.completeness - std::clamp(ref.c, 0.0, 1.0)), std::abs(vm.v - ref.v)});
    }
    return {hand && worst <= 1e-12,
            fmt("hand-computed examples %s, 500 random pairs max deviation = %.3g (tol 1e-12)", hand ? "ok" : "WRONG", worst)};
}

double time_detector(std::size_t n) {
    moped::ScenarioSpec spec;
    spec.n = n;
    spec.d = 4;
    const auto sim = moped::generate_scenario(spec, 9);
    const auto series = moped::rank_transform_pareto2(moped::RawSeries(sim.values));
    double best = 1e300;
    for (int r = 0; r < 20; ++r) {
        const auto start = Clock::now();
        const auto trace = moped::detector_trace(series, {1000, 100, 0.4});
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        if (trace.values.empty()) return 0.0;
        best = std::min(best, secs);
    }
    return best;
}

Outcome criterion9() {
    const double t1 = time_detector(10000);
    const double t2 = time_detector(20000);
    const double ratio = t2 / t1;
    return {ratio <= 2.4, fmt("d=4, G=1000, k=100, M=0: %.4fs at n=10000, %.4fs at n=20000, ratio %.3f (<= 2.4)", t1, t2,
                              ratio)};
}

std::string without_wall_time(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream kept;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find("\"wall_time_seconds\"") == std::string::npos) kept << line << '\n';
    }
    return kept.str();
}

Outcome criterion10() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "moped_acceptance";
    fs::create_directories(dir);
    const auto csv = (dir / "series.csv").string();
    std::ostringstream sink;
    if (moped::cli::run({"simulate", "-n", "5000", "-q", "1", "--seed", "10", "--output", csv}, sink, sink) != 0) {
        return {false, "simulate failed: " + sink.str()};
    }
    std::string outputs[2];
    for (int i = 0; i < 2; ++i) {
        const auto out = dir / ("run" + std::to_string(i) + ".json");
        const int code = moped::cli::run({"detect", "--input", csv, "-G", "1500", "-k", "150", "--seed", "42",
                                          "--output", out.string(), "--trace-prefix", (dir / "trace").string()},
                                         sink, sink);
        if (code != 0) return {false, "detect failed: " + sink.str()};
        outputs[i] = without_wall_time(out);
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    return {same, fmt("two detect runs with seed 42: result JSON %s apart from wall time",
                      same ? "byte-identical" : "DIFFERS")};
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
        {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10},
    };
    int failures = 0;
    for (const auto& [id, run] : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
                  << fmt("  [%.1fs]", secs) << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
