#include "moped/cli.hpp"

#include "moped/calibrate.hpp"
#include "moped/detector.hpp"
#include "moped/error.hpp"
#include "moped/io.hpp"
#include "moped/margins.hpp"
#include "moped/merge.hpp"
#include "moped/metrics.hpp"
#include "moped/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace moped::cli {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_usage_error(ErrorCode code) {
    return code == ErrorCode::InvalidArgument || code == ErrorCode::InvalidSpec;
}

void write_json(const std::filesystem::path& path, const json& doc, std::ostream& out) {
    if (path.empty()) {
        out << doc.dump(2) << '\n';
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
    }
    file << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

std::size_t as_bandwidth(double value) {
    if (!(value >= 1.0) || std::floor(value) != value) {
        throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive integers");
    }
    return static_cast<std::size_t>(value);
}

json change_points_json(const ChangePointSet& changes) {
    json arr = json::array();
    for (const auto& cp : changes) {
        json item;
        item["tau"] = cp.tau;
        item["height"] = cp.height;
        item["p_value"] = cp.p_value ? json(*cp.p_value) : json(nullptr);
        item["G"] = cp.bandwidth;
        item["k"] = cp.rank;
        arr.push_back(std::move(item));
    }
    return arr;
}

std::filesystem::path trace_path(const RunConfig& config, std::size_t g, std::size_t k) {
    std::filesystem::path prefix = config.trace_prefix;
    if (prefix.empty()) {
        prefix = config.output.empty() ? std::filesystem::path("moped") : config.output;
        prefix.replace_extension();
        prefix += ".trace";
    }
    prefix += "_G" + std::to_string(g) + "_k" + std::to_string(k) + ".csv";
    return prefix;
}

MultivariateSeries load_series(const RunConfig& config) {
    if (config.input.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--input is required");
    }
    auto table = read_csv(config.input, config.stride);
    if (config.pareto) {
        return MultivariateSeries(std::move(table.values));
    }
    return rank_transform_pareto2(RawSeries(std::move(table.values)));
}

json config_echo(const RunConfig& config) {
    json echo;
    echo["input"] = config.input.string();
    echo["bandwidths"] = config.bandwidths;
    echo["ranks"] = config.ranks;
    echo["eta"] = config.eta;
    echo["alpha"] = config.alpha;
    echo["permutations"] = config.permutations;
    echo["seed"] = config.seed;
    echo["pareto"] = config.pareto;
    echo["stride"] = config.stride;
    return echo;
}

json run_json(const MopedResult& run, const std::filesystem::path& trace_file) {
    json item;
    item["G"] = run.trace.config.bandwidth;
    item["k"] = run.trace.config.rank;
    item["threshold"] = run.null.threshold;
    item["trace_max"] = run.trace.max();
    item["trace_file"] = trace_file.filename().string();
    return item;
}

void run_detect(const RunConfig& config, std::ostream& out) {
    const auto start = Clock::now();
    if (config.bandwidths.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "detect takes exactly one bandwidth (-G)");
    }
    if (config.ranks.size() != 1) {
        throw Error(ErrorCode::InvalidArgument, "detect takes exactly one rank (-k)");
    }
    const auto series = load_series(config);
    const std::size_t g = as_bandwidth(config.bandwidths.front());
    const DetectorConfig dconfig{g, resolve_rank(config.ranks.front(), g), config.eta};
    const PermutationConfig pconfig{config.permutations, config.alpha, config.seed, config.threads};
    pconfig.validate();
    dconfig.validate(series.length());

    const auto result = run_moped(PreparedSeries(series), dconfig, pconfig);
    const auto trace_file = trace_path(config, dconfig.bandwidth, dconfig.rank);
    write_trace_csv(trace_file, result.trace);

    json doc;
    doc["mode"] = "detect";
    doc["n"] = series.length();
    doc["d"] = series.dimension();
    doc["change_points"] = change_points_json(result.changes);
    doc["runs"] = json::array({run_json(result, trace_file)});
    doc["config"] = config_echo(config);
    doc["wall_time_seconds"] = seconds_since(start);
    write_json(config.output, doc, out);
}

void run_detect_multiscale(const RunConfig& config, std::ostream& out) {
    const auto start = Clock::now();
    const auto series = load_series(config);
    BandwidthLadder ladder;
    for (const double g : config.bandwidths) {
        ladder.bandwidths.push_back(as_bandwidth(g));
    }
    ladder.rank_fractions = config.ranks;
    ladder.validate(series.length());
    const PermutationConfig pconfig{config.permutations, config.alpha, config.seed, config.threads};
    pconfig.validate();

    const auto result = merge_over_bandwidths(PreparedSeries(series), ladder, config.eta, pconfig);
    json runs = json::array();
    for (const auto& run : result.runs) {
        const auto file = trace_path(config, run.trace.config.bandwidth, run.trace.config.rank);
        write_trace_csv(file, run.trace);
        json item = run_json(run, file);
        item["change_points"] = change_points_json(run.changes);
        runs.push_back(std::move(item));
    }

    json doc;
    doc["mode"] = "detect-multiscale";
    doc["n"] = series.length();
    doc["d"] = series.dimension();
    doc["change_points"] = change_points_json(result.changes);
    doc["runs"] = std::move(runs);
    doc["config"] = config_echo(config);
    doc["wall_time_seconds"] = seconds_since(start);
    write_json(config.output, doc, out);
}

void run_simulate(const RunConfig& config, std::ostream& out) {
    ScenarioSpec spec = config.scenario;
    spec.margin = parse_margin(config.margin);
    const auto sim = generate_scenario(spec, config.seed);

    std::vector<std::string> header;
    for (std::size_t c = 0; c < spec.d; ++c) {
        header.push_back("X" + std::to_string(c + 1));
    }
    if (config.output.empty()) {
        write_csv(out, sim.values, header);
    } else {
        write_csv(config.output, sim.values, header);
    }

    json truth;
    truth["n"] = spec.n;
    truth["d"] = spec.d;
    truth["change_points"] = sim.change_points;
    truth["seed"] = config.seed;
    json sj;
    sj["scenario"] = spec.scenario;
    sj["q"] = sim.change_points.size();
    sj["rho"] = spec.rho;
    sj["omega_seed"] = spec.omega_seed;
    sj["nu"] = spec.nu;
    sj["margin"] = std::string(to_string(spec.margin));
    json laws = json::array();
    for (const auto& law : sim.laws) {
        json lj;
        lj["family"] = std::string(to_string(law.family));
        json rows = json::array();
        for (Eigen::Index r = 0; r < law.omega.rows(); ++r) {
            rows.push_back(std::vector<double>(law.omega.row(r).begin(), law.omega.row(r).end()));
        }
        lj["omega"] = std::move(rows);
        laws.push_back(std::move(lj));
    }
    sj["segment_laws"] = std::move(laws);
    truth["spec"] = std::move(sj);

    std::filesystem::path truth_path = config.truth;
    if (truth_path.empty() && !config.output.empty()) {
        truth_path = config.output;
        truth_path.replace_extension(".truth.json");
    }
    if (!truth_path.empty()) {
        write_json(truth_path, truth, out);
    }
}

std::vector<std::size_t> change_list(const json& doc, const std::string& what) {
    if (!doc.contains("change_points") || !doc["change_points"].is_array()) {
        throw Error(ErrorCode::ParseError, what + " has no change_points array");
    }
    std::vector<std::size_t> taus;
    for (const auto& item : doc["change_points"]) {
        if (item.is_number_integer()) {
            taus.push_back(item.get<std::size_t>());
        } else if (item.is_object() && item.contains("tau")) {
            taus.push_back(item["tau"].get<std::size_t>());
        } else {
            throw Error(ErrorCode::ParseError, what + ": change points must be integers or {\"tau\": ...}");
        }
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    return taus;
}

void run_evaluate(const RunConfig& config, std::ostream& out) {
    if (config.truth.empty() || config.estimate.empty()) {
        throw Error(ErrorCode::InvalidArgument, "evaluate needs --truth and --estimate");
    }
    const json truth = read_json(config.truth);
    const json estimate = read_json(config.estimate);
    std::size_t n = config.length;
    if (n == 0 && truth.contains("n")) n = truth["n"].get<std::size_t>();
    if (n == 0 && estimate.contains("n")) n = estimate["n"].get<std::size_t>();
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "series length unknown; pass --length");
    }
    if (truth.contains("n") && estimate.contains("n") &&
        truth["n"].get<std::size_t>() != estimate["n"].get<std::size_t>()) {
        throw Error(ErrorCode::LengthMismatch, "truth and estimate cover different lengths");
    }
    const Segmentation t(n, change_list(truth, "truth"));
    const Segmentation e(n, change_list(estimate, "estimate"));
    const auto vm = v_measure_components(t, e);

    json doc;
    doc["n"] = n;
    doc["q"] = t.boundaries().size();
    doc["q_hat"] = e.boundaries().size();
    doc["q_diff"] = static_cast<long>(e.boundaries().size()) - static_cast<long>(t.boundaries().size());
    doc["covering_metric"] = covering_metric(t, e);
    doc["v_measure"] = vm.v;
    doc["homogeneity"] = vm.homogeneity;
    doc["completeness"] = vm.completeness;
    write_json(config.output, doc, out);
}

void run_benchmark(const RunConfig& config, std::ostream& out) {
    const std::size_t g = config.bandwidths.empty() ? 1000 : as_bandwidth(config.bandwidths.front());
    const std::size_t k = config.ranks.empty() ? 100 : resolve_rank(config.ranks.front(), g);
    std::ostringstream table;
    table << "n,G,k,d,permutations,seconds\n";
    for (const auto n : config.sizes) {
        ScenarioSpec spec;
        spec.n = n;
        spec.d = config.dimension;
        spec.q = 0;
        spec.rho = 0.5;
        const MultivariateSeries series(generate_scenario(spec, config.seed).values);
        const PreparedSeries prepared(series);
        const DetectorConfig dconfig{g, k, config.eta};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < std::max<std::size_t>(config.repeats, 1); ++r) {
            const auto start = Clock::now();
            (void)detector_trace(prepared, dconfig);
            if (config.permutations > 0) {
                (void)permutation_null(prepared, dconfig,
                                       PermutationConfig{config.permutations, config.alpha, config.seed, config.threads});
            }
            best = std::min(best, seconds_since(start));
        }
        table << n << ',' << g << ',' << k << ',' << config.dimension << ',' << config.permutations << ','
              << format_double(best) << '\n';
    }
    if (config.output.empty()) {
        out << table.str();
    } else {
        std::ofstream file(config.output);
        if (!file) {
            throw Error(ErrorCode::IoError, "cannot open '" + config.output.string() + "' for writing");
        }
        file << table.str();
    }
}

void add_detect_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--input,-i", config.input, "CSV panel, one row per time point")->required();
    cmd->add_option("--output,-o", config.output, "result JSON (stdout if omitted)");
    cmd->add_option("--trace-prefix", config.trace_prefix, "prefix for detector trace CSVs");
    cmd->add_option("--eta", config.eta, "local-maximum neighbourhood as a fraction of G");
    cmd->add_option("--alpha", config.alpha, "permutation test level");
    cmd->add_option("--permutations,-M", config.permutations, "number of permutations");
    cmd->add_option("--seed", config.seed, "permutation seed");
    cmd->add_option("--stride", config.stride, "keep every stride-th row");
    cmd->add_flag("--pareto", config.pareto, "input already on Pareto(2) margins");
    cmd->add_option("--threads", config.threads, "worker threads (0 = all cores)");
}

}  // namespace

void execute(const RunConfig& config, std::ostream& out) {
    if (config.mode == "detect") {
        run_detect(config, out);
    } else if (config.mode == "detect-multiscale") {
        run_detect_multiscale(config, out);
    } else if (config.mode == "simulate") {
        run_simulate(config, out);
    } else if (config.mode == "evaluate") {
        run_evaluate(config, out);
    } else if (config.mode == "benchmark") {
        run_benchmark(config, out);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown mode '" + config.mode + "'");
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"Change point detection in pairwise extremal dependence"};
    app.require_subcommand(1);

    auto* detect = app.add_subcommand("detect", "single-scale detection with a permutation threshold");
    add_detect_options(detect, config);
    detect->add_option("-G,--bandwidths", config.bandwidths, "bandwidth G")->required();
    detect->add_option("-k,--ranks", config.ranks, "rank k (< 1: fraction of G)");

    auto* multi = app.add_subcommand("detect-multiscale", "pooled detection over bandwidths and ranks");
    add_detect_options(multi, config);
    multi->add_option("-G,--bandwidths", config.bandwidths, "increasing bandwidths")->required();
    multi->add_option("-k,--ranks", config.ranks, "ranks (< 1: fractions of G)");

    auto* sim = app.add_subcommand("simulate", "generate a simulation scenario");
    sim->add_option("--scenario", config.scenario.scenario, "1 or 2");
    sim->add_option("-n", config.scenario.n, "length");
    sim->add_option("-d", config.scenario.d, "dimension");
    sim->add_option("-q", config.scenario.q, "number of equally spaced change points");
    sim->add_option("--changes", config.scenario.change_points, "explicit change locations");
    sim->add_option("--rho", config.scenario.rho, "scenario 1 correlation");
    sim->add_option("--omega-seed", config.scenario.omega_seed, "scenario 2 correlation matrix seed");
    sim->add_option("--nu", config.scenario.nu, "t-copula degrees of freedom");
    sim->add_option("--margin", config.margin, "uniform | pareto2 | gaussian");
    sim->add_option("--seed", config.seed, "sampling seed");
    sim->add_option("--output,-o", config.output, "CSV output (stdout if omitted)");
    sim->add_option("--truth", config.truth, "truth JSON (default: output path with extension .truth.json)");

    auto* eval = app.add_subcommand("evaluate", "covering metric and V-measure of an estimate");
    eval->add_option("--truth", config.truth, "JSON with change_points (and n)")->required();
    eval->add_option("--estimate", config.estimate, "JSON with change_points")->required();
    eval->add_option("--length", config.length, "series length if not in the JSON files");
    eval->add_option("--output,-o", config.output, "metrics JSON (stdout if omitted)");

    auto* bench = app.add_subcommand("benchmark", "detector timing for increasing n");
    bench->add_option("--sizes", config.sizes, "series lengths");
    bench->add_option("-d", config.dimension, "dimension");
    bench->add_option("-G,--bandwidths", config.bandwidths, "bandwidth");
    bench->add_option("-k,--ranks", config.ranks, "rank");
    bench->add_option("--permutations,-M", config.permutations, "permutations per run (0 = trace only)");
    bench->add_option("--repeats", config.repeats, "timing repeats (minimum is reported)");
    bench->add_option("--seed", config.seed, "data seed");
    bench->add_option("--threads", config.threads, "worker threads (0 = all cores)");
    bench->add_option("--output,-o", config.output, "timing CSV (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    config.mode = app.get_subcommands().front()->get_name();
    if (config.mode == "detect" && config.ranks.empty()) {
        config.ranks = {0.05};
    }
    if (config.mode == "detect-multiscale" && config.ranks.empty()) {
        config.ranks = {0.2, 0.1, 0.05};
    }
    if (config.mode == "benchmark") {
        if (!app.get_subcommand("benchmark")->get_option("--permutations")->count()) {
            config.permutations = 0;
        }
    }

    try {
        execute(config, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_usage_error(e.code()) ? kExitUsage : kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("moped");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace moped::cli
