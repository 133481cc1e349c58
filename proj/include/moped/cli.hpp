#pragma once

#include "moped/simulate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace moped::cli {

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

struct RunConfig {
    std::string mode;  ///< detect | detect-multiscale | simulate | evaluate | benchmark
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path trace_prefix;  ///< detect modes; defaults to the output path stem
    std::filesystem::path truth;         ///< simulate sidecar / evaluate input
    std::filesystem::path estimate;      ///< evaluate input
    std::vector<double> bandwidths;
    std::vector<double> ranks;  ///< < 1: fraction of G, otherwise absolute
    double eta = 0.4;
    double alpha = 0.05;
    std::size_t permutations = 200;
    std::uint64_t seed = 0;
    bool pareto = false;  ///< input already on Pareto(2) margins; skip the rank transform
    std::size_t stride = 1;
    std::size_t threads = 1;
    std::size_t length = 0;  ///< evaluate: series length override

    ScenarioSpec scenario;
    std::string margin = "pareto2";

    std::vector<std::size_t> sizes{10000, 20000};
    std::size_t dimension = 4;
    std::size_t repeats = 3;
};

/// Parse argv and dispatch; never throws. Messages go to `err`, and
/// anything meant for stdout (results without --output, help) to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Execute an already-parsed configuration; throws moped::Error on failure.
void execute(const RunConfig& config, std::ostream& out);

}  // namespace moped::cli
