#pragma once

#include "moped/detector.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace moped {

struct PermutationConfig {
    std::size_t permutations = 200;  ///< M
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t threads = 1;  ///< 0 = all hardware threads; results do not depend on it

    void validate() const;
};

/// Maxima of the detector over M row permutations and the threshold taken from them.
struct NullStatistics {
    std::vector<double> maxima;  ///< indexed by permutation m
    double threshold = 0.0;
};

/// The ceil((1 - alpha)(M + 1))-th smallest maximum, clamped to [1, M].
double null_threshold(std::span<const double> maxima, double alpha);

/// Index (1-based) of the order statistic used by null_threshold.
std::size_t threshold_order(std::size_t permutations, double alpha);

/// Permutation m shuffles whole rows with a generator seeded from (seed, m).
std::vector<std::size_t> permutation_order(std::size_t n, std::uint64_t seed, std::size_t m);

NullStatistics permutation_null(const PreparedSeries& series, const DetectorConfig& config,
                                const PermutationConfig& pconfig);

/// (1 + #{m : maxima[m] >= height}) / (M + 1).
double p_value(double height, const NullStatistics& null);

/// Everything a single-scale run produces.
struct MopedResult {
    DetectorTrace trace;
    NullStatistics null;
    ChangePointSet changes;
};

/// Detector trace, permutation threshold, eta-criterion selection and p-values.
MopedResult run_moped(const PreparedSeries& series, const DetectorConfig& config,
                      const PermutationConfig& pconfig);

ChangePointSet moped_changes(const MultivariateSeries& series, const DetectorConfig& config,
                             const PermutationConfig& pconfig);

}  // namespace moped
