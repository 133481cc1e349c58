#include "moped/calibrate.hpp"

#include "moped/error.hpp"
#include "moped/parallel.hpp"
#include "moped/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace moped {

void PermutationConfig::validate() const {
    if (permutations == 0) {
        throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
    }
}

std::size_t threshold_order(std::size_t permutations, double alpha) {
    const double position = (1.0 - alpha) * static_cast<double>(permutations + 1);
    const auto order = static_cast<std::size_t>(std::ceil(position - 1e-9));
    return std::clamp<std::size_t>(order, 1, permutations);
}

double null_threshold(std::span<const double> maxima, double alpha) {
    if (maxima.empty()) {
        throw Error(ErrorCode::EmptyResults, "no permutation maxima");
    }
    std::vector<double> sorted(maxima.begin(), maxima.end());
    const auto idx = threshold_order(sorted.size(), alpha) - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
    return sorted[idx];
}

std::vector<std::size_t> permutation_order(std::size_t n, std::uint64_t seed, std::size_t m) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(seed, m);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

NullStatistics permutation_null(const PreparedSeries& series, const DetectorConfig& config,
                                const PermutationConfig& pconfig) {
    pconfig.validate();
    config.validate(series.length());

    NullStatistics null;
    null.maxima.assign(pconfig.permutations, 0.0);
    parallel_for(pconfig.permutations, pconfig.threads, [&](std::size_t m) {
        const auto order = permutation_order(series.length(), pconfig.seed, m);
        null.maxima[m] = detector_trace(series, config, order).max();
    });
    null.threshold = null_threshold(null.maxima, pconfig.alpha);
    return null;
}

double p_value(double height, const NullStatistics& null) {
    const auto exceed = std::count_if(null.maxima.begin(), null.maxima.end(),
                                      [height](double m) { return m >= height; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(null.maxima.size()) + 1.0);
}

MopedResult run_moped(const PreparedSeries& series, const DetectorConfig& config,
                      const PermutationConfig& pconfig) {
    MopedResult result;
    result.trace = detector_trace(series, config);
    result.null = permutation_null(series, config, pconfig);
    result.changes = select_changes(result.trace, result.null.threshold);
    for (auto& cp : result.changes) {
        cp.p_value = p_value(cp.height, result.null);
    }
    return result;
}

ChangePointSet moped_changes(const MultivariateSeries& series, const DetectorConfig& config,
                             const PermutationConfig& pconfig) {
    return run_moped(PreparedSeries(series), config, pconfig).changes;
}

}  // namespace moped
