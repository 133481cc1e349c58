#pragma once

#include "moped/margins.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace moped {

/// Empirical tail pairwise dependence matrix over one window.
struct TpdmEstimate {
    Matrix sigma;          ///< d x d, symmetric, nonnegative
    std::size_t k = 0;     ///< number of retained (extreme) observations
    double r0 = 0.0;       ///< smallest retained radius
    IndexRange window;     ///< 0-based half-open rows the estimate was computed on
};

/// Rows of `window` holding the k largest radii, ties going to the earlier
/// row. Returned in decreasing radius order.
std::vector<std::size_t> top_k_rows(const Vector& radii, IndexRange window, std::size_t k);

/// sigma_ij = (d/k) * sum over the k largest-radius rows of X_i X_j / R^2.
TpdmEstimate estimate_tpdm(const MultivariateSeries& series, IndexRange window, std::size_t k);

/// One estimate per segment of the partition induced by `changes` (1-based
/// change locations, strictly increasing, inside (0, n)). Each segment keeps
/// the observations whose radius exceeds its empirical `quantile`, i.e.
/// k = ceil((1 - quantile) * length), at least 1.
std::vector<TpdmEstimate> estimate_segment_tpdms(const MultivariateSeries& series,
                                                 std::span<const std::size_t> changes,
                                                 double quantile);

std::vector<TpdmEstimate> estimate_segment_tpdms(const MultivariateSeries& series,
                                                 const ChangePointSet& changes, double quantile);

/// Number of exceedances for a segment of `length` rows at the given radial quantile.
std::size_t exceedance_count(std::size_t length, double quantile);

}  // namespace moped
