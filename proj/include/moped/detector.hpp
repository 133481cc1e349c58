#pragma once

#include "moped/margins.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace moped {

struct DetectorConfig {
    std::size_t bandwidth = 0;  ///< G, the length of each moving window
    std::size_t rank = 0;       ///< k, exceedances kept per window
    double eta = 0.4;           ///< relative radius of the local-maximum neighbourhood

    /// Throws unless 1 <= k <= G, 0 < eta < 1 and 2G <= n.
    void validate(std::size_t n) const;

    /// floor(eta * G): the integer half-width of the eta-neighbourhood.
    std::size_t neighbourhood() const noexcept;
};

/// T(G, t) for t = G, ..., n - G (1-based), stored from t = G upward.
struct DetectorTrace {
    std::vector<double> values;
    DetectorConfig config;

    std::size_t first_time() const noexcept { return config.bandwidth; }
    std::size_t time_at(std::size_t i) const noexcept { return config.bandwidth + i; }
    double at_time(std::size_t t) const { return values.at(t - config.bandwidth); }
    double max() const noexcept;
};

/// A series reduced to what the detector needs: the off-diagonal tail terms
/// X_i X_j / R^2 of every row (pairs i < j, row-major) and the rows ordered by
/// decreasing radius with ties going to the earlier row.
///
/// Preparing once and reusing it across permutations and (G, k) settings
/// avoids recomputing the terms and the radius order.
class PreparedSeries {
public:
    explicit PreparedSeries(const MultivariateSeries& series);

    std::size_t length() const noexcept { return length_; }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t pairs() const noexcept { return pairs_; }
    std::span<const double> terms(std::size_t row) const noexcept {
        return {terms_.data() + row * pairs_, pairs_};
    }
    const Vector& radii() const noexcept { return radii_; }

    /// rank_of_time[t] for the series whose t-th row is original row order[t];
    /// an empty `order` means the identity. Ranks follow decreasing radius,
    /// ties broken by the earlier time in the reordered series.
    std::vector<std::size_t> ranks(std::span<const std::size_t> order) const;
    /// ranks() together with its inverse expressed in original rows.
    struct RankMaps {
        std::vector<std::size_t> rank_of_time;
        std::vector<std::size_t> row_of_rank;
    };
    RankMaps rank_maps(std::span<const std::size_t> order) const;
    std::span<const double> all_terms() const noexcept { return terms_; }

private:
    std::size_t length_;
    std::size_t dimension_;
    std::size_t pairs_;
    std::vector<double> terms_;
    Vector radii_;
    std::vector<std::size_t> by_radius_;
    // [begin, end) ranges in by_radius_ whose radii are exactly equal
    std::vector<std::pair<std::size_t, std::size_t>> tie_groups_;
};

/// MOSUM detector: T(G,t) is the Frobenius norm of the difference between the
/// off-diagonal TPDM estimates on (t-G, t] and (t, t+G], each using that
/// window's k largest radii. Runs in O(n (log n + d^2)).
DetectorTrace detector_trace(const MultivariateSeries& series, const DetectorConfig& config);

/// Same, on the series reordered so that time t holds original row order[t].
DetectorTrace detector_trace(const PreparedSeries& series, const DetectorConfig& config,
                             std::span<const std::size_t> order = {});

/// Eta-criterion: every t with T(t) > threshold that is the maximum of T over
/// {s : |s - t| <= eta G}. Contiguous runs of tied maximisers collapse to their
/// mid-point (rounded down). The returned points carry no p-value.
ChangePointSet select_changes(const DetectorTrace& trace, double threshold);

}  // namespace moped
