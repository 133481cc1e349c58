#pragma once

#include "moped/calibrate.hpp"
#include "moped/detector.hpp"
#include "moped/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace moped {

/// Strictly increasing ranks k_1 < ... < k_J, all <= G.
struct RankLadder {
    std::vector<std::size_t> ranks;

    void validate(std::size_t bandwidth) const;
};

/// Strictly increasing bandwidths with ranks given as fractions of each G
/// (entries >= 1 are taken as absolute ranks).
struct BandwidthLadder {
    std::vector<std::size_t> bandwidths;
    std::vector<double> rank_fractions{0.2, 0.1, 0.05};

    void validate(std::size_t n) const;
    /// Ranks for bandwidth G: round(fraction * G), at least 1, sorted and deduplicated.
    RankLadder ranks_for(std::size_t bandwidth) const;
};

/// round(fraction * G), at least 1; a value >= 1 is an absolute rank.
std::size_t resolve_rank(double fraction, std::size_t bandwidth);

/// Bottom-up pooling. Every point of levels[0] is accepted; then, level by
/// level and in increasing location within a level, a candidate from level h
/// is accepted iff its distance to every accepted point is >= exclusion[h].
/// The result is sorted by location.
ChangePointSet bottom_up_merge(std::span<const ChangePointSet> levels, std::span<const double> exclusion);

struct MergeResult {
    ChangePointSet changes;
    std::vector<MopedResult> runs;  ///< one per (G, k), in processing order
};

/// Multi-threshold MOPED at a single bandwidth.
MergeResult merge_over_ranks(const PreparedSeries& series, std::size_t bandwidth, const RankLadder& ladder,
                             double eta, const PermutationConfig& pconfig);

/// Multiscale, multi-threshold MOPED.
MergeResult merge_over_bandwidths(const PreparedSeries& series, const BandwidthLadder& ladder, double eta,
                                  const PermutationConfig& pconfig);

}  // namespace moped
