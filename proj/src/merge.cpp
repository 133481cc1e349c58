#include "moped/merge.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace moped {

void RankLadder::validate(std::size_t bandwidth) const {
    if (ranks.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a rank ladder needs at least two ranks");
    }
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        if (ranks[j] == 0 || ranks[j] > bandwidth) {
            throw Error(ErrorCode::RankTooLarge, "rank " + std::to_string(ranks[j]) + " outside [1, G]");
        }
        if (j > 0 && ranks[j] <= ranks[j - 1]) {
            throw Error(ErrorCode::InvalidArgument, "ranks must be strictly increasing");
        }
    }
}

std::size_t resolve_rank(double fraction, std::size_t bandwidth) {
    if (!(fraction > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "rank fraction must be positive");
    }
    if (fraction >= 1.0) {
        return static_cast<std::size_t>(std::llround(fraction));
    }
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(bandwidth)));
    return std::max<std::size_t>(k, 1);
}

void BandwidthLadder::validate(std::size_t n) const {
    if (bandwidths.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a bandwidth ladder needs at least two bandwidths");
    }
    for (std::size_t h = 0; h < bandwidths.size(); ++h) {
        if (bandwidths[h] == 0 || (h > 0 && bandwidths[h] <= bandwidths[h - 1])) {
            throw Error(ErrorCode::InvalidArgument, "bandwidths must be positive and strictly increasing");
        }
    }
    if (2 * bandwidths.back() > n) {
        throw Error(ErrorCode::SeriesTooShort, "series too short for bandwidth " +
                                                   std::to_string(bandwidths.back()));
    }
    if (rank_fractions.empty()) {
        throw Error(ErrorCode::InvalidArgument, "no rank fractions given");
    }
}

RankLadder BandwidthLadder::ranks_for(std::size_t bandwidth) const {
    RankLadder ladder;
    for (const double f : rank_fractions) {
        ladder.ranks.push_back(resolve_rank(f, bandwidth));
    }
    std::sort(ladder.ranks.begin(), ladder.ranks.end());
    ladder.ranks.erase(std::unique(ladder.ranks.begin(), ladder.ranks.end()), ladder.ranks.end());
    return ladder;
}

ChangePointSet bottom_up_merge(std::span<const ChangePointSet> levels, std::span<const double> exclusion) {
    if (levels.size() != exclusion.size()) {
        throw Error(ErrorCode::InvalidArgument, "one exclusion radius per level required");
    }
    ChangePointSet accepted;
    for (std::size_t h = 0; h < levels.size(); ++h) {
        ChangePointSet candidates = levels[h];
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const ChangePoint& a, const ChangePoint& b) { return a.tau < b.tau; });
        for (const auto& cp : candidates) {
            if (h == 0) {
                accepted.push_back(cp);
                continue;
            }
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& kept : accepted) {
                const auto gap = kept.tau > cp.tau ? kept.tau - cp.tau : cp.tau - kept.tau;
                nearest = std::min(nearest, static_cast<double>(gap));
            }
            if (nearest >= exclusion[h] - 1e-9) {
                accepted.push_back(cp);
            }
        }
    }
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const ChangePoint& a, const ChangePoint& b) { return a.tau < b.tau; });
    return accepted;
}

MergeResult merge_over_ranks(const PreparedSeries& series, std::size_t bandwidth, const RankLadder& ladder,
                             double eta, const PermutationConfig& pconfig) {
    ladder.validate(bandwidth);
    MergeResult result;
    std::vector<ChangePointSet> levels;
    for (const auto k : ladder.ranks) {
        result.runs.push_back(run_moped(series, DetectorConfig{bandwidth, k, eta}, pconfig));
        levels.push_back(result.runs.back().changes);
    }
    const std::vector<double> exclusion(levels.size(), eta * static_cast<double>(bandwidth));
    result.changes = bottom_up_merge(levels, exclusion);
    return result;
}

MergeResult merge_over_bandwidths(const PreparedSeries& series, const BandwidthLadder& ladder, double eta,
                                  const PermutationConfig& pconfig) {
    ladder.validate(series.length());
    MergeResult result;
    std::vector<ChangePointSet> levels;
    std::vector<double> exclusion;
    for (const auto g : ladder.bandwidths) {
        const auto ranks = ladder.ranks_for(g);
        MergeResult level = ranks.ranks.size() >= 2
                                ? merge_over_ranks(series, g, ranks, eta, pconfig)
                                : MergeResult{};
        if (ranks.ranks.size() < 2) {
            level.runs.push_back(run_moped(series, DetectorConfig{g, ranks.ranks.front(), eta}, pconfig));
            level.changes = level.runs.back().changes;
        }
        levels.push_back(std::move(level.changes));
        exclusion.push_back(eta * static_cast<double>(g));
        for (auto& run : level.runs) {
            result.runs.push_back(std::move(run));
        }
    }
    result.changes = bottom_up_merge(levels, exclusion);
    return result;
}

}  // namespace moped
