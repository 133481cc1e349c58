#include "moped/detector.hpp"

#include "moped/error.hpp"
#include "moped/sliding_topk.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>
#include <utility>

namespace moped {

void DetectorConfig::validate(std::size_t n) const {
    if (bandwidth == 0) {
        throw Error(ErrorCode::InvalidArgument, "bandwidth G must be positive");
    }
    if (rank == 0 || rank > bandwidth) {
        throw Error(ErrorCode::RankTooLarge, "rank k = " + std::to_string(rank) + " must lie in [1, G = " +
                                                 std::to_string(bandwidth) + "]");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)");
    }
    if (n < 2 * bandwidth) {
        throw Error(ErrorCode::SeriesTooShort, "series too short for bandwidth: n = " + std::to_string(n) +
                                                   " < 2G = " + std::to_string(2 * bandwidth));
    }
}

std::size_t DetectorConfig::neighbourhood() const noexcept {
    return static_cast<std::size_t>(std::floor(eta * static_cast<double>(bandwidth) + 1e-9));
}

double DetectorTrace::max() const noexcept {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

PreparedSeries::PreparedSeries(const MultivariateSeries& series)
    : length_(series.length()),
      dimension_(series.dimension()),
      pairs_(dimension_ * (dimension_ - 1) / 2),
      radii_(series.radii()) {
    const Matrix& x = series.values();
    terms_.resize(length_ * pairs_);
    for (std::size_t t = 0; t < length_; ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        const double r2 = x.row(row).squaredNorm();
        double* out = terms_.data() + t * pairs_;
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            for (Eigen::Index j = i + 1; j < x.cols(); ++j) {
                *out++ = x(row, i) * x(row, j) / r2;
            }
        }
    }

    // Sorting (radius, row) pairs keeps the comparisons on contiguous memory.
    std::vector<std::pair<double, std::size_t>> keyed(length_);
    for (std::size_t t = 0; t < length_; ++t) {
        keyed[t] = {radii_[static_cast<Eigen::Index>(t)], t};
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    by_radius_.resize(length_);
    for (std::size_t r = 0; r < length_; ++r) {
        by_radius_[r] = keyed[r].second;
    }
    for (std::size_t i = 0; i < length_;) {
        std::size_t j = i + 1;
        while (j < length_ && radii_[static_cast<Eigen::Index>(by_radius_[j])] ==
                                  radii_[static_cast<Eigen::Index>(by_radius_[i])]) {
            ++j;
        }
        if (j - i > 1) {
            tie_groups_.emplace_back(i, j);
        }
        i = j;
    }
}

std::vector<std::size_t> PreparedSeries::ranks(std::span<const std::size_t> order) const {
    return rank_maps(order).rank_of_time;
}

PreparedSeries::RankMaps PreparedSeries::rank_maps(std::span<const std::size_t> order) const {
    RankMaps maps;
    auto& rank_of_time = maps.rank_of_time;
    auto& row_of_rank = maps.row_of_rank;
    rank_of_time.resize(length_);
    if (order.empty()) {
        row_of_rank = by_radius_;
        for (std::size_t r = 0; r < length_; ++r) {
            rank_of_time[by_radius_[r]] = r;
        }
        return maps;
    }
    if (order.size() != length_) {
        throw Error(ErrorCode::InvalidArgument, "reordering must cover every row");
    }
    std::vector<std::size_t> time_of_row(length_);
    for (std::size_t t = 0; t < length_; ++t) {
        time_of_row[order[t]] = t;
    }
    row_of_rank = by_radius_;
    for (std::size_t r = 0; r < length_; ++r) {
        rank_of_time[time_of_row[by_radius_[r]]] = r;
    }
    // Equal radii are ranked by time in the reordered series.
    std::vector<std::size_t> times;
    for (const auto& [begin, end] : tie_groups_) {
        times.clear();
        for (std::size_t r = begin; r < end; ++r) {
            times.push_back(time_of_row[by_radius_[r]]);
        }
        std::sort(times.begin(), times.end());
        for (std::size_t j = 0; j < times.size(); ++j) {
            rank_of_time[times[j]] = begin + j;
            row_of_rank[begin + j] = order[times[j]];
        }
    }
    return maps;
}

DetectorTrace detector_trace(const MultivariateSeries& series, const DetectorConfig& config) {
    return detector_trace(PreparedSeries(series), config);
}

DetectorTrace detector_trace(const PreparedSeries& series, const DetectorConfig& config,
                             std::span<const std::size_t> order) {
    const std::size_t n = series.length();
    config.validate(n);
    if (series.dimension() < 2) {
        throw Error(ErrorCode::InvalidArgument, "detector needs at least two channels");
    }
    const std::size_t g = config.bandwidth;
    const std::size_t width = series.pairs();
    const auto maps = series.rank_maps(order);
    const auto& rank_of_time = maps.rank_of_time;

    // Top-k sums of the last G + 1 windows, slot j % (G + 1) holding the
    // window of rows [j, j + G). The right window of t is the left window of
    // t + G, so one pass serves both sides and only a ring of sums is kept.
    const std::size_t slots = g + 1;
    std::vector<double> ring(slots * width);
    const double scale = static_cast<double>(series.dimension()) / static_cast<double>(config.rank);
    DetectorTrace trace;
    trace.config = config;
    trace.values.resize(n - 2 * g + 1);

    SlidingTopK top(series.all_terms(), maps.row_of_rank, width, config.rank);
    for (std::size_t t = 0; t < n; ++t) {
        if (t >= g) {
            top.erase(rank_of_time[t - g]);
        }
        top.insert(rank_of_time[t]);
        if (t + 1 < g) {
            continue;
        }
        const std::size_t j = t + 1 - g;
        double* right = ring.data() + (j % slots) * width;
        top.top_sum(std::span<double>(right, width));
        if (j >= g) {
            const double* left = ring.data() + ((j - g) % slots) * width;
            double ss = 0.0;
            for (std::size_t p = 0; p < width; ++p) {
                const double diff = left[p] - right[p];
                ss += diff * diff;
            }
            // each off-diagonal pair appears twice in the Frobenius norm
            trace.values[j - g] = scale * std::sqrt(2.0 * ss);
        }
    }
    return trace;
}

ChangePointSet select_changes(const DetectorTrace& trace, double threshold) {
    const auto& v = trace.values;
    const std::size_t count = v.size();
    const std::size_t h = trace.config.neighbourhood();

    std::vector<double> local_max(count);
    std::deque<std::size_t> window;
    std::size_t next = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t hi = std::min(count - 1, i + h);
        for (; next <= hi; ++next) {
            while (!window.empty() && v[window.back()] <= v[next]) {
                window.pop_back();
            }
            window.push_back(next);
        }
        const std::size_t lo = i >= h ? i - h : 0;
        while (window.front() < lo) {
            window.pop_front();
        }
        local_max[i] = v[window.front()];
    }

    ChangePointSet out;
    std::size_t i = 0;
    while (i < count) {
        if (!(v[i] > threshold && v[i] >= local_max[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < count && v[j + 1] == v[i] && v[j + 1] >= local_max[j + 1]) {
            ++j;
        }
        ChangePoint cp;
        cp.tau = trace.time_at((i + j) / 2);
        cp.height = v[i];
        cp.bandwidth = trace.config.bandwidth;
        cp.rank = trace.config.rank;
        out.push_back(cp);
        i = j + 1;
    }
    return out;
}

}  // namespace moped
