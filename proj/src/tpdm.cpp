#include "moped/tpdm.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace moped {

std::vector<std::size_t> top_k_rows(const Vector& radii, IndexRange window, std::size_t k) {
    if (window.empty() || window.end > static_cast<std::size_t>(radii.size())) {
        throw Error(ErrorCode::EmptyWindow, "window is empty or out of range");
    }
    if (k == 0) {
        throw Error(ErrorCode::InvalidArgument, "rank k must be positive");
    }
    if (k > window.size()) {
        throw Error(ErrorCode::RankTooLarge, "rank k = " + std::to_string(k) + " exceeds window length " +
                                                 std::to_string(window.size()));
    }
    std::vector<std::size_t> rows(window.size());
    std::iota(rows.begin(), rows.end(), window.begin);
    auto before = [&](std::size_t a, std::size_t b) {
        const double ra = radii[static_cast<Eigen::Index>(a)];
        const double rb = radii[static_cast<Eigen::Index>(b)];
        return ra > rb || (ra == rb && a < b);
    };
    std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end(), before);
    rows.resize(k);
    return rows;
}

TpdmEstimate estimate_tpdm(const MultivariateSeries& series, IndexRange window, std::size_t k) {
    const auto rows = top_k_rows(series.radii(), window, k);
    const Matrix& x = series.values();
    const auto d = x.cols();

    Matrix sigma = Matrix::Zero(d, d);
    for (const auto row : rows) {
        const auto t = static_cast<Eigen::Index>(row);
        const double r2 = x.row(t).squaredNorm();
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i; j < d; ++j) {
                sigma(i, j) += x(t, i) * x(t, j) / r2;
            }
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            sigma(i, j) = sigma(i, j) * static_cast<double>(d) / static_cast<double>(k);
            sigma(j, i) = sigma(i, j);
        }
    }

    TpdmEstimate est;
    est.sigma = std::move(sigma);
    est.k = k;
    est.r0 = series.radii()[static_cast<Eigen::Index>(rows.back())];
    est.window = window;
    return est;
}

std::size_t exceedance_count(std::size_t length, double quantile) {
    if (!(quantile > 0.0 && quantile < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "quantile must lie in (0, 1)");
    }
    // The tolerance keeps e.g. 0.05 * 1000 from rounding up to 51.
    const double raw = (1.0 - quantile) * static_cast<double>(length);
    const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::max<std::size_t>(k, 1);
}

std::vector<TpdmEstimate> estimate_segment_tpdms(const MultivariateSeries& series,
                                                 std::span<const std::size_t> changes,
                                                 double quantile) {
    const std::size_t n = series.length();
    std::vector<std::size_t> bounds;
    bounds.reserve(changes.size() + 2);
    bounds.push_back(0);
    for (const auto tau : changes) {
        if (tau == 0 || tau >= n || tau <= bounds.back()) {
            throw Error(ErrorCode::InvalidArgument,
                        "change points must be strictly increasing and inside (0, n)");
        }
        bounds.push_back(tau);
    }
    bounds.push_back(n);

    std::vector<TpdmEstimate> out;
    out.reserve(bounds.size() - 1);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
        const IndexRange segment{bounds[s], bounds[s + 1]};
        if (segment.size() < 2) {
            throw Error(ErrorCode::SegmentTooShort,
                        "segment starting at row " + std::to_string(segment.begin + 1) + " is shorter than 2");
        }
        out.push_back(estimate_tpdm(series, segment, exceedance_count(segment.size(), quantile)));
    }
    return out;
}

std::vector<TpdmEstimate> estimate_segment_tpdms(const MultivariateSeries& series,
                                                 const ChangePointSet& changes, double quantile) {
    const auto taus = locations(changes);
    return estimate_segment_tpdms(series, std::span<const std::size_t>(taus), quantile);
}

}  // namespace moped
