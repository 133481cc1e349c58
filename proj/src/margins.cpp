#include "moped/margins.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace moped {

namespace {

void require_finite(const Matrix& values) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            if (!std::isfinite(values(r, c))) {
                throw Error(ErrorCode::InvalidData, "non-finite value at row " + std::to_string(r + 1) +
                                                        ", column " + std::to_string(c + 1));
            }
        }
    }
}

}  // namespace

RawSeries::RawSeries(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
        throw Error(ErrorCode::TooShort, "series needs at least 2 observations");
    }
    if (values_.cols() < 1) {
        throw Error(ErrorCode::InvalidData, "series has no channels");
    }
    require_finite(values_);
}

MultivariateSeries::MultivariateSeries(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw Error(ErrorCode::EmptyData, "series is empty");
    }
    require_finite(values_);
    if ((values_.array() < 0.0).any()) {
        throw Error(ErrorCode::InvalidData, "standardised series must be nonnegative");
    }
    radii_ = compute_radii(values_);
    for (Eigen::Index t = 0; t < radii_.size(); ++t) {
        if (!(radii_[t] > 0.0)) {
            throw Error(ErrorCode::InvalidData, "row " + std::to_string(t + 1) + " has zero radius");
        }
    }
}

MultivariateSeries MultivariateSeries::slice(IndexRange range) const {
    if (range.empty() || range.end > length()) {
        throw Error(ErrorCode::EmptyWindow, "invalid slice");
    }
    return MultivariateSeries(values_.middleRows(static_cast<Eigen::Index>(range.begin),
                                                 static_cast<Eigen::Index>(range.size())));
}

Vector compute_radii(const Matrix& values) {
    return values.rowwise().norm();
}

double pareto2_quantile(double u) noexcept {
    return 1.0 / std::sqrt(1.0 - u);
}

std::vector<double> average_ranks(const Eigen::Ref<const Vector>& column) {
    const auto n = static_cast<std::size_t>(column.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && column[order[j]] == column[order[i]]) {
            ++j;
        }
        // positions i..j-1 hold ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t p = i; p < j; ++p) {
            ranks[order[p]] = avg;
        }
        i = j;
    }
    return ranks;
}

MultivariateSeries rank_transform_pareto2(const RawSeries& raw) {
    const Matrix& in = raw.values();
    const auto n = in.rows();
    const double denom = static_cast<double>(n) + 1.0;
    Matrix out(n, in.cols());
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
        const Vector column = in.col(c);
        const auto ranks = average_ranks(column);
        for (Eigen::Index r = 0; r < n; ++r) {
            out(r, c) = pareto2_quantile(ranks[static_cast<std::size_t>(r)] / denom);
        }
    }
    return MultivariateSeries(std::move(out));
}

}  // namespace moped
