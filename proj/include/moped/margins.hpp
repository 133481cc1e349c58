#pragma once

#include "moped/types.hpp"

#include <cstddef>

namespace moped {

/// Observations on their original scale: n time points by d channels, all finite.
class RawSeries {
public:
    explicit RawSeries(Matrix values);

    const Matrix& values() const noexcept { return values_; }
    std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(values_.cols()); }

private:
    Matrix values_;
};

/// A panel on (approximately) Pareto(2) margins together with the L2 radius of
/// every row. Entries must be finite and nonnegative and every row must have a
/// positive radius; the rank transform below produces entries strictly above 1.
class MultivariateSeries {
public:
    explicit MultivariateSeries(Matrix values);

    const Matrix& values() const noexcept { return values_; }
    const Vector& radii() const noexcept { return radii_; }
    std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    /// Rows [range.begin, range.end) as a new series.
    MultivariateSeries slice(IndexRange range) const;

private:
    Matrix values_;
    Vector radii_;
};

/// Euclidean norm of every row.
Vector compute_radii(const Matrix& values);

/// Column-wise empirical rank transform to Pareto(2): the value with (average)
/// rank r among n maps to (1 - r/(n+1))^{-1/2}.
MultivariateSeries rank_transform_pareto2(const RawSeries& raw);

/// Average ranks (1-based) of a single column; ties share the mean of the
/// ranks they span.
std::vector<double> average_ranks(const Eigen::Ref<const Vector>& column);

/// Pareto(2) quantile, (1 - u)^{-1/2}.
double pareto2_quantile(double u) noexcept;

}  // namespace moped
