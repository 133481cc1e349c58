#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace moped {

/// Row-major so that one observation (a time point) is contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Half-open range of 0-based row indices [begin, end).
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
    bool empty() const noexcept { return end <= begin; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// An estimated change location. `tau` uses the 1-based convention of the
/// model: the change sits between observations tau and tau + 1, so in 0-based
/// rows the new segment starts at row `tau`.
struct ChangePoint {
    std::size_t tau = 0;
    double height = 0.0;
    std::optional<double> p_value;
    std::size_t bandwidth = 0;
    std::size_t rank = 0;

    friend bool operator==(const ChangePoint&, const ChangePoint&) = default;
};

using ChangePointSet = std::vector<ChangePoint>;

std::vector<std::size_t> locations(const ChangePointSet& set);

}  // namespace moped
