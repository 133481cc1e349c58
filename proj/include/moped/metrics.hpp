#pragma once

#include "moped/types.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace moped {

/// Partition of {1..n} into consecutive segments {tau_{l-1}+1, ..., tau_l}.
class Segmentation {
public:
    /// `boundaries` must be strictly increasing and inside (0, n).
    Segmentation(std::size_t n, std::vector<std::size_t> boundaries);

    std::size_t length() const noexcept { return n_; }
    const std::vector<std::size_t>& boundaries() const noexcept { return boundaries_; }
    std::size_t segment_count() const noexcept { return boundaries_.size() + 1; }
    /// Segments as 0-based half-open row ranges.
    std::vector<IndexRange> segments() const;
    /// Segment label of every time point.
    std::vector<std::size_t> labels() const;

private:
    std::size_t n_;
    std::vector<std::size_t> boundaries_;
};

/// Build a segmentation from estimated change points, dropping duplicates.
Segmentation segmentation_from(std::size_t n, const ChangePointSet& changes);

/// (1/n) sum over true segments A of |A| max_{estimated B} |A n B| / |A u B|.
double covering_metric(const Segmentation& truth, const Segmentation& estimate);

struct VMeasure {
    double homogeneity = 1.0;
    double completeness = 1.0;
    double v = 1.0;
};

/// V-measure with beta = 1, natural-log entropies.
VMeasure v_measure_components(const Segmentation& truth, const Segmentation& estimate);
double v_measure(const Segmentation& truth, const Segmentation& estimate);

/// Fractions of replications with qhat - q in {<= -2, -1, 0, 1, >= 2}.
struct QhatDistribution {
    std::array<double, 5> fractions{};

    double at(long diff) const noexcept;
};

QhatDistribution qhat_distribution(std::span<const long> differences);

}  // namespace moped
