#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace moped {

/// Running sum of term vectors over the k best elements of a sliding window.
///
/// Elements are identified by their rank in a fixed total order (rank 0 is the
/// best, i.e. the largest radius). A Fenwick tree over the rank universe keeps
/// the window ordered, so insert, erase and locating the k-th best element are
/// all logarithmic. `terms` holds one row of `width` values per rank.
///
/// Sums are accumulated with Neumaier compensation; a detector pass performs
/// O(n) additions and subtractions on the same accumulator.
class SlidingTopK {
public:
    SlidingTopK(std::span<const double> terms, std::size_t width, std::size_t k);
    /// Terms stored in row order; `row_of_rank[r]` locates the row of rank r.
    SlidingTopK(std::span<const double> terms, std::span<const std::size_t> row_of_rank, std::size_t width,
                std::size_t k);

    void insert(std::size_t rank);
    void erase(std::size_t rank);
    void clear();

    std::size_t size() const noexcept { return size_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t width() const noexcept { return width_; }
    bool contains(std::size_t rank) const noexcept { return present_[rank] != 0; }
    bool in_top(std::size_t rank) const noexcept;

    /// Sum of the term rows of the min(k, size) best elements.
    void top_sum(std::span<double> out) const;

private:
    void init();
    std::size_t kth(std::size_t m) const noexcept;
    void tree_add(std::size_t rank, int delta) noexcept;
    void accumulate(std::size_t rank, double sign) noexcept;

    std::span<const double> terms_;
    std::span<const std::size_t> row_of_rank_;
    std::size_t width_;
    std::size_t k_;
    std::size_t universe_;
    std::size_t high_bit_ = 1;
    std::size_t size_ = 0;
    std::size_t boundary_ = 0;  // rank of the k-th best element while size_ >= k_
    std::vector<std::uint32_t> tree_;
    std::vector<std::uint8_t> present_;
    std::vector<double> sum_;
    std::vector<double> comp_;
};

}  // namespace moped
