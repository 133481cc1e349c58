#include "moped/sliding_topk.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <cmath>

namespace moped {

SlidingTopK::SlidingTopK(std::span<const double> terms, std::size_t width, std::size_t k)
    : terms_(terms), width_(width), k_(k) {
    if (k_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "SlidingTopK needs k >= 1");
    }
    if (width_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "SlidingTopK needs a positive term width");
    }
    universe_ = terms_.size() / width_;
    if (universe_ * width_ != terms_.size()) {
        throw Error(ErrorCode::InvalidArgument, "term table is not a whole number of rows");
    }
    init();
}

SlidingTopK::SlidingTopK(std::span<const double> terms, std::span<const std::size_t> row_of_rank,
                         std::size_t width, std::size_t k)
    : terms_(terms), row_of_rank_(row_of_rank), width_(width), k_(k) {
    if (k_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "SlidingTopK needs k >= 1");
    }
    if (width_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "SlidingTopK needs a positive term width");
    }
    universe_ = row_of_rank_.size();
    if (terms_.size() != universe_ * width_) {
        throw Error(ErrorCode::InvalidArgument, "term table and rank map disagree in length");
    }
    init();
}

void SlidingTopK::init() {
    while (high_bit_ * 2 <= universe_) {
        high_bit_ *= 2;
    }
    tree_.assign(universe_ + 1, 0);
    present_.assign(universe_, 0);
    sum_.assign(width_, 0.0);
    comp_.assign(width_, 0.0);
}

void SlidingTopK::clear() {
    std::fill(tree_.begin(), tree_.end(), 0);
    std::fill(present_.begin(), present_.end(), 0);
    std::fill(sum_.begin(), sum_.end(), 0.0);
    std::fill(comp_.begin(), comp_.end(), 0.0);
    size_ = 0;
    boundary_ = 0;
}

void SlidingTopK::tree_add(std::size_t rank, int delta) noexcept {
    for (std::size_t i = rank + 1; i <= universe_; i += i & (~i + 1)) {
        tree_[i] = static_cast<std::uint32_t>(static_cast<int>(tree_[i]) + delta);
    }
}

// Smallest rank whose prefix count reaches m (1 <= m <= size_).
std::size_t SlidingTopK::kth(std::size_t m) const noexcept {
    std::size_t pos = 0;
    for (std::size_t step = high_bit_; step != 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next <= universe_ && tree_[next] < m) {
            pos = next;
            m -= tree_[next];
        }
    }
    return pos;  // 1-based index pos + 1 maps to rank pos
}

void SlidingTopK::accumulate(std::size_t rank, double sign) noexcept {
    const std::size_t r = row_of_rank_.empty() ? rank : row_of_rank_[rank];
    const double* row = terms_.data() + r * width_;
    for (std::size_t i = 0; i < width_; ++i) {
        const double v = sign * row[i];
        const double s = sum_[i];
        const double t = s + v;
        comp_[i] += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        sum_[i] = t;
    }
}

bool SlidingTopK::in_top(std::size_t rank) const noexcept {
    if (!contains(rank)) {
        return false;
    }
    return size_ <= k_ || rank <= boundary_;
}

void SlidingTopK::insert(std::size_t rank) {
    if (rank >= universe_) {
        throw Error(ErrorCode::InvalidArgument, "rank outside the SlidingTopK universe");
    }
    if (present_[rank]) {
        throw Error(ErrorCode::InvalidArgument, "rank already present in SlidingTopK");
    }
    present_[rank] = 1;
    tree_add(rank, +1);
    ++size_;
    if (size_ <= k_) {
        accumulate(rank, +1.0);
        if (size_ == k_) {
            boundary_ = kth(k_);
        }
    } else if (rank < boundary_) {
        // The newcomer enters the top set and the old k-th element drops out.
        accumulate(rank, +1.0);
        accumulate(boundary_, -1.0);
        boundary_ = kth(k_);
    }
}

void SlidingTopK::erase(std::size_t rank) {
    if (rank >= universe_ || !present_[rank]) {
        throw Error(ErrorCode::InvalidArgument, "rank not present in SlidingTopK");
    }
    const bool was_top = size_ <= k_ || rank <= boundary_;
    const bool had_spare = size_ > k_;
    present_[rank] = 0;
    tree_add(rank, -1);
    --size_;
    if (!was_top) {
        return;
    }
    accumulate(rank, -1.0);
    if (had_spare) {
        // Promote the best element outside the old top set.
        boundary_ = kth(k_);
        accumulate(boundary_, +1.0);
    }
}

void SlidingTopK::top_sum(std::span<double> out) const {
    for (std::size_t i = 0; i < width_; ++i) {
        out[i] = sum_[i] + comp_[i];
    }
}

}  // namespace moped
