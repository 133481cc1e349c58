#include "moped/metrics.hpp"

#include "moped/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace moped {

Segmentation::Segmentation(std::size_t n, std::vector<std::size_t> boundaries)
    : n_(n), boundaries_(std::move(boundaries)) {
    if (n_ == 0) {
        throw Error(ErrorCode::InvalidArgument, "segmentation of an empty series");
    }
    std::size_t prev = 0;
    for (const auto b : boundaries_) {
        if (b <= prev || b >= n_) {
            throw Error(ErrorCode::InvalidArgument, "boundaries must be strictly increasing inside (0, n)");
        }
        prev = b;
    }
}

std::vector<IndexRange> Segmentation::segments() const {
    std::vector<IndexRange> out;
    out.reserve(segment_count());
    std::size_t begin = 0;
    for (const auto b : boundaries_) {
        out.push_back({begin, b});
        begin = b;
    }
    out.push_back({begin, n_});
    return out;
}

std::vector<std::size_t> Segmentation::labels() const {
    std::vector<std::size_t> out(n_);
    std::size_t label = 0;
    for (const auto& seg : segments()) {
        std::fill(out.begin() + static_cast<std::ptrdiff_t>(seg.begin),
                  out.begin() + static_cast<std::ptrdiff_t>(seg.end), label++);
    }
    return out;
}

Segmentation segmentation_from(std::size_t n, const ChangePointSet& changes) {
    auto taus = locations(changes);
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    std::erase_if(taus, [n](std::size_t t) { return t == 0 || t >= n; });
    return Segmentation(n, std::move(taus));
}

namespace {

void require_same_length(const Segmentation& a, const Segmentation& b) {
    if (a.length() != b.length()) {
        throw Error(ErrorCode::LengthMismatch, "partitions cover different lengths (" +
                                                   std::to_string(a.length()) + " vs " +
                                                   std::to_string(b.length()) + ")");
    }
}

std::size_t overlap(IndexRange a, IndexRange b) noexcept {
    const auto lo = std::max(a.begin, b.begin);
    const auto hi = std::min(a.end, b.end);
    return hi > lo ? hi - lo : 0;
}

double entropy(const std::vector<double>& counts, double total) {
    double h = 0.0;
    for (const double c : counts) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    }
    return h;
}

}  // namespace

double covering_metric(const Segmentation& truth, const Segmentation& estimate) {
    require_same_length(truth, estimate);
    const auto est = estimate.segments();
    double total = 0.0;
    for (const auto& a : truth.segments()) {
        double best = 0.0;
        for (const auto& b : est) {
            const auto inter = overlap(a, b);
            if (inter == 0) {
                continue;
            }
            const auto uni = a.size() + b.size() - inter;
            best = std::max(best, static_cast<double>(inter) / static_cast<double>(uni));
        }
        total += static_cast<double>(a.size()) * best;
    }
    return total / static_cast<double>(truth.length());
}

VMeasure v_measure_components(const Segmentation& truth, const Segmentation& estimate) {
    require_same_length(truth, estimate);
    const auto ts = truth.segments();
    const auto es = estimate.segments();
    const double n = static_cast<double>(truth.length());

    std::vector<double> truth_counts;
    std::vector<double> est_counts;
    for (const auto& a : ts) truth_counts.push_back(static_cast<double>(a.size()));
    for (const auto& b : es) est_counts.push_back(static_cast<double>(b.size()));
    const double h_truth = entropy(truth_counts, n);
    const double h_est = entropy(est_counts, n);

    // H(truth | estimate) and H(estimate | truth) from the contingency table.
    double h_truth_given_est = 0.0;
    double h_est_given_truth = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = 0; j < es.size(); ++j) {
            const auto c = static_cast<double>(overlap(ts[i], es[j]));
            if (c == 0.0) {
                continue;
            }
            h_truth_given_est -= (c / n) * std::log(c / est_counts[j]);
            h_est_given_truth -= (c / n) * std::log(c / truth_counts[i]);
        }
    }

    VMeasure vm;
    vm.homogeneity = h_truth == 0.0 ? 1.0 : 1.0 - h_truth_given_est / h_truth;
    vm.completeness = h_est == 0.0 ? 1.0 : 1.0 - h_est_given_truth / h_est;
    vm.homogeneity = std::clamp(vm.homogeneity, 0.0, 1.0);
    vm.completeness = std::clamp(vm.completeness, 0.0, 1.0);
    const double sum = vm.homogeneity + vm.completeness;
    vm.v = sum == 0.0 ? 0.0 : 2.0 * vm.homogeneity * vm.completeness / sum;
    return vm;
}

double v_measure(const Segmentation& truth, const Segmentation& estimate) {
    return v_measure_components(truth, estimate).v;
}

double QhatDistribution::at(long diff) const noexcept {
    const long idx = std::clamp(diff, -2L, 2L) + 2;
    return fractions[static_cast<std::size_t>(idx)];
}

QhatDistribution qhat_distribution(std::span<const long> differences) {
    if (differences.empty()) {
        throw Error(ErrorCode::EmptyResults, "no replications to summarise");
    }
    QhatDistribution out;
    for (const long diff : differences) {
        out.fractions[static_cast<std::size_t>(std::clamp(diff, -2L, 2L) + 2)] += 1.0;
    }
    for (auto& f : out.fractions) {
        f /= static_cast<double>(differences.size());
    }
    return out;
}

}  // namespace moped
