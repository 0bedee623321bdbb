#include "mc2/input_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mc2 {

InputRegion::InputRegion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw std::invalid_argument("InputRegion: zero dimensions");
    for (const Interval& iv : intervals_) {
        if (iv.lo > iv.hi) throw std::invalid_argument("InputRegion: lo > hi");
    }
}

InputRegion InputRegion::full(std::size_t dims) {
    return InputRegion(std::vector<Interval>(dims, Interval{0, 255}));
}

InputRegion InputRegion::singleton(const ByteInput& point) {
    std::vector<Interval> ivs;
    ivs.reserve(point.size());
    for (Byte b : point) ivs.push_back(Interval{b, b});
    return InputRegion(std::move(ivs));
}

BigInt InputRegion::cardinality() const {
    BigInt card = 1;
    for (const Interval& iv : intervals_) card *= iv.width();
    return card;
}

double InputRegion::log2_cardinality() const {
    double bits = 0.0;
    for (const Interval& iv : intervals_) bits += std::log2(double(iv.width()));
    return bits;
}

bool InputRegion::is_singleton() const {
    return std::all_of(intervals_.begin(), intervals_.end(),
                       [](const Interval& iv) { return iv.singleton(); });
}

bool InputRegion::contains(const ByteInput& input) const {
    if (input.size() != intervals_.size()) return false;
    for (std::size_t j = 0; j < input.size(); ++j) {
        if (!intervals_[j].contains(input[j])) return false;
    }
    return true;
}

ByteInput InputRegion::min_corner() const {
    ByteInput out(intervals_.size());
    for (std::size_t j = 0; j < intervals_.size(); ++j) out[j] = intervals_[j].lo;
    return out;
}

ByteInput InputRegion::max_corner() const {
    ByteInput out(intervals_.size());
    for (std::size_t j = 0; j < intervals_.size(); ++j) out[j] = intervals_[j].hi;
    return out;
}

TotalOrder TotalOrder::lexicographic(std::size_t dims) {
    TotalOrder order;
    order.priority.resize(dims);
    std::iota(order.priority.begin(), order.priority.end(), std::size_t{0});
    return order;
}

bool TotalOrder::is_permutation() const {
    std::vector<bool> seen(priority.size(), false);
    for (std::size_t j : priority) {
        if (j >= priority.size() || seen[j]) return false;
        seen[j] = true;
    }
    return true;
}

int TotalOrder::compare(const ByteInput& a, const ByteInput& b) const {
    for (std::size_t j : priority) {
        if (a[j] != b[j]) return a[j] < b[j] ? -1 : 1;
    }
    return 0;
}

SplitResult split_half(const InputRegion& region, const TotalOrder& order) {
    for (std::size_t j : order.priority) {
        const Interval& iv = region.interval(j);
        if (iv.singleton()) continue;
        const Byte mid = Byte((std::uint32_t(iv.lo) + iv.hi) / 2);
        std::vector<Interval> left = region.intervals();
        std::vector<Interval> right = region.intervals();
        left[j] = Interval{iv.lo, mid};
        right[j] = Interval{Byte(mid + 1), iv.hi};
        return SplitResult{InputRegion(std::move(left)), InputRegion(std::move(right)), j};
    }
    throw SingletonRegionError{};
}

std::vector<ByteInput> sample_uniform(const InputRegion& region, std::size_t k, Rng& rng,
                                      const std::optional<ByteInput>& seed) {
    std::vector<ByteInput> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        ByteInput input(region.dims());
        for (std::size_t j = 0; j < region.dims(); ++j) {
            const Interval& iv = region.interval(j);
            input[j] = Byte(iv.lo + rng.below(iv.width()));
        }
        out.push_back(std::move(input));
    }
    if (seed && region.contains(*seed)) out[0] = *seed;
    return out;
}

}  // namespace mc2
