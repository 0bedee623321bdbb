#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mc2/rng.hpp"

namespace mc2 {

using Byte = std::uint8_t;
using ByteInput = std::vector<Byte>;
using BigInt = boost::multiprecision::cpp_int;

struct SingletonRegionError : std::runtime_error {
    SingletonRegionError() : std::runtime_error("split_half: region is a singleton") {}
};

/// Closed byte interval [lo, hi].
struct Interval {
    Byte lo = 0;
    Byte hi = 255;

    std::uint32_t width() const { return std::uint32_t(hi) - lo + 1; }
    bool contains(Byte v) const { return v >= lo && v <= hi; }
    bool singleton() const { return lo == hi; }
    bool operator==(const Interval&) const = default;
};

/// d-dimensional byte hyperrectangle; the unit of search. Immutable.
class InputRegion {
public:
    explicit InputRegion(std::vector<Interval> intervals);
    static InputRegion full(std::size_t dims);
    static InputRegion singleton(const ByteInput& point);

    std::size_t dims() const { return intervals_.size(); }
    const Interval& interval(std::size_t j) const { return intervals_[j]; }
    const std::vector<Interval>& intervals() const { return intervals_; }

    BigInt cardinality() const;
    double log2_cardinality() const;
    bool is_singleton() const;
    bool contains(const ByteInput& input) const;

    // Lowest / highest member under any total order (lo / hi on every dimension).
    ByteInput min_corner() const;
    ByteInput max_corner() const;

    bool operator==(const InputRegion&) const = default;

private:
    std::vector<Interval> intervals_;
};

/// Priority permutation over dimension indices, highest priority first.
/// Flattens the hyperrectangle into a line so splitting is unambiguous.
struct TotalOrder {
    std::vector<std::size_t> priority;

    static TotalOrder lexicographic(std::size_t dims);
    bool is_permutation() const;

    // Three-way comparison of two inputs in flattened order.
    int compare(const ByteInput& a, const ByteInput& b) const;
    bool precedes_or_equal(const ByteInput& a, const ByteInput& b) const {
        return compare(a, b) <= 0;
    }
};

struct SplitResult {
    InputRegion left;
    InputRegion right;
    std::size_t dimension;  // the dimension that was cut
};

/// Cuts the region at the midpoint of the highest-priority non-degenerate
/// dimension. Every input in `left` precedes every input in `right` under
/// the order. Throws SingletonRegionError when nothing can be cut.
SplitResult split_half(const InputRegion& region, const TotalOrder& order);

/// k inputs drawn independently and uniformly from the region. If `seed` is
/// given and lies inside the region it replaces slot 0, keeping the batch
/// size (and thus the oracle's execution budget) fixed.
std::vector<ByteInput> sample_uniform(const InputRegion& region, std::size_t k, Rng& rng,
                                      const std::optional<ByteInput>& seed = std::nullopt);

}  // namespace mc2
