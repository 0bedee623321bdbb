#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mc2/counting_oracle.hpp"
#include "mc2/input_space.hpp"
#include "mc2/rng.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

struct EnumerationLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Noiseless counting oracle backed by full enumeration of the search space:
/// every input is executed once at construction and the target-reaching set
/// is kept. compare() then evaluates Eq. 1 exactly.
class ExhaustiveCountingOracle : public ComparisonOracle {
public:
    static constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t(1) << 24;

    ExhaustiveCountingOracle(const TargetProgram& program, const InputRegion& space,
                             std::uint64_t rng_seed, ExecutionMeter* meter = nullptr,
                             std::uint64_t enumeration_limit = kDefaultEnumerationLimit);

    std::uint64_t count_in(const InputRegion& region) const;
    const std::vector<ByteInput>& satisfying() const { return satisfying_; }
    std::uint64_t enumerated() const { return enumerated_; }

    int compare(const InputRegion& left, const InputRegion& right) override {
        return count_in(left) >= count_in(right) ? 1 : 0;
    }

private:
    std::vector<ByteInput> satisfying_;
    std::uint64_t enumerated_ = 0;
};

/// Decorator that flips another oracle's answer with probability p.
class FlipOracle : public ComparisonOracle {
public:
    FlipOracle(ComparisonOracle& inner, double p, Rng rng) : inner_(inner), p_(p), rng_(rng) {}

    int compare(const InputRegion& left, const InputRegion& right) override {
        const int bit = inner_.compare(left, right);
        return rng_.bernoulli(p_) ? 1 - bit : bit;
    }
    std::size_t current_path_index() override { return inner_.current_path_index(); }
    std::optional<ByteInput> found_input() const override { return inner_.found_input(); }
    bool last_tie() const override { return inner_.last_tie(); }

private:
    ComparisonOracle& inner_;
    double p_;
    Rng rng_;
};

/// Visits every input of a region in odometer order.
template <typename Fn>
void for_each_input(const InputRegion& region, Fn&& fn) {
    ByteInput input = region.min_corner();
    for (;;) {
        fn(const_cast<const ByteInput&>(input));
        std::size_t j = region.dims();
        for (;;) {
            if (j == 0) return;  // carried past the most significant dimension
            --j;
            if (input[j] < region.interval(j).hi) {
                ++input[j];
                break;
            }
            input[j] = region.interval(j).lo;
        }
    }
}

}  // namespace mc2
