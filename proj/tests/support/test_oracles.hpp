#pragma once

#include <span>
#include <vector>

#include "mc2/counting_oracle.hpp"
#include "mc2/input_space.hpp"
#include "mc2/rng.hpp"
#include "mc2/target_model.hpp"

namespace mc2::testing {

/// Ground-truth comparator for instances with a known target set. Answers the
/// binary-search question the weight update acts on: does the half-space
/// at-or-before the left region's upper boundary (in total order) hold at
/// least as many targets as the rest. Independent of the engine's counting
/// machinery.
class PositionTruthOracle : public ComparisonOracle {
public:
    PositionTruthOracle(TotalOrder order, std::vector<ByteInput> targets)
        : order_(std::move(order)), targets_(std::move(targets)) {}

    int compare(const InputRegion& left, const InputRegion& right) override {
        (void)right;
        const ByteInput boundary = left.max_corner();
        std::size_t at_or_before = 0;
        for (const ByteInput& t : targets_) {
            if (order_.precedes_or_equal(t, boundary)) ++at_or_before;
        }
        return at_or_before >= targets_.size() - at_or_before ? 1 : 0;
    }

private:
    TotalOrder order_;
    std::vector<ByteInput> targets_;
};

// --- program generators (deterministic, no faults unless noted) ---

/// One equality block per byte: reaching the target needs input == target.
TargetProgram equality_chain_program(const ByteInput& target);

/// d=2 single block pinning both bytes: (i0-t0) + 256*(i1-t1) == 0.
TargetProgram packed_equality_program(Byte t0, Byte t1);

/// d=4, two nested equality blocks pinning two bytes each; a unique target
/// input among 2^32.
TargetProgram nested_pair_program(const ByteInput& target);

/// Target satisfied iff input[d-1] == wanted; other bytes are dead.
TargetProgram last_byte_program(std::size_t input_length, Byte wanted);

/// Random small fault-free program (1..3 chained blocks, occasional loop,
/// random predicates/expressions) for upper-bound-law sweeps.
TargetProgram random_small_program(Rng& rng, std::size_t input_length);

// --- numeric helpers ---

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// P(Binomial(n, 1/2) >= k), exact.
double binomial_tail_ge(unsigned n, unsigned k);

}  // namespace mc2::testing
