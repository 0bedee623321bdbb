#include "mc2/ground_truth.hpp"

namespace mc2 {

ExhaustiveCountingOracle::ExhaustiveCountingOracle(const TargetProgram& program,
                                                   const InputRegion& space,
                                                   std::uint64_t rng_seed, ExecutionMeter* meter,
                                                   std::uint64_t enumeration_limit) {
    if (space.cardinality() > enumeration_limit) {
        throw EnumerationLimitError("region too large to enumerate (" +
                                    space.cardinality().str() + " inputs)");
    }
    for_each_input(space, [&](const ByteInput& input) {
        Rng rng = execution_rng(rng_seed, input);
        const ExecutionTrace trace = execute(program, input, rng);
        ++enumerated_;
        if (meter != nullptr) meter->charge();
        if (trace.reached_target) satisfying_.push_back(input);
    });
}

std::uint64_t ExhaustiveCountingOracle::count_in(const InputRegion& region) const {
    std::uint64_t count = 0;
    for (const ByteInput& input : satisfying_) {
        if (region.contains(input)) ++count;
    }
    return count;
}

}  // namespace mc2
