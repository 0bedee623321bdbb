#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mc2/input_space.hpp"
#include "mc2/mc_execution.hpp"
#include "mc2/rng.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

struct NoPathsFoundError : std::runtime_error {
    NoPathsFoundError()
        : std::runtime_error("no branch inversion of the seed execution reached the target") {}
};

/// Bootstraps up to n distinct target-reaching paths by executing the seed
/// and re-running with random subsets of its branch directions inverted
/// (16*n attempts). Paths are truncated after the first target edge; the
/// seed's own path is included when it already reaches the target.
std::vector<PathDirectives> bootstrap_paths(const TargetProgram& program, const ByteInput& seed,
                                            std::size_t n, Rng& rng,
                                            ExecutionMeter* meter = nullptr);

struct OrderConfig {
    std::uint32_t k = 5;            // executions per density estimate
    std::uint32_t repetitions = 4;  // estimates averaged per subset
    double rel_tolerance = 0.10;    // relative change that counts as influence
};

/// Learns a dimension priority by recursive influence bisection: perturb a
/// subset of byte indices (others pinned to the seed), keep subsets whose
/// perturbations move the approximate count, and rank surviving indices by
/// the size of that move. Untouched indices follow in ascending order.
TotalOrder assign_total_order(const TargetProgram& program,
                              const std::vector<PathDirectives>& paths,
                              const InputRegion& region, Rng& rng,
                              const OrderConfig& config = {},
                              const std::optional<ByteInput>& seed = std::nullopt,
                              ExecutionMeter* meter = nullptr);

}  // namespace mc2
