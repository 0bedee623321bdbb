#pragma once

#include <cstdint>
#include <optional>

#include "mc2/counting_oracle.hpp"
#include "mc2/input_space.hpp"
#include "mc2/prep.hpp"
#include "mc2/rng.hpp"
#include "mc2/search.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

enum class OrderMode { Lexicographic, Learned };

struct CampaignConfig {
    ByteInput seed;  // empty -> all zeros
    std::uint32_t k = 5;
    double p = 0.01;
    std::size_t n_paths = 8;
    std::uint64_t execution_budget = 1'000'000;
    std::uint64_t rng_seed = 0;
    OrderMode order_mode = OrderMode::Learned;
    SplitWeightMode split_mode = SplitWeightMode::Proportional;
    double stop_confidence = 0.92;
    std::uint64_t round_query_budget = 0;  // 0 -> derived from the space size
};

struct CampaignReport {
    bool success = false;
    ByteInput input;
    std::uint64_t oracle_queries = 0;
    std::uint64_t executions = 0;
    std::uint32_t rounds = 0;
    double wall_ms = 0.0;
    TotalOrder order_used;
    std::size_t paths_found = 0;
};

/// Full engine loop: bootstrap target-reaching paths from the seed, learn a
/// total order (unless lexicographic is requested), then rerun the randomized
/// search with a shared HitGraph until a verified target-reaching input turns
/// up or the execution budget runs out.
CampaignReport campaign(const TargetProgram& program, const CampaignConfig& config);

}  // namespace mc2
