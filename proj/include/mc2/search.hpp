#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mc2/counting_oracle.hpp"
#include "mc2/input_space.hpp"
#include "mc2/rng.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

struct EmptyListError : std::runtime_error {
    EmptyListError() : std::runtime_error("weight group list is empty") {}
};
struct SingletonGroupError : std::runtime_error {
    SingletonGroupError() : std::runtime_error("cannot split a singleton weight group") {}
};

enum class SplitWeightMode {
    Proportional,  // halves share the parent weight by cardinality fraction
    Verbatim,      // both halves inherit the parent weight (literal pseudocode)
};

struct WeightGroup {
    InputRegion region;
    double weight;
};

/// Ordered weight groups partitioning the search region in total-order
/// sequence; the randomized fuzzer's belief state.
class WeightGroupList {
public:
    explicit WeightGroupList(InputRegion space);
    static WeightGroupList from_groups(std::vector<WeightGroup> groups);

    std::size_t size() const { return groups_.size(); }
    const WeightGroup& group(std::size_t i) const { return groups_[i]; }
    const std::vector<WeightGroup>& groups() const { return groups_; }

    // Smallest index whose cumulative weight reaches 1/2.
    std::size_t select_split_group() const;
    std::size_t argmax() const;
    double weight_sum() const;

    // Replaces group `mid` with the two halves, applies the multiplicative
    // update for the oracle bit, then normalizes. Grows the list by one.
    void update_weights(std::size_t mid, const SplitResult& halves, int bit, double p,
                        SplitWeightMode mode);

    // Splits group `mid` without reweighting: used when the oracle answer
    // carried no information (Bayes factor 1). Grows the list by one.
    void split_neutral(std::size_t mid, const SplitResult& halves, SplitWeightMode mode);

    // Zeroes a group found not to contain the target (verified negative
    // evidence) and renormalizes; false if no weight is left anywhere.
    bool eliminate(std::size_t index);

private:
    void replace_with_halves(std::size_t mid, const SplitResult& halves, SplitWeightMode mode);

    std::vector<WeightGroup> groups_;
};

std::uint64_t default_query_budget(double log2_cardinality, double p);

struct SearchConfig {
    double p = 0.01;
    std::uint64_t query_budget = 0;  // 0 -> default_query_budget
    // Cap on the posterior mass demanded before verifying a singleton; the
    // effective threshold is min(stop_confidence, (1-p)^2), floored by
    // 1/sqrt(log2 N).
    double stop_confidence = 0.92;
    // Candidates disproved by verification before the search gives up on
    // this round's belief state; restarts recover faster than churn.
    std::uint32_t max_eliminations = 8;
    SplitWeightMode split_mode = SplitWeightMode::Proportional;
    const ExecutionMeter* meter = nullptr;  // optional external execution budget
    bool record_log = true;
};

struct QueryLogEntry {
    std::uint64_t query;
    std::size_t path;
    std::size_t split_group;
    int bit;
    double weight_sum;
    std::size_t group_count;
    double max_weight;
};

struct SearchOutcome {
    ByteInput candidate;
    std::optional<InputRegion> best_region;
    std::uint64_t queries = 0;
    std::uint64_t executions = 0;  // blackbox only
    bool success = false;
    bool budget_exhausted = false;
    bool found_by_execution = false;
    std::vector<QueryLogEntry> log;
};

using VerifyFn = std::function<bool(const ByteInput&)>;

/// Noiseless bisection (Alg. "Optimal Deterministic Fuzzer"): needs an exact
/// oracle; finds a singleton in ceil(log2 N) splits on power-of-two spaces.
SearchOutcome deterministic_search(const InputRegion& space, const TotalOrder& order,
                                   ComparisonOracle& oracle, const VerifyFn& verify, Rng& rng);

/// Noisy binary search with multiplicative weights (Alg. "Optimal Randomized
/// Fuzzer"). Keeps one weight list per oracle path; every query splits one
/// group. Returns a verified sample from the heaviest group.
SearchOutcome randomized_search(const InputRegion& space, const TotalOrder& order,
                                ComparisonOracle& oracle, const SearchConfig& config,
                                const VerifyFn& verify, Rng& rng);

/// Strawman baseline: plain bisection where each comparison takes the
/// majority of `reps` oracle answers. Query count is reps * ceil(log2 N).
SearchOutcome majority_vote_search(const InputRegion& space, const TotalOrder& order,
                                   ComparisonOracle& oracle, double p, std::uint32_t reps,
                                   const VerifyFn& verify, Rng& rng);

/// Blackbox baseline: uniform random natural executions until the target is
/// reached or the execution budget runs out.
SearchOutcome blackbox_search(const TargetProgram& program, const InputRegion& space,
                              std::uint64_t budget, Rng& rng, ExecutionMeter* meter = nullptr);

}  // namespace mc2
