#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mc2/input_space.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

struct NegativeVarianceError : std::runtime_error {
    NegativeVarianceError() : std::runtime_error("chebyshev_bound: variance < 0") {}
};
struct EmptyBatchError : std::runtime_error {
    EmptyBatchError() : std::runtime_error("monte_carlo_execute: empty input batch") {}
};

/// A path through the CFG from the entry, with per-block queues of the
/// directions the path takes in visit order.
class PathDirectives {
public:
    PathDirectives(const TargetProgram& program, std::vector<Edge> edges);

    const std::vector<Edge>& edges() const { return edges_; }
    bool contains_target() const { return contains_target_; }
    // Distinct (block, direction) pairs in first-occurrence order.
    const std::vector<Edge>& branch_classes() const { return classes_; }

    detail::ForcedDirections make_queues(std::size_t block_count) const;

    bool operator==(const PathDirectives& other) const { return edges_ == other.edges_; }

private:
    std::vector<Edge> edges_;
    std::vector<Edge> classes_;
    bool contains_target_ = false;
};

/// Streaming mean / population variance of branch distances plus the count of
/// batch inputs that satisfied the branch.
struct BranchStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t satisfied = 0;

    void add(double distance) {
        ++n;
        const double delta = distance - mean;
        mean += delta / double(n);
        m2 += delta * (distance - mean);
    }
    double variance() const { return n == 0 ? 0.0 : m2 / double(n); }
};

/// Upper bound on Pr(predicate holds) for a branch distance with the given
/// moments; `h` is the smallest positive step of the distance type (1 for
/// integers). Returns 1 when the mean already sits on the satisfying side.
double chebyshev_bound(double mean, double variance, Predicate predicate, std::int64_t h = 1);

struct RatioEntry {
    Edge branch;
    double ratio;  // r in [0, 1]
};

struct MonteCarloResult {
    std::vector<RatioEntry> ratios;  // one per branch class, path order
    std::unordered_map<EdgeKey, BranchStats> stats;
    std::uint64_t executions = 0;
    // An input whose run needed no forcing and reached the target; its
    // natural execution reaches the target too.
    std::optional<ByteInput> natural_hit;

    double min_ratio() const;
};

/// Runs the program with the path's directions enforced; branches past their
/// directive queue follow natural evaluation. Equals natural execution when
/// the input satisfies every constraint on the path.
ExecutionTrace forced_execute(const TargetProgram& program, const PathDirectives& path,
                              const ByteInput& input, Rng& rng);

/// Alg. "Monte Carlo Executions": forced runs over the batch, streaming
/// per-branch statistics, and a satisfaction ratio per branch class -- the
/// observed ratio when satisfied at least once, the Chebyshev table bound
/// otherwise, and 1 for classes never visited within the step budget.
MonteCarloResult monte_carlo_execute(const TargetProgram& program, const PathDirectives& path,
                                     std::span<const ByteInput> inputs, Rng& rng);

}  // namespace mc2
