#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mc2/input_space.hpp"
#include "mc2/mc_execution.hpp"
#include "mc2/rng.hpp"
#include "mc2/target_model.hpp"

namespace mc2 {

struct NoPathsError : std::runtime_error {
    NoPathsError() : std::runtime_error("counting oracle needs at least one target-reaching path") {}
};

/// Comparison bit per Eq. 1: 1 iff the left region looks at least as
/// promising as the right one. Implementations may run the program.
class ComparisonOracle {
public:
    virtual ~ComparisonOracle() = default;
    virtual int compare(const InputRegion& left, const InputRegion& right) = 0;

    // Index of the path whose weight list the upcoming query belongs to.
    virtual std::size_t current_path_index() { return 0; }

    // Set when an internal execution already produced a target-reaching input.
    virtual std::optional<ByteInput> found_input() const { return std::nullopt; }

    // True when the last compare() carried no information (exact tie of the
    // two sides' estimates); the searcher then refines without reweighting.
    virtual bool last_tie() const { return false; }
};

/// Trie over edge sequences caching the latest per-path count information.
class HitGraph {
public:
    struct PathInfo {
        double density = 0.0;       // rho: latest count / region size
        std::uint64_t selections = 1;  // T
        double last_log2_count = 0.0;
    };

    // Returns a stable handle for the path's leaf.
    std::size_t insert(const std::vector<Edge>& edges, PathInfo info);
    const PathInfo* find(const std::vector<Edge>& edges) const;
    PathInfo& payload(std::size_t handle) { return nodes_[handle].payload; }
    const PathInfo& payload(std::size_t handle) const { return nodes_[handle].payload; }

    std::size_t node_count() const { return nodes_.size() - 1; }  // root excluded

private:
    struct Node {
        std::map<EdgeKey, std::size_t> children;
        PathInfo payload;
        bool has_payload = false;
    };
    std::vector<Node> nodes_ = std::vector<Node>(1);
};

struct OracleConfig {
    std::uint32_t k = 5;   // executions per ApproxCount
    double p = 0.01;       // assumed oracle failure probability
};

/// UCB1 pick over (density, selection count) pairs on the t-th query;
/// ties resolve to the earliest index.
std::size_t ucb_select(std::span<const HitGraph::PathInfo> scores, std::uint64_t t);

/// The noisy counting oracle (Alg. "Noisy Counting Oracle"): picks the most
/// promising target-reaching path by UCB over the HitGraph, approximates
/// log2-counts for both regions via sampled Monte Carlo executions, and
/// returns the Eq. 1 comparison bit.
class CountingOracle : public ComparisonOracle {
public:
    CountingOracle(const TargetProgram& program, std::vector<PathDirectives> paths,
                   OracleConfig config, Rng rng,
                   std::optional<ByteInput> seed = std::nullopt,
                   ExecutionMeter* meter = nullptr);

    // log2 of |region| * min(ratios); -inf when the minimum ratio is zero.
    double approx_count_log2(const InputRegion& region, std::size_t path_index);
    double approx_count_log2(const InputRegion& region, std::size_t path_index,
                             std::span<const ByteInput> inputs);
    double approx_count_log2(const InputRegion& region, std::size_t path_index,
                             std::span<const ByteInput> inputs, Rng& exec_rng);

    int compare(const InputRegion& left, const InputRegion& right) override;
    std::size_t current_path_index() override;
    std::optional<ByteInput> found_input() const override { return found_; }
    bool last_tie() const override { return last_tie_; }

    std::uint64_t query_count() const { return t_ - 1; }
    std::uint64_t executions() const { return executions_; }
    const HitGraph& hitgraph() const { return graph_; }
    const std::vector<PathDirectives>& paths() const { return paths_; }
    const HitGraph::PathInfo& path_info(std::size_t i) const {
        return graph_.payload(handles_[i]);
    }

private:
    void ensure_initialized();

    const TargetProgram& program_;
    std::vector<PathDirectives> paths_;
    OracleConfig config_;
    Rng rng_;
    std::optional<ByteInput> seed_;
    ExecutionMeter* meter_;

    HitGraph graph_;
    std::vector<std::size_t> handles_;
    std::uint64_t t_ = 1;
    bool initialized_ = false;
    std::optional<std::size_t> pending_path_;
    std::optional<ByteInput> found_;
    std::uint64_t executions_ = 0;
    bool last_tie_ = false;
};

}  // namespace mc2
