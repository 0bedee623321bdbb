#include "mc2/mc_execution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mc2 {

PathDirectives::PathDirectives(const TargetProgram& program, std::vector<Edge> edges)
    : edges_(std::move(edges)) {
    const Edge target = program.target_edge();
    std::uint32_t expected = program.entry_index();
    for (const Edge& e : edges_) {
        if (e.block >= program.blocks().size())
            throw ValidationError("path references unknown block index");
        if (e.block != expected)
            throw ValidationError("path edges are not adjacent from the entry");
        if (e == target) contains_target_ = true;
        if (std::find(classes_.begin(), classes_.end(), e) == classes_.end())
            classes_.push_back(e);
        expected = program.successor(e.block, e.taken);
    }
}

detail::ForcedDirections PathDirectives::make_queues(std::size_t block_count) const {
    detail::ForcedDirections forced(block_count);
    for (const Edge& e : edges_) forced.per_block[e.block].push_back(e.taken);
    return forced;
}

double chebyshev_bound(double mean, double variance, Predicate predicate, std::int64_t h) {
    if (variance < 0.0) throw NegativeVarianceError{};

    // Cantelli's one-sided inequality, clamped to 1 when the mean is already
    // on the satisfying side of the comparison.
    const auto tail_le0 = [&](double mu) {
        if (mu <= 0.0) return 1.0;
        return std::clamp(variance / (variance + mu * mu), 0.0, 1.0);
    };
    const auto tail_ge0 = [&](double mu) {
        if (mu >= 0.0) return 1.0;
        return std::clamp(variance / (variance + mu * mu), 0.0, 1.0);
    };

    const double step = double(h);
    switch (predicate) {
        case Predicate::Le: return tail_le0(mean);
        case Predicate::Lt: return tail_le0(mean + step);
        case Predicate::Ge: return tail_ge0(mean);
        case Predicate::Gt: return tail_ge0(mean - step);
        case Predicate::Eq: return std::min(tail_ge0(mean), tail_le0(mean));
        case Predicate::Ne:
            return std::clamp(tail_ge0(mean - step) + tail_le0(mean + step), 0.0, 1.0);
    }
    throw std::logic_error("bad predicate");
}

ExecutionTrace forced_execute(const TargetProgram& program, const PathDirectives& path,
                              const ByteInput& input, Rng& rng) {
    detail::ForcedDirections forced = path.make_queues(program.blocks().size());
    return detail::run_program(program, input, &forced, rng);
}

double MonteCarloResult::min_ratio() const {
    double m = 1.0;
    for (const RatioEntry& e : ratios) m = std::min(m, e.ratio);
    return m;
}

MonteCarloResult monte_carlo_execute(const TargetProgram& program, const PathDirectives& path,
                                     std::span<const ByteInput> inputs, Rng& rng) {
    if (inputs.empty()) throw EmptyBatchError{};

    MonteCarloResult result;
    for (const Edge& cls : path.branch_classes()) result.stats.emplace(edge_key(cls), BranchStats{});

    // Prescribed directions per block in visit order.
    std::vector<std::vector<bool>> dirs(program.blocks().size());
    for (const Edge& e : path.edges()) dirs[e.block].push_back(e.taken);

    // Per execution: whether every visit of a class matched the prescribed
    // direction naturally.
    std::unordered_map<EdgeKey, bool> matched;
    std::vector<std::size_t> path_cursor(program.blocks().size());

    for (const ByteInput& input : inputs) {
        ExecutionTrace trace = forced_execute(program, path, input, rng);
        ++result.executions;

        matched.clear();
        std::fill(path_cursor.begin(), path_cursor.end(), std::size_t{0});

        for (const VisitRecord& visit : trace.visits) {
            const std::uint32_t b = visit.block;
            if (path_cursor[b] >= dirs[b].size()) continue;  // off-path visit
            const bool prescribed = dirs[b][path_cursor[b]++];
            const EdgeKey key = edge_key(Edge{b, prescribed});
            result.stats[key].add(double(visit.distance));
            const bool took_naturally = visit.satisfied == prescribed;
            auto [it, inserted] = matched.emplace(key, took_naturally);
            if (!inserted) it->second = it->second && took_naturally;
        }

        for (const auto& [key, ok] : matched) {
            if (ok) ++result.stats[key].satisfied;
        }

        if (!result.natural_hit && trace.reached_target) {
            const bool any_forced =
                std::any_of(trace.visits.begin(), trace.visits.end(),
                            [](const VisitRecord& v) { return v.forced; });
            if (!any_forced) result.natural_hit = input;
        }
    }

    result.ratios.reserve(path.branch_classes().size());
    for (const Edge& cls : path.branch_classes()) {
        const BranchStats& stats = result.stats[edge_key(cls)];
        double r;
        if (stats.n == 0) {
            r = 1.0;  // never visited within the step budget: no information
        } else if (stats.satisfied > 0) {
            r = double(stats.satisfied) / double(inputs.size());
        } else {
            const BranchBlock& block = program.block(cls.block);
            const Predicate effective =
                cls.taken ? block.predicate : negate_predicate(block.predicate);
            r = chebyshev_bound(stats.mean, stats.variance(), effective);
        }
        result.ratios.push_back(RatioEntry{cls, r});
    }
    return result;
}

}  // namespace mc2
