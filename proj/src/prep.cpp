#include "mc2/prep.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

namespace mc2 {

namespace {

std::vector<Edge> truncate_at_target(const TargetProgram& program,
                                     const std::vector<Edge>& edges) {
    std::vector<Edge> out;
    for (const Edge& e : edges) {
        out.push_back(e);
        if (e == program.target_edge()) break;
    }
    return out;
}

}  // namespace

std::vector<PathDirectives> bootstrap_paths(const TargetProgram& program, const ByteInput& seed,
                                            std::size_t n, Rng& rng, ExecutionMeter* meter) {
    if (seed.size() != program.input_length())
        throw InputLengthMismatchError("seed length does not match input_length");

    std::vector<PathDirectives> paths;
    if (n == 0) return paths;

    std::set<std::vector<Edge>> seen;
    const auto keep = [&](const ExecutionTrace& trace) {
        if (!trace.reached_target) return;
        std::vector<Edge> edges = truncate_at_target(program, trace.edges);
        if (seen.insert(edges).second) paths.emplace_back(program, std::move(edges));
    };

    Rng exec_rng = rng.fork(0x626f6f74);
    const ExecutionTrace natural = execute(program, seed, exec_rng);
    if (meter != nullptr) meter->charge();
    keep(natural);

    // Pool of observed traces to invert from; inversions that open new
    // control flow feed later attempts, so nested branches become reachable.
    std::vector<std::vector<Edge>> pool;
    std::set<std::vector<Edge>> pooled;
    const auto pool_add = [&](const std::vector<Edge>& edges) {
        if (!edges.empty() && pooled.insert(edges).second) pool.push_back(edges);
    };
    pool_add(natural.edges);

    const std::size_t attempts = 16 * n;
    for (std::size_t attempt = 0; attempt < attempts && paths.size() < n; ++attempt) {
        if (pool.empty()) break;
        if (meter != nullptr && meter->exhausted()) break;

        // Invert a uniformly sized random subset of a pooled trace's visits.
        const std::vector<Edge>& base = pool[rng.below(pool.size())];
        std::vector<std::size_t> order(base.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        const std::size_t subset = 1 + rng.below(base.size());
        for (std::size_t i = 0; i < subset; ++i) {
            std::swap(order[i], order[i + rng.below(order.size() - i)]);
        }

        detail::ForcedDirections forced(program.blocks().size());
        {
            std::vector<Edge> flipped = base;
            for (std::size_t i = 0; i < subset; ++i) {
                flipped[order[i]].taken = !flipped[order[i]].taken;
            }
            for (const Edge& e : flipped) forced.per_block[e.block].push_back(e.taken);
        }

        ExecutionTrace trace = detail::run_program(program, seed, &forced, exec_rng);
        if (meter != nullptr) meter->charge();
        keep(trace);
        pool_add(trace.edges);
    }

    if (paths.empty()) throw NoPathsFoundError{};
    return paths;
}

namespace {

using IndexSet = std::vector<std::size_t>;

struct RatioProbe {
    const TargetProgram& program;
    const PathDirectives& path;
    const InputRegion& region;
    const ByteInput& pin;  // byte values for unperturbed dimensions
    const OrderConfig& config;
    Rng& rng;
    ExecutionMeter* meter;

    // Mean per-branch-class satisfaction ratios over `repetitions` Monte
    // Carlo batches where only the subset's bytes are resampled. The count
    // estimate is |I| * min of these; probing the full vector keeps one
    // structurally-zero branch from masking movement in the others.
    std::vector<double> operator()(const IndexSet& subset) {
        std::vector<double> sums(path.branch_classes().size(), 0.0);
        for (std::uint32_t rep = 0; rep < config.repetitions; ++rep) {
            std::vector<ByteInput> inputs(config.k, pin);
            for (ByteInput& input : inputs) {
                for (std::size_t j : subset) {
                    const Interval& iv = region.interval(j);
                    input[j] = Byte(iv.lo + rng.below(iv.width()));
                }
            }
            MonteCarloResult mc = monte_carlo_execute(program, path, inputs, rng);
            if (meter != nullptr) meter->charge(mc.executions);
            for (std::size_t c = 0; c < mc.ratios.size(); ++c) sums[c] += mc.ratios[c].ratio;
        }
        for (double& s : sums) s /= double(config.repetitions);
        return sums;
    }
};

// Relative movement of any branch ratio beyond the tolerance.
bool changed(const std::vector<double>& baseline, const std::vector<double>& probed,
             double tol) {
    for (std::size_t c = 0; c < baseline.size(); ++c) {
        const double scale =
            std::max(std::max(std::abs(baseline[c]), std::abs(probed[c])), 1e-12);
        if (std::abs(probed[c] - baseline[c]) / scale > tol) return true;
    }
    return false;
}

double influence(const std::vector<double>& baseline, const std::vector<double>& probed) {
    double best = 0.0;
    for (std::size_t c = 0; c < baseline.size(); ++c) {
        best = std::max(best, std::abs(probed[c] - baseline[c]));
    }
    return best;
}

}  // namespace

TotalOrder assign_total_order(const TargetProgram& program,
                              const std::vector<PathDirectives>& paths,
                              const InputRegion& region, Rng& rng, const OrderConfig& config,
                              const std::optional<ByteInput>& seed, ExecutionMeter* meter) {
    const std::size_t d = program.input_length();
    if (d <= 1 || paths.empty()) return TotalOrder::lexicographic(d);

    const ByteInput pin = seed.value_or(ByteInput(d, 0));
    RatioProbe probe{program, paths.front(), region, pin, config, rng, meter};

    const std::vector<double> baseline = probe(IndexSet{});

    std::vector<std::pair<std::size_t, double>> survivors;  // (index, influence)
    std::deque<IndexSet> queue;
    IndexSet all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});
    queue.push_back(std::move(all));

    while (!queue.empty()) {
        IndexSet set = std::move(queue.front());
        queue.pop_front();

        const std::size_t half = (set.size() + 1) / 2;
        const IndexSet parts[2] = {IndexSet(set.begin(), set.begin() + std::ptrdiff_t(half)),
                                   IndexSet(set.begin() + std::ptrdiff_t(half), set.end())};
        for (const IndexSet& part : parts) {
            if (part.empty()) continue;
            const std::vector<double> ratios = probe(part);
            if (!changed(baseline, ratios, config.rel_tolerance)) continue;
            if (part.size() == 1) {
                survivors.emplace_back(part[0], influence(baseline, ratios));
            } else {
                queue.push_back(part);
            }
        }
    }

    std::stable_sort(survivors.begin(), survivors.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    TotalOrder order;
    std::vector<bool> used(d, false);
    for (const auto& [index, delta] : survivors) {
        order.priority.push_back(index);
        used[index] = true;
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (!used[j]) order.priority.push_back(j);
    }
    return order;
}

}  // namespace mc2
