#include <doctest.h>

#include <cmath>
#include <vector>

#include "mc2/counting_oracle.hpp"
#include "mc2/ground_truth.hpp"
#include "mc2/prep.hpp"
#include "support/test_oracles.hpp"

using namespace mc2;

namespace {

std::vector<ByteInput> all_inputs(const InputRegion& region) {
    std::vector<ByteInput> out;
    for_each_input(region, [&](const ByteInput& i) { out.push_back(i); });
    return out;
}

TargetProgram single_eq(Byte wanted) { return testing::equality_chain_program({wanted}); }

/// d=2 program with two distinct target-reaching paths: b0 falls through to
/// b1 either way, and the target is b1's true edge.
TargetProgram two_path_program() {
    std::vector<BranchBlock> blocks;
    blocks.push_back(BranchBlock{
        "b0",
        {},
        DistanceExpr::sub(DistanceExpr::input(0), DistanceExpr::constant(128)),
        Predicate::Le,
        "b1",
        "b1"});
    blocks.push_back(BranchBlock{
        "b1",
        {},
        DistanceExpr::sub(DistanceExpr::input(1), DistanceExpr::constant(5)),
        Predicate::Eq,
        std::string(kExitId),
        std::string(kExitId)});
    return TargetProgram(2, std::move(blocks), "b0", TargetEdgeSpec{"b1", true});
}

}  // namespace

TEST_CASE("hitgraph trie shares prefixes") {
    HitGraph graph;
    const std::vector<Edge> a = {{0, true}, {1, true}, {2, true}};
    const std::vector<Edge> b = {{0, true}, {1, true}, {2, false}};
    graph.insert(a, {});
    CHECK(graph.node_count() == 3);
    graph.insert(b, {});
    // Common prefix of length 2 shares exactly 2 nodes.
    CHECK(graph.node_count() == 4);

    CHECK(graph.find(a) != nullptr);
    CHECK(graph.find(b) != nullptr);
    CHECK(graph.find({{0, true}}) == nullptr);  // interior node, no payload
    CHECK(graph.find({{9, true}}) == nullptr);
}

TEST_CASE("ucb_select") {
    SUBCASE("single path") {
        const HitGraph::PathInfo one[] = {{0.2, 4, 0.0}};
        CHECK(ucb_select(one, 10) == 0);
    }
    SUBCASE("equal pull counts reduce to the density argmax") {
        const HitGraph::PathInfo scores[] = {{0.9, 10, 0.0}, {0.1, 10, 0.0}};
        CHECK(ucb_select(scores, 20) == 0);
    }
    SUBCASE("a rarely tried path wins through the correction term") {
        const HitGraph::PathInfo scores[] = {{0.5, 100, 0.0}, {0.4, 1, 0.0}};
        // 0.4 + sqrt(ln 101 / 1) ~ 2.548 beats 0.5 + sqrt(ln 101 / 100) ~ 0.715.
        CHECK(ucb_select(scores, 101) == 1);
    }
    SUBCASE("ties break to the first path") {
        const HitGraph::PathInfo scores[] = {{0.3, 5, 0.0}, {0.3, 5, 0.0}};
        CHECK(ucb_select(scores, 7) == 0);
    }
}

TEST_CASE("approx_count with exhaustive inputs reproduces or bounds the true count") {
    const TargetProgram p = single_eq(100);
    const PathDirectives path(p, {{0, true}});
    CountingOracle oracle(p, {path}, OracleConfig{5, 0.01}, Rng(1));

    SUBCASE("full region, exact ratios") {
        const InputRegion full = InputRegion::full(1);
        const auto inputs = all_inputs(full);
        const double log_count = oracle.approx_count_log2(full, 0, inputs);
        CHECK(log_count == doctest::Approx(0.0));  // log2(256 * 1/256) = 0 -> count 1
    }
    SUBCASE("satisfying singleton region") {
        const InputRegion region = InputRegion::singleton(ByteInput{100});
        const auto inputs = all_inputs(region);
        CHECK(oracle.approx_count_log2(region, 0, inputs) == doctest::Approx(0.0));
    }
    SUBCASE("region with no satisfying input stays a sound upper bound") {
        const InputRegion region({{0, 49}});
        const auto inputs = all_inputs(region);
        const double count = std::exp2(oracle.approx_count_log2(region, 0, inputs));
        CHECK(count >= 0.0);    // true count is 0
        CHECK(count <= 50.0 + 1e-9);
    }
}

TEST_CASE("Eq. 1 on exact counts: containment decides the bit") {
    const TargetProgram p = single_eq(100);
    ExhaustiveCountingOracle exact(p, p.full_space(), 0);
    REQUIRE(exact.satisfying().size() == 1);

    const InputRegion left({{0, 127}});    // holds the only target input
    const InputRegion right({{128, 255}});
    CHECK(exact.compare(left, right) == 1);
    CHECK(exact.compare(right, left) == 0);   // mirrored
    CHECK(exact.compare(right, right) == 1);  // tie resolves to >=
}

TEST_CASE("oracle_query ties and updates") {
    const TargetProgram p = single_eq(100);
    const PathDirectives path(p, {{0, true}});

    SUBCASE("identical regions share the query's random stream and tie to 1") {
        CountingOracle oracle(p, {path}, OracleConfig{5, 0.01}, Rng(3));
        const InputRegion region({{0, 127}});
        for (int i = 0; i < 10; ++i) CHECK(oracle.compare(region, region) == 1);
    }

    SUBCASE("selection counts and t advance per query") {
        CountingOracle oracle(p, {path}, OracleConfig{5, 0.01}, Rng(4));
        const InputRegion left({{0, 127}});
        const InputRegion right({{128, 255}});
        for (int i = 0; i < 5; ++i) oracle.compare(left, right);
        CHECK(oracle.query_count() == 5);
        CHECK(oracle.path_info(0).selections == 6);  // initialization + 5 queries
        CHECK(oracle.path_info(0).density >= 0.0);
        CHECK(oracle.path_info(0).density <= 1.0);
    }
}

TEST_CASE("the sampled oracle tracks the branch-distance gradient") {
    // Neither half is likely to hit the single target at 200 with k=5, so
    // both sides fall back to the Chebyshev gradient; the right half's mean
    // distance is closer to zero and should win most queries.
    const TargetProgram p = single_eq(200);
    const PathDirectives path(p, {{0, true}});
    const InputRegion left({{0, 127}});
    const InputRegion right({{128, 255}});
    int rights = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
        CountingOracle oracle(p, {path}, OracleConfig{5, 0.01}, Rng(std::uint64_t(t) + 1));
        if (oracle.compare(left, right) == 0) ++rights;
    }
    CHECK(rights > 60);
}

TEST_CASE("noisy oracle flips the known comparison less than half the time") {
    const TargetProgram p = single_eq(200);
    const PathDirectives path(p, {{0, true}});
    const InputRegion left({{0, 127}});
    const InputRegion right({{128, 255}});
    // Truth (exact counts): right holds the only target, correct bit is 0.
    int flips = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        CountingOracle oracle(p, {path}, OracleConfig{5, 0.01}, Rng(std::uint64_t(t) + 1));
        if (oracle.compare(left, right) == 1) ++flips;
    }
    CHECK(double(flips) / trials < 0.5);
}

TEST_CASE("upper-bound law with exact ratios at d<=2") {
    // |I| * min(r) >= true path count, for random small programs, every
    // bootstrapped path and regions down a random split chain (widths <= 16).
    Rng rng(77);
    int programs_checked = 0;
    for (int attempt = 0; attempt < 200 && programs_checked < 40; ++attempt) {
        const std::size_t d = 1 + rng.below(2);
        const TargetProgram p = testing::random_small_program(rng, d);

        std::vector<PathDirectives> paths;
        try {
            Rng boot{std::uint64_t(attempt)};
            paths = bootstrap_paths(p, ByteInput(d, 0), 2, boot);
        } catch (const NoPathsFoundError&) {
            continue;
        }
        ++programs_checked;

        InputRegion region(std::vector<Interval>(d, Interval{0, 15}));
        const TotalOrder order = TotalOrder::lexicographic(d);

        CountingOracle oracle(p, paths, OracleConfig{5, 0.01}, Rng(1));
        for (int depth = 0; depth < 4; ++depth) {
            const auto inputs = all_inputs(region);
            for (std::size_t pi = 0; pi < paths.size(); ++pi) {
                const double log_count = oracle.approx_count_log2(region, pi, inputs);

                // Ground truth: inputs whose natural trace follows the path.
                std::uint64_t true_count = 0;
                for (const ByteInput& input : inputs) {
                    Rng exec = execution_rng(0, input);
                    const ExecutionTrace t = execute(p, input, exec);
                    const auto& want = paths[pi].edges();
                    if (t.edges.size() >= want.size() &&
                        std::equal(want.begin(), want.end(), t.edges.begin())) {
                        ++true_count;
                    }
                }
                CHECK(std::exp2(log_count) >= double(true_count) - 1e-6);
            }
            if (region.is_singleton()) break;
            const SplitResult s = split_half(region, order);
            region = rng.below(2) == 0 ? s.left : s.right;
        }
    }
    CHECK(programs_checked >= 30);
}

TEST_CASE("every path keeps getting selected under UCB") {
    const TargetProgram p = two_path_program();
    const PathDirectives path_a(p, {{0, true}, {1, true}});
    const PathDirectives path_b(p, {{0, false}, {1, true}});
    CountingOracle oracle(p, {path_a, path_b}, OracleConfig{2, 0.1}, Rng(9));
    const InputRegion left({{0, 127}, {0, 255}});
    const InputRegion right({{128, 255}, {0, 255}});
    std::vector<std::uint64_t> picks(2, 0);
    for (int t = 0; t < 1000; ++t) {
        ++picks[oracle.current_path_index()];
        oracle.compare(left, right);
    }
    CHECK(oracle.path_info(0).selections + oracle.path_info(1).selections == 1002);
    CHECK(picks[0] >= 10);
    CHECK(picks[1] >= 10);
}
