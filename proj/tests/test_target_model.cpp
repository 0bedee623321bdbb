#include <doctest.h>

#include <set>

#include "mc2/ground_truth.hpp"
#include "mc2/target_model.hpp"
#include "support/test_oracles.hpp"

using namespace mc2;

namespace {

const char* kSingleBranch = R"({
  "input_length": 1,
  "entry": "b0",
  "target": {"block": "b0", "dir": "true"},
  "blocks": [
    {"id": "b0", "loads": [], "distance": ["sub", ["input", 0], 100],
     "predicate": "eq", "true_succ": "exit", "false_succ": "exit"}
  ]
})";

const char* kNested = R"({
  "input_length": 2,
  "entry": "outer",
  "max_steps": 64,
  "target": {"block": "inner", "dir": "true"},
  "blocks": [
    {"id": "outer", "distance": ["sub", ["input", 0], 10],
     "predicate": "eq", "true_succ": "inner", "false_succ": "exit"},
    {"id": "inner", "distance": ["sub", ["input", 1], 20],
     "predicate": "eq", "true_succ": "exit", "false_succ": "exit"}
  ]
})";

ExecutionTrace run(const TargetProgram& program, ByteInput input, std::uint64_t seed = 0) {
    Rng rng = execution_rng(seed, input);
    return execute(program, input, rng);
}

}  // namespace

TEST_CASE("load_program") {
    SUBCASE("single branch") {
        const TargetProgram p = parse_program(kSingleBranch);
        CHECK(p.input_length() == 1);
        CHECK(p.blocks().size() == 1);
        CHECK(p.max_steps() == 4096);
        CHECK(p.target_edge() == Edge{0, true});
    }
    SUBCASE("nested") {
        const TargetProgram p = parse_program(kNested);
        CHECK(p.blocks().size() == 2);
        CHECK(p.entry_index() == p.block_index("outer"));
    }
    SUBCASE("dangling successor is a validation error") {
        const char* bad = R"({
          "input_length": 1, "entry": "b0",
          "target": {"block": "b0", "dir": "true"},
          "blocks": [{"id": "b0", "distance": 1, "predicate": "eq",
                      "true_succ": "nope", "false_succ": "exit"}]
        })";
        CHECK_THROWS_AS(parse_program(bad), ValidationError);
    }
    SUBCASE("malformed json is a parse error") {
        CHECK_THROWS_AS(parse_program("{"), ParseError);
        CHECK_THROWS_AS(parse_program(R"({"input_length": 1})"), ParseError);
    }
    SUBCASE("unbound variable is a validation error") {
        const char* bad = R"({
          "input_length": 1, "entry": "b0",
          "target": {"block": "b0", "dir": "true"},
          "blocks": [{"id": "b0", "distance": ["var", "x"], "predicate": "eq",
                      "true_succ": "exit", "false_succ": "exit"}]
        })";
        CHECK_THROWS_AS(parse_program(bad), ValidationError);
    }
    SUBCASE("bad target edge") {
        const char* bad = R"({
          "input_length": 1, "entry": "b0",
          "target": {"block": "zz", "dir": "true"},
          "blocks": [{"id": "b0", "distance": 1, "predicate": "eq",
                      "true_succ": "exit", "false_succ": "exit"}]
        })";
        CHECK_THROWS_AS(parse_program(bad), ValidationError);
    }
}

TEST_CASE("eval_distance") {
    CHECK(eval_distance(DistanceExpr::constant(5), {0}, {}) == 5);
    CHECK(eval_distance(DistanceExpr::sub(DistanceExpr::input(1), DistanceExpr::constant(3)),
                        {0, 10}, {}) == 7);
    // (input[0] * input[0]) - 4 at byte 200
    const auto expr = DistanceExpr::sub(
        DistanceExpr::mul(DistanceExpr::input(0), DistanceExpr::input(0)),
        DistanceExpr::constant(4));
    CHECK(eval_distance(expr, {200}, {}) == 200 * 200 - 4);

    CHECK_THROWS_AS(eval_distance(DistanceExpr::var("q"), {0}, {}), UnboundVariableError);
    CHECK(eval_distance(DistanceExpr::var("q"), {0}, {{"q", 42}}) == 42);

    // Wrapping semantics.
    const auto big = DistanceExpr::mul(DistanceExpr::constant(INT64_MAX),
                                       DistanceExpr::constant(2));
    CHECK(eval_distance(big, {0}, {}) == -2);
}

TEST_CASE("execute single branch") {
    const TargetProgram p = parse_program(kSingleBranch);

    const ExecutionTrace hit = run(p, {100});
    CHECK(hit.reached_target);
    REQUIRE(hit.visits.size() == 1);
    CHECK(hit.visits[0].distance == 0);
    CHECK(hit.visits[0].satisfied);
    CHECK(hit.edges == std::vector<Edge>{{0, true}});

    const ExecutionTrace miss = run(p, {7});
    CHECK_FALSE(miss.reached_target);
    CHECK(miss.visits[0].distance == -93);
    CHECK_FALSE(miss.visits[0].satisfied);
    CHECK(miss.edges == std::vector<Edge>{{0, false}});
}

TEST_CASE("exhaustive satisfying set matches the analytic one") {
    const TargetProgram p = parse_program(kSingleBranch);
    std::set<Byte> satisfying;
    for (int v = 0; v < 256; ++v) {
        if (run(p, {Byte(v)}).reached_target) satisfying.insert(Byte(v));
    }
    CHECK(satisfying == std::set<Byte>{100});
}

TEST_CASE("determinism and step budget") {
    // A loop that never exits naturally: b0 -> b0 on false.
    const char* looping = R"({
      "input_length": 1, "entry": "b0", "max_steps": 50,
      "target": {"block": "b0", "dir": "true"},
      "blocks": [{"id": "b0", "distance": ["sub", ["input", 0], 999],
                  "predicate": "eq", "true_succ": "exit", "false_succ": "b0"}]
    })";
    const TargetProgram p = parse_program(looping);
    const ExecutionTrace a = run(p, {1}, 42);
    const ExecutionTrace b = run(p, {1}, 42);
    CHECK(a.steps == 50);
    CHECK(a.truncated);
    CHECK_FALSE(a.reached_target);
    CHECK(a.edges == b.edges);
    CHECK(a.visits.size() == b.visits.size());
}

TEST_CASE("branch distance sign law at d=1") {
    // For every predicate the satisfied flag matches the sign relation,
    // enumerated over all 256 inputs on randomized expressions.
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Byte c = Byte(rng.below(256));
        for (Predicate pred : {Predicate::Eq, Predicate::Ne, Predicate::Lt, Predicate::Le,
                               Predicate::Gt, Predicate::Ge}) {
            std::vector<BranchBlock> blocks;
            blocks.push_back(BranchBlock{
                "b0",
                {},
                DistanceExpr::sub(DistanceExpr::input(0), DistanceExpr::constant(std::int64_t(c))),
                pred,
                std::string(kExitId),
                std::string(kExitId)});
            const TargetProgram p(1, std::move(blocks), "b0", TargetEdgeSpec{"b0", true});
            for (int v = 0; v < 256; ++v) {
                const ExecutionTrace t = run(p, {Byte(v)});
                const std::int64_t d = v - std::int64_t(c);
                CHECK(t.visits[0].satisfied == predicate_holds(pred, d));
                CHECK(t.reached_target == predicate_holds(pred, d));
            }
        }
    }
}

TEST_CASE("faulting loads replace the value and continue") {
    // addr = input[0] + 200 with bound 256: faults for input[0] >= 56.
    std::vector<BranchBlock> blocks;
    blocks.push_back(BranchBlock{
        "b0",
        {LoadInst{"m", DistanceExpr::add(DistanceExpr::input(0), DistanceExpr::constant(200)),
                  256}},
        DistanceExpr::var("m"),
        Predicate::Ge,
        std::string(kExitId),
        std::string(kExitId)});
    const TargetProgram p(1, std::move(blocks), "b0", TargetEdgeSpec{"b0", true});

    const ExecutionTrace ok = run(p, {10});  // addr 210 < 256, in bounds, reads 0
    CHECK(ok.fault_count == 0);
    CHECK(ok.visits[0].distance == 0);

    const ExecutionTrace faulted = run(p, {100}, 5);  // addr 300: fault
    CHECK(faulted.fault_count == 1);
    const ExecutionTrace again = run(p, {100}, 5);
    CHECK(faulted.visits[0].distance == again.visits[0].distance);  // fixed rng => same value
}

TEST_CASE("input length mismatch") {
    const TargetProgram p = parse_program(kSingleBranch);
    Rng rng(0);
    CHECK_THROWS_AS(execute(p, {1, 2}, rng), InputLengthMismatchError);
}
