#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mc2/input_space.hpp"
#include "mc2/rng.hpp"

namespace mc2 {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputLengthMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundVariableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Predicate { Eq, Ne, Lt, Le, Gt, Ge };

Predicate negate_predicate(Predicate p);
bool predicate_holds(Predicate p, std::int64_t distance);
std::string_view predicate_name(Predicate p);
Predicate predicate_from_name(std::string_view name);

using VarBindings = std::vector<std::pair<std::string, std::int64_t>>;

/// Branch-distance expression tree over integer constants, input-byte
/// references, load-bound variables and wrapping signed 64-bit +, -, *.
class DistanceExpr {
public:
    static DistanceExpr constant(std::int64_t v);
    static DistanceExpr input(std::size_t index);
    static DistanceExpr var(std::string name);
    static DistanceExpr add(DistanceExpr lhs, DistanceExpr rhs);
    static DistanceExpr sub(DistanceExpr lhs, DistanceExpr rhs);
    static DistanceExpr mul(DistanceExpr lhs, DistanceExpr rhs);

    std::int64_t eval(const ByteInput& input, const VarBindings& bindings) const;

    // Checks input references against d and variable references against the
    // names bound earlier in the same block.
    void validate(std::size_t input_length, const std::vector<std::string>& bound_vars) const;

private:
    struct Node;
    explicit DistanceExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

std::int64_t eval_distance(const DistanceExpr& expr, const ByteInput& input,
                           const VarBindings& bindings);

/// Simulated memory read: `var` receives buffer[addr] where the buffer is the
/// input zero-extended to `bound` bytes. An address outside [0, bound) is a
/// fault; the variable gets a uniformly random 64-bit value instead.
struct LoadInst {
    std::string var;
    DistanceExpr addr;
    std::uint64_t bound;
};

struct BranchBlock {
    std::string id;
    std::vector<LoadInst> loads;
    DistanceExpr distance;
    Predicate predicate;
    std::string true_succ;   // block id or "exit"
    std::string false_succ;  // block id or "exit"
};

struct TargetEdgeSpec {
    std::string block;
    bool direction;
};

inline constexpr std::uint32_t kExitBlock = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::string_view kExitId = "exit";

/// Directed edge out of a branch block: `taken` is the evaluated (or forced)
/// branch outcome.
struct Edge {
    std::uint32_t block;
    bool taken;
    auto operator<=>(const Edge&) const = default;
};

using EdgeKey = std::uint64_t;
inline EdgeKey edge_key(Edge e) { return (std::uint64_t(e.block) << 1) | (e.taken ? 1u : 0u); }

struct VisitRecord {
    std::uint32_t block;
    std::int64_t distance;
    bool satisfied;  // block's own predicate on the distance
    bool forced;     // a directive overrode the natural direction
};

struct ExecutionTrace {
    std::vector<Edge> edges;
    std::vector<VisitRecord> visits;
    bool reached_target = false;
    std::uint32_t fault_count = 0;
    std::uint64_t steps = 0;
    bool truncated = false;
};

class TargetProgram {
public:
    TargetProgram(std::size_t input_length, std::vector<BranchBlock> blocks, std::string entry,
                  TargetEdgeSpec target, std::uint64_t max_steps = 4096);

    std::size_t input_length() const { return input_length_; }
    std::uint64_t max_steps() const { return max_steps_; }
    const std::vector<BranchBlock>& blocks() const { return blocks_; }
    const BranchBlock& block(std::uint32_t index) const { return blocks_[index]; }
    std::uint32_t entry_index() const { return entry_index_; }
    Edge target_edge() const { return target_edge_; }
    const std::string& block_id(std::uint32_t index) const { return blocks_[index].id; }
    std::uint32_t block_index(std::string_view id) const;

    // Resolved successor (block index or kExitBlock).
    std::uint32_t successor(std::uint32_t block, bool taken) const {
        return taken ? resolved_[block].on_true : resolved_[block].on_false;
    }

    InputRegion full_space() const { return InputRegion::full(input_length_); }

private:
    struct Resolved {
        std::uint32_t on_true;
        std::uint32_t on_false;
    };

    std::size_t input_length_;
    std::vector<BranchBlock> blocks_;
    std::string entry_;
    TargetEdgeSpec target_;
    std::uint64_t max_steps_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<Resolved> resolved_;
    std::uint32_t entry_index_ = 0;
    Edge target_edge_{0, true};
};

TargetProgram load_program(const std::filesystem::path& path);
TargetProgram parse_program(const std::string& json_text);

namespace detail {
/// Per-block queues of directions to force, consumed in visit order.
struct ForcedDirections {
    std::vector<std::vector<bool>> per_block;  // indexed by block
    std::vector<std::size_t> next;

    explicit ForcedDirections(std::size_t block_count)
        : per_block(block_count), next(block_count, 0) {}
};

ExecutionTrace run_program(const TargetProgram& program, const ByteInput& input,
                           ForcedDirections* forced, Rng& rng);
}  // namespace detail

/// Natural execution. Faults draw from `rng`; use execution_rng() to make the
/// ground truth a pure function of (seed, input).
ExecutionTrace execute(const TargetProgram& program, const ByteInput& input, Rng& rng);

inline Rng execution_rng(std::uint64_t base_seed, const ByteInput& input) {
    return Rng(hash_bytes(base_seed, {input.data(), input.size()}));
}

}  // namespace mc2
