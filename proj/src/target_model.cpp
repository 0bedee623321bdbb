#include "mc2/target_model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mc2 {

Predicate negate_predicate(Predicate p) {
    switch (p) {
        case Predicate::Eq: return Predicate::Ne;
        case Predicate::Ne: return Predicate::Eq;
        case Predicate::Lt: return Predicate::Ge;
        case Predicate::Le: return Predicate::Gt;
        case Predicate::Gt: return Predicate::Le;
        case Predicate::Ge: return Predicate::Lt;
    }
    throw std::logic_error("bad predicate");
}

bool predicate_holds(Predicate p, std::int64_t d) {
    switch (p) {
        case Predicate::Eq: return d == 0;
        case Predicate::Ne: return d != 0;
        case Predicate::Lt: return d < 0;
        case Predicate::Le: return d <= 0;
        case Predicate::Gt: return d > 0;
        case Predicate::Ge: return d >= 0;
    }
    throw std::logic_error("bad predicate");
}

std::string_view predicate_name(Predicate p) {
    switch (p) {
        case Predicate::Eq: return "eq";
        case Predicate::Ne: return "ne";
        case Predicate::Lt: return "lt";
        case Predicate::Le: return "le";
        case Predicate::Gt: return "gt";
        case Predicate::Ge: return "ge";
    }
    throw std::logic_error("bad predicate");
}

Predicate predicate_from_name(std::string_view name) {
    if (name == "eq") return Predicate::Eq;
    if (name == "ne") return Predicate::Ne;
    if (name == "lt") return Predicate::Lt;
    if (name == "le") return Predicate::Le;
    if (name == "gt") return Predicate::Gt;
    if (name == "ge") return Predicate::Ge;
    throw ParseError("unknown predicate: " + std::string(name));
}

namespace {

inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return std::int64_t(std::uint64_t(a) + std::uint64_t(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return std::int64_t(std::uint64_t(a) - std::uint64_t(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return std::int64_t(std::uint64_t(a) * std::uint64_t(b));
}

}  // namespace

struct DistanceExpr::Node {
    enum class Kind { Const, Input, Var, Add, Sub, Mul } kind;
    std::int64_t value = 0;     // Const
    std::size_t input_index = 0;  // Input
    std::string name;           // Var
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    std::int64_t eval(const ByteInput& input, const VarBindings& bindings) const {
        switch (kind) {
            case Kind::Const: return value;
            case Kind::Input:
                if (input_index >= input.size())
                    throw InputLengthMismatchError("input reference out of range");
                return std::int64_t(input[input_index]);
            case Kind::Var: {
                for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
                    if (it->first == name) return it->second;
                }
                throw UnboundVariableError("unbound variable: " + name);
            }
            case Kind::Add: return wrap_add(lhs->eval(input, bindings), rhs->eval(input, bindings));
            case Kind::Sub: return wrap_sub(lhs->eval(input, bindings), rhs->eval(input, bindings));
            case Kind::Mul: return wrap_mul(lhs->eval(input, bindings), rhs->eval(input, bindings));
        }
        throw std::logic_error("bad expr node");
    }

    void validate(std::size_t input_length, const std::vector<std::string>& bound) const {
        switch (kind) {
            case Kind::Const: return;
            case Kind::Input:
                if (input_index >= input_length)
                    throw ValidationError("input[" + std::to_string(input_index) +
                                          "] exceeds input_length " + std::to_string(input_length));
                return;
            case Kind::Var:
                if (std::find(bound.begin(), bound.end(), name) == bound.end())
                    throw ValidationError("variable '" + name + "' not bound by an earlier load");
                return;
            case Kind::Add:
            case Kind::Sub:
            case Kind::Mul:
                lhs->validate(input_length, bound);
                rhs->validate(input_length, bound);
                return;
        }
    }
};

DistanceExpr DistanceExpr::constant(std::int64_t v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Const;
    n->value = v;
    return DistanceExpr(std::move(n));
}

DistanceExpr DistanceExpr::input(std::size_t index) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Input;
    n->input_index = index;
    return DistanceExpr(std::move(n));
}

DistanceExpr DistanceExpr::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Var;
    n->name = std::move(name);
    return DistanceExpr(std::move(n));
}

DistanceExpr DistanceExpr::add(DistanceExpr lhs, DistanceExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Add;
    n->lhs = lhs.root_;
    n->rhs = rhs.root_;
    return DistanceExpr(std::move(n));
}
DistanceExpr DistanceExpr::sub(DistanceExpr lhs, DistanceExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Sub;
    n->lhs = lhs.root_;
    n->rhs = rhs.root_;
    return DistanceExpr(std::move(n));
}
DistanceExpr DistanceExpr::mul(DistanceExpr lhs, DistanceExpr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Mul;
    n->lhs = lhs.root_;
    n->rhs = rhs.root_;
    return DistanceExpr(std::move(n));
}

std::int64_t DistanceExpr::eval(const ByteInput& input, const VarBindings& bindings) const {
    return root_->eval(input, bindings);
}

void DistanceExpr::validate(std::size_t input_length,
                            const std::vector<std::string>& bound_vars) const {
    root_->validate(input_length, bound_vars);
}

std::int64_t eval_distance(const DistanceExpr& expr, const ByteInput& input,
                           const VarBindings& bindings) {
    return expr.eval(input, bindings);
}

TargetProgram::TargetProgram(std::size_t input_length, std::vector<BranchBlock> blocks,
                             std::string entry, TargetEdgeSpec target, std::uint64_t max_steps)
    : input_length_(input_length),
      blocks_(std::move(blocks)),
      entry_(std::move(entry)),
      target_(std::move(target)),
      max_steps_(max_steps) {
    if (input_length_ == 0) throw ValidationError("input_length must be positive");
    if (max_steps_ == 0) throw ValidationError("max_steps must be positive");
    if (blocks_.empty()) throw ValidationError("program has no blocks");

    for (std::uint32_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].id == kExitId) throw ValidationError("block id 'exit' is reserved");
        if (!index_.emplace(blocks_[i].id, i).second)
            throw ValidationError("duplicate block id: " + blocks_[i].id);
    }

    auto resolve = [&](const std::string& id) -> std::uint32_t {
        if (id == kExitId) return kExitBlock;
        auto it = index_.find(id);
        if (it == index_.end()) throw ValidationError("dangling successor: " + id);
        return it->second;
    };

    resolved_.reserve(blocks_.size());
    for (const BranchBlock& b : blocks_) {
        resolved_.push_back({resolve(b.true_succ), resolve(b.false_succ)});
        std::vector<std::string> bound;
        for (const LoadInst& load : b.loads) {
            if (load.bound == 0) throw ValidationError("load bound must be positive");
            load.addr.validate(input_length_, bound);
            bound.push_back(load.var);
        }
        b.distance.validate(input_length_, bound);
    }

    entry_index_ = resolve(entry_);
    if (entry_index_ == kExitBlock) throw ValidationError("entry may not be 'exit'");

    auto target_it = index_.find(target_.block);
    if (target_it == index_.end())
        throw ValidationError("target edge references missing block: " + target_.block);
    target_edge_ = Edge{target_it->second, target_.direction};
}

std::uint32_t TargetProgram::block_index(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw ValidationError("unknown block id: " + std::string(id));
    return it->second;
}

namespace detail {

ExecutionTrace run_program(const TargetProgram& program, const ByteInput& input,
                           ForcedDirections* forced, Rng& rng) {
    if (input.size() != program.input_length())
        throw InputLengthMismatchError("input has " + std::to_string(input.size()) +
                                       " bytes, program wants " +
                                       std::to_string(program.input_length()));

    ExecutionTrace trace;
    const Edge target = program.target_edge();
    VarBindings bindings;
    std::uint32_t current = program.entry_index();

    while (current != kExitBlock) {
        if (trace.steps >= program.max_steps()) {
            trace.truncated = true;
            break;
        }
        ++trace.steps;

        const BranchBlock& block = program.block(current);
        bindings.clear();
        for (const LoadInst& load : block.loads) {
            const std::int64_t addr = load.addr.eval(input, bindings);
            std::int64_t value;
            if (addr >= 0 && std::uint64_t(addr) < load.bound) {
                // Simulated memory: input bytes, zero-extended to `bound`.
                value = std::uint64_t(addr) < input.size() ? std::int64_t(input[std::size_t(addr)])
                                                           : 0;
            } else {
                value = std::int64_t(rng.next());
                ++trace.fault_count;
            }
            bindings.emplace_back(load.var, value);
        }

        const std::int64_t distance = block.distance.eval(input, bindings);
        const bool natural = predicate_holds(block.predicate, distance);

        bool taken = natural;
        if (forced != nullptr) {
            auto& queue = forced->per_block[current];
            auto& next = forced->next[current];
            if (next < queue.size()) taken = queue[next++];
        }

        trace.visits.push_back(VisitRecord{current, distance, natural, taken != natural});
        trace.edges.push_back(Edge{current, taken});
        if (current == target.block && taken == target.taken) trace.reached_target = true;

        current = program.successor(current, taken);
    }
    return trace;
}

}  // namespace detail

ExecutionTrace execute(const TargetProgram& program, const ByteInput& input, Rng& rng) {
    return detail::run_program(program, input, nullptr, rng);
}

namespace {

using nlohmann::json;

DistanceExpr parse_expr(const json& j) {
    if (j.is_number_integer()) return DistanceExpr::constant(j.get<std::int64_t>());
    if (!j.is_array() || j.empty() || !j[0].is_string())
        throw ParseError("expression must be an integer or [op, ...] array: " + j.dump());
    const std::string op = j[0].get<std::string>();
    if (op == "input") {
        if (j.size() != 2 || !j[1].is_number_unsigned())
            throw ParseError("[\"input\", j] wants a nonnegative index");
        return DistanceExpr::input(j[1].get<std::size_t>());
    }
    if (op == "var") {
        if (j.size() != 2 || !j[1].is_string()) throw ParseError("[\"var\", name] wants a name");
        return DistanceExpr::var(j[1].get<std::string>());
    }
    if (j.size() != 3) throw ParseError("binary op wants two operands: " + j.dump());
    DistanceExpr lhs = parse_expr(j[1]);
    DistanceExpr rhs = parse_expr(j[2]);
    if (op == "add") return DistanceExpr::add(std::move(lhs), std::move(rhs));
    if (op == "sub") return DistanceExpr::sub(std::move(lhs), std::move(rhs));
    if (op == "mul") return DistanceExpr::mul(std::move(lhs), std::move(rhs));
    throw ParseError("unknown expression op: " + op);
}

template <typename T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing key: ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad value for key '") + key + "': " + e.what());
    }
}

}  // namespace

TargetProgram parse_program(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("program description must be a JSON object");

    const auto input_length = require<std::size_t>(j, "input_length");
    const auto entry = require<std::string>(j, "entry");
    const std::uint64_t max_steps = j.value("max_steps", std::uint64_t{4096});

    if (!j.contains("target") || !j.at("target").is_object())
        throw ParseError("missing key: target");
    const json& jt = j.at("target");
    const auto target_block = require<std::string>(jt, "block");
    const auto dir = require<std::string>(jt, "dir");
    if (dir != "true" && dir != "false") throw ParseError("target.dir must be \"true\" or \"false\"");

    if (!j.contains("blocks") || !j.at("blocks").is_array())
        throw ParseError("missing key: blocks");

    std::vector<BranchBlock> blocks;
    for (const json& jb : j.at("blocks")) {
        if (!jb.is_object()) throw ParseError("block entries must be objects");
        std::vector<LoadInst> loads;
        if (jb.contains("loads")) {
            for (const json& jl : jb.at("loads")) {
                if (!jl.contains("addr")) throw ParseError("missing key: addr");
                loads.push_back(LoadInst{require<std::string>(jl, "var"),
                                         parse_expr(jl.at("addr")),
                                         require<std::uint64_t>(jl, "bound")});
            }
        }
        if (!jb.contains("distance")) throw ParseError("missing key: distance");
        blocks.push_back(BranchBlock{require<std::string>(jb, "id"), std::move(loads),
                                     parse_expr(jb.at("distance")),
                                     predicate_from_name(require<std::string>(jb, "predicate")),
                                     require<std::string>(jb, "true_succ"),
                                     require<std::string>(jb, "false_succ")});
    }

    return TargetProgram(input_length, std::move(blocks), entry,
                         TargetEdgeSpec{target_block, dir == "true"}, max_steps);
}

TargetProgram load_program(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open program file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_program(buf.str());
}

}  // namespace mc2
