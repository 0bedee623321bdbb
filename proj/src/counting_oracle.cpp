#include "mc2/counting_oracle.hpp"

#include <algorithm>

#include <cmath>
#include <span>
#include <limits>

namespace mc2 {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::size_t HitGraph::insert(const std::vector<Edge>& edges, PathInfo info) {
    std::size_t node = 0;
    for (const Edge& e : edges) {
        const EdgeKey key = edge_key(e);
        auto it = nodes_[node].children.find(key);
        if (it == nodes_[node].children.end()) {
            nodes_.push_back(Node{});
            it = nodes_[node].children.emplace(key, nodes_.size() - 1).first;
        }
        node = it->second;
    }
    nodes_[node].payload = info;
    nodes_[node].has_payload = true;
    return node;
}

const HitGraph::PathInfo* HitGraph::find(const std::vector<Edge>& edges) const {
    std::size_t node = 0;
    for (const Edge& e : edges) {
        auto it = nodes_[node].children.find(edge_key(e));
        if (it == nodes_[node].children.end()) return nullptr;
        node = it->second;
    }
    return nodes_[node].has_payload ? &nodes_[node].payload : nullptr;
}

std::size_t ucb_select(std::span<const HitGraph::PathInfo> scores, std::uint64_t t) {
    if (scores.empty()) throw NoPathsError{};
    std::size_t best = 0;
    double best_score = kNegInf;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double bonus =
            std::sqrt(std::log(double(t)) / double(std::max<std::uint64_t>(scores[i].selections, 1)));
        const double score = scores[i].density + bonus;
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

CountingOracle::CountingOracle(const TargetProgram& program, std::vector<PathDirectives> paths,
                               OracleConfig config, Rng rng, std::optional<ByteInput> seed,
                               ExecutionMeter* meter)
    : program_(program),
      paths_(std::move(paths)),
      config_(config),
      rng_(rng),
      seed_(std::move(seed)),
      meter_(meter) {
    if (paths_.empty()) throw NoPathsError{};
    if (config_.k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(config_.p > 0.0 && config_.p < 0.5))
        throw std::invalid_argument("p must lie in (0, 1/2)");
}

double CountingOracle::approx_count_log2(const InputRegion& region, std::size_t path_index,
                                         std::span<const ByteInput> inputs, Rng& exec_rng) {
    MonteCarloResult mc = monte_carlo_execute(program_, paths_[path_index], inputs, exec_rng);
    executions_ += mc.executions;
    if (meter_ != nullptr) meter_->charge(mc.executions);
    if (!found_ && mc.natural_hit) found_ = mc.natural_hit;
    const double min_ratio = mc.min_ratio();
    if (min_ratio <= 0.0) return kNegInf;
    return region.log2_cardinality() + std::log2(min_ratio);
}

double CountingOracle::approx_count_log2(const InputRegion& region, std::size_t path_index,
                                         std::span<const ByteInput> inputs) {
    return approx_count_log2(region, path_index, inputs, rng_);
}

double CountingOracle::approx_count_log2(const InputRegion& region, std::size_t path_index) {
    const std::vector<ByteInput> inputs = sample_uniform(region, config_.k, rng_, seed_);
    return approx_count_log2(region, path_index, inputs);
}

namespace {

// Maps shared unit draws into a region. Both sides of a query see the same
// draws, so their sampled branch distances differ by the regions' offset
// rather than by sampling luck; identical regions get identical batches.
std::vector<ByteInput> map_common_samples(const InputRegion& region,
                                          std::span<const double> uniforms, std::uint32_t k,
                                          const std::optional<ByteInput>& seed) {
    const std::size_t d = region.dims();
    std::vector<ByteInput> inputs(k, ByteInput(d));
    for (std::uint32_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Interval& iv = region.interval(j);
            const auto offset = std::uint32_t(uniforms[i * d + j] * iv.width());
            inputs[i][j] = Byte(iv.lo + std::min(offset, iv.width() - 1));
        }
    }
    if (seed && region.contains(*seed)) inputs[0] = *seed;
    return inputs;
}

}  // namespace

void CountingOracle::ensure_initialized() {
    if (initialized_) return;
    initialized_ = true;
    const InputRegion space = program_.full_space();
    handles_.reserve(paths_.size());
    for (std::size_t i = 0; i < paths_.size(); ++i) {
        const double log_count = approx_count_log2(space, i);
        HitGraph::PathInfo info;
        info.last_log2_count = log_count;
        info.density =
            log_count == kNegInf ? 0.0 : std::exp2(log_count - space.log2_cardinality());
        info.selections = 1;
        handles_.push_back(graph_.insert(paths_[i].edges(), info));
    }
}

std::size_t CountingOracle::current_path_index() {
    ensure_initialized();
    if (!pending_path_) {
        std::vector<HitGraph::PathInfo> scores;
        scores.reserve(handles_.size());
        for (std::size_t h : handles_) scores.push_back(graph_.payload(h));
        pending_path_ = ucb_select(scores, t_);
    }
    return *pending_path_;
}

int CountingOracle::compare(const InputRegion& left, const InputRegion& right) {
    const std::size_t path = current_path_index();

    // Common random numbers across the two sides: shared unit draws and a
    // shared fault stream, so the comparison reflects the regions and equal
    // regions tie exactly (resolved to 1).
    const std::uint64_t query_salt = rng_.next();
    Rng unit_rng(splitmix64(query_salt ^ 0x636f6d6d6f6eULL));
    std::vector<double> uniforms(std::size_t(config_.k) * left.dims());
    for (double& u : uniforms) u = unit_rng.unit();

    // Per-branch log2 counts, ascending; the front is the Eq. 4 count.
    const auto side_counts = [&](const InputRegion& region) {
        Rng exec_rng(splitmix64(query_salt ^ 0x65786563ULL));
        const std::vector<ByteInput> inputs =
            map_common_samples(region, uniforms, config_.k, seed_);
        MonteCarloResult mc = monte_carlo_execute(program_, paths_[path], inputs, exec_rng);
        executions_ += mc.executions;
        if (meter_ != nullptr) meter_->charge(mc.executions);
        if (!found_ && mc.natural_hit) found_ = mc.natural_hit;
        std::vector<double> counts;
        counts.reserve(mc.ratios.size());
        for (const RatioEntry& e : mc.ratios) {
            counts.push_back(e.ratio <= 0.0 ? kNegInf
                                            : region.log2_cardinality() + std::log2(e.ratio));
        }
        std::sort(counts.begin(), counts.end());
        return counts;
    };
    const std::vector<double> counts_left = side_counts(left);
    const std::vector<double> counts_right = side_counts(right);
    const double log_left = counts_left.empty() ? kNegInf : counts_left.front();
    const double log_right = counts_right.empty() ? kNegInf : counts_right.front();

    const double log_max = std::max(log_left, log_right);
    const double larger_bits = std::max(left.log2_cardinality(), right.log2_cardinality());
    HitGraph::PathInfo& info = graph_.payload(handles_[path]);
    info.density = log_max == kNegInf ? 0.0 : std::exp2(log_max - larger_bits);
    info.last_log2_count = log_max;
    info.selections += 1;

    ++t_;
    pending_path_.reset();

    // Eq. 1 on the minimum counts; exact ties fall through to the next
    // per-branch count so one saturated constraint cannot mask the other.
    last_tie_ = false;
    if (counts_left > counts_right) return 1;
    if (counts_left < counts_right) return 0;
    last_tie_ = true;
    return 1;
}

}  // namespace mc2
