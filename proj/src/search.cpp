#include "mc2/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mc2 {

WeightGroupList::WeightGroupList(InputRegion space) {
    groups_.push_back(WeightGroup{std::move(space), 1.0});
}

WeightGroupList WeightGroupList::from_groups(std::vector<WeightGroup> groups) {
    if (groups.empty()) throw EmptyListError{};
    WeightGroupList list(groups.front().region);
    list.groups_ = std::move(groups);
    return list;
}

std::size_t WeightGroupList::select_split_group() const {
    if (groups_.empty()) throw EmptyListError{};
    double cumulative = 0.0;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        cumulative += groups_[i].weight;
        if (cumulative >= 0.5) return i;
    }
    return groups_.size() - 1;  // guards against rounding shortfall
}

std::size_t WeightGroupList::argmax() const {
    if (groups_.empty()) throw EmptyListError{};
    std::size_t best = 0;
    for (std::size_t i = 1; i < groups_.size(); ++i) {
        if (groups_[i].weight > groups_[best].weight) best = i;
    }
    return best;
}

double WeightGroupList::weight_sum() const {
    double sum = 0.0;
    for (const WeightGroup& g : groups_) sum += g.weight;
    return sum;
}

bool WeightGroupList::eliminate(std::size_t index) {
    groups_[index].weight = 0.0;
    const double total = weight_sum();
    if (total < 1e-12) return false;
    for (WeightGroup& g : groups_) g.weight /= total;
    return true;
}

void WeightGroupList::replace_with_halves(std::size_t mid, const SplitResult& halves,
                                          SplitWeightMode mode) {
    if (mid >= groups_.size()) throw std::out_of_range("split: bad group index");
    if (groups_[mid].region.is_singleton()) throw SingletonGroupError{};

    const double parent_weight = groups_[mid].weight;
    double left_weight = parent_weight;
    double right_weight = parent_weight;
    if (mode == SplitWeightMode::Proportional) {
        const double frac = std::exp2(halves.left.log2_cardinality() -
                                      groups_[mid].region.log2_cardinality());
        left_weight = parent_weight * frac;
        right_weight = parent_weight - left_weight;
    }

    groups_[mid] = WeightGroup{halves.left, left_weight};
    groups_.insert(groups_.begin() + std::ptrdiff_t(mid) + 1,
                   WeightGroup{halves.right, right_weight});
}

void WeightGroupList::update_weights(std::size_t mid, const SplitResult& halves, int bit,
                                     double p, SplitWeightMode mode) {
    // p = 0 is the noiseless limit: the unfavored side is eliminated outright.
    if (!(p >= 0.0 && p < 0.5)) throw std::invalid_argument("p must lie in [0, 1/2)");
    replace_with_halves(mid, halves, mode);

    const double left_factor = bit == 1 ? 1.0 - p : p;
    const double right_factor = bit == 1 ? p : 1.0 - p;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        groups_[i].weight *= i <= mid ? left_factor : right_factor;
    }

    const double total = weight_sum();
    for (WeightGroup& g : groups_) g.weight /= total;
}

void WeightGroupList::split_neutral(std::size_t mid, const SplitResult& halves,
                                    SplitWeightMode mode) {
    replace_with_halves(mid, halves, mode);
    const double total = weight_sum();
    for (WeightGroup& g : groups_) g.weight /= total;
}

std::uint64_t default_query_budget(double log2_cardinality, double p) {
    const double bits = std::max(1.0, std::ceil(log2_cardinality));
    const double margin = 0.5 - p;
    return std::uint64_t(std::llround(64.0 * bits / (margin * margin)));
}

namespace {

ByteInput sample_one(const InputRegion& region, Rng& rng) {
    return sample_uniform(region, 1, rng)[0];
}

bool adopt_found(SearchOutcome& out, ComparisonOracle& oracle, const VerifyFn& verify) {
    const std::optional<ByteInput> found = oracle.found_input();
    if (!found) return false;
    out.candidate = *found;
    out.found_by_execution = true;
    out.success = verify(*found);
    return true;
}

}  // namespace

SearchOutcome deterministic_search(const InputRegion& space, const TotalOrder& order,
                                   ComparisonOracle& oracle, const VerifyFn& verify, Rng& rng) {
    SearchOutcome out;
    InputRegion region = space;
    while (!region.is_singleton()) {
        const SplitResult halves = split_half(region, order);
        const int bit = oracle.compare(halves.left, halves.right);
        ++out.queries;
        region = bit == 1 ? halves.left : halves.right;
    }
    out.best_region = region;
    out.candidate = region.min_corner();
    out.success = verify(out.candidate);
    (void)rng;
    return out;
}

SearchOutcome randomized_search(const InputRegion& space, const TotalOrder& order,
                                ComparisonOracle& oracle, const SearchConfig& config,
                                const VerifyFn& verify, Rng& rng) {
    SearchOutcome out;
    if (space.is_singleton()) {
        out.best_region = space;
        out.candidate = space.min_corner();
        out.success = verify(out.candidate);
        return out;
    }

    const double bits = space.log2_cardinality();
    const std::uint64_t budget =
        config.query_budget != 0 ? config.query_budget : default_query_budget(bits, config.p);
    // Midpoint splits make every boundary a one-shot comparison, so each of
    // a handful of adjacent rivals keeps odds p/(1-p) against the winner
    // forever and the posterior plateaus near 1/(1 + c*p/(1-p)) for a small
    // structural c. Gate verification safely below that plateau; a failed
    // verification eliminates the candidate and the search resumes.
    const double odds = config.p / (1.0 - config.p);
    const double plateau_gate = 1.0 / (1.0 + 6.0 * odds);
    const double threshold = std::max(1.0 / std::sqrt(std::max(bits, 1e-9)),
                                      std::min(config.stop_confidence, plateau_gate));

    std::map<std::size_t, WeightGroupList> lists;
    WeightGroupList* active = nullptr;

    // Verify early when the posterior stops improving; flips can freeze the
    // plateau below any fixed gate.
    const std::uint64_t stall_window = 16 + std::uint64_t(std::ceil(bits));
    double best_seen = 0.0;
    std::uint64_t stalled = 0;
    std::uint32_t eliminations = 0;

    for (;;) {
        const std::size_t path = oracle.current_path_index();
        if (adopt_found(out, oracle, verify)) return out;
        active = &lists.try_emplace(path, space).first->second;

        const std::size_t heaviest = active->argmax();
        const double max_weight = active->group(heaviest).weight;
        if (max_weight > best_seen + 0.02) {
            best_seen = max_weight;
            stalled = 0;
        }
        if ((max_weight >= threshold || stalled > stall_window) &&
            active->group(heaviest).region.is_singleton()) {
            // Verify the concentrated candidate. A failed verification is
            // exact evidence: eliminate the singleton and keep searching.
            out.candidate = active->group(heaviest).region.min_corner();
            out.best_region = active->group(heaviest).region;
            if (verify(out.candidate)) {
                out.success = true;
                return out;
            }
            if (++eliminations > config.max_eliminations) break;
            if (!active->eliminate(heaviest)) break;
            // Keep the stall clock primed: the next concentrated singleton
            // gets verified promptly instead of waiting a full window.
            best_seen = active->group(active->argmax()).weight;
            stalled = stall_window;
            continue;
        }
        if (out.queries >= budget) {
            out.budget_exhausted = true;
            break;
        }
        if (config.meter != nullptr && config.meter->exhausted()) {
            out.budget_exhausted = true;
            break;
        }

        std::size_t idx = active->select_split_group();
        if (active->group(idx).region.is_singleton()) {
            // The weighted median cannot split; cut the nearest splittable
            // group instead so every query still refines the partition.
            std::optional<std::size_t> alt;
            for (std::size_t off = 1; off < active->size() && !alt; ++off) {
                const bool left_ok = off <= idx &&
                                     !active->group(idx - off).region.is_singleton();
                const bool right_ok = idx + off < active->size() &&
                                      !active->group(idx + off).region.is_singleton();
                if (left_ok && right_ok) {
                    alt = active->group(idx - off).weight >= active->group(idx + off).weight
                              ? idx - off
                              : idx + off;
                } else if (left_ok) {
                    alt = idx - off;
                } else if (right_ok) {
                    alt = idx + off;
                }
            }
            if (!alt) break;  // fully split; nothing left to refine
            idx = *alt;
        }

        const SplitResult halves = split_half(active->group(idx).region, order);
        const int bit = oracle.compare(halves.left, halves.right);
        ++out.queries;
        ++stalled;
        if (oracle.last_tie()) {
            active->split_neutral(idx, halves, config.split_mode);
        } else {
            active->update_weights(idx, halves, bit, config.p, config.split_mode);
        }

        if (config.record_log) {
            out.log.push_back(QueryLogEntry{out.queries, path, idx, bit, active->weight_sum(),
                                            active->size(),
                                            active->group(active->argmax()).weight});
        }
        if (adopt_found(out, oracle, verify)) return out;
    }

    const std::size_t best = active->argmax();
    out.best_region = active->group(best).region;
    out.candidate = sample_one(*out.best_region, rng);
    out.success = verify(out.candidate);
    return out;
}

SearchOutcome majority_vote_search(const InputRegion& space, const TotalOrder& order,
                                   ComparisonOracle& oracle, double p, std::uint32_t reps,
                                   const VerifyFn& verify, Rng& rng) {
    if (reps % 2 == 0) throw std::invalid_argument("reps must be odd");
    if (!(p >= 0.0 && p < 0.5)) throw std::invalid_argument("p must lie in [0, 1/2)");

    SearchOutcome out;
    InputRegion region = space;
    while (!region.is_singleton()) {
        const SplitResult halves = split_half(region, order);
        std::uint32_t votes = 0;
        for (std::uint32_t i = 0; i < reps; ++i) {
            votes += std::uint32_t(oracle.compare(halves.left, halves.right));
            ++out.queries;
        }
        region = 2 * votes > reps ? halves.left : halves.right;
    }
    out.best_region = region;
    out.candidate = region.min_corner();
    out.success = verify(out.candidate);
    (void)rng;
    return out;
}

SearchOutcome blackbox_search(const TargetProgram& program, const InputRegion& space,
                              std::uint64_t budget, Rng& rng, ExecutionMeter* meter) {
    SearchOutcome out;
    while (out.executions < budget && (meter == nullptr || !meter->exhausted())) {
        const ByteInput input = sample_one(space, rng);
        ExecutionTrace trace = execute(program, input, rng);
        ++out.executions;
        if (meter != nullptr) meter->charge();
        if (trace.reached_target) {
            out.candidate = input;
            out.success = true;
            return out;
        }
    }
    out.budget_exhausted = true;
    return out;
}

}  // namespace mc2
