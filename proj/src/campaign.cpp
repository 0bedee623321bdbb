#include "mc2/campaign.hpp"

#include <chrono>
#include <cmath>

namespace mc2 {

namespace {

std::uint64_t round_query_budget(const CampaignConfig& config, double log2N,
                                 const ExecutionMeter& meter) {
    std::uint64_t budget = config.round_query_budget;
    if (budget == 0) {
        const std::uint64_t cap = default_query_budget(log2N, config.p);
        const std::uint64_t practical =
            std::max<std::uint64_t>(256, std::uint64_t(32.0 * std::ceil(log2N)));
        budget = std::min(cap, practical);
    }
    // A round cannot usefully outspend the remaining execution budget; each
    // query costs two k-sized batches.
    const std::uint64_t affordable = meter.remaining() / (2 * config.k) + 1;
    return std::min(budget, affordable);
}

}  // namespace

CampaignReport campaign(const TargetProgram& program, const CampaignConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    CampaignReport report;
    const auto finish = [&]() -> CampaignReport& {
        report.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return report;
    };

    ExecutionMeter meter;
    meter.limit = config.execution_budget;
    Rng rng(splitmix64(config.rng_seed ^ 0x6d633263616d70ULL));

    const ByteInput seed =
        config.seed.empty() ? ByteInput(program.input_length(), 0) : config.seed;
    if (seed.size() != program.input_length())
        throw InputLengthMismatchError("seed length does not match input_length");

    const auto verify = [&](const ByteInput& input) {
        Rng exec = execution_rng(config.rng_seed ^ 0x766572696679ULL, input);
        meter.charge();
        return execute(program, input, exec).reached_target;
    };

    report.order_used = TotalOrder::lexicographic(program.input_length());

    // The seed itself may already reach the target.
    if (verify(seed)) {
        report.success = true;
        report.input = seed;
        report.rounds = 1;
        report.executions = meter.used;
        return finish();
    }

    // Preprocessing; an unreachable target keeps failing here until the
    // budget runs out.
    std::vector<PathDirectives> paths;
    while (!meter.exhausted()) {
        try {
            Rng boot = rng.fork(0x70617468);
            paths = bootstrap_paths(program, seed, config.n_paths, boot, &meter);
            break;
        } catch (const NoPathsFoundError&) {
            continue;
        }
    }
    if (paths.empty()) {
        report.executions = meter.used;
        return finish();
    }
    report.paths_found = paths.size();

    if (config.order_mode == OrderMode::Learned) {
        Rng order_rng = rng.fork(0x6f72646572);
        OrderConfig order_config;
        order_config.k = config.k;
        report.order_used = assign_total_order(program, paths, program.full_space(), order_rng,
                                               order_config, seed, &meter);
    }

    OracleConfig oracle_config{config.k, config.p};
    CountingOracle oracle(program, std::move(paths), oracle_config, rng.fork(0x6f7261636c),
                          seed, &meter);

    const InputRegion space = program.full_space();
    while (!meter.exhausted()) {
        ++report.rounds;

        SearchConfig search_config;
        search_config.p = config.p;
        search_config.query_budget = round_query_budget(config, space.log2_cardinality(), meter);
        search_config.stop_confidence = config.stop_confidence;
        search_config.split_mode = config.split_mode;
        search_config.meter = &meter;
        search_config.record_log = false;

        Rng round_rng = rng.fork(report.rounds);
        SearchOutcome outcome =
            randomized_search(space, report.order_used, oracle, search_config, verify, round_rng);
        report.oracle_queries += outcome.queries;

        if (outcome.success) {
            report.success = true;
            report.input = outcome.candidate;
            break;
        }
    }

    report.executions = meter.used;
    return finish();
}

}  // namespace mc2
