#include <atomic>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mc2/campaign.hpp"
#include "mc2/ground_truth.hpp"
#include "mc2/prep.hpp"
#include "mc2/search.hpp"
#include "mc2/target_model.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitFound = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;
constexpr int kExitFile = 66;

struct CommonFlags {
    std::string program_path;
    std::string seed_bytes;
    std::uint32_t k = 5;
    double p = 0.01;
    std::size_t n_paths = 8;
    std::uint64_t budget = 1'000'000;
    std::uint64_t rng_seed = 0;
    bool rng_seed_given = false;
    std::string order = "learned";
    std::string split_weight = "proportional";
    double stop_confidence = 0.92;
};

void add_common_flags(CLI::App& cmd, CommonFlags& flags, bool needs_program) {
    auto* program = cmd.add_option("--program", flags.program_path, "program description file");
    if (needs_program) program->required();
    cmd.add_option("--seed-bytes", flags.seed_bytes,
                   "seed input as comma-separated decimal bytes (default: zeros)");
    cmd.add_option("--k", flags.k, "executions per approximate count")->check(CLI::PositiveNumber);
    cmd.add_option("--p", flags.p, "assumed oracle failure probability")
        ->check(CLI::Range(1e-9, 0.499999));
    cmd.add_option("--n-paths", flags.n_paths, "paths to bootstrap");
    cmd.add_option("--budget", flags.budget, "total program execution budget");
    cmd.add_option("--rng-seed", flags.rng_seed, "RNG seed (fallback: MC2_RNG_SEED)")
        ->each([&flags](const std::string&) { flags.rng_seed_given = true; });
    cmd.add_option("--order", flags.order, "total order: lex|learned")
        ->check(CLI::IsMember({"lex", "learned"}));
    cmd.add_option("--split-weight", flags.split_weight,
                   "weight apportionment on splits: proportional|verbatim")
        ->check(CLI::IsMember({"proportional", "verbatim"}));
    cmd.add_option("--stop-confidence", flags.stop_confidence,
                   "posterior mass required to stop a search")
        ->check(CLI::Range(0.0, 1.0));
}

std::uint64_t effective_rng_seed(const CommonFlags& flags) {
    if (flags.rng_seed_given) return flags.rng_seed;
    if (const char* env = std::getenv("MC2_RNG_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return flags.rng_seed;
}

mc2::ByteInput parse_seed_bytes(const std::string& text) {
    mc2::ByteInput out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string tok = text.substr(pos, comma - pos);
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0' || v < 0 || v > 255) {
            throw CLI::ValidationError("--seed-bytes", "expected comma-separated bytes 0..255");
        }
        out.push_back(mc2::Byte(v));
        if (comma == text.size()) break;
        pos = comma + 1;
    }
    return out;
}

mc2::TargetProgram load_or_exit(const std::string& path) {
    if (!fs::exists(path)) {
        std::cerr << "mc2: program file not found: " << path << "\n";
        std::exit(kExitFile);
    }
    try {
        return mc2::load_program(path);
    } catch (const std::exception& e) {
        std::cerr << "mc2: cannot load " << path << ": " << e.what() << "\n";
        std::exit(kExitFile);
    }
}

mc2::CampaignConfig make_campaign_config(const CommonFlags& flags) {
    mc2::CampaignConfig config;
    config.seed = parse_seed_bytes(flags.seed_bytes);
    config.k = flags.k;
    config.p = flags.p;
    config.n_paths = flags.n_paths;
    config.execution_budget = flags.budget;
    config.rng_seed = effective_rng_seed(flags);
    config.order_mode =
        flags.order == "lex" ? mc2::OrderMode::Lexicographic : mc2::OrderMode::Learned;
    config.split_mode = flags.split_weight == "verbatim" ? mc2::SplitWeightMode::Verbatim
                                                         : mc2::SplitWeightMode::Proportional;
    config.stop_confidence = flags.stop_confidence;
    return config;
}

ordered_json config_echo(const CommonFlags& flags, const mc2::CampaignConfig& config) {
    ordered_json echo;
    echo["program"] = flags.program_path;
    echo["seed_bytes"] = config.seed;
    echo["k"] = config.k;
    echo["p"] = config.p;
    echo["n_paths"] = config.n_paths;
    echo["budget"] = config.execution_budget;
    echo["rng_seed"] = config.rng_seed;
    echo["order"] = flags.order;
    echo["split_weight"] = flags.split_weight;
    echo["stop_confidence"] = config.stop_confidence;
    return echo;
}

int cmd_run(const CommonFlags& flags, const std::string& report_path) {
    const mc2::TargetProgram program = load_or_exit(flags.program_path);
    mc2::CampaignConfig config = make_campaign_config(flags);
    if (config.seed.empty()) config.seed = mc2::ByteInput(program.input_length(), 0);

    mc2::CampaignReport report;
    try {
        report = mc2::campaign(program, config);
    } catch (const std::exception& e) {
        std::cerr << "mc2: " << e.what() << "\n";
        return kExitError;
    }

    ordered_json j;
    j["success"] = report.success;
    if (report.success) {
        j["input"] = report.input;
    } else {
        j["input"] = nullptr;
    }
    j["oracle_queries"] = report.oracle_queries;
    j["executions"] = report.executions;
    j["rounds"] = report.rounds;
    j["wall_ms"] = report.wall_ms;
    j["config_echo"] = config_echo(flags, config);

    const std::string text = j.dump(2) + "\n";
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) {
            std::cerr << "mc2: cannot write report: " << report_path << "\n";
            return kExitFile;
        }
        out << text;
        std::cout << (report.success ? "target found" : "budget exhausted") << " after "
                  << report.executions << " executions (" << report.oracle_queries
                  << " oracle queries, " << report.rounds << " rounds)\n";
    } else {
        std::cout << text;
    }
    return report.success ? kExitFound : kExitBudget;
}

int cmd_order(const CommonFlags& flags) {
    const mc2::TargetProgram program = load_or_exit(flags.program_path);
    const mc2::CampaignConfig config = make_campaign_config(flags);
    const mc2::ByteInput seed =
        config.seed.empty() ? mc2::ByteInput(program.input_length(), 0) : config.seed;

    mc2::Rng rng(mc2::splitmix64(config.rng_seed ^ 0x6f72646572ULL));
    mc2::TotalOrder order = mc2::TotalOrder::lexicographic(program.input_length());
    try {
        std::vector<mc2::PathDirectives> paths =
            mc2::bootstrap_paths(program, seed, config.n_paths, rng);
        mc2::OrderConfig order_config;
        order_config.k = config.k;
        order = mc2::assign_total_order(program, paths, program.full_space(), rng, order_config,
                                        seed);
    } catch (const mc2::NoPathsFoundError&) {
        // no guidance available; lexicographic is the documented fallback
    }

    for (std::size_t i = 0; i < order.priority.size(); ++i) {
        std::cout << (i > 0 ? " " : "") << order.priority[i];
    }
    std::cout << "\n";
    return 0;
}

int cmd_paths(const CommonFlags& flags) {
    const mc2::TargetProgram program = load_or_exit(flags.program_path);
    const mc2::CampaignConfig config = make_campaign_config(flags);
    const mc2::ByteInput seed =
        config.seed.empty() ? mc2::ByteInput(program.input_length(), 0) : config.seed;

    std::vector<mc2::PathDirectives> paths;
    if (config.n_paths > 0) {
        mc2::Rng rng(mc2::splitmix64(config.rng_seed ^ 0x7061746873ULL));
        try {
            paths = mc2::bootstrap_paths(program, seed, config.n_paths, rng);
        } catch (const mc2::NoPathsFoundError& e) {
            std::cerr << "mc2: " << e.what() << "\n";
            return kExitError;
        }
    }
    for (const mc2::PathDirectives& path : paths) {
        for (std::size_t i = 0; i < path.edges().size(); ++i) {
            const mc2::Edge e = path.edges()[i];
            std::cout << (i > 0 ? " " : "") << program.block_id(e.block) << ':'
                      << (e.taken ? 'T' : 'F');
        }
        std::cout << "\n";
    }
    return 0;
}

struct BenchRow {
    std::string program;
    std::string strategy;
    std::vector<double> queries;
    std::vector<double> execs;
    std::uint32_t successes = 0;
};

struct BenchJob {
    std::size_t row;
    std::size_t trial;
    std::uint64_t rng_seed;
};

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

int cmd_bench(const CommonFlags& flags, const std::string& corpus_dir,
              const std::string& strategies_csv, std::uint32_t trials, std::uint32_t reps,
              const std::string& out_path) {
    if (!fs::is_directory(corpus_dir)) {
        std::cerr << "mc2: corpus directory not found: " << corpus_dir << "\n";
        return kExitFile;
    }
    std::vector<std::string> program_files;
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
        if (entry.path().extension() == ".json") program_files.push_back(entry.path().string());
    }
    std::sort(program_files.begin(), program_files.end());
    if (program_files.empty()) {
        std::cerr << "mc2: no .json programs in " << corpus_dir << "\n";
        return kExitFile;
    }

    std::vector<std::string> strategies;
    {
        std::size_t pos = 0;
        while (pos <= strategies_csv.size()) {
            const std::size_t comma = std::min(strategies_csv.find(',', pos),
                                               strategies_csv.size());
            strategies.push_back(strategies_csv.substr(pos, comma - pos));
            if (comma == strategies_csv.size()) break;
            pos = comma + 1;
        }
        for (const std::string& s : strategies) {
            if (s != "mc2" && s != "deterministic" && s != "majority" && s != "blackbox") {
                std::cerr << "mc2: unknown strategy: " << s << "\n";
                return kExitUsage;
            }
        }
    }

    const std::uint64_t base_seed = effective_rng_seed(flags);

    std::vector<BenchRow> rows;
    std::vector<BenchJob> jobs;
    for (std::size_t pi = 0; pi < program_files.size(); ++pi) {
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            BenchRow row;
            row.program = fs::path(program_files[pi]).stem().string();
            row.strategy = strategies[si];
            row.queries.resize(trials);
            row.execs.resize(trials);
            rows.push_back(std::move(row));
            for (std::uint32_t t = 0; t < trials; ++t) {
                jobs.push_back(BenchJob{rows.size() - 1,
                                        t,
                                        mc2::splitmix64(base_seed ^ (pi * 1000003) ^
                                                        (si * 7919) ^ (t * 104729 + 17))});
            }
        }
    }

    std::vector<std::uint8_t> success_flags(jobs.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    const auto run_job = [&](const BenchJob& job) {
        const BenchRow& row = rows[job.row];
        const std::string& path =
            program_files[(job.row) / strategies.size()];
        const mc2::TargetProgram program = mc2::load_program(path);
        const mc2::InputRegion space = program.full_space();

        CommonFlags trial_flags = flags;
        trial_flags.rng_seed = job.rng_seed;
        trial_flags.rng_seed_given = true;
        trial_flags.program_path = path;

        double queries = 0;
        double execs = 0;
        bool success = false;

        if (row.strategy == "mc2") {
            mc2::CampaignConfig config = make_campaign_config(trial_flags);
            const mc2::CampaignReport report = mc2::campaign(program, config);
            queries = double(report.oracle_queries);
            execs = double(report.executions);
            success = report.success;
        } else if (row.strategy == "blackbox") {
            mc2::Rng rng(job.rng_seed);
            const mc2::SearchOutcome outcome =
                mc2::blackbox_search(program, space, flags.budget, rng);
            queries = 0;
            execs = double(outcome.executions);
            success = outcome.success;
        } else {
            mc2::ExecutionMeter meter;
            meter.limit = flags.budget;
            mc2::Rng rng(job.rng_seed);
            const mc2::ByteInput seed = parse_seed_bytes(trial_flags.seed_bytes).empty()
                                            ? mc2::ByteInput(program.input_length(), 0)
                                            : parse_seed_bytes(trial_flags.seed_bytes);
            const auto verify = [&](const mc2::ByteInput& input) {
                mc2::Rng exec = mc2::execution_rng(job.rng_seed ^ 0x76ULL, input);
                meter.charge();
                return mc2::execute(program, input, exec).reached_target;
            };
            const mc2::TotalOrder order = mc2::TotalOrder::lexicographic(program.input_length());

            if (row.strategy == "deterministic") {
                mc2::ExhaustiveCountingOracle oracle(program, space, job.rng_seed, &meter);
                mc2::SearchOutcome outcome =
                    mc2::deterministic_search(space, order, oracle, verify, rng);
                queries = double(outcome.queries);
                execs = double(meter.used);
                success = outcome.success;
            } else {  // majority vote over the real noisy oracle
                mc2::Rng boot = rng.fork(1);
                std::vector<mc2::PathDirectives> paths =
                    mc2::bootstrap_paths(program, seed, flags.n_paths, boot, &meter);
                mc2::CountingOracle oracle(program, std::move(paths), {flags.k, flags.p},
                                           rng.fork(2), seed, &meter);
                mc2::SearchOutcome outcome =
                    mc2::majority_vote_search(space, order, oracle, flags.p, reps, verify, rng);
                queries = double(outcome.queries);
                execs = double(meter.used);
                success = outcome.success;
            }
        }

        rows[job.row].queries[job.trial] = queries;
        rows[job.row].execs[job.trial] = execs;
        success_flags[&job - jobs.data()] = success ? 1 : 0;
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                       jobs.size()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size() || failed.load()) return;
                try {
                    run_job(jobs[i]);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    failed.store(true);
                    failure_message = e.what();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (failed.load()) {
        std::cerr << "mc2: bench failed: " << failure_message << "\n";
        return kExitError;
    }

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (success_flags[i]) ++rows[jobs[i].row].successes;
    }

    std::string csv =
        "program,strategy,mean_queries,mean_execs,success_rate,median_queries,median_execs,"
        "trials\n";
    char line[512];
    for (const BenchRow& row : rows) {
        std::snprintf(line, sizeof line, "%s,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%u\n",
                      row.program.c_str(), row.strategy.c_str(), mean_of(row.queries),
                      mean_of(row.execs), double(row.successes) / double(trials),
                      median_of(row.queries), median_of(row.execs), trials);
        csv += line;
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "mc2: cannot write " << out_path << "\n";
            return kExitFile;
        }
        out << csv;
    } else {
        std::cout << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mc2: directed fuzzing by noisy binary search over counted input regions"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    std::string report_path;
    CLI::App* run = app.add_subcommand("run", "run one campaign against a program");
    add_common_flags(*run, run_flags, true);
    run->add_option("--report", report_path, "write the JSON report here (default: stdout)");

    CommonFlags bench_flags;
    std::string corpus_dir;
    std::string strategies = "mc2,deterministic,majority,blackbox";
    std::uint32_t trials = 20;
    std::uint32_t reps = 9;
    std::string bench_out;
    CLI::App* bench = app.add_subcommand("bench", "compare strategies over a program corpus");
    add_common_flags(*bench, bench_flags, false);
    bench->add_option("--corpus", corpus_dir, "directory of program .json files")->required();
    bench->add_option("--strategies", strategies, "comma list: mc2,deterministic,majority,blackbox");
    bench->add_option("--trials", trials, "trials per (program, strategy)")
        ->check(CLI::PositiveNumber);
    bench->add_option("--reps", reps, "majority-vote repetitions (odd)");
    bench->add_option("--out", bench_out, "write CSV here (default: stdout)");

    CommonFlags order_flags;
    CLI::App* order = app.add_subcommand("order", "print the learned total order");
    add_common_flags(*order, order_flags, true);

    CommonFlags paths_flags;
    CLI::App* paths = app.add_subcommand("paths", "print bootstrapped target-reaching paths");
    add_common_flags(*paths, paths_flags, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags, report_path);
        if (bench->parsed())
            return cmd_bench(bench_flags, corpus_dir, strategies, trials, reps, bench_out);
        if (order->parsed()) return cmd_order(order_flags);
        if (paths->parsed()) return cmd_paths(paths_flags);
    } catch (const std::exception& e) {
        std::cerr << "mc2: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
