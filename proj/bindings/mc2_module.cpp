#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mc2/campaign.hpp"
#include "mc2/counting_oracle.hpp"
#include "mc2/ground_truth.hpp"
#include "mc2/mc_execution.hpp"
#include "mc2/prep.hpp"
#include "mc2/search.hpp"
#include "mc2/target_model.hpp"

namespace py = pybind11;
using namespace mc2;

namespace {

std::vector<std::pair<std::string, bool>> edges_as_ids(const TargetProgram& program,
                                                       const std::vector<Edge>& edges) {
    std::vector<std::pair<std::string, bool>> out;
    out.reserve(edges.size());
    for (const Edge& e : edges) out.emplace_back(program.block_id(e.block), e.taken);
    return out;
}

}  // namespace

PYBIND11_MODULE(_mc2, m) {
    m.doc() = "Directed fuzzing by noisy binary search over counted input regions";

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<NoPathsFoundError>(m, "NoPathsFoundError");

    py::class_<Interval>(m, "Interval")
        .def(py::init<Byte, Byte>(), py::arg("lo"), py::arg("hi"))
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi);

    py::class_<InputRegion>(m, "InputRegion")
        .def(py::init<std::vector<Interval>>())
        .def_static("full", &InputRegion::full)
        .def_property_readonly("dims", &InputRegion::dims)
        .def("log2_cardinality", &InputRegion::log2_cardinality)
        .def("cardinality_str", [](const InputRegion& r) { return r.cardinality().str(); })
        .def("is_singleton", &InputRegion::is_singleton)
        .def("contains", &InputRegion::contains);

    py::class_<TotalOrder>(m, "TotalOrder")
        .def_static("lexicographic", &TotalOrder::lexicographic)
        .def_readonly("priority", &TotalOrder::priority);

    m.def(
        "split_half",
        [](const InputRegion& region, const TotalOrder& order) {
            const SplitResult s = split_half(region, order);
            return py::make_tuple(s.left, s.right);
        },
        py::arg("region"), py::arg("order"));

    m.def(
        "sample_uniform",
        [](const InputRegion& region, std::size_t k, std::uint64_t rng_seed,
           const std::optional<ByteInput>& seed) {
            Rng rng(rng_seed);
            return sample_uniform(region, k, rng, seed);
        },
        py::arg("region"), py::arg("k"), py::arg("rng_seed"), py::arg("seed") = std::nullopt);

    py::class_<TargetProgram>(m, "TargetProgram")
        .def_property_readonly("input_length", &TargetProgram::input_length)
        .def_property_readonly("max_steps", &TargetProgram::max_steps)
        .def_property_readonly("block_count",
                               [](const TargetProgram& p) { return p.blocks().size(); });

    m.def("load_program", [](const std::string& path) { return load_program(path); },
          py::arg("path"));
    m.def("parse_program", &parse_program, py::arg("json_text"));

    m.def(
        "execute",
        [](const TargetProgram& program, const ByteInput& input, std::uint64_t rng_seed) {
            Rng rng = execution_rng(rng_seed, input);
            const ExecutionTrace trace = execute(program, input, rng);
            py::dict out;
            out["reached_target"] = trace.reached_target;
            out["edges"] = edges_as_ids(program, trace.edges);
            out["steps"] = trace.steps;
            out["fault_count"] = trace.fault_count;
            out["truncated"] = trace.truncated;
            return out;
        },
        py::arg("program"), py::arg("input"), py::arg("rng_seed") = 0);

    m.def(
        "chebyshev_bound",
        [](double mean, double variance, const std::string& predicate, std::int64_t h) {
            return chebyshev_bound(mean, variance, predicate_from_name(predicate), h);
        },
        py::arg("mean"), py::arg("variance"), py::arg("predicate"), py::arg("h") = 1);

    m.def(
        "bootstrap_paths",
        [](const TargetProgram& program, const ByteInput& seed, std::size_t n,
           std::uint64_t rng_seed) {
            Rng rng(rng_seed);
            std::vector<std::vector<std::pair<std::string, bool>>> out;
            for (const PathDirectives& path : bootstrap_paths(program, seed, n, rng)) {
                out.push_back(edges_as_ids(program, path.edges()));
            }
            return out;
        },
        py::arg("program"), py::arg("seed"), py::arg("n"), py::arg("rng_seed") = 0);

    m.def(
        "assign_total_order",
        [](const TargetProgram& program, const ByteInput& seed, std::size_t n_paths,
           std::uint64_t rng_seed) {
            Rng rng(rng_seed);
            const std::vector<PathDirectives> paths =
                bootstrap_paths(program, seed, n_paths, rng);
            return assign_total_order(program, paths, program.full_space(), rng, OrderConfig{},
                                      seed)
                .priority;
        },
        py::arg("program"), py::arg("seed"), py::arg("n_paths") = 8, py::arg("rng_seed") = 0);

    m.def(
        "run_campaign",
        [](const TargetProgram& program, const ByteInput& seed, std::uint32_t k, double p,
           std::size_t n_paths, std::uint64_t budget, std::uint64_t rng_seed,
           const std::string& order, const std::string& split_weight) {
            CampaignConfig config;
            config.seed = seed;
            config.k = k;
            config.p = p;
            config.n_paths = n_paths;
            config.execution_budget = budget;
            config.rng_seed = rng_seed;
            config.order_mode =
                order == "lex" ? OrderMode::Lexicographic : OrderMode::Learned;
            config.split_mode = split_weight == "verbatim" ? SplitWeightMode::Verbatim
                                                           : SplitWeightMode::Proportional;
            const CampaignReport report = campaign(program, config);
            py::dict out;
            out["success"] = report.success;
            out["input"] = report.success ? py::cast(report.input) : py::none();
            out["oracle_queries"] = report.oracle_queries;
            out["executions"] = report.executions;
            out["rounds"] = report.rounds;
            out["wall_ms"] = report.wall_ms;
            out["order"] = report.order_used.priority;
            return out;
        },
        py::arg("program"), py::arg("seed") = ByteInput{}, py::arg("k") = 5,
        py::arg("p") = 0.01, py::arg("n_paths") = 8, py::arg("budget") = 1'000'000,
        py::arg("rng_seed") = 0, py::arg("order") = "learned",
        py::arg("split_weight") = "proportional");

    m.def(
        "blackbox_search",
        [](const TargetProgram& program, std::uint64_t budget, std::uint64_t rng_seed) {
            Rng rng(rng_seed);
            const SearchOutcome outcome =
                blackbox_search(program, program.full_space(), budget, rng);
            py::dict out;
            out["success"] = outcome.success;
            out["input"] = outcome.success ? py::cast(outcome.candidate) : py::none();
            out["executions"] = outcome.executions;
            return out;
        },
        py::arg("program"), py::arg("budget"), py::arg("rng_seed") = 0);
}
