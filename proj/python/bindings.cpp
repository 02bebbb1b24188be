#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "dualsmpc/controller.hpp"
#include "dualsmpc/errors.hpp"
#include "dualsmpc/filter.hpp"
#include "dualsmpc/model.hpp"
#include "dualsmpc/model_io.hpp"
#include "dualsmpc/sim.hpp"
#include "dualsmpc/solver.hpp"

namespace py = pybind11;
using namespace dualsmpc;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-horizon POMDP solving and receding-horizon dual control";

    py::register_exception<ZeroLikelihoodError>(m, "ZeroLikelihoodError", PyExc_RuntimeError);
    py::register_exception<ResourceLimitError>(m, "ResourceLimitError", PyExc_RuntimeError);
    py::register_exception<LpFailureError>(m, "LpFailureError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Labels>(m, "Labels")
        .def(py::init<>())
        .def_readwrite("states", &Labels::states)
        .def_readwrite("actions", &Labels::actions)
        .def_readwrite("observations", &Labels::observations);

    py::class_<PomdpModel>(m, "PomdpModel")
        .def(py::init<>())
        .def_readwrite("n_states", &PomdpModel::n_states)
        .def_readwrite("n_actions", &PomdpModel::n_actions)
        .def_readwrite("n_observations", &PomdpModel::n_observations)
        .def_readwrite("transition", &PomdpModel::transition)
        .def_readwrite("observation", &PomdpModel::observation)
        .def_readwrite("stage_cost", &PomdpModel::stage_cost)
        .def_readwrite("terminal_cost", &PomdpModel::terminal_cost)
        .def_readwrite("labels", &PomdpModel::labels)
        .def("state_name", &PomdpModel::state_name)
        .def("action_name", &PomdpModel::action_name)
        .def("observation_name", &PomdpModel::observation_name)
        .def("__repr__", [](const PomdpModel& model) {
            std::ostringstream os;
            os << "<PomdpModel states=" << model.n_states << " actions=" << model.n_actions
               << " observations=" << model.n_observations << ">";
            return os.str();
        });

    m.def(
        "validate_model",
        [](const PomdpModel& model) { return validate_model(model).violations; },
        py::arg("model"), "List of violations; an empty list means the model is valid.");
    m.def("normalize_rows", &normalize_rows, py::arg("model"));

    py::class_<Belief>(m, "Belief")
        .def(py::init<Vec>(), py::arg("probs"))
        .def_static("uniform", &Belief::uniform, py::arg("n_states"))
        .def_static("point_mass", &Belief::point_mass, py::arg("n_states"), py::arg("state"))
        .def_property_readonly("probs", &Belief::probs)
        .def("__len__", &Belief::size)
        .def("__getitem__",
             [](const Belief& b, int i) {
                 if (i < 0 || i >= b.size()) throw py::index_error();
                 return b[static_cast<std::size_t>(i)];
             })
        .def("__eq__", [](const Belief& a, const Belief& b) { return a == b; })
        .def("__repr__", [](const Belief& b) {
            std::ostringstream os;
            os << "Belief([";
            for (int i = 0; i < b.size(); ++i) os << (i ? ", " : "") << b[i];
            os << "])";
            return os.str();
        });

    py::enum_<PruningMode>(m, "PruningMode")
        .value("dominance_only", PruningMode::dominance_only)
        .value("exact_lp", PruningMode::exact_lp);

    py::class_<SolveConfig>(m, "SolveConfig")
        .def(py::init([](int horizon, double discount, PruningMode pruning_mode,
                         double prune_tolerance, std::size_t max_cross_sum) {
                 SolveConfig c;
                 c.horizon = horizon;
                 c.discount = discount;
                 c.pruning_mode = pruning_mode;
                 c.prune_tolerance = prune_tolerance;
                 c.max_cross_sum = max_cross_sum;
                 return c;
             }),
             py::arg("horizon") = 6, py::arg("discount") = 1.0,
             py::arg("pruning_mode") = PruningMode::exact_lp,
             py::arg("prune_tolerance") = 1e-9, py::arg("max_cross_sum") = 10000000)
        .def_readwrite("horizon", &SolveConfig::horizon)
        .def_readwrite("discount", &SolveConfig::discount)
        .def_readwrite("pruning_mode", &SolveConfig::pruning_mode)
        .def_readwrite("prune_tolerance", &SolveConfig::prune_tolerance)
        .def_readwrite("max_cross_sum", &SolveConfig::max_cross_sum);

    py::class_<BoundParams>(m, "BoundParams")
        .def(py::init([](double gamma, double eta) {
                 BoundParams p{gamma, eta};
                 check_bound_params(p);
                 return p;
             }),
             py::arg("gamma"), py::arg("eta"))
        .def_readwrite("gamma", &BoundParams::gamma)
        .def_readwrite("eta", &BoundParams::eta);

    py::class_<AlphaVector>(m, "AlphaVector")
        .def_readonly("coeffs", &AlphaVector::coeffs)
        .def_readonly("action", &AlphaVector::action);

    py::class_<AlphaVectorSet>(m, "AlphaVectorSet")
        .def_readonly("vectors", &AlphaVectorSet::vectors)
        .def_readonly("stage", &AlphaVectorSet::stage)
        .def("__len__", [](const AlphaVectorSet& s) { return s.vectors.size(); });

    py::class_<PolicyStack>(m, "PolicyStack")
        .def_readonly("per_stage", &PolicyStack::per_stage)
        .def_property_readonly("horizon", &PolicyStack::horizon);

    py::class_<Evaluation>(m, "Evaluation")
        .def_readonly("value", &Evaluation::value)
        .def_readonly("action", &Evaluation::action)
        .def_readonly("vector_index", &Evaluation::vector_index)
        .def("__repr__", [](const Evaluation& e) {
            std::ostringstream os;
            os << "Evaluation(value=" << e.value << ", action=" << e.action << ")";
            return os.str();
        });

    m.def("solve", &solve, py::arg("model"), py::arg("config"),
          "Exact backward solve of the belief-space dynamic program.");
    m.def("evaluate",
          py::overload_cast<const PolicyStack&, int, const Belief&>(&evaluate),
          py::arg("stack"), py::arg("stage"), py::arg("belief"));
    m.def("evaluate", py::overload_cast<const AlphaVectorSet&, const Belief&>(&evaluate),
          py::arg("set"), py::arg("belief"));
    m.def("prune", &prune, py::arg("set"), py::arg("mode"), py::arg("tolerance") = 1e-9);
    m.def("backup_stage", &backup_stage, py::arg("model"), py::arg("next"), py::arg("config"));
    m.def("backup_stage_unpruned", &backup_stage_unpruned, py::arg("model"), py::arg("next"),
          py::arg("config"));
    m.def("bruteforce_value", &bruteforce_value, py::arg("model"), py::arg("config"),
          py::arg("belief"), "Belief-tree recursion; the independent oracle.");
    m.def("bruteforce_action_values", &bruteforce_action_values, py::arg("model"),
          py::arg("config"), py::arg("belief"));

    py::class_<MdpSolution>(m, "MdpSolution")
        .def_readonly("value", &MdpSolution::value)
        .def_readonly("action", &MdpSolution::action);
    m.def("solve_mdp", &solve_mdp, py::arg("model"), py::arg("config"),
          "Finite-horizon DP for the fully observed MDP.");

    m.def("predict", &predict, py::arg("model"), py::arg("belief"), py::arg("action"));
    m.def("update", &update, py::arg("model"), py::arg("predicted"), py::arg("action"),
          py::arg("observation"));
    m.def("step", &step, py::arg("model"), py::arg("belief"), py::arg("action"),
          py::arg("observation"), "Full filter step: update(predict(...)).");
    m.def("observation_likelihoods", &observation_likelihoods, py::arg("model"),
          py::arg("belief"), py::arg("action"));
    m.def("map_state", &map_state, py::arg("belief"));
    m.def("expected_stage_cost", &expected_stage_cost, py::arg("model"), py::arg("belief"),
          py::arg("action"));
    m.def("terminal_value", &terminal_value, py::arg("model"), py::arg("belief"));

    py::enum_<ControllerKind>(m, "ControllerKind")
        .value("dual", ControllerKind::dual)
        .value("ce", ControllerKind::ce)
        .value("ce_vertex", ControllerKind::ce_vertex);

    py::class_<Controller>(m, "Controller")
        .def_static(
            "init",
            [](const PomdpModel& model, const SolveConfig& config, ControllerKind kind,
               const Belief& belief) {
                return Controller::init(std::make_shared<const PomdpModel>(model), config,
                                        kind, belief);
            },
            py::arg("model"), py::arg("config"), py::arg("kind"), py::arg("belief"))
        .def("decide", &Controller::decide)
        .def("decide_at", &Controller::decide_at, py::arg("belief"))
        .def("advance", &Controller::advance, py::arg("action"), py::arg("observation"))
        .def_property_readonly("kind", &Controller::kind)
        .def_property_readonly("belief", &Controller::belief)
        .def_property_readonly("policy", &Controller::policy)
        .def_property_readonly("mdp_policy", &Controller::mdp_policy);
    m.def("action_map", &action_map, py::arg("controller"), py::arg("grid_resolution"),
          "decide() at every simplex grid point, lexicographic by coordinates.");

    py::class_<SimStep>(m, "SimStep")
        .def_readonly("t", &SimStep::t)
        .def_readonly("true_state", &SimStep::true_state)
        .def_readonly("action", &SimStep::action)
        .def_readonly("observation", &SimStep::observation)
        .def_readonly("belief", &SimStep::belief)
        .def_readonly("stage_cost", &SimStep::stage_cost);

    py::class_<SimTrace>(m, "SimTrace")
        .def_readonly("model_id", &SimTrace::model_id)
        .def_readonly("controller_id", &SimTrace::controller_id)
        .def_readonly("prng_id", &SimTrace::prng_id)
        .def_readonly("seed", &SimTrace::seed)
        .def_readonly("discount", &SimTrace::discount)
        .def_readonly("steps", &SimTrace::steps)
        .def_readonly("final_state", &SimTrace::final_state)
        .def_readonly("final_belief", &SimTrace::final_belief)
        .def_readonly("terminal_cost", &SimTrace::terminal_cost)
        .def("cumulative_cost", &SimTrace::cumulative_cost)
        .def("cumulative_cost_with_terminal", &SimTrace::cumulative_cost_with_terminal);

    m.def("rollout",
          py::overload_cast<const Controller&, std::optional<int>, int, std::uint64_t,
                            const std::string&>(&rollout),
          py::arg("controller"), py::arg("initial_state") = std::nullopt, py::arg("steps") = 30,
          py::arg("seed") = 1, py::arg("model_id") = "pomdp");
    m.def("rollout",
          py::overload_cast<const PomdpModel&, ControllerKind, const SolveConfig&,
                            const Belief&, std::optional<int>, int, std::uint64_t,
                            const std::string&>(&rollout),
          py::arg("model"), py::arg("kind"), py::arg("config"), py::arg("initial_belief"),
          py::arg("initial_state") = std::nullopt, py::arg("steps") = 30, py::arg("seed") = 1,
          py::arg("model_id") = "pomdp");
    m.def("trace_csv", &trace_csv, py::arg("trace"));

    py::class_<BatchStats>(m, "BatchStats")
        .def_readonly("n_rollouts", &BatchStats::n_rollouts)
        .def_readonly("steps", &BatchStats::steps)
        .def_readonly("mean_cost", &BatchStats::mean_cost)
        .def_readonly("stddev_cost", &BatchStats::stddev_cost)
        .def_readonly("mean_cost_with_terminal", &BatchStats::mean_cost_with_terminal)
        .def_readonly("stddev_cost_with_terminal", &BatchStats::stddev_cost_with_terminal)
        .def_readonly("action_frequency", &BatchStats::action_frequency)
        .def_readonly("reach_probability", &BatchStats::reach_probability)
        .def_readonly("per_seed_costs", &BatchStats::per_seed_costs);

    m.def("batch",
          py::overload_cast<const Controller&, std::optional<int>, int, int, std::uint64_t>(
              &batch),
          py::arg("controller"), py::arg("initial_state") = std::nullopt, py::arg("steps") = 30,
          py::arg("n_rollouts") = 100, py::arg("base_seed") = 1);
    m.def("batch",
          py::overload_cast<const PomdpModel&, ControllerKind, const SolveConfig&,
                            const Belief&, std::optional<int>, int, int, std::uint64_t>(&batch),
          py::arg("model"), py::arg("kind"), py::arg("config"), py::arg("initial_belief"),
          py::arg("initial_state") = std::nullopt, py::arg("steps") = 30,
          py::arg("n_rollouts") = 100, py::arg("base_seed") = 1);

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("alpha", &BoundReport::alpha)
        .def_readonly("gamma", &BoundReport::gamma)
        .def_readonly("eta", &BoundReport::eta)
        .def_readonly("j_design", &BoundReport::j_design)
        .def_readonly("j_achieved_estimate", &BoundReport::j_achieved_estimate)
        .def_readonly("lhs", &BoundReport::lhs)
        .def_readonly("rhs", &BoundReport::rhs)
        .def_readonly("lhs_ok", &BoundReport::lhs_ok)
        .def_readonly("truncation_steps", &BoundReport::truncation_steps)
        .def_readonly("truncation_error_bound", &BoundReport::truncation_error_bound)
        .def_readonly("n_rollouts", &BoundReport::n_rollouts)
        .def("__repr__", [](const BoundReport& r) {
            std::ostringstream os;
            os << "BoundReport(lhs=" << r.lhs << ", rhs=" << r.rhs
               << ", lhs_ok=" << (r.lhs_ok ? "True" : "False") << ")";
            return os.str();
        });
    m.def("bound_report", &bound_report, py::arg("model"), py::arg("config"), py::arg("bound"),
          py::arg("initial_belief"), py::arg("n_rollouts") = 200, py::arg("min_steps") = 200,
          py::arg("seed") = 1,
          "Empirical check of the receding-horizon performance bound.");

    py::class_<ParseResult>(m, "ParseResult")
        .def_readonly("model", &ParseResult::model)
        .def_readonly("discount", &ParseResult::discount)
        .def_readonly("start", &ParseResult::start)
        .def_readonly("warnings", &ParseResult::warnings);
    m.def("parse_pomdp", py::overload_cast<const std::string&>(&parse_pomdp), py::arg("text"),
          "Parses .pomdp text; see ParseResult.");
    m.def("serialize", &serialize, py::arg("model"));
    m.def("healthcare_model", &healthcare_model,
          "The built-in healthcare decision model (3 states, 4 actions).");
    m.def("policy_text", &policy_text, py::arg("stack"));
    m.def(
        "read_policy",
        [](const std::string& text) {
            std::istringstream in(text);
            return read_policy(in);
        },
        py::arg("text"));
}
