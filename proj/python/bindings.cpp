#include <optional>
#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "logitac/config.hpp"
#include "logitac/errors.hpp"
#include "logitac/dynamics.hpp"
#include "logitac/game.hpp"
#include "logitac/json_io.hpp"
#include "logitac/learner.hpp"
#include "logitac/logit.hpp"
#include "logitac/measure.hpp"

namespace py = pybind11;
using namespace logitac;

namespace {

std::vector<Atom> atoms_from_pairs(const std::vector<std::pair<double, double>>& pairs) {
    std::vector<Atom> atoms;
    atoms.reserve(pairs.size());
    for (const auto& [x, w] : pairs) atoms.push_back({x, w});
    return atoms;
}

std::vector<std::pair<double, double>> atoms_to_pairs(const AtomicMeasure& mu) {
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(mu.size());
    for (const Atom& a : mu.atoms()) pairs.emplace_back(a.position, a.weight);
    return pairs;
}

// std::variant<AtomicMeasure, GridDensity> has no default constructor, which
// rules out pybind's stock variant caster; convert by hand.
Measure measure_from_py(const py::handle& obj) {
    if (py::isinstance<AtomicMeasure>(obj)) return obj.cast<AtomicMeasure>();
    if (py::isinstance<GridDensity>(obj)) return obj.cast<GridDensity>();
    throw py::type_error("expected an AtomicMeasure or a GridDensity");
}

StrategyProfile profile_from_py(const py::sequence& seq) {
    StrategyProfile profile;
    profile.reserve(py::len(seq));
    for (const py::handle& item : seq) profile.push_back(measure_from_py(item));
    return profile;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "actor-critic learning, logit equilibria and best-response dynamics "
              "for continuous-action potential games";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform01", &Rng::uniform01)
        .def_static("derive_seed", &Rng::derive_seed, py::arg("master"), py::arg("k"));

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_property_readonly("lo", &Interval::lo)
        .def_property_readonly("hi", &Interval::hi)
        .def("width", &Interval::width)
        .def("contains", &Interval::contains)
        .def(py::self == py::self)
        .def("__repr__", [](const Interval& iv) {
            return "Interval(" + std::to_string(iv.lo()) + ", " + std::to_string(iv.hi()) + ")";
        });

    py::class_<AtomicMeasure>(m, "AtomicMeasure")
        .def(py::init([](const Interval& iv, const std::vector<std::pair<double, double>>& atoms) {
                 return AtomicMeasure(iv, atoms_from_pairs(atoms));
             }),
             py::arg("interval"), py::arg("atoms"))
        .def_property_readonly("interval", &AtomicMeasure::interval)
        .def_property_readonly("atoms", &atoms_to_pairs)
        .def("total_weight", &AtomicMeasure::total_weight)
        .def("is_probability", &AtomicMeasure::is_probability, py::arg("tol") = 1e-12)
        .def("to_json", [](const AtomicMeasure& mu) { return to_json(mu).dump(); })
        .def("__len__", &AtomicMeasure::size);
    m.def("atomic_measure_from_json",
          [](const std::string& s) { return atomic_measure_from_json(json::parse(s)); });

    py::class_<GridDensity>(m, "GridDensity")
        .def(py::init<Interval, std::vector<double>>(), py::arg("interval"), py::arg("values"))
        .def_static("normalized", &GridDensity::normalized, py::arg("interval"),
                    py::arg("values"))
        .def_property_readonly("interval", &GridDensity::interval)
        .def_property_readonly("values", &GridDensity::values)
        .def_property_readonly("grid", &GridDensity::grid_size)
        .def("node", &GridDensity::node)
        .def("to_json", [](const GridDensity& p) { return to_json(p).dump(); });
    m.def("grid_density_from_json",
          [](const std::string& s) { return grid_density_from_json(json::parse(s)); });

    m.def("dirac", &dirac, py::arg("x"), py::arg("interval"));
    m.def("mix_update", &mix_update, py::arg("pi"), py::arg("b"), py::arg("alpha"));
    m.def("compact", &compact, py::arg("pi"), py::arg("bins"));
    m.def("sample", py::overload_cast<const AtomicMeasure&, Rng&>(&sample), py::arg("pi"),
          py::arg("rng"));
    m.def("sample_density", py::overload_cast<const GridDensity&, Rng&>(&sample), py::arg("p"),
          py::arg("rng"));
    m.def(
        "bl_distance",
        [](const py::object& mu, const py::object& nu, int resolution) {
            return bl_distance(measure_from_py(mu), measure_from_py(nu), resolution);
        },
        py::arg("mu"), py::arg("nu"), py::arg("resolution") = 512);
    m.def(
        "profile_distance",
        [](const py::sequence& mus, const py::sequence& nus, int resolution) {
            const StrategyProfile a = profile_from_py(mus);
            const StrategyProfile b = profile_from_py(nus);
            return profile_distance(std::span<const Measure>(a), std::span<const Measure>(b),
                                    resolution);
        },
        py::arg("mus"), py::arg("nus"), py::arg("resolution") = 512);
    m.def("entropy", &entropy, py::arg("p"));
    m.def("l1_distance", &l1_distance, py::arg("p"), py::arg("q"));
    m.def("to_grid_density", &to_grid_density, py::arg("pi"), py::arg("grid"));

    py::class_<GameSpec>(m, "GameSpec")
        .def_readonly("n_players", &GameSpec::n_players)
        .def_readonly("intervals", &GameSpec::intervals)
        .def_readonly("u_bound", &GameSpec::u_bound)
        .def_readonly("lip_bound", &GameSpec::lip_bound)
        .def_readonly("name", &GameSpec::name)
        .def("has_potential", &GameSpec::has_potential)
        .def("utility",
             [](const GameSpec& g, int player, const ActionProfile& a) {
                 return g.utility(player, a);
             })
        .def("potential", [](const GameSpec& g, const ActionProfile& a) {
            if (!g.has_potential()) throw ConfigError("game declares no potential function");
            return g.potential(a);
        });

    py::class_<GameParams>(m, "GameParams")
        .def(py::init<>())
        .def_readwrite("n_players", &GameParams::n_players)
        .def_readwrite("theta", &GameParams::theta)
        .def_readwrite("kappa", &GameParams::kappa)
        .def_readwrite("price_intercept", &GameParams::price_intercept)
        .def_readwrite("marginal_cost", &GameParams::marginal_cost)
        .def_readwrite("q_max", &GameParams::q_max)
        .def_readwrite("baselines", &GameParams::baselines)
        .def_readwrite("perturb", &GameParams::perturb);

    m.def("builtin_game", &builtin_game, py::arg("name"), py::arg("params") = GameParams{});
    m.def("quadratic_coordination_game", &quadratic_coordination_game, py::arg("n_players"),
          py::arg("theta"), py::arg("kappa"));
    m.def("cournot_linear_game", &cournot_linear_game, py::arg("n_players"),
          py::arg("price_intercept"), py::arg("marginal_cost"), py::arg("q_max"));
    m.def("wlu_quadratic_game", &wlu_quadratic_game, py::arg("n_players"), py::arg("theta"),
          py::arg("kappa"), py::arg("baselines"));
    m.def(
        "wlu_game",
        [](const std::function<double(const ActionProfile&)>& global,
           const std::vector<double>& baselines, const std::vector<Interval>& intervals,
           double u_bound, double lip_bound) {
            return wlu_game(global, baselines, intervals, u_bound, lip_bound);
        },
        py::arg("global_utility"), py::arg("baselines"), py::arg("intervals"),
        py::arg("global_u_bound"), py::arg("global_lip_bound"));

    m.def("utility_slice", &utility_slice, py::arg("game"), py::arg("player"), py::arg("grid"),
          py::arg("opponents"));

    py::class_<SliceResult>(m, "SliceResult")
        .def_readonly("values", &SliceResult::values)
        .def_readonly("exact", &SliceResult::exact)
        .def_readonly("mc_standard_error", &SliceResult::mc_standard_error);
    m.def(
        "expected_utility_slice",
        [](const GameSpec& game, int player, int grid, const py::sequence& pis,
           std::optional<std::uint64_t> mc_seed) {
            const StrategyProfile profile = profile_from_py(pis);
            if (mc_seed) {
                Rng rng(*mc_seed);
                return expected_utility_slice(game, player, grid, profile, &rng);
            }
            return expected_utility_slice(game, player, grid, profile);
        },
        py::arg("game"), py::arg("player"), py::arg("grid"), py::arg("pis"),
        py::arg("mc_seed") = std::nullopt);

    py::class_<PotentialReport>(m, "PotentialReport")
        .def_readonly("max_residual", &PotentialReport::max_residual)
        .def_readonly("tol", &PotentialReport::tol)
        .def_readonly("samples", &PotentialReport::samples)
        .def_readonly("pass_", &PotentialReport::pass);
    m.def(
        "validate_potential",
        [](const GameSpec& game, int samples, double tol, std::uint64_t seed) {
            Rng rng(seed);
            return validate_potential(game, samples, tol, rng);
        },
        py::arg("game"), py::arg("samples") = 10000, py::arg("tol") = 1e-9, py::arg("seed") = 1);

    py::class_<CriticFn>(m, "CriticFn")
        .def(py::init<Interval, std::vector<double>>(), py::arg("interval"), py::arg("values"))
        .def_readonly("interval", &CriticFn::interval)
        .def_readonly("values", &CriticFn::values);

    m.def("logit_density", &logit_density, py::arg("q"), py::arg("eta"));
    m.def("sample_logit", &sample_logit, py::arg("p"), py::arg("rng"));
    m.def(
        "logit_response_profile",
        [](const GameSpec& game, const py::sequence& pis, double eta, int grid) {
            return logit_response_profile(game, profile_from_py(pis), eta, grid);
        },
        py::arg("game"), py::arg("pis"), py::arg("eta"), py::arg("grid") = 256);
    m.def("uniform_profile", &uniform_profile, py::arg("game"), py::arg("grid") = 256);

    py::class_<FixedPointOptions>(m, "FixedPointOptions")
        .def(py::init<>())
        .def_readwrite("damping", &FixedPointOptions::damping)
        .def_readwrite("tol", &FixedPointOptions::tol)
        .def_readwrite("max_iter", &FixedPointOptions::max_iter);
    py::class_<FixedPointResult>(m, "FixedPointResult")
        .def_readonly("profile", &FixedPointResult::profile)
        .def_readonly("converged", &FixedPointResult::converged)
        .def_readonly("iterations", &FixedPointResult::iterations)
        .def_readonly("residual", &FixedPointResult::residual);
    m.def(
        "logit_fixed_point",
        [](const GameSpec& game, double eta, int grid, const FixedPointOptions& opts,
           std::optional<std::vector<GridDensity>> init) {
            return logit_fixed_point(game, eta, grid, opts, init ? &*init : nullptr);
        },
        py::arg("game"), py::arg("eta"), py::arg("grid") = 256,
        py::arg("options") = FixedPointOptions{}, py::arg("init") = std::nullopt);

    py::class_<EquilibriumComponent>(m, "EquilibriumComponent")
        .def_readonly("profile", &EquilibriumComponent::profile)
        .def_readonly("residual", &EquilibriumComponent::residual)
        .def_readonly("hits", &EquilibriumComponent::hits)
        .def_readonly("converged", &EquilibriumComponent::converged);
    py::class_<EquilibriumSet>(m, "EquilibriumSet")
        .def_readonly("components", &EquilibriumSet::components)
        .def_readonly("all_converged", &EquilibriumSet::all_converged)
        .def_readonly("restarts", &EquilibriumSet::restarts)
        .def("to_json", [](const EquilibriumSet& s) { return to_json(s).dump(); });
    m.def("find_logit_equilibria", &find_logit_equilibria, py::arg("game"), py::arg("eta"),
          py::arg("grid") = 256, py::arg("options") = FixedPointOptions{},
          py::arg("restarts") = 8, py::arg("seed") = 1);

    py::class_<DynamicsConfig>(m, "DynamicsConfig")
        .def(py::init<>())
        .def_readwrite("eta", &DynamicsConfig::eta)
        .def_readwrite("step", &DynamicsConfig::step)
        .def_readwrite("horizon", &DynamicsConfig::horizon)
        .def_readwrite("grid", &DynamicsConfig::grid);
    m.def("br_step", &br_step, py::arg("profile"), py::arg("game"), py::arg("eta"),
          py::arg("h"));
    m.def("lyapunov", &lyapunov, py::arg("profile"), py::arg("game"), py::arg("eta"));
    m.def("kl", &kl, py::arg("p"), py::arg("q"));
    m.def("lyapunov_rate", &lyapunov_rate, py::arg("profile"), py::arg("game"), py::arg("eta"));

    py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
        .def_readonly("t", &TrajectoryPoint::t)
        .def_readonly("lyapunov", &TrajectoryPoint::lyapunov)
        .def_readonly("rate", &TrajectoryPoint::rate)
        .def_readonly("residual", &TrajectoryPoint::residual)
        .def_readonly("profile", &TrajectoryPoint::profile);
    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("checkpoints", &TrajectoryRecord::checkpoints)
        .def_readonly("final_profile", &TrajectoryRecord::final_profile)
        .def_readonly("final_residual", &TrajectoryRecord::final_residual)
        .def_readonly("steps", &TrajectoryRecord::steps)
        .def_readonly("lyapunov_violations", &TrajectoryRecord::lyapunov_violations)
        .def_readonly("max_violation", &TrajectoryRecord::max_violation);
    m.def("integrate", &integrate, py::arg("profile"), py::arg("game"), py::arg("config"),
          py::arg("checkpoint_every") = 1, py::arg("record_profiles") = false);

    py::class_<StepSchedule>(m, "StepSchedule")
        .def(py::init<double, double, double, double, long>(), py::arg("a0"), py::arg("g0"),
             py::arg("rho_alpha"), py::arg("rho_gamma"), py::arg("n0"))
        .def_static("defaults", &StepSchedule::defaults)
        .def("at", &StepSchedule::at, py::arg("n"))
        .def_property_readonly("a0", &StepSchedule::a0)
        .def_property_readonly("g0", &StepSchedule::g0)
        .def_property_readonly("rho_alpha", &StepSchedule::rho_alpha)
        .def_property_readonly("rho_gamma", &StepSchedule::rho_gamma)
        .def_property_readonly("n0", &StepSchedule::n0);

    py::class_<LearnerOptions>(m, "LearnerOptions")
        .def(py::init<>())
        .def_readwrite("grid", &LearnerOptions::grid)
        .def_readwrite("compact_every", &LearnerOptions::compact_every)
        .def_readwrite("compact_bins", &LearnerOptions::compact_bins);

    py::class_<LearnerState>(m, "LearnerState")
        .def_readonly("iter", &LearnerState::iter)
        .def_readonly("actors", &LearnerState::actors)
        .def_readonly("critics", &LearnerState::critics);
    m.def("make_learner_state", &make_learner_state, py::arg("game"), py::arg("grid"),
          py::arg("seed"));
    m.def("critic_update", &critic_update, py::arg("q"), py::arg("u_slice"), py::arg("gamma"));
    m.def("learner_step", &step, py::arg("state"), py::arg("game"), py::arg("eta"),
          py::arg("schedule"), py::arg("options") = LearnerOptions{});
    m.def(
        "calibration_residual",
        [](const LearnerState& state, const GameSpec& game, int grid) {
            return calibration_residual(state, game, grid);
        },
        py::arg("state"), py::arg("game"), py::arg("grid"));

    py::class_<RunCheckpoint>(m, "RunCheckpoint")
        .def_readonly("iter", &RunCheckpoint::iter)
        .def_readonly("alpha", &RunCheckpoint::alpha)
        .def_readonly("gamma", &RunCheckpoint::gamma)
        .def_readonly("residuals", &RunCheckpoint::residuals)
        .def_readonly("bl_to_ref", &RunCheckpoint::bl_to_ref)
        .def_readonly("lyapunov", &RunCheckpoint::lyapunov)
        .def_readonly("elapsed_s", &RunCheckpoint::elapsed_s)
        .def("to_json", [](const RunCheckpoint& cp) { return to_json(cp).dump(); });
    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("checkpoints", &RunRecord::checkpoints)
        .def_property_readonly("final_state",
                               [](const RunRecord& r) { return r.final_state; });
    m.def(
        "run",
        [](const GameSpec& game, double eta, const StepSchedule& schedule, long iters,
           std::uint64_t seed, const std::vector<long>& checkpoints,
           const LearnerOptions& learner, int bl_resolution,
           std::optional<std::vector<std::vector<GridDensity>>> reference,
           bool record_lyapunov) {
            RunOptions opts;
            opts.eta = eta;
            opts.schedule = schedule;
            opts.iters = iters;
            opts.seed = seed;
            opts.checkpoints = checkpoints;
            opts.learner = learner;
            opts.bl_resolution = bl_resolution;
            opts.reference = reference ? &*reference : nullptr;
            opts.record_lyapunov = record_lyapunov;
            return run(game, opts);
        },
        py::arg("game"), py::arg("eta"), py::arg("schedule"), py::arg("iters"), py::arg("seed"),
        py::arg("checkpoints") = std::vector<long>{}, py::arg("learner") = LearnerOptions{},
        py::arg("bl_resolution") = 512, py::arg("reference") = std::nullopt,
        py::arg("record_lyapunov") = true);

    m.def("parse_config_json", [](const std::string& text) {
        const ExperimentConfig cfg = parse_config(text);
        return serialize_config(cfg);
    });
}
