#include "logitac/config.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>
#include <sstream>

#include "logitac/errors.hpp"

namespace logitac {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError("config: field \"" + field + "\": " + message);
}

// Tracks which keys were consumed so typos surface instead of being ignored.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (seen_.count(key) == 0) fail(path_ + "." + key, "unknown key");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    template <class T>
    T get_or(const std::string& key, T fallback) {
        if (!has(key)) return fallback;
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(path_ + "." + key, "has the wrong type");
        }
    }

    const std::string& path() const { return path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> number_or_list(const json& j, const std::string& field) {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) fail(field, "entries must be numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    fail(field, "expected a number or a list of numbers");
}

GameConfig parse_game(const json& j) {
    ObjectReader r(j, "game");
    GameConfig game;
    game.name = r.get_or<std::string>("name", game.name);
    game.params.n_players = r.get_or<int>("n_players", game.params.n_players);
    if (game.params.n_players < 1) fail("game.n_players", "must be >= 1");
    if (r.has("theta")) game.params.theta = number_or_list(r.at("theta"), "game.theta");
    game.params.kappa = r.get_or<double>("kappa", game.params.kappa);
    game.params.price_intercept =
        r.get_or<double>("price_intercept", game.params.price_intercept);
    game.params.marginal_cost = r.get_or<double>("marginal_cost", game.params.marginal_cost);
    game.params.q_max = r.get_or<double>("q_max", game.params.q_max);
    if (r.has("baselines")) {
        game.params.baselines = number_or_list(r.at("baselines"), "game.baselines");
    }
    game.params.perturb = r.get_or<double>("perturb", game.params.perturb);
    r.finish();
    return game;
}

StepSchedule parse_schedule(const json& j) {
    ObjectReader r(j, "schedule");
    const StepSchedule d = StepSchedule::defaults();
    const double a0 = r.get_or<double>("a0", d.a0());
    const double g0 = r.get_or<double>("g0", d.g0());
    const double ra = r.get_or<double>("rho_alpha", d.rho_alpha());
    const double rg = r.get_or<double>("rho_gamma", d.rho_gamma());
    const long n0 = r.get_or<long>("n0", d.n0());
    r.finish();
    try {
        return StepSchedule(a0, g0, ra, rg, n0);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: field \"schedule\": " + std::string(e.what()));
    }
}

ReferenceConfig parse_reference(const json& j) {
    ObjectReader r(j, "reference");
    ReferenceConfig ref;
    ref.solve = r.get_or<bool>("solve", ref.solve);
    ref.restarts = r.get_or<int>("restarts", ref.restarts);
    ref.tol = r.get_or<double>("tol", ref.tol);
    ref.damping = r.get_or<double>("damping", ref.damping);
    ref.max_iter = r.get_or<int>("max_iter", ref.max_iter);
    ref.seed = r.get_or<std::uint64_t>("seed", ref.seed);
    if (ref.restarts < 1) fail("reference.restarts", "must be >= 1");
    if (!(ref.tol > 0.0)) fail("reference.tol", "must be > 0");
    if (!(ref.damping > 0.0 && ref.damping <= 1.0)) fail("reference.damping", "must be in (0, 1]");
    if (ref.max_iter < 1) fail("reference.max_iter", "must be >= 1");
    r.finish();
    return ref;
}

DynamicsRunConfig parse_dynamics(const json& j) {
    ObjectReader r(j, "dynamics");
    DynamicsRunConfig dyn;
    dyn.step = r.get_or<double>("step", dyn.step);
    dyn.horizon = r.get_or<double>("horizon", dyn.horizon);
    dyn.start = r.get_or<std::string>("start", dyn.start);
    dyn.checkpoint_every = r.get_or<long>("checkpoint_every", dyn.checkpoint_every);
    dyn.record_profiles = r.get_or<bool>("record_profiles", dyn.record_profiles);
    if (!(dyn.step > 0.0 && dyn.step <= 0.1)) fail("dynamics.step", "must be in (0, 0.1]");
    if (!(dyn.horizon > 0.0)) fail("dynamics.horizon", "must be > 0");
    if (dyn.start != "uniform" && dyn.start != "equilibrium") {
        fail("dynamics.start", "must be \"uniform\" or \"equilibrium\"");
    }
    if (dyn.checkpoint_every < 1) fail("dynamics.checkpoint_every", "must be >= 1");
    r.finish();
    return dyn;
}

ThresholdConfig parse_thresholds(const json& j) {
    ObjectReader r(j, "thresholds");
    ThresholdConfig t;
    t.bl_to_ref = r.get_or<double>("bl_to_ref", t.bl_to_ref);
    t.min_pass_fraction = r.get_or<double>("min_pass_fraction", t.min_pass_fraction);
    if (!(t.bl_to_ref > 0.0)) fail("thresholds.bl_to_ref", "must be > 0");
    if (!(t.min_pass_fraction >= 0.0 && t.min_pass_fraction <= 1.0)) {
        fail("thresholds.min_pass_fraction", "must be in [0, 1]");
    }
    r.finish();
    return t;
}

ValidationConfig parse_validation(const json& j) {
    ObjectReader r(j, "validation");
    ValidationConfig v;
    v.samples = r.get_or<int>("samples", v.samples);
    v.tol = r.get_or<double>("tol", v.tol);
    v.seed = r.get_or<std::uint64_t>("seed", v.seed);
    if (v.samples < 1) fail("validation.samples", "must be >= 1");
    if (!(v.tol > 0.0)) fail("validation.tol", "must be > 0");
    r.finish();
    return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; turn it into line/column.
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("config: syntax error at line " + std::to_string(line) +
                          ", column " + std::to_string(column) + ": " + e.what());
    }

    ObjectReader r(j, "config");
    ExperimentConfig cfg;
    if (!r.has("game")) fail("game", "is required");
    cfg.game = parse_game(r.at("game"));
    if (!r.has("eta")) fail("eta", "is required");
    cfg.eta = r.at("eta").get<double>();
    if (!(cfg.eta > 0.0)) fail("eta", "must be > 0");
    if (r.has("schedule")) cfg.schedule = parse_schedule(r.at("schedule"));
    if (!r.has("iters")) fail("iters", "is required");
    cfg.iters = r.at("iters").get<long>();
    if (cfg.iters < 1) fail("iters", "must be >= 1");
    if (!r.has("seeds")) fail("seeds", "is required");
    cfg.seeds = r.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) fail("seeds", "must be non-empty");
    {
        auto sorted = cfg.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            fail("seeds", "must be distinct");
        }
    }
    cfg.grid = r.get_or<int>("grid", cfg.grid);
    if (cfg.grid < 16) fail("grid", "must be >= 16");
    cfg.checkpoint_every = r.get_or<long>("checkpoint_every", cfg.checkpoint_every);
    if (cfg.checkpoint_every < 1) fail("checkpoint_every", "must be >= 1");
    cfg.checkpoints = r.get_or<std::vector<long>>("checkpoints", cfg.checkpoints);
    for (long c : cfg.checkpoints) {
        if (c < 0) fail("checkpoints", "entries must be >= 0");
    }
    cfg.compact_every = r.get_or<long>("compact_every", cfg.compact_every);
    if (cfg.compact_every < 0) fail("compact_every", "must be >= 0 (0 disables)");
    cfg.compact_bins = r.get_or<int>("compact_bins", cfg.compact_bins);
    if (cfg.compact_bins < 2) fail("compact_bins", "must be >= 2");
    cfg.bl_resolution = r.get_or<int>("bl_resolution", cfg.bl_resolution);
    if (cfg.bl_resolution < 16) fail("bl_resolution", "must be >= 16");
    cfg.workers = r.get_or<int>("workers", cfg.workers);
    if (cfg.workers < 0) fail("workers", "must be >= 0 (0 = available parallelism)");
    cfg.output_dir = r.get_or<std::string>("output_dir", cfg.output_dir);
    if (r.has("reference")) cfg.reference = parse_reference(r.at("reference"));
    if (r.has("dynamics")) cfg.dynamics = parse_dynamics(r.at("dynamics"));
    if (r.has("thresholds")) cfg.thresholds = parse_thresholds(r.at("thresholds"));
    if (r.has("validation")) cfg.validation = parse_validation(r.at("validation"));
    r.finish();

    // Sanity for the builtin the config names (unknown names throw here).
    make_game(cfg.game);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["game"] = {{"name", cfg.game.name},
                 {"n_players", cfg.game.params.n_players},
                 {"theta", cfg.game.params.theta},
                 {"kappa", cfg.game.params.kappa},
                 {"price_intercept", cfg.game.params.price_intercept},
                 {"marginal_cost", cfg.game.params.marginal_cost},
                 {"q_max", cfg.game.params.q_max},
                 {"baselines", cfg.game.params.baselines},
                 {"perturb", cfg.game.params.perturb}};
    j["eta"] = cfg.eta;
    j["schedule"] = {{"a0", cfg.schedule.a0()},
                     {"g0", cfg.schedule.g0()},
                     {"rho_alpha", cfg.schedule.rho_alpha()},
                     {"rho_gamma", cfg.schedule.rho_gamma()},
                     {"n0", cfg.schedule.n0()}};
    j["iters"] = cfg.iters;
    j["seeds"] = cfg.seeds;
    j["grid"] = cfg.grid;
    j["checkpoint_every"] = cfg.checkpoint_every;
    j["checkpoints"] = cfg.checkpoints;
    j["compact_every"] = cfg.compact_every;
    j["compact_bins"] = cfg.compact_bins;
    j["bl_resolution"] = cfg.bl_resolution;
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir;
    j["reference"] = {{"solve", cfg.reference.solve},     {"restarts", cfg.reference.restarts},
                      {"tol", cfg.reference.tol},         {"damping", cfg.reference.damping},
                      {"max_iter", cfg.reference.max_iter}, {"seed", cfg.reference.seed}};
    j["dynamics"] = {{"step", cfg.dynamics.step},
                     {"horizon", cfg.dynamics.horizon},
                     {"start", cfg.dynamics.start},
                     {"checkpoint_every", cfg.dynamics.checkpoint_every},
                     {"record_profiles", cfg.dynamics.record_profiles}};
    j["thresholds"] = {{"bl_to_ref", cfg.thresholds.bl_to_ref},
                       {"min_pass_fraction", cfg.thresholds.min_pass_fraction}};
    j["validation"] = {{"samples", cfg.validation.samples},
                       {"tol", cfg.validation.tol},
                       {"seed", cfg.validation.seed}};
    return j.dump(2) + "\n";
}

GameSpec make_game(const GameConfig& config) {
    GameParams params = config.params;
    // Broadcast player-indexed lists before handing off.
    if (params.theta.size() == 1 && params.n_players > 1) {
        params.theta.assign(params.n_players, params.theta[0]);
    }
    if (params.baselines.size() == 1 && params.n_players > 1) {
        params.baselines.assign(params.n_players, params.baselines[0]);
    }
    try {
        return builtin_game(config.name, params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: field \"game\": " + std::string(e.what()));
    }
}

std::vector<long> checkpoint_iterations(const ExperimentConfig& cfg) {
    std::vector<long> marks;
    if (!cfg.checkpoints.empty()) {
        marks = cfg.checkpoints;
    } else {
        for (long n = cfg.checkpoint_every; n < cfg.iters; n += cfg.checkpoint_every) {
            marks.push_back(n);
        }
    }
    marks.push_back(cfg.iters);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    return marks;
}

}  // namespace logitac
