#include "logitac/json_io.hpp"

#include <stdexcept>

namespace logitac {

namespace {

Interval interval_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw std::invalid_argument("measure json: \"interval\" must be [lo, hi]");
    }
    return Interval(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

json to_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const Atom& a : mu.atoms()) atoms.push_back({a.position, a.weight});
    return json{{"interval", {mu.interval().lo(), mu.interval().hi()}}, {"atoms", atoms}};
}

AtomicMeasure atomic_measure_from_json(const json& j) {
    const Interval iv = interval_from_json(j.at("interval"));
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2) {
            throw std::invalid_argument("measure json: atoms must be [position, weight] pairs");
        }
        atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return AtomicMeasure(iv, std::move(atoms));
}

json to_json(const GridDensity& p) {
    return json{{"interval", {p.interval().lo(), p.interval().hi()}},
                {"grid", p.grid_size()},
                {"values", p.values()}};
}

GridDensity grid_density_from_json(const json& j) {
    const Interval iv = interval_from_json(j.at("interval"));
    auto values = j.at("values").get<std::vector<double>>();
    if (j.at("grid").get<int>() != static_cast<int>(values.size())) {
        throw std::invalid_argument("measure json: \"grid\" does not match the value count");
    }
    return GridDensity(iv, std::move(values));
}

json to_json(const RunCheckpoint& cp) {
    json j{{"iter", cp.iter},
           {"alpha", cp.alpha},
           {"gamma", cp.gamma},
           {"residuals", cp.residuals},
           {"bl_to_ref", nullptr},
           {"lyapunov", nullptr},
           {"elapsed_s", cp.elapsed_s}};
    if (cp.bl_to_ref) j["bl_to_ref"] = *cp.bl_to_ref;
    if (cp.lyapunov) j["lyapunov"] = *cp.lyapunov;
    return j;
}

json to_json(const TrajectoryPoint& point) {
    json j{{"t", point.t},
           {"V", point.lyapunov},
           {"rate", point.rate},
           {"residual", point.residual}};
    if (point.profile) {
        json profiles = json::array();
        for (const GridDensity& p : *point.profile) profiles.push_back(to_json(p));
        j["profiles"] = profiles;
    }
    return j;
}

json to_json(const EquilibriumSet& set) {
    json components = json::array();
    for (const EquilibriumComponent& comp : set.components) {
        json players = json::array();
        for (const GridDensity& p : comp.profile) players.push_back(to_json(p));
        components.push_back({{"players", players},
                              {"residual", comp.residual},
                              {"hits", comp.hits},
                              {"converged", comp.converged}});
    }
    return json{{"eta", set.eta},
                {"grid", set.grid},
                {"restarts", set.restarts},
                {"converged", set.all_converged},
                {"components", components}};
}

EquilibriumSet equilibrium_set_from_json(const json& j) {
    EquilibriumSet set;
    set.eta = j.at("eta").get<double>();
    set.grid = j.at("grid").get<int>();
    set.restarts = j.at("restarts").get<int>();
    set.all_converged = j.at("converged").get<bool>();
    for (const auto& comp : j.at("components")) {
        EquilibriumComponent c;
        for (const auto& p : comp.at("players")) c.profile.push_back(grid_density_from_json(p));
        c.residual = comp.at("residual").get<double>();
        c.hits = comp.at("hits").get<int>();
        c.converged = comp.at("converged").get<bool>();
        set.components.push_back(std::move(c));
    }
    return set;
}

}  // namespace logitac
