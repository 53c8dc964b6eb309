#include "logitac/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "logitac/errors.hpp"

namespace logitac {

void validate_game(const GameSpec& game) {
    if (game.n_players < 1) throw std::invalid_argument("GameSpec: need at least one player");
    if (static_cast<int>(game.intervals.size()) != game.n_players) {
        throw std::invalid_argument("GameSpec: intervals count does not match n_players");
    }
    if (!game.utility) throw std::invalid_argument("GameSpec: utility evaluator is empty");
    if (!(std::isfinite(game.u_bound) && game.u_bound > 0.0)) {
        throw std::invalid_argument("GameSpec: u_bound must be finite and > 0");
    }
    if (!(std::isfinite(game.lip_bound) && game.lip_bound > 0.0)) {
        throw std::invalid_argument("GameSpec: lip_bound must be finite and > 0");
    }
}

namespace {

void check_player(const GameSpec& game, int player) {
    if (player < 0 || player >= game.n_players) {
        throw std::invalid_argument("player index " + std::to_string(player) +
                                    " out of range");
    }
}

void check_opponents(const GameSpec& game, int player, const ActionProfile& a) {
    if (static_cast<int>(a.size()) != game.n_players) {
        throw std::invalid_argument("action profile has wrong length");
    }
    for (int j = 0; j < game.n_players; ++j) {
        if (j == player) continue;
        if (!game.intervals[j].contains(a[j])) {
            throw std::invalid_argument("opponent action " + std::to_string(a[j]) +
                                        " outside interval of player " + std::to_string(j));
        }
    }
}

}  // namespace

std::vector<double> utility_slice(const GameSpec& game, int player, int grid,
                                  const ActionProfile& opponents) {
    validate_game(game);
    check_player(game, player);
    if (grid < 2) throw std::invalid_argument("utility_slice: grid must be >= 2");
    check_opponents(game, player, opponents);

    const auto nodes = grid_nodes(game.intervals[player], grid);
    ActionProfile a = opponents;
    std::vector<double> values(grid);
    for (int k = 0; k < grid; ++k) {
        a[player] = nodes[k];
        values[k] = game.utility(player, a);
    }
    return values;
}

namespace {

// Support of one opponent strategy as (positions, probabilities).
struct SupportView {
    std::vector<double> positions;
    std::vector<double> probabilities;
};

SupportView strategy_support(const Strategy& s, const Interval& expected) {
    SupportView view;
    if (const auto* am = std::get_if<AtomicMeasure>(&s)) {
        if (!(am->interval() == expected)) {
            throw std::invalid_argument("strategy interval does not match the game");
        }
        if (!am->is_probability()) {
            throw std::invalid_argument("opponent strategy is not a probability measure");
        }
        view.positions.reserve(am->size());
        view.probabilities.reserve(am->size());
        for (const Atom& atom : am->atoms()) {
            view.positions.push_back(atom.position);
            view.probabilities.push_back(atom.weight);
        }
    } else {
        const auto& gd = std::get<GridDensity>(s);
        if (!(gd.interval() == expected)) {
            throw std::invalid_argument("strategy interval does not match the game");
        }
        const auto w = trapezoid_weights(gd.interval(), gd.grid_size());
        view.positions = grid_nodes(gd.interval(), gd.grid_size());
        view.probabilities.resize(gd.grid_size());
        for (int k = 0; k < gd.grid_size(); ++k) {
            view.probabilities[k] = w[k] * gd.values()[k];
        }
    }
    return view;
}

}  // namespace

SliceResult expected_utility_slice(const GameSpec& game, int player, int grid,
                                   const StrategyProfile& pis, Rng* rng, long exact_limit) {
    validate_game(game);
    check_player(game, player);
    if (grid < 2) throw std::invalid_argument("expected_utility_slice: grid must be >= 2");
    if (static_cast<int>(pis.size()) != game.n_players) {
        throw std::invalid_argument("expected_utility_slice: profile has wrong length");
    }

    std::vector<int> opponent_ids;
    std::vector<SupportView> supports;
    double product = 1.0;  // double so huge products cannot overflow
    for (int j = 0; j < game.n_players; ++j) {
        if (j == player) continue;
        opponent_ids.push_back(j);
        supports.push_back(strategy_support(pis[j], game.intervals[j]));
        const std::size_t sz = supports.back().positions.size();
        if (sz == 0) throw std::invalid_argument("opponent strategy has empty support");
        product *= static_cast<double>(sz);
    }

    const auto nodes = grid_nodes(game.intervals[player], grid);
    SliceResult result;
    result.values.assign(grid, 0.0);

    const int n_opp = static_cast<int>(opponent_ids.size());
    if (n_opp == 0) {
        ActionProfile a(game.n_players, 0.0);
        for (int k = 0; k < grid; ++k) {
            a[player] = nodes[k];
            result.values[k] = game.utility(player, a);
        }
        return result;
    }

    if (product <= static_cast<double>(exact_limit)) {
        // Exact sum over the product of opponent supports (odometer loop).
        ActionProfile a(game.n_players, 0.0);
        std::vector<std::size_t> idx(n_opp, 0);
        while (true) {
            double w = 1.0;
            for (int t = 0; t < n_opp; ++t) {
                const auto& sup = supports[t];
                a[opponent_ids[t]] = sup.positions[idx[t]];
                w *= sup.probabilities[idx[t]];
            }
            if (w != 0.0) {
                for (int k = 0; k < grid; ++k) {
                    a[player] = nodes[k];
                    result.values[k] += w * game.utility(player, a);
                }
            }
            int t = n_opp - 1;
            while (t >= 0 && ++idx[t] == supports[t].positions.size()) {
                idx[t] = 0;
                --t;
            }
            if (t < 0) break;
        }
        return result;
    }

    if (rng == nullptr) {
        throw std::invalid_argument(
            "expected_utility_slice: opponent product too large for the exact sum "
            "and no rng supplied for Monte Carlo");
    }
    // Monte Carlo over the same discretized supports the exact sum uses, so
    // the estimator is unbiased for it. Prefix tables keep draws O(log n).
    result.exact = false;
    std::vector<std::vector<double>> cdfs(n_opp);
    for (int t = 0; t < n_opp; ++t) {
        cdfs[t].resize(supports[t].probabilities.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cdfs[t].size(); ++i) {
            acc += supports[t].probabilities[i];
            cdfs[t][i] = acc;
        }
    }
    std::vector<double> sum(grid, 0.0), sumsq(grid, 0.0);
    ActionProfile a(game.n_players, 0.0);
    for (int d = 0; d < kMonteCarloDraws; ++d) {
        for (int t = 0; t < n_opp; ++t) {
            const double u = rng->uniform01() * cdfs[t].back();
            const auto it = std::upper_bound(cdfs[t].begin(), cdfs[t].end(), u);
            const std::size_t idx =
                std::min<std::size_t>(it - cdfs[t].begin(), cdfs[t].size() - 1);
            a[opponent_ids[t]] = supports[t].positions[idx];
        }
        for (int k = 0; k < grid; ++k) {
            a[player] = nodes[k];
            const double u = game.utility(player, a);
            sum[k] += u;
            sumsq[k] += u * u;
        }
    }
    const double n = kMonteCarloDraws;
    double max_se = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double mean = sum[k] / n;
        result.values[k] = mean;
        const double var = std::max(0.0, sumsq[k] / n - mean * mean);
        max_se = std::max(max_se, std::sqrt(var / n));
    }
    result.mc_standard_error = max_se;
    return result;
}

PotentialReport validate_potential(const GameSpec& game, int samples, double tol, Rng& rng) {
    validate_game(game);
    if (!game.has_potential()) {
        throw ConfigError("validate_potential: game declares no potential function");
    }
    if (samples < 1) throw std::invalid_argument("validate_potential: samples must be >= 1");

    PotentialReport report;
    report.tol = tol;
    report.samples = samples;
    ActionProfile a(game.n_players, 0.0);
    for (int s = 0; s < samples; ++s) {
        const int i = static_cast<int>(rng.uniform01() * game.n_players) % game.n_players;
        for (int j = 0; j < game.n_players; ++j) {
            a[j] = rng.uniform(game.intervals[j].lo(), game.intervals[j].hi());
        }
        const double ai = a[i];
        const double bi = rng.uniform(game.intervals[i].lo(), game.intervals[i].hi());
        a[i] = ai;
        const double du = game.utility(i, a);
        const double dphi = game.potential(a);
        a[i] = bi;
        const double residual =
            std::abs((du - game.utility(i, a)) - (dphi - game.potential(a)));
        report.max_residual = std::max(report.max_residual, residual);
    }
    report.pass = report.max_residual <= tol;
    return report;
}

GameSpec wlu_game(std::function<double(const ActionProfile&)> global,
                  const std::vector<double>& baselines, std::vector<Interval> intervals,
                  double global_u_bound, double global_lip_bound) {
    const int n = static_cast<int>(intervals.size());
    if (n < 1) throw std::invalid_argument("wlu_game: need at least one player");
    if (static_cast<int>(baselines.size()) != n) {
        throw std::invalid_argument("wlu_game: baselines count does not match intervals");
    }
    for (int i = 0; i < n; ++i) {
        if (!intervals[i].contains(baselines[i])) {
            throw std::invalid_argument("wlu_game: baseline " + std::to_string(baselines[i]) +
                                        " outside interval of player " + std::to_string(i));
        }
    }
    if (!global) throw std::invalid_argument("wlu_game: global evaluator is empty");

    GameSpec game;
    game.n_players = n;
    game.intervals = std::move(intervals);
    game.u_bound = 2.0 * global_u_bound;
    game.lip_bound = 2.0 * global_lip_bound;
    game.name = "wlu";
    game.utility = [global, baselines](int i, const ActionProfile& a) {
        ActionProfile base = a;
        base[i] = baselines[i];
        return global(a) - global(base);
    };
    game.potential = global;
    validate_game(game);
    return game;
}

namespace {

std::vector<double> broadcast(std::vector<double> v, int n, const char* what) {
    if (static_cast<int>(v.size()) == 1 && n > 1) v.resize(n, v[0]);
    if (static_cast<int>(v.size()) != n) {
        throw std::invalid_argument(std::string(what) + " must have one entry per player");
    }
    return v;
}

double quadratic_potential(const ActionProfile& a, const std::vector<double>& theta,
                           double kappa) {
    const int n = static_cast<int>(a.size());
    double phi = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = a[i] - theta[i];
        phi -= d * d;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = a[i] - a[j];
            phi -= kappa * d * d;
        }
    }
    return phi;
}

}  // namespace

GameSpec quadratic_coordination_game(int n_players, std::vector<double> theta, double kappa) {
    if (n_players < 1) throw std::invalid_argument("need at least one player");
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    theta = broadcast(std::move(theta), n_players, "theta");

    GameSpec game;
    game.n_players = n_players;
    game.intervals.assign(n_players, Interval(0.0, 1.0));
    double ub = kappa * n_players * (n_players - 1) / 2.0;
    double lip = 2.0 * kappa * (n_players - 1);
    for (double t : theta) {
        ub += std::max(t * t, (1.0 - t) * (1.0 - t));
        lip = std::max(lip, 2.0 * std::max(std::abs(t), std::abs(1.0 - t)) +
                                2.0 * kappa * (n_players - 1));
    }
    game.u_bound = std::max(ub, 1e-9);
    game.lip_bound = std::max(lip, 1e-9);
    game.name = "quadratic_coordination";
    auto phi = [theta, kappa](const ActionProfile& a) {
        return quadratic_potential(a, theta, kappa);
    };
    game.utility = [phi](int, const ActionProfile& a) { return phi(a); };
    game.potential = phi;
    validate_game(game);
    return game;
}

GameSpec cournot_linear_game(int n_players, double price_intercept, double marginal_cost,
                             double q_max) {
    if (n_players < 1) throw std::invalid_argument("need at least one player");
    if (!(price_intercept > 0.0)) throw std::invalid_argument("price_intercept must be > 0");
    if (marginal_cost < 0.0) throw std::invalid_argument("marginal_cost must be >= 0");
    if (!(q_max > 0.0)) throw std::invalid_argument("q_max must be > 0");

    GameSpec game;
    game.n_players = n_players;
    game.intervals.assign(n_players, Interval(0.0, q_max));
    game.u_bound = q_max * (price_intercept + marginal_cost + n_players * q_max);
    game.lip_bound = price_intercept + marginal_cost + (n_players + 1) * q_max;
    game.name = "cournot_linear";
    const double p0 = price_intercept, c = marginal_cost;
    game.utility = [p0, c](int i, const ActionProfile& a) {
        double total = 0.0;
        for (double q : a) total += q;
        return a[i] * (p0 - total) - c * a[i];
    };
    game.potential = [p0, c](const ActionProfile& a) {
        double phi = 0.0, total = 0.0;
        const int n = static_cast<int>(a.size());
        for (int i = 0; i < n; ++i) {
            total += a[i];
            phi -= a[i] * a[i];
            for (int j = i + 1; j < n; ++j) phi -= a[i] * a[j];
        }
        return phi + (p0 - c) * total;
    };
    validate_game(game);
    return game;
}

GameSpec wlu_quadratic_game(int n_players, std::vector<double> theta, double kappa,
                            std::vector<double> baselines) {
    if (n_players < 1) throw std::invalid_argument("need at least one player");
    if (kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");
    theta = broadcast(std::move(theta), n_players, "theta");
    baselines = broadcast(std::move(baselines), n_players, "baselines");

    const GameSpec quad = quadratic_coordination_game(n_players, theta, kappa);
    GameSpec game = wlu_game(quad.potential, baselines, quad.intervals, quad.u_bound,
                             quad.lip_bound);
    game.name = "wlu_quadratic";
    return game;
}

GameSpec builtin_game(const std::string& name, const GameParams& params) {
    GameSpec game;
    if (name == "quadratic_coordination") {
        game = quadratic_coordination_game(params.n_players, params.theta, params.kappa);
    } else if (name == "cournot_linear") {
        game = cournot_linear_game(params.n_players, params.price_intercept,
                                   params.marginal_cost, params.q_max);
    } else if (name == "wlu_quadratic") {
        game = wlu_quadratic_game(params.n_players, params.theta, params.kappa,
                                  params.baselines);
    } else {
        throw ConfigError("unknown builtin game '" + name + "'");
    }
    if (params.perturb != 0.0) {
        // Test fixture: breaks the potential property for player 0 only.
        const double eps = params.perturb;
        auto base = game.utility;
        game.utility = [base, eps](int i, const ActionProfile& a) {
            double u = base(i, a);
            if (i == 0) u += eps * a[0] * a[0];
            return u;
        };
        game.u_bound += std::abs(eps) * game.intervals[0].hi() * game.intervals[0].hi();
        game.name += "_perturbed";
    }
    return game;
}

}  // namespace logitac
