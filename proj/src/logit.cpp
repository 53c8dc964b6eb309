#include "logitac/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace logitac {

GridDensity logit_density(const CriticFn& q, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("logit_density: eta must be > 0");
    if (q.grid_size() < 2) throw std::invalid_argument("logit_density: need at least 2 nodes");
    double qmax = -std::numeric_limits<double>::infinity();
    for (double v : q.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("logit_density: critic value not finite");
        qmax = std::max(qmax, v);
    }
    std::vector<double> e(q.values.size());
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::exp((q.values[k] - qmax) / eta);
    return GridDensity::normalized(q.interval, std::move(e));
}

double sample_logit(const GridDensity& p, Rng& rng) { return sample(p, rng); }

namespace {

long density_opponents(const GameSpec& game, const StrategyProfile& pis, int player) {
    long count = 0;
    for (int j = 0; j < game.n_players; ++j) {
        if (j == player) continue;
        if (!std::holds_alternative<GridDensity>(pis[j])) return -1;
        ++count;
    }
    return count;
}

}  // namespace

std::vector<GridDensity> logit_response_profile(const GameSpec& game,
                                                const StrategyProfile& pis, double eta,
                                                int grid, Rng* rng) {
    if (!(eta > 0.0)) throw std::invalid_argument("logit_response_profile: eta must be > 0");
    std::vector<GridDensity> out;
    out.reserve(game.n_players);
    for (int i = 0; i < game.n_players; ++i) {
        // Pure density opponents with n_players <= 4: always the exact nested
        // trapezoid quadrature, whatever the grid product.
        const long dens = density_opponents(game, pis, i);
        const long limit = (dens >= 0 && dens <= 3) ? std::numeric_limits<long>::max()
                                                    : kExactProductLimit;
        SliceResult slice = expected_utility_slice(game, i, grid, pis, rng, limit);
        out.push_back(logit_density(CriticFn{game.intervals[i], std::move(slice.values)}, eta));
    }
    return out;
}

std::vector<GridDensity> logit_response_profile(const GameSpec& game,
                                                const std::vector<GridDensity>& pis,
                                                double eta, int grid, Rng* rng) {
    StrategyProfile wrapped(pis.begin(), pis.end());
    return logit_response_profile(game, wrapped, eta, grid, rng);
}

std::vector<GridDensity> uniform_profile(const GameSpec& game, int grid) {
    validate_game(game);
    if (grid < 2) throw std::invalid_argument("uniform_profile: grid must be >= 2");
    std::vector<GridDensity> profile;
    profile.reserve(game.n_players);
    for (const Interval& iv : game.intervals) {
        profile.emplace_back(iv, std::vector<double>(grid, 1.0 / iv.width()));
    }
    return profile;
}

FixedPointResult logit_fixed_point(const GameSpec& game, double eta, int grid,
                                   const FixedPointOptions& opts,
                                   const std::vector<GridDensity>* init) {
    validate_game(game);
    if (!(eta > 0.0)) throw std::invalid_argument("logit_fixed_point: eta must be > 0");
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
        throw std::invalid_argument("logit_fixed_point: damping must be in (0, 1]");
    }
    if (!(opts.tol > 0.0)) throw std::invalid_argument("logit_fixed_point: tol must be > 0");

    FixedPointResult result;
    result.profile = init ? *init : uniform_profile(game, grid);
    if (static_cast<int>(result.profile.size()) != game.n_players) {
        throw std::invalid_argument("logit_fixed_point: init profile has wrong length");
    }

    const double lambda = opts.damping;
    for (int it = 1; it <= opts.max_iter; ++it) {
        const auto response = logit_response_profile(game, result.profile, eta, grid);
        double step = 0.0;
        for (int i = 0; i < game.n_players; ++i) {
            std::vector<double> mixed(response[i].grid_size());
            for (int k = 0; k < response[i].grid_size(); ++k) {
                mixed[k] = (1.0 - lambda) * result.profile[i].values()[k] +
                           lambda * response[i].values()[k];
            }
            GridDensity next = GridDensity::normalized(game.intervals[i], std::move(mixed));
            step = std::max(step, l1_distance(next, result.profile[i]));
            result.profile[i] = std::move(next);
        }
        result.iterations = it;
        if (step < opts.tol) {
            result.converged = true;
            break;
        }
    }

    const auto response = logit_response_profile(game, result.profile, eta, grid);
    for (int i = 0; i < game.n_players; ++i) {
        result.residual = std::max(result.residual, l1_distance(result.profile[i], response[i]));
    }
    return result;
}

namespace {

// Smooth random log-density: a short cosine series keeps restarts inside the
// Lipschitz class the dynamics expect.
std::vector<GridDensity> random_profile(const GameSpec& game, int grid, Rng& rng) {
    std::vector<GridDensity> profile;
    profile.reserve(game.n_players);
    for (const Interval& iv : game.intervals) {
        double a1 = rng.uniform(-1.5, 1.5);
        double a2 = rng.uniform(-1.5, 1.5);
        double a3 = rng.uniform(-1.5, 1.5);
        std::vector<double> vals(grid);
        for (int k = 0; k < grid; ++k) {
            const double t = static_cast<double>(k) / (grid - 1);
            vals[k] = std::exp(a1 * std::cos(std::numbers::pi * t) +
                               a2 * std::cos(2.0 * std::numbers::pi * t) +
                               a3 * std::cos(3.0 * std::numbers::pi * t));
        }
        profile.push_back(GridDensity::normalized(iv, std::move(vals)));
    }
    return profile;
}

}  // namespace

EquilibriumSet find_logit_equilibria(const GameSpec& game, double eta, int grid,
                                     const FixedPointOptions& opts, int restarts,
                                     std::uint64_t seed) {
    if (restarts < 1) throw std::invalid_argument("find_logit_equilibria: restarts must be >= 1");
    EquilibriumSet set;
    set.restarts = restarts;
    set.eta = eta;
    set.grid = grid;
    set.all_converged = true;
    const int resolution = std::max(grid, 16);
    const double merge_tol = 10.0 * opts.tol;

    for (int r = 0; r < restarts; ++r) {
        FixedPointResult res;
        if (r == 0) {
            res = logit_fixed_point(game, eta, grid, opts);
        } else {
            Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(r)));
            auto init = random_profile(game, grid, rng);
            res = logit_fixed_point(game, eta, grid, opts, &init);
        }
        set.all_converged = set.all_converged && res.converged;

        bool merged = false;
        for (EquilibriumComponent& comp : set.components) {
            if (profile_distance(res.profile, comp.profile, resolution) < merge_tol) {
                comp.hits += 1;
                comp.converged = comp.converged || res.converged;
                if (res.residual < comp.residual) {
                    comp.profile = std::move(res.profile);
                    comp.residual = res.residual;
                }
                merged = true;
                break;
            }
        }
        if (!merged) {
            set.components.push_back(
                {std::move(res.profile), res.residual, 1, res.converged});
        }
    }
    return set;
}

}  // namespace logitac
