#pragma once

#include <functional>
#include <string>
#include <vector>

#include "logitac/measure.hpp"

namespace logitac {

// Joint action, one entry per player.
using ActionProfile = std::vector<double>;

// An N-player game on a product of intervals. `utility(i, a)` evaluates
// u^i(a); evaluators must be pure and reentrant. `potential` is empty unless
// the author supplies the potential function. `u_bound` and `lip_bound` are
// author-declared sup-norm and Lipschitz bounds; they are spot-checked by
// tests, not proven.
struct GameSpec {
    int n_players = 0;
    std::vector<Interval> intervals;
    std::function<double(int, const ActionProfile&)> utility;
    std::function<double(const ActionProfile&)> potential;
    double u_bound = 0.0;
    double lip_bound = 0.0;
    std::string name;

    bool has_potential() const { return static_cast<bool>(potential); }
};

void validate_game(const GameSpec& game);

// u^i(a, a^{-i}) at `grid` uniform nodes a over A^i. The entry `player` of
// `opponents` is ignored; the remaining entries must lie in their intervals.
std::vector<double> utility_slice(const GameSpec& game, int player, int grid,
                                  const ActionProfile& opponents);

using Strategy = Measure;
using StrategyProfile = std::vector<Strategy>;

struct SliceResult {
    std::vector<double> values;
    bool exact = true;             // exact product sum vs Monte Carlo
    double mc_standard_error = 0.0;  // max over nodes, 0 when exact
};

inline constexpr long kExactProductLimit = 1000000;
inline constexpr int kMonteCarloDraws = 100000;

// Expected slice u^i(a, pi^{-i}) at `grid` nodes over A^i. Atoms contribute
// their weights, densities their trapezoid node masses. The expectation is
// the exact sum over the product of opponent supports when that product has
// at most `exact_limit` tuples; otherwise Monte Carlo with kMonteCarloDraws
// opponent draws shared across nodes (requires rng). Entry `player` of `pis`
// is ignored.
SliceResult expected_utility_slice(const GameSpec& game, int player, int grid,
                                   const StrategyProfile& pis, Rng* rng = nullptr,
                                   long exact_limit = kExactProductLimit);

struct PotentialReport {
    double max_residual = 0.0;
    double tol = 0.0;
    int samples = 0;
    bool pass = false;
};

// Checks u^i(a^i, a^{-i}) - u^i(b^i, a^{-i}) == phi(a^i, a^{-i}) - phi(b^i, a^{-i})
// on random deviations; pass iff the max residual is <= tol.
PotentialReport validate_potential(const GameSpec& game, int samples, double tol, Rng& rng);

// Wonderful Life Utility: u^i(a) = G(a) - G(baseline^i, a^{-i}), potential G.
// `global_u_bound` / `global_lip_bound` bound G itself; the resulting game
// stores the doubled difference bounds.
GameSpec wlu_game(std::function<double(const ActionProfile&)> global,
                  const std::vector<double>& baselines, std::vector<Interval> intervals,
                  double global_u_bound, double global_lip_bound);

// Parameters for the builtin test games; fields irrelevant to a given game
// are ignored. `theta` and `baselines` are broadcast from a single entry.
struct GameParams {
    int n_players = 2;
    std::vector<double> theta = {0.5};
    double kappa = 1.0;
    double price_intercept = 1.0;
    double marginal_cost = 0.1;
    double q_max = 1.0;
    std::vector<double> baselines = {0.0};
    double perturb = 0.0;  // adds perturb * (a^1)^2 to u^1 only; breaks the potential property
};

// Identical-interest game on [0,1]^N with
// phi(a) = -sum_i (a_i - theta_i)^2 - kappa * sum_{i<j} (a_i - a_j)^2.
GameSpec quadratic_coordination_game(int n_players, std::vector<double> theta, double kappa);

// Cournot competition with linear inverse demand on [0, q_max]^N:
// u^i(a) = a_i (P - sum_j a_j) - c a_i.
GameSpec cournot_linear_game(int n_players, double price_intercept, double marginal_cost,
                             double q_max);

// WLU construction applied to the quadratic coordination potential.
GameSpec wlu_quadratic_game(int n_players, std::vector<double> theta, double kappa,
                            std::vector<double> baselines);

// name in {quadratic_coordination, cournot_linear, wlu_quadratic}.
GameSpec builtin_game(const std::string& name, const GameParams& params);

}  // namespace logitac
