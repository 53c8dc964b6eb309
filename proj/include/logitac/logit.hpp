#pragma once

#include <cstdint>
#include <vector>

#include "logitac/game.hpp"

namespace logitac {

// A critic: value estimates at uniform nodes over the player's interval.
// All values must be finite; at least 2 nodes.
struct CriticFn {
    Interval interval;
    std::vector<double> values;

    int grid_size() const { return static_cast<int>(values.size()); }
};

// Gibbs density exp(q/eta) / integral(exp(q/eta)) on q's grid, computed with
// max subtraction so the result is exactly shift invariant in q.
GridDensity logit_density(const CriticFn& q, double eta);

// Inverse-CDF draw from a grid density (piecewise linear between nodes).
double sample_logit(const GridDensity& p, Rng& rng);

// L_eta(pi): for each player, the logit density of the expected utility slice
// against the opponents' strategies. Profiles of densities with at most 3
// opponents use the exact nested trapezoid quadrature regardless of size;
// otherwise the expected_utility_slice product/Monte-Carlo rule applies.
std::vector<GridDensity> logit_response_profile(const GameSpec& game,
                                                const StrategyProfile& pis, double eta,
                                                int grid, Rng* rng = nullptr);
std::vector<GridDensity> logit_response_profile(const GameSpec& game,
                                                const std::vector<GridDensity>& pis,
                                                double eta, int grid, Rng* rng = nullptr);

struct FixedPointOptions {
    double damping = 0.5;  // in (0, 1]
    double tol = 1e-9;     // stop when successive iterates move less than this in l1
    int max_iter = 5000;
};

struct FixedPointResult {
    std::vector<GridDensity> profile;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  // max_i l1(pi^i, L^i_eta(pi^{-i})) at the returned iterate
};

// Damped fixed-point iteration pi <- (1 - damping) pi + damping L_eta(pi),
// starting from `init` (uniform profile when null). Reaching max_iter is not
// an error; it returns converged = false.
FixedPointResult logit_fixed_point(const GameSpec& game, double eta, int grid,
                                   const FixedPointOptions& opts = {},
                                   const std::vector<GridDensity>* init = nullptr);

std::vector<GridDensity> uniform_profile(const GameSpec& game, int grid);

struct EquilibriumComponent {
    std::vector<GridDensity> profile;
    double residual = 0.0;
    int hits = 0;  // restarts that landed on this component
    bool converged = false;
};

struct EquilibriumSet {
    std::vector<EquilibriumComponent> components;
    bool all_converged = false;
    int restarts = 0;
    double eta = 0.0;
    int grid = 0;
};

// Runs logit_fixed_point from the uniform profile plus seeded random
// restarts; results whose pairwise profile distance is below 10 * tol merge
// into one component.
EquilibriumSet find_logit_equilibria(const GameSpec& game, double eta, int grid,
                                     const FixedPointOptions& opts, int restarts,
                                     std::uint64_t seed);

}  // namespace logitac
