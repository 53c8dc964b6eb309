#pragma once

#include <optional>
#include <vector>

#include "logitac/game.hpp"
#include "logitac/logit.hpp"

namespace logitac {

// Euler discretization of the mean-field flow d(pi)/dt = L_eta(pi) - pi.
struct DynamicsConfig {
    double eta = 0.1;
    double step = 0.05;     // Euler step h, must be in (0, 0.1]
    double horizon = 30.0;  // total time T
    int grid = 256;
};

void validate_dynamics_config(const DynamicsConfig& config);

// The identical-interest game with every u^i replaced by the potential. The
// logit responses coincide with the original game's, and the Lyapunov
// decrease below is exact for it.
GameSpec identical_interest_surrogate(const GameSpec& game);

// One Euler step pi <- (1 - h) pi + h L_eta(pi), renormalized per player.
std::vector<GridDensity> br_step(const std::vector<GridDensity>& profile,
                                 const GameSpec& game, double eta, double h);

struct Expectation {
    double value = 0.0;
    bool exact = true;
    double standard_error = 0.0;
};

// E[phi(a)] under the product of the profile densities: tensor trapezoid for
// up to 4 players, Monte Carlo with kMonteCarloDraws draws above.
Expectation potential_expectation(const GameSpec& game,
                                  const std::vector<GridDensity>& profile);

// V_eta(pi) = -[ E phi(pi) + eta * sum_i entropy(pi^i) ]. eta = 0 is allowed
// here (plain negated expected potential); the dynamics themselves need
// eta > 0.
double lyapunov(const std::vector<GridDensity>& profile, const GameSpec& game, double eta);

// KL divergence of the piecewise-linear interpolants, integrated cell by
// cell with 5-point Gauss-Legendre; values floored at kDensityFloor inside
// the logs. Nonnegative up to quadrature rounding.
double kl(const GridDensity& p, const GridDensity& q);

// dV/dt along the flow: -eta * sum_i [ KL(l^i || p^i) + KL(p^i || l^i) ]
// with l = L_eta(pi). Always <= 0 up to rounding; 0 exactly at equilibria.
double lyapunov_rate(const std::vector<GridDensity>& profile, const GameSpec& game,
                     double eta);

struct TrajectoryPoint {
    double t = 0.0;
    double lyapunov = 0.0;
    double rate = 0.0;
    double residual = 0.0;  // max_i l1(p^i, l^i)
    std::optional<std::vector<GridDensity>> profile;
};

struct TrajectoryRecord {
    std::vector<TrajectoryPoint> checkpoints;
    std::vector<GridDensity> final_profile;
    double final_residual = 0.0;
    long steps = 0;
    // Euler steps where V increased by more than kLyapunovSlack * (1 + |V|).
    long lyapunov_violations = 0;
    double max_violation = 0.0;
};

inline constexpr double kLyapunovSlack = 1e-7;

// Integrates for round(T / h) Euler steps, recording V, its rate, and the
// residual every `checkpoint_every` steps (plus the initial and final state).
TrajectoryRecord integrate(std::vector<GridDensity> profile, const GameSpec& game,
                           const DynamicsConfig& config, long checkpoint_every = 1,
                           bool record_profiles = false);

}  // namespace logitac
