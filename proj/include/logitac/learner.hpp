#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "logitac/dynamics.hpp"
#include "logitac/game.hpp"
#include "logitac/logit.hpp"

namespace logitac {

// Two-timescale step sizes alpha_n = a0 (n + n0)^{-rho_alpha} for the actor
// and gamma_n = g0 (n + n0)^{-rho_gamma} for the critic. Construction
// enforces 0.5 < rho_gamma < rho_alpha <= 1, which gives divergent sums,
// square-summability and alpha_n / gamma_n -> 0, and requires both first
// step sizes to land in (0, 1].
class StepSchedule {
public:
    StepSchedule(double a0, double g0, double rho_alpha, double rho_gamma, long n0);

    static StepSchedule defaults() { return StepSchedule(1.0, 1.0, 1.0, 0.6, 1); }

    // (alpha_n, gamma_n) for n >= 1.
    std::pair<double, double> at(long n) const;

    double a0() const { return a0_; }
    double g0() const { return g0_; }
    double rho_alpha() const { return rho_alpha_; }
    double rho_gamma() const { return rho_gamma_; }
    long n0() const { return n0_; }

private:
    double a0_, g0_, rho_alpha_, rho_gamma_;
    long n0_;
};

struct LearnerOptions {
    int grid = 256;           // critic grid, also the initial actor support
    long compact_every = 1000;  // 0 disables actor compaction
    int compact_bins = 512;
};

// Full iteration state. Actors are probability measures; per-player rng
// streams are derived from the master seed by player index, so adding
// players never perturbs an existing player's stream.
struct LearnerState {
    long iter = 0;
    std::vector<AtomicMeasure> actors;
    std::vector<CriticFn> critics;
    std::vector<Rng> streams;
};

// Critics start at zero; actors start uniform over the grid nodes.
LearnerState make_learner_state(const GameSpec& game, int grid, std::uint64_t seed);

// Q + gamma (u_slice - Q) elementwise.
CriticFn critic_update(const CriticFn& q, const std::vector<double>& u_slice, double gamma);

// One iteration of the actor-critic recursion with step sizes taken at
// n = state.iter + 1: every player samples an action from their actor, the
// critics absorb the observed utility slices, every player then draws a
// logit best response to their critic and mixes it into their actor. All
// players update from the same pre-step state.
void step(LearnerState& state, const GameSpec& game, double eta,
          const StepSchedule& schedule, const LearnerOptions& opts = {});

// Per player, the trapezoid L2 norm of Q^i - u^i(., pi^{-i}). rng is only
// consulted when the opponents' atom product forces Monte Carlo.
std::vector<double> calibration_residual(const LearnerState& state, const GameSpec& game,
                                         int grid, Rng* rng = nullptr);

struct RunCheckpoint {
    long iter = 0;
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<double> residuals;
    std::optional<double> bl_to_ref;
    std::optional<double> lyapunov;
    double elapsed_s = 0.0;
};

struct RunOptions {
    double eta = 0.1;
    StepSchedule schedule = StepSchedule::defaults();
    long iters = 1000;
    std::uint64_t seed = 1;
    std::vector<long> checkpoints;  // interior checkpoint iterations; 0 and iters always recorded
    LearnerOptions learner;
    int bl_resolution = 512;
    // Equilibrium components to measure distance against (profile_distance,
    // nearest component). Null disables the diagnostic.
    const std::vector<std::vector<GridDensity>>* reference = nullptr;
    bool record_lyapunov = true;  // only honored when the game has a potential
};

struct RunRecord {
    std::vector<RunCheckpoint> checkpoints;
    LearnerState final_state;
};

// Executes `iters` steps, recording diagnostics at the requested checkpoints
// and streaming each record through `on_checkpoint` as soon as it exists.
RunRecord run(const GameSpec& game, const RunOptions& opts,
              const std::function<void(const RunCheckpoint&)>& on_checkpoint = {});

}  // namespace logitac
