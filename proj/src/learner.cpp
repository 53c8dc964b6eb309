#include "logitac/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace logitac {

StepSchedule::StepSchedule(double a0, double g0, double rho_alpha, double rho_gamma, long n0)
    : a0_(a0), g0_(g0), rho_alpha_(rho_alpha), rho_gamma_(rho_gamma), n0_(n0) {
    if (!(a0 > 0.0) || !std::isfinite(a0)) {
        throw std::invalid_argument("StepSchedule: a0 must be finite and > 0");
    }
    if (!(g0 > 0.0) || !std::isfinite(g0)) {
        throw std::invalid_argument("StepSchedule: g0 must be finite and > 0");
    }
    if (n0 < 1) throw std::invalid_argument("StepSchedule: n0 must be >= 1");
    if (!(rho_gamma > 0.5)) {
        throw std::invalid_argument(
            "StepSchedule: rho_gamma must exceed 0.5, otherwise the critic steps are "
            "not square-summable");
    }
    if (!(rho_gamma < rho_alpha)) {
        throw std::invalid_argument(
            "StepSchedule: rho_gamma must be strictly below rho_alpha, otherwise "
            "alpha_n / gamma_n does not vanish");
    }
    if (!(rho_alpha <= 1.0)) {
        throw std::invalid_argument(
            "StepSchedule: rho_alpha must be <= 1, otherwise the actor steps are summable");
    }
    const auto [alpha1, gamma1] = at(1);
    if (alpha1 > 1.0 || gamma1 > 1.0) {
        throw std::invalid_argument("StepSchedule: first step sizes must lie in (0, 1]");
    }
}

std::pair<double, double> StepSchedule::at(long n) const {
    if (n < 1) throw std::invalid_argument("StepSchedule: n must be >= 1");
    const double base = static_cast<double>(n + n0_);
    return {a0_ * std::pow(base, -rho_alpha_), g0_ * std::pow(base, -rho_gamma_)};
}

LearnerState make_learner_state(const GameSpec& game, int grid, std::uint64_t seed) {
    validate_game(game);
    if (grid < 2) throw std::invalid_argument("make_learner_state: grid must be >= 2");
    LearnerState state;
    state.actors.reserve(game.n_players);
    state.critics.reserve(game.n_players);
    state.streams.reserve(game.n_players);
    for (int i = 0; i < game.n_players; ++i) {
        const auto nodes = grid_nodes(game.intervals[i], grid);
        std::vector<Atom> atoms;
        atoms.reserve(grid);
        for (double x : nodes) atoms.push_back({x, 1.0 / grid});
        state.actors.emplace_back(game.intervals[i], std::move(atoms));
        state.critics.push_back({game.intervals[i], std::vector<double>(grid, 0.0)});
        state.streams.emplace_back(Rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
    }
    return state;
}

CriticFn critic_update(const CriticFn& q, const std::vector<double>& u_slice, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw std::invalid_argument("critic_update: gamma must be in [0, 1]");
    }
    if (u_slice.size() != q.values.size()) {
        throw std::invalid_argument("critic_update: slice grid does not match the critic");
    }
    CriticFn out = q;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] += gamma * (u_slice[k] - out.values[k]);
    }
    return out;
}

void step(LearnerState& state, const GameSpec& game, double eta,
          const StepSchedule& schedule, const LearnerOptions& opts) {
    if (!(eta > 0.0)) throw std::invalid_argument("step: eta must be > 0");
    const int n_players = game.n_players;
    if (static_cast<int>(state.actors.size()) != n_players ||
        static_cast<int>(state.critics.size()) != n_players ||
        static_cast<int>(state.streams.size()) != n_players) {
        throw std::invalid_argument("step: state does not match the game");
    }

    const long n = state.iter + 1;
    const auto [alpha, gamma] = schedule.at(n);

    // (i) everyone samples an action from the pre-step actors
    ActionProfile actions(n_players, 0.0);
    for (int i = 0; i < n_players; ++i) actions[i] = sample(state.actors[i], state.streams[i]);

    // (ii) critics absorb the observed slices
    for (int i = 0; i < n_players; ++i) {
        const int grid = state.critics[i].grid_size();
        const auto slice = utility_slice(game, i, grid, actions);
        auto& q = state.critics[i].values;
        for (int k = 0; k < grid; ++k) q[k] += gamma * (slice[k] - q[k]);
    }

    // (iii)+(iv) logit draw against the fresh critic, then actor mixing
    for (int i = 0; i < n_players; ++i) {
        const GridDensity response = logit_density(state.critics[i], eta);
        const double b = sample_logit(response, state.streams[i]);
        state.actors[i] = mix_update(state.actors[i], b, alpha);
    }

    state.iter += 1;
    if (opts.compact_every > 0 && state.iter % opts.compact_every == 0) {
        for (int i = 0; i < n_players; ++i) {
            state.actors[i] = compact(state.actors[i], opts.compact_bins);
        }
    }
}

std::vector<double> calibration_residual(const LearnerState& state, const GameSpec& game,
                                         int grid, Rng* rng) {
    StrategyProfile profile(state.actors.begin(), state.actors.end());
    std::vector<double> residuals(game.n_players, 0.0);
    for (int i = 0; i < game.n_players; ++i) {
        const SliceResult slice = expected_utility_slice(game, i, grid, profile, rng);
        const auto w = trapezoid_weights(game.intervals[i], grid);
        const auto& q = state.critics[i].values;
        if (static_cast<int>(q.size()) != grid) {
            throw std::invalid_argument("calibration_residual: grid does not match the critic");
        }
        double acc = 0.0;
        for (int k = 0; k < grid; ++k) {
            const double d = q[k] - slice.values[k];
            acc += w[k] * d * d;
        }
        residuals[i] = std::sqrt(acc);
    }
    return residuals;
}

namespace {

RunCheckpoint make_checkpoint(const LearnerState& state, const GameSpec& game,
                              const RunOptions& opts, Rng* diag_rng, double elapsed_s) {
    RunCheckpoint cp;
    cp.iter = state.iter;
    const auto [alpha, gamma] = opts.schedule.at(std::max<long>(state.iter, 1));
    cp.alpha = alpha;
    cp.gamma = gamma;
    cp.residuals = calibration_residual(state, game, opts.learner.grid, diag_rng);
    if (opts.reference != nullptr && !opts.reference->empty()) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& component : *opts.reference) {
            best = std::min(best,
                            profile_distance(state.actors, component, opts.bl_resolution));
        }
        cp.bl_to_ref = best;
    }
    if (opts.record_lyapunov && game.has_potential()) {
        std::vector<GridDensity> smoothed;
        smoothed.reserve(state.actors.size());
        for (const auto& actor : state.actors) {
            smoothed.push_back(to_grid_density(actor, opts.learner.grid));
        }
        cp.lyapunov = lyapunov(smoothed, game, opts.eta);
    }
    cp.elapsed_s = elapsed_s;
    return cp;
}

}  // namespace

RunRecord run(const GameSpec& game, const RunOptions& opts,
              const std::function<void(const RunCheckpoint&)>& on_checkpoint) {
    if (opts.iters < 0) throw std::invalid_argument("run: iters must be >= 0");
    if (!(opts.eta > 0.0)) throw std::invalid_argument("run: eta must be > 0");

    LearnerState state = make_learner_state(game, opts.learner.grid, opts.seed);
    Rng diag_rng(Rng::derive_seed(opts.seed, 0x646961676eULL));

    std::set<long> marks(opts.checkpoints.begin(), opts.checkpoints.end());
    marks.insert(opts.iters);

    RunRecord record;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&start]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto emit = [&](const RunCheckpoint& cp) {
        record.checkpoints.push_back(cp);
        if (on_checkpoint) on_checkpoint(cp);
    };

    emit(make_checkpoint(state, game, opts, &diag_rng, elapsed()));
    for (long n = 1; n <= opts.iters; ++n) {
        step(state, game, opts.eta, opts.schedule, opts.learner);
        if (marks.count(n) != 0) {
            emit(make_checkpoint(state, game, opts, &diag_rng, elapsed()));
        }
    }
    record.final_state = std::move(state);
    return record;
}

}  // namespace logitac
