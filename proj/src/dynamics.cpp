#include "logitac/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "logitac/errors.hpp"

namespace logitac {

void validate_dynamics_config(const DynamicsConfig& config) {
    if (!(config.eta > 0.0)) throw std::invalid_argument("dynamics: eta must be > 0");
    if (!(config.step > 0.0 && config.step <= 0.1)) {
        throw std::invalid_argument("dynamics: step must be in (0, 0.1]");
    }
    if (!(config.horizon > 0.0)) throw std::invalid_argument("dynamics: horizon must be > 0");
    if (config.grid < 2) throw std::invalid_argument("dynamics: grid must be >= 2");
}

GameSpec identical_interest_surrogate(const GameSpec& game) {
    validate_game(game);
    if (!game.has_potential()) {
        throw ConfigError("dynamics: game declares no potential function");
    }
    GameSpec surrogate = game;
    auto phi = game.potential;
    surrogate.utility = [phi](int, const ActionProfile& a) { return phi(a); };
    return surrogate;
}

namespace {

void check_profile(const GameSpec& game, const std::vector<GridDensity>& profile) {
    if (static_cast<int>(profile.size()) != game.n_players) {
        throw std::invalid_argument("profile length does not match n_players");
    }
    for (int i = 0; i < game.n_players; ++i) {
        if (!(profile[i].interval() == game.intervals[i])) {
            throw std::invalid_argument("profile interval does not match the game");
        }
    }
}

std::vector<GridDensity> euler_step(const std::vector<GridDensity>& profile,
                                    const std::vector<GridDensity>& response, double h) {
    std::vector<GridDensity> next;
    next.reserve(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        std::vector<double> mixed(profile[i].grid_size());
        for (int k = 0; k < profile[i].grid_size(); ++k) {
            mixed[k] = (1.0 - h) * profile[i].values()[k] + h * response[i].values()[k];
        }
        next.push_back(GridDensity::normalized(profile[i].interval(), std::move(mixed)));
    }
    return next;
}

}  // namespace

std::vector<GridDensity> br_step(const std::vector<GridDensity>& profile,
                                 const GameSpec& game, double eta, double h) {
    if (!(h > 0.0 && h <= 0.1)) throw std::invalid_argument("br_step: h must be in (0, 0.1]");
    const GameSpec surrogate = identical_interest_surrogate(game);
    check_profile(surrogate, profile);
    const int grid = profile.front().grid_size();
    const auto response = logit_response_profile(surrogate, profile, eta, grid);
    return euler_step(profile, response, h);
}

Expectation potential_expectation(const GameSpec& game,
                                  const std::vector<GridDensity>& profile) {
    validate_game(game);
    if (!game.has_potential()) {
        throw ConfigError("potential_expectation: game declares no potential function");
    }
    check_profile(game, profile);

    const int n = game.n_players;
    Expectation out;
    if (n <= 4) {
        // Tensor-product trapezoid over all player grids.
        std::vector<std::vector<double>> nodes(n), mass(n);
        for (int i = 0; i < n; ++i) {
            nodes[i] = grid_nodes(game.intervals[i], profile[i].grid_size());
            const auto w = trapezoid_weights(game.intervals[i], profile[i].grid_size());
            mass[i].resize(profile[i].grid_size());
            for (int k = 0; k < profile[i].grid_size(); ++k) {
                mass[i][k] = w[k] * profile[i].values()[k];
            }
        }
        ActionProfile a(n, 0.0);
        std::vector<int> idx(n, 0);
        double acc = 0.0;
        while (true) {
            double w = 1.0;
            for (int i = 0; i < n; ++i) {
                a[i] = nodes[i][idx[i]];
                w *= mass[i][idx[i]];
            }
            if (w != 0.0) acc += w * game.potential(a);
            int t = n - 1;
            while (t >= 0 && ++idx[t] == static_cast<int>(nodes[t].size())) {
                idx[t] = 0;
                --t;
            }
            if (t < 0) break;
        }
        out.value = acc;
        return out;
    }

    // Monte Carlo with a fixed internal seed so the estimate is reproducible.
    out.exact = false;
    Rng rng(0x706f74656e7469ULL);
    ActionProfile a(n, 0.0);
    double sum = 0.0, sumsq = 0.0;
    for (int d = 0; d < kMonteCarloDraws; ++d) {
        for (int i = 0; i < n; ++i) a[i] = sample(profile[i], rng);
        const double v = game.potential(a);
        sum += v;
        sumsq += v * v;
    }
    const double nd = kMonteCarloDraws;
    out.value = sum / nd;
    out.standard_error = std::sqrt(std::max(0.0, sumsq / nd - out.value * out.value) / nd);
    return out;
}

double lyapunov(const std::vector<GridDensity>& profile, const GameSpec& game, double eta) {
    if (eta < 0.0) throw std::invalid_argument("lyapunov: eta must be >= 0");
    double v = -potential_expectation(game, profile).value;
    if (eta > 0.0) {
        for (const GridDensity& p : profile) v -= eta * entropy(p);
    }
    return v;
}

namespace {

// 5-point Gauss-Legendre on [0, 1].
constexpr double kGaussT[5] = {0.046910077030668004, 0.23076534494715845, 0.5,
                               0.7692346550528415, 0.953089922969332};
constexpr double kGaussW[5] = {0.11846344252809454, 0.23931433524968324,
                               0.28444444444444444, 0.23931433524968324,
                               0.11846344252809454};

}  // namespace

double kl(const GridDensity& p, const GridDensity& q) {
    if (!(p.interval() == q.interval()) || p.grid_size() != q.grid_size()) {
        throw std::invalid_argument("kl: densities live on different grids");
    }
    const auto& pv = p.values();
    const auto& qv = q.values();
    const double h = p.spacing();
    double acc = 0.0;
    for (int k = 0; k + 1 < p.grid_size(); ++k) {
        double cell = 0.0;
        for (int g = 0; g < 5; ++g) {
            const double t = kGaussT[g];
            const double pt = pv[k] + (pv[k + 1] - pv[k]) * t;
            const double qt = qv[k] + (qv[k + 1] - qv[k]) * t;
            if (pt > 0.0) {
                cell += kGaussW[g] * pt *
                        (std::log(std::max(pt, kDensityFloor)) -
                         std::log(std::max(qt, kDensityFloor)));
            }
        }
        acc += h * cell;
    }
    return acc;
}

double lyapunov_rate(const std::vector<GridDensity>& profile, const GameSpec& game,
                     double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("lyapunov_rate: eta must be > 0");
    const GameSpec surrogate = identical_interest_surrogate(game);
    check_profile(surrogate, profile);
    const int grid = profile.front().grid_size();
    const auto response = logit_response_profile(surrogate, profile, eta, grid);
    double rate = 0.0;
    for (int i = 0; i < surrogate.n_players; ++i) {
        rate -= eta * (kl(response[i], profile[i]) + kl(profile[i], response[i]));
    }
    return rate;
}

TrajectoryRecord integrate(std::vector<GridDensity> profile, const GameSpec& game,
                           const DynamicsConfig& config, long checkpoint_every,
                           bool record_profiles) {
    validate_dynamics_config(config);
    if (checkpoint_every < 1) throw std::invalid_argument("integrate: checkpoint_every must be >= 1");
    const GameSpec surrogate = identical_interest_surrogate(game);
    check_profile(surrogate, profile);

    const long steps = std::lround(config.horizon / config.step);
    TrajectoryRecord record;
    record.steps = steps;

    double prev_v = 0.0;
    for (long n = 0; n <= steps; ++n) {
        const auto response =
            logit_response_profile(surrogate, profile, config.eta, config.grid);
        const double v = lyapunov(profile, surrogate, config.eta);
        double rate = 0.0;
        double residual = 0.0;
        for (int i = 0; i < surrogate.n_players; ++i) {
            rate -= config.eta *
                    (kl(response[i], profile[i]) + kl(profile[i], response[i]));
            residual = std::max(residual, l1_distance(profile[i], response[i]));
        }

        if (n > 0) {
            const double slack = kLyapunovSlack * (1.0 + std::abs(prev_v));
            if (v > prev_v + slack) {
                record.lyapunov_violations += 1;
                record.max_violation = std::max(record.max_violation, v - prev_v - slack);
            }
        }
        prev_v = v;

        if (n % checkpoint_every == 0 || n == steps) {
            TrajectoryPoint point{static_cast<double>(n) * config.step, v, rate, residual, {}};
            if (record_profiles) point.profile = profile;
            record.checkpoints.push_back(std::move(point));
        }
        if (n == steps) {
            record.final_residual = residual;
            break;
        }
        profile = euler_step(profile, response, config.step);
    }
    record.final_profile = std::move(profile);
    return record;
}

}  // namespace logitac
