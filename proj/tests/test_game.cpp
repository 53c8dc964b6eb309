#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "logitac/errors.hpp"
#include "logitac/game.hpp"
#include "test_util.hpp"

using namespace logitac;
using logitac::testing::random_atomic;

namespace {

const Interval kUnit(0.0, 1.0);

GameSpec constant_game(double value) {
    GameSpec g;
    g.n_players = 2;
    g.intervals = {kUnit, kUnit};
    g.utility = [value](int, const ActionProfile&) { return value; };
    g.potential = [value](const ActionProfile&) { return value; };
    g.u_bound = std::abs(value) + 1.0;
    g.lip_bound = 1.0;
    g.name = "constant";
    return g;
}

GameSpec squared_difference_game() {
    GameSpec g;
    g.n_players = 2;
    g.intervals = {kUnit, kUnit};
    g.utility = [](int i, const ActionProfile& a) {
        const double d = a[i] - a[1 - i];
        return -d * d;
    };
    g.potential = [](const ActionProfile& a) {
        const double d = a[0] - a[1];
        return -d * d;
    };
    g.u_bound = 1.0;
    g.lip_bound = 2.0;
    g.name = "squared_difference";
    return g;
}

}  // namespace

TEST_CASE("utility_slice") {
    SUBCASE("constant game") {
        const auto values = utility_slice(constant_game(3.0), 0, 5, {0.0, 0.5});
        for (double v : values) CHECK(v == 3.0);
    }
    SUBCASE("quadratic slice at grid 3") {
        const auto values = utility_slice(squared_difference_game(), 0, 3, {0.0, 0.5});
        REQUIRE(values.size() == 3);
        CHECK(values[0] == doctest::Approx(-0.25));
        CHECK(values[1] == doctest::Approx(0.0));
        CHECK(values[2] == doctest::Approx(-0.25));
    }
    SUBCASE("slice nodes equal the pointwise evaluator exactly") {
        const GameSpec game = cournot_linear_game(3, 1.0, 0.1, 1.0);
        Rng rng(5);
        const ActionProfile opp{0.0, rng.uniform01(), rng.uniform01()};
        const auto values = utility_slice(game, 0, 100, opp);
        const auto nodes = grid_nodes(game.intervals[0], 100);
        for (int k = 0; k < 100; ++k) {
            ActionProfile a = opp;
            a[0] = nodes[k];
            CHECK(values[k] == game.utility(0, a));
        }
    }
    SUBCASE("domain errors") {
        CHECK_THROWS_AS(utility_slice(constant_game(0.0), 0, 5, {0.0, 1.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(utility_slice(constant_game(0.0), 0, 1, {0.0, 0.5}),
                        std::invalid_argument);
        CHECK_THROWS_AS(utility_slice(constant_game(0.0), 2, 5, {0.0, 0.5}),
                        std::invalid_argument);
    }
}

TEST_CASE("expected_utility_slice") {
    SUBCASE("dirac opponents reduce to utility_slice") {
        const GameSpec game = squared_difference_game();
        const StrategyProfile pis{Measure(dirac(0.2, kUnit)), Measure(dirac(0.7, kUnit))};
        const SliceResult res = expected_utility_slice(game, 0, 33, pis);
        CHECK(res.exact);
        const auto direct = utility_slice(game, 0, 33, {0.0, 0.7});
        for (int k = 0; k < 33; ++k) CHECK(res.values[k] == doctest::Approx(direct[k]));
    }
    SUBCASE("linearity in the opponent mixture") {
        GameSpec game;
        game.n_players = 2;
        game.intervals = {kUnit, kUnit};
        game.utility = [](int i, const ActionProfile& a) { return a[i] * a[1 - i]; };
        game.u_bound = 1.0;
        game.lip_bound = 1.0;
        const AtomicMeasure half(kUnit, {{0.0, 0.5}, {1.0, 0.5}});
        const StrategyProfile pis{Measure(dirac(0.0, kUnit)), Measure(half)};
        const SliceResult res = expected_utility_slice(game, 0, 17, pis);
        const auto nodes = grid_nodes(kUnit, 17);
        for (int k = 0; k < 17; ++k) CHECK(res.values[k] == doctest::Approx(0.5 * nodes[k]));
    }
    SUBCASE("Monte Carlo lands within three standard errors of the exact sum") {
        const GameSpec game = quadratic_coordination_game(2, {0.5, 0.5}, 1.0);
        Rng init(77);
        const AtomicMeasure big = random_atomic(kUnit, 1000100, init);
        const StrategyProfile pis{Measure(dirac(0.5, kUnit)), Measure(big)};
        const SliceResult exact =
            expected_utility_slice(game, 0, 17, pis, nullptr, std::numeric_limits<long>::max());
        CHECK(exact.exact);
        Rng mc(123);
        const SliceResult sampled = expected_utility_slice(game, 0, 17, pis, &mc);
        CHECK_FALSE(sampled.exact);
        CHECK(sampled.mc_standard_error > 0.0);
        for (int k = 0; k < 17; ++k) {
            CHECK(std::abs(sampled.values[k] - exact.values[k]) <=
                  3.0 * sampled.mc_standard_error + 1e-12);
        }
    }
    SUBCASE("Monte Carlo without an rng is a contract error") {
        const GameSpec game = quadratic_coordination_game(2, {0.5, 0.5}, 1.0);
        Rng init(78);
        const AtomicMeasure big = random_atomic(kUnit, 1000100, init);
        const StrategyProfile pis{Measure(dirac(0.5, kUnit)), Measure(big)};
        CHECK_THROWS_AS(expected_utility_slice(game, 0, 17, pis), std::invalid_argument);
    }
    SUBCASE("non-probability opponents are rejected") {
        const GameSpec game = squared_difference_game();
        const AtomicMeasure half(kUnit, {{0.5, 0.5}});
        const StrategyProfile pis{Measure(dirac(0.2, kUnit)), Measure(half)};
        CHECK_THROWS_AS(expected_utility_slice(game, 0, 17, pis), std::invalid_argument);
    }
}

TEST_CASE("validate_potential") {
    Rng rng(1);
    SUBCASE("identical interest game has residual zero") {
        const GameSpec game = quadratic_coordination_game(3, {0.3, 0.5, 0.7}, 0.5);
        const PotentialReport report = validate_potential(game, 2000, 1e-12, rng);
        CHECK(report.max_residual == 0.0);
        CHECK(report.pass);
    }
    SUBCASE("cournot potential is an algebraic identity") {
        const GameSpec game = cournot_linear_game(3, 1.0, 0.1, 1.0);
        const PotentialReport report = validate_potential(game, 10000, 1e-9, rng);
        CHECK(report.max_residual < 1e-9);
        CHECK(report.pass);
    }
    SUBCASE("perturbing one utility breaks it") {
        GameParams params;
        params.n_players = 2;
        params.perturb = 0.1;
        const GameSpec game = builtin_game("cournot_linear", params);
        const PotentialReport report = validate_potential(game, 10000, 1e-9, rng);
        CHECK(report.max_residual > 1e-9);
        CHECK_FALSE(report.pass);
    }
    SUBCASE("missing potential is a configuration error") {
        GameSpec game = constant_game(0.0);
        game.potential = nullptr;
        CHECK_THROWS_AS(validate_potential(game, 10, 1e-9, rng), ConfigError);
    }
}

TEST_CASE("wlu_game") {
    SUBCASE("constant global utility gives zero WLU") {
        const GameSpec game = wlu_game([](const ActionProfile&) { return 4.0; }, {0.0, 0.0},
                                       {kUnit, kUnit}, 4.0, 1.0);
        Rng rng(2);
        for (int t = 0; t < 50; ++t) {
            const ActionProfile a{rng.uniform01(), rng.uniform01()};
            CHECK(game.utility(0, a) == 0.0);
            CHECK(game.utility(1, a) == 0.0);
        }
    }
    SUBCASE("baseline action earns zero") {
        const GameSpec game = wlu_game(
            [](const ActionProfile& a) { return a[0] * a[0] + 3.0 * a[1]; }, {0.25, 0.5},
            {kUnit, kUnit}, 4.0, 3.0);
        CHECK(game.utility(0, {0.25, 0.9}) == 0.0);
        CHECK(game.utility(1, {0.1, 0.5}) == 0.0);
    }
    SUBCASE("quadratic example matches the closed form and passes validation") {
        auto global = [](const ActionProfile& a) {
            const double d = a[0] - a[1];
            return -d * d;
        };
        const GameSpec game = wlu_game(global, {0.0, 0.0}, {kUnit, kUnit}, 1.0, 2.0);
        Rng rng(3);
        for (int t = 0; t < 100; ++t) {
            const double x = rng.uniform01(), y = rng.uniform01();
            CHECK(game.utility(0, {x, y}) ==
                  doctest::Approx(-(x - y) * (x - y) + y * y).epsilon(1e-12));
        }
        const PotentialReport report = validate_potential(game, 5000, 1e-9, rng);
        CHECK(report.pass);
    }
    SUBCASE("baseline outside the interval") {
        CHECK_THROWS_AS(wlu_game([](const ActionProfile&) { return 0.0; }, {2.0},
                                 std::vector<Interval>{kUnit}, 1.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("builtin games") {
    SUBCASE("quadratic_coordination N=1 collapses to a squared loss") {
        const GameSpec game = quadratic_coordination_game(1, {0.5}, 0.0);
        for (double a : {0.0, 0.25, 0.5, 1.0}) {
            CHECK(game.potential({a}) == doctest::Approx(-(a - 0.5) * (a - 0.5)));
        }
    }
    SUBCASE("player exchange symmetry for equal theta") {
        const GameSpec game = quadratic_coordination_game(2, {0.4, 0.4}, 2.0);
        Rng rng(4);
        for (int t = 0; t < 100; ++t) {
            const double x = rng.uniform01(), y = rng.uniform01();
            CHECK(game.utility(0, {x, y}) == game.utility(1, {y, x}));
        }
    }
    SUBCASE("all builtins pass the potential validator") {
        Rng rng(5);
        for (const char* name : {"quadratic_coordination", "cournot_linear", "wlu_quadratic"}) {
            const GameSpec game = builtin_game(name, GameParams{});
            const PotentialReport report = validate_potential(game, 10000, 1e-9, rng);
            INFO(name);
            CHECK(report.pass);
        }
    }
    SUBCASE("declared bounds hold on random profiles") {
        Rng rng(6);
        for (const char* name : {"quadratic_coordination", "cournot_linear", "wlu_quadratic"}) {
            const GameSpec game = builtin_game(name, GameParams{});
            for (int t = 0; t < 10000; ++t) {
                ActionProfile a(game.n_players);
                for (int i = 0; i < game.n_players; ++i) {
                    a[i] = rng.uniform(game.intervals[i].lo(), game.intervals[i].hi());
                }
                const int i = t % game.n_players;
                INFO(name);
                CHECK(std::abs(game.utility(i, a)) <= game.u_bound);
            }
        }
    }
    SUBCASE("unknown name is a configuration error") {
        CHECK_THROWS_AS(builtin_game("rock_paper_scissors", GameParams{}), ConfigError);
    }
}
