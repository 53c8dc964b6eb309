#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "logitac/json_io.hpp"
#include "logitac/measure.hpp"
#include "test_util.hpp"

using namespace logitac;
using logitac::testing::random_atomic;
using logitac::testing::random_density;

namespace {

const Interval kUnit(0.0, 1.0);

// Independent closed form for bl_distance(dirac(0), uniform on [0,1]): with
// sup bound s the best test function starts at s and descends at the full
// Lipschitz rate 1-s until it hits the floor -s, so
//   inner(s) = s - integral_0^1 max(s - (1-s) x, -s) dx,
// maximized over s by a fine sweep.
double dirac_vs_uniform_oracle() {
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double s = static_cast<double>(i) / 200000.0;
        const double lip = 1.0 - s;
        double integral;
        if (lip <= 2.0 * s) {  // never reaches the floor
            integral = s - lip / 2.0;
        } else {
            const double xstar = 2.0 * s / lip;
            integral = s * xstar - lip * xstar * xstar / 2.0 - s * (1.0 - xstar);
        }
        best = std::max(best, s - integral);
    }
    return best;
}

}  // namespace

TEST_CASE("Interval validates its endpoints") {
    CHECK_THROWS_AS(Interval(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(0.0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    const Interval iv(-1.0, 3.0);
    CHECK(iv.width() == doctest::Approx(4.0));
    CHECK(iv.contains(-1.0));
    CHECK(iv.contains(3.0));
    CHECK_FALSE(iv.contains(3.0001));
}

TEST_CASE("dirac") {
    const AtomicMeasure d = dirac(0.5, kUnit);
    REQUIRE(d.size() == 1);
    CHECK(d.atoms()[0].position == 0.5);
    CHECK(d.atoms()[0].weight == 1.0);
    CHECK(dirac(0.0, kUnit).atoms()[0].position == 0.0);
    CHECK_THROWS_AS(dirac(1.5, kUnit), std::invalid_argument);
}

TEST_CASE("atom construction merges near-duplicates and drops zero weights") {
    const AtomicMeasure mu(kUnit, {{0.5, 0.25}, {0.5 + 1e-13, 0.25}, {0.2, 0.5}, {0.9, 0.0}});
    REQUIRE(mu.size() == 2);
    CHECK(mu.atoms()[0].position == 0.2);
    CHECK(mu.atoms()[1].position == 0.5);
    CHECK(mu.atoms()[1].weight == 0.5);
    for (std::size_t i = 1; i < mu.size(); ++i) {
        CHECK(mu.atoms()[i].position > mu.atoms()[i - 1].position);
    }
}

TEST_CASE("mix_update two-point arithmetic") {
    const AtomicMeasure out = mix_update(dirac(0.0, kUnit), 1.0, 0.5);
    REQUIRE(out.size() == 2);
    CHECK(out.atoms()[0].position == 0.0);
    CHECK(out.atoms()[0].weight == 0.5);
    CHECK(out.atoms()[1].position == 1.0);
    CHECK(out.atoms()[1].weight == 0.5);
}

TEST_CASE("mix_update identity and full replacement") {
    Rng rng(11);
    const AtomicMeasure pi = random_atomic(kUnit, 20, rng);
    CHECK(mix_update(pi, 0.3, 0.0) == pi);
    const AtomicMeasure replaced = mix_update(pi, 0.3, 1.0);
    REQUIRE(replaced.size() == 1);
    CHECK(replaced.atoms()[0].position == 0.3);
    CHECK(replaced.atoms()[0].weight == 1.0);
    CHECK_THROWS_AS(mix_update(pi, 0.3, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(mix_update(pi, 0.3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(mix_update(pi, 7.0, 0.5), std::invalid_argument);
}

TEST_CASE("mix_update preserves mass and scales prior weights exactly") {
    Rng rng(5);
    AtomicMeasure pi = random_atomic(kUnit, 8, rng);
    for (int n = 0; n < 2000; ++n) {
        const double alpha = rng.uniform01();
        const double b = rng.uniform01();
        const AtomicMeasure next = mix_update(pi, b, alpha);
        CHECK(std::abs(next.total_weight() - 1.0) <= 1e-12);
        pi = next;
    }
    // exact (1 - alpha) scaling on a case with no merge
    const AtomicMeasure base(kUnit, {{0.25, 0.5}, {0.75, 0.5}});
    const AtomicMeasure next = mix_update(base, 0.5, 0.125);
    CHECK(next.atoms()[0].weight == 0.5 * (1.0 - 0.125));
    CHECK(next.atoms()[1].weight == 0.125);
    CHECK(next.atoms()[2].weight == 0.5 * (1.0 - 0.125));
}

TEST_CASE("compact") {
    SUBCASE("single atom unchanged") {
        const AtomicMeasure d = dirac(0.37, kUnit);
        CHECK(compact(d, 16) == d);
    }
    SUBCASE("weighted mean of one cell") {
        const AtomicMeasure mu(kUnit, {{0.10, 0.5}, {0.11, 0.5}});
        const AtomicMeasure pooled = compact(mu, 10);
        REQUIRE(pooled.size() == 1);
        CHECK(pooled.atoms()[0].position == doctest::Approx(0.105).epsilon(1e-12));
        CHECK(pooled.atoms()[0].weight == 1.0);
    }
    SUBCASE("BL error bounded by one cell width") {
        Rng rng(42);
        const AtomicMeasure pi = random_atomic(kUnit, 10000, rng);
        const AtomicMeasure pooled = compact(pi, 256);
        CHECK(pooled.size() <= 256);
        CHECK(std::abs(pooled.total_weight() - pi.total_weight()) <= 1e-12);
        CHECK(bl_distance(pooled, pi, 512) <= 1.0 / 256.0);
    }
    SUBCASE("preconditions") { CHECK_THROWS_AS(compact(dirac(0.5, kUnit), 1), std::invalid_argument); }
}

TEST_CASE("sample from atoms") {
    SUBCASE("single atom") {
        Rng rng(1);
        for (int i = 0; i < 16; ++i) CHECK(sample(dirac(0.3, kUnit), rng) == 0.3);
    }
    SUBCASE("two-atom frequencies within the binomial interval") {
        const AtomicMeasure mu(kUnit, {{0.2, 0.5}, {0.8, 0.5}});
        Rng rng(2024);
        int low = 0;
        for (int i = 0; i < 10000; ++i) {
            if (sample(mu, rng) == 0.2) ++low;
        }
        CHECK(std::abs(low / 10000.0 - 0.5) <= 0.02);
    }
    SUBCASE("same seed, same draws") {
        Rng a(99), b(99);
        const AtomicMeasure mu(kUnit, {{0.1, 0.3}, {0.5, 0.3}, {0.9, 0.4}});
        for (int i = 0; i < 100; ++i) CHECK(sample(mu, a) == sample(mu, b));
    }
    SUBCASE("non-normalized measure is rejected") {
        const AtomicMeasure half(kUnit, {{0.5, 0.5}});
        Rng rng(3);
        CHECK_THROWS_AS(sample(half, rng), std::invalid_argument);
    }
}

TEST_CASE("bl_distance basics") {
    Rng rng(7);
    const AtomicMeasure mu = random_atomic(kUnit, 40, rng);
    CHECK(bl_distance(mu, mu, 64) == 0.0);

    SUBCASE("dirac closed form 2d/(2+d)") {
        for (double d : {0.1, 0.5, 1.0}) {
            const double got = bl_distance(dirac(0.0, kUnit), dirac(d, kUnit), 512);
            CHECK(std::abs(got - 2.0 * d / (2.0 + d)) <= 1e-3);
        }
    }
    SUBCASE("dirac vs uniform matches the hand-derived closed form") {
        const GridDensity uniform(kUnit, std::vector<double>(65, 1.0));
        const double lp = bl_distance(Measure(dirac(0.0, kUnit)), Measure(uniform), 512);
        CHECK(std::abs(lp - dirac_vs_uniform_oracle()) <= 1e-3);
    }
    SUBCASE("domain errors") {
        const AtomicMeasure other(Interval(0.0, 2.0), {{0.5, 1.0}});
        CHECK_THROWS_AS(bl_distance(Measure(mu), Measure(other), 64), std::invalid_argument);
        CHECK_THROWS_AS(bl_distance(mu, mu, 8), std::invalid_argument);
    }
}

TEST_CASE("bl_distance is a pseudometric and refines monotonically") {
    Rng rng(13);
    SUBCASE("symmetry is exact") {
        for (int t = 0; t < 10; ++t) {
            const AtomicMeasure a = random_atomic(kUnit, 15, rng);
            const GridDensity b = random_density(kUnit, 33, rng);
            CHECK(bl_distance(Measure(a), Measure(b), 128) ==
                  bl_distance(Measure(b), Measure(a), 128));
        }
    }
    SUBCASE("triangle inequality within LP tolerance") {
        for (int t = 0; t < 20; ++t) {
            const AtomicMeasure a = random_atomic(kUnit, 12, rng);
            const AtomicMeasure b = random_atomic(kUnit, 12, rng);
            const AtomicMeasure c = random_atomic(kUnit, 12, rng);
            const double ab = bl_distance(a, b, 128);
            const double bc = bl_distance(b, c, 128);
            const double ac = bl_distance(a, c, 128);
            CHECK(ac <= ab + bc + 1e-6);
        }
    }
    SUBCASE("nested resolutions never decrease the value") {
        for (int t = 0; t < 5; ++t) {
            const AtomicMeasure a = random_atomic(kUnit, 10, rng);
            const GridDensity b = random_density(kUnit, 17, rng);
            double prev = -1.0;
            for (int r = 17; r <= 257; r = 2 * (r - 1) + 1) {
                const double v = bl_distance(Measure(a), Measure(b), r);
                CHECK(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}

TEST_CASE("profile_distance") {
    const AtomicMeasure a = dirac(0.0, kUnit);
    const AtomicMeasure b = dirac(0.1, kUnit);
    const AtomicMeasure c = dirac(0.3, kUnit);
    const std::vector<Measure> mus{Measure(a), Measure(a)};
    const std::vector<Measure> nus{Measure(b), Measure(c)};
    const double d_ab = bl_distance(a, b, 128);
    const double d_ac = bl_distance(a, c, 128);
    CHECK(profile_distance(std::span<const Measure>(mus), std::span<const Measure>(nus), 128) ==
          std::max(d_ab, d_ac));
    CHECK(profile_distance(std::span<const Measure>(mus), std::span<const Measure>(mus), 128) ==
          0.0);
    const std::vector<Measure> single{Measure(a)};
    const std::vector<Measure> single2{Measure(b)};
    CHECK(profile_distance(std::span<const Measure>(single), std::span<const Measure>(single2),
                           128) == d_ab);
    CHECK_THROWS_AS(profile_distance(std::span<const Measure>(single),
                                     std::span<const Measure>(nus), 128),
                    std::invalid_argument);
}

TEST_CASE("entropy") {
    CHECK(entropy(GridDensity(kUnit, std::vector<double>(129, 1.0))) == doctest::Approx(0.0));
    CHECK(entropy(GridDensity(Interval(0.0, 2.0), std::vector<double>(129, 0.5))) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-9));

    // p(x) = 2x: analytic entropy 1/2 - log 2
    std::vector<double> tri(1025);
    for (int k = 0; k < 1025; ++k) tri[k] = 2.0 * k / 1024.0;
    CHECK(entropy(GridDensity::normalized(kUnit, tri)) ==
          doctest::Approx(0.5 - std::log(2.0)).epsilon(1e-3));

    SUBCASE("stable under grid refinement for Lipschitz densities") {
        Rng rng(3);
        for (int t = 0; t < 5; ++t) {
            const GridDensity p = random_density(kUnit, 257, rng);
            const GridDensity fine = logitac::testing::resample(p, 513);
            CHECK(std::abs(entropy(p) - entropy(fine)) < 1e-4);
        }
    }
}

TEST_CASE("l1_distance") {
    const GridDensity u(kUnit, std::vector<double>(257, 1.0));
    CHECK(l1_distance(u, u) == 0.0);

    std::vector<double> tri(257);
    for (int k = 0; k < 257; ++k) tri[k] = 2.0 * k / 256.0;
    const GridDensity q = GridDensity::normalized(kUnit, tri);
    // kink of |1 - 2x| sits on a node, so the trapezoid value is exact
    CHECK(l1_distance(u, q) == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("triangle inequality on random triples") {
        Rng rng(17);
        for (int t = 0; t < 20; ++t) {
            const GridDensity a = random_density(kUnit, 65, rng);
            const GridDensity b = random_density(kUnit, 65, rng);
            const GridDensity c = random_density(kUnit, 65, rng);
            CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
        }
    }
    SUBCASE("grid mismatch") {
        const GridDensity other(kUnit, std::vector<double>(65, 1.0));
        CHECK_THROWS_AS(l1_distance(u, other), std::invalid_argument);
    }
}

TEST_CASE("grid density construction") {
    CHECK_THROWS_AS(GridDensity(kUnit, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(GridDensity(kUnit, {1.0, -0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(GridDensity(kUnit, {2.0, 2.0}), std::invalid_argument);
    const GridDensity p = GridDensity::normalized(kUnit, {1.0, 3.0, 1.0});
    const auto w = trapezoid_weights(kUnit, 3);
    double integral = 0.0;
    for (int k = 0; k < 3; ++k) integral += w[k] * p.values()[k];
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measure json round-trips bit-exactly") {
    Rng rng(23);
    for (int t = 0; t < 10; ++t) {
        const AtomicMeasure mu = random_atomic(kUnit, 25, rng);
        const AtomicMeasure back = atomic_measure_from_json(json::parse(to_json(mu).dump()));
        CHECK(back == mu);

        const GridDensity p = random_density(kUnit, 65, rng);
        const GridDensity pq = grid_density_from_json(json::parse(to_json(p).dump()));
        CHECK(pq == p);
    }
}

TEST_CASE("to_grid_density projects mass correctly") {
    Rng rng(31);
    const AtomicMeasure pi = random_atomic(kUnit, 200, rng);
    const GridDensity p = to_grid_density(pi, 128);
    const auto w = trapezoid_weights(kUnit, 128);
    double integral = 0.0;
    for (int k = 0; k < 128; ++k) integral += w[k] * p.values()[k];
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
    // projection moves mass by at most one grid spacing
    CHECK(bl_distance(Measure(pi), Measure(p), 512) <= 1.0 / 127.0 + 1e-9);
}
