#include "../oracles.hpp"
#include "orbitclt/parry.hpp"
#include "orbitclt/rng.hpp"
#include "orbitclt/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace orbitclt;

TEST_CASE("moments are exact and permutation invariant")
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + rng() % 200);
        for (auto& x : v)
            x = static_cast<double>(static_cast<int>(rng() % 41) - 20) / 4.0;
        const auto a = moments(v);
        std::shuffle(v.begin(), v.end(), rng);
        const auto b = moments(v);
        CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
        CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
        CHECK(a.variance >= 0.0);
        long double m = 0, s = 0;
        for (double x : v)
            m += x;
        m /= v.size();
        for (double x : v)
            s += (x - m) * (x - m);
        CHECK(a.variance == doctest::Approx(static_cast<double>(s / v.size())).epsilon(1e-12));
    }
}

TEST_CASE("weighted moments")
{
    const std::vector<double> v{0.0, 1.0, 4.0};
    const std::vector<Rational> w{Rational(1, 2), Rational(1, 4), Rational(1, 4)};
    const auto m = moments(v, w);
    CHECK(m.mean == doctest::Approx(1.25));
    CHECK(m.variance == doctest::Approx(0.5 * 1.5625 + 0.25 * 0.0625 + 0.25 * 7.5625));
}

TEST_CASE("Lindeberg function")
{
    std::mt19937_64 rng(9);
    std::vector<double> v(500);
    for (auto& x : v)
        x = std::normal_distribution<double>()(rng);
    const auto m = moments(v);
    CHECK(lindeberg_function(v, m.mean, 1e-12) == doctest::Approx(m.variance).epsilon(1e-12));
    double previous = INFINITY;
    for (double c : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        const double L = lindeberg_function(v, m.mean, c);
        CHECK(L <= m.variance + 1e-12);
        CHECK(L <= previous);
        previous = L;
    }
    CHECK(lindeberg_function(v, m.mean, 100.0) == 0.0);
}

TEST_CASE("Kolmogorov distance")
{
    const double single = 0.0;
    CHECK(ks_distance(std::span(&single, 1), Reference::standard_normal()).ks_statistic == doctest::Approx(0.5));
    CounterRng rng(11, 0);
    std::vector<double> draws(100000);
    for (auto& x : draws)
        x = rng.normal();
    const auto d = ks_distance(draws, Reference::standard_normal());
    CHECK(d.ks_statistic < 0.01);
    CHECK(d.ks_statistic >= 0.0);
    const auto mix = Reference::mixture({MixtureAtom{1.0, 1.0}});
    CHECK(mix.is_standard_normal());
    for (double t : {-2.0, -0.3, 0.0, 1.7})
        CHECK(mix.cdf(t) == doctest::Approx(normal_cdf(t)));
    const auto two = Reference::mixture({MixtureAtom{0.0, 0.5}, MixtureAtom{2.0, 0.5}});
    CHECK(two.cdf(0.0) == doctest::Approx(0.75));
    CHECK(two.cdf_left(0.0) == doctest::Approx(0.0 + 0.25));
    const std::vector<double> vals{-1.0, 1.0};
    const std::vector<double> probs{0.5, 0.5};
    CHECK(ks_distance(vals, probs, Reference::standard_normal()).ks_statistic ==
          doctest::Approx(std::max(0.5 - normal_cdf(-1.0), normal_cdf(-1.0))));
}

TEST_CASE("Monte Carlo standard error scales as the inverse square root")
{
    std::vector<double> se;
    for (std::size_t count : {4000u, 16000u, 64000u}) {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            CounterRng rng(seed, count);
            std::vector<double> v(count);
            for (auto& x : v)
                x = rng.uniform01();
            total += monte_carlo_moments(v).standard_error;
        }
        se.push_back(total / 8);
    }
    CHECK(se[0] / se[1] == doctest::Approx(2.0).epsilon(0.2));
    CHECK(se[1] / se[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("counter RNG is a pure function of key, stream and counter")
{
    CounterRng a(5, 9), b(5, 9), c(5, 10);
    for (int i = 0; i < 10; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    CHECK(derive_seed(1, "x", 0) == derive_seed(1, "x", 0));
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "y", 0));
    CHECK(derive_seed(1, "x", 0) != derive_seed(1, "x", 1));
}

TEST_CASE("Parry measure")
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const auto A = oracle::random_primitive(rng, 2 + trial % 3);
        const auto sys = SymbolicSystem::create(A);
        const auto mu = parry(sys);
        double total = 0.0;
        for (Symbol a = 0; a < A.size(); ++a) {
            double Av = 0.0;
            for (std::size_t b = 0; b < A.size(); ++b)
                Av += A[a][b] * mu.right[b];
            CHECK(Av == doctest::Approx(mu.perron_root * mu.right[a]).epsilon(1e-9));
            total += mu.cylinder(sys, Word{a});
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        // log trace(A^n) / n converges to the entropy at rate O(1/n).
        const double est = std::log(oracle::trace_pow(A, 60).get_d()) / 60.0;
        CHECK(std::fabs(est - mu.entropy) < std::log(static_cast<double>(A.size())) / 60.0 + 1e-9);
    }
    const auto golden = SymbolicSystem::golden_mean();
    const auto mu = parry(golden);
    const double lambda = (1 + std::sqrt(5.0)) / 2;
    CHECK(mu.perron_root == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(mu.cylinder(golden, Word{0}) == doctest::Approx(lambda * lambda / (1 + lambda * lambda)).epsilon(1e-12));
    CHECK(mu.cylinder(golden, Word{1, 1}) == 0.0);
    CHECK(cylinder_frequency(golden, 4, Word{0}) == Rational(5, 7));
    for (std::size_t n = 2; n <= 12; ++n) {
        std::size_t hits = 0;
        const auto words = oracle::periodic_words(golden.transitions(), n);
        for (const auto& w : words)
            hits += oracle::prefix(w, 2) == Word{0, 1};
        CHECK(cylinder_frequency(golden, n, Word{0, 1}) == Rational(static_cast<long>(hits)) / static_cast<long>(words.size()));
    }
}
