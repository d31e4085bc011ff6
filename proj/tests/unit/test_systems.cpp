#include "../oracles.hpp"
#include "orbitclt/error.hpp"
#include "orbitclt/systems.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace orbitclt;

TEST_CASE("construction rejects malformed and non-primitive matrices")
{
    CHECK_THROWS_AS(SymbolicSystem::create({}), Error);
    CHECK_THROWS_AS(SymbolicSystem::create({{1, 0}}), Error);
    CHECK_THROWS_AS(SymbolicSystem::create({{0, 1}, {1, 0}}), Error); // period 2
    CHECK_THROWS_AS(SymbolicSystem::create({{1, 0}, {0, 1}}), Error);
    CHECK_THROWS_AS(SymbolicSystem::create({{1, 1}, {1, 1}}, Rational(1)), Error);
    CHECK_THROWS_AS(SymbolicSystem::create({{1, 1}, {1, 1}}, Rational(1, 2), Rational(0)), Error);
    try {
        SymbolicSystem::create({{0, 1}, {1, 0}});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPrimitive);
    }
}

TEST_CASE("specification parameters")
{
    auto full = SymbolicSystem::full_shift(2);
    auto golden = SymbolicSystem::golden_mean();
    auto p = specification_parameters(full, Rational(1, 4));
    CHECK(p.agreement_depth == 2);
    CHECK(p.gap_min == 0);
    CHECK(p.M_of_eps == 2);
    CHECK(p.N_of_eps == 3);
    CHECK(p.delta_of_eps == Rational(1, 4));
    p = specification_parameters(golden, Rational(1, 8));
    CHECK(p.agreement_depth == 3);
    CHECK(p.gap_min == 1);
    CHECK(p.M_of_eps == 4);
    CHECK(specification_parameters(golden, Rational(1)).agreement_depth == 0);
}

TEST_CASE("periodic counts agree with trace and brute force on random primitive matrices")
{
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t S = 2 + rng() % 3;
        const auto A = oracle::random_primitive(rng, S);
        const auto sys = SymbolicSystem::create(A);
        for (std::size_t n = 1; n <= 8; ++n) {
            const auto brute = oracle::periodic_words(A, n);
            CHECK(periodic_count(sys, n) == oracle::trace_pow(A, n));
            const auto points = enumerate_periodic(sys, n);
            REQUIRE(points.size() == brute.size());
            for (std::size_t i = 0; i < points.size(); ++i)
                CHECK(points[i].word() == brute[i]);
        }
    }
}

TEST_CASE("enumeration budget")
{
    const auto full = SymbolicSystem::full_shift(2);
    CHECK_THROWS_AS(enumerate_periodic(full, 12, 100), Error);
}

TEST_CASE("shift is a bijection of P_n")
{
    const auto golden = SymbolicSystem::golden_mean();
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto points = enumerate_periodic(golden, n);
        for (std::size_t t = 0; t <= n; ++t) {
            std::set<PeriodicPoint> image;
            for (const auto& p : points)
                image.insert(shift_point(p, t));
            CHECK(image == std::set<PeriodicPoint>(points.begin(), points.end()));
        }
    }
}

TEST_CASE("Bowen distance: exact value, ultrametric, agreement bridge")
{
    std::mt19937_64 rng(2);
    const auto golden = SymbolicSystem::golden_mean();
    const Rational r = golden.metric_base();
    for (std::size_t n = 1; n <= 8; ++n) {
        const auto points = enumerate_periodic(golden, 9);
        for (int trial = 0; trial < 200; ++trial) {
            const auto& p = points[rng() % points.size()];
            const auto& q = points[rng() % points.size()];
            const auto& s = points[rng() % points.size()];
            const auto d = bowen_separation(p, q, n);
            const Rational expect = oracle::bowen(r, n, p.word(), q.word());
            CHECK(d.value(r) == expect);
            CHECK(d.zero == (expect == 0));
            const Rational ps = bowen_separation(p, s, n).value(r);
            const Rational sq = bowen_separation(s, q, n).value(r);
            CHECK(expect <= std::max(ps, sq));
            for (const Rational& eps : {Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(3, 16)}) {
                const std::size_t L = ball_agreement_length(golden, n, eps);
                CHECK(L == oracle::agreement_needed(r, n, eps));
                CHECK((expect < eps) == agree_on_prefix(p, q, L));
                CHECK(bowen_distance_less(golden, d, eps) == (expect < eps));
                CHECK(bowen_distance_greater(golden, d, eps) == (expect > eps));
            }
        }
    }
}

TEST_CASE("connecting words are least admissible bridges")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto A = oracle::random_primitive(rng, 3);
        const auto sys = SymbolicSystem::create(A);
        for (Symbol a = 0; a < 3; ++a)
            for (Symbol b = 0; b < 3; ++b)
                for (std::size_t g = sys.mixing_index() - 1; g < sys.mixing_index() + 3; ++g) {
                    const auto expect = oracle::least_bridge(A, a, b, g);
                    REQUIRE(expect.has_value());
                    const Word w = connect_words(sys, a, b, g);
                    CHECK(w == *expect);
                    CHECK(connect_words(sys, a, b, g) == w);
                }
    }
}

TEST_CASE("word strings round trip")
{
    const Word w{0, 1, 1, 0, 2};
    CHECK(word_from_string(word_to_string(w)) == w);
    CHECK(same_point(PeriodicPoint(Word{0, 1}), PeriodicPoint(Word{0, 1, 0, 1})));
    CHECK_FALSE(same_point(PeriodicPoint(Word{0, 1}), PeriodicPoint(Word{1, 0})));
}
