#include "../oracles.hpp"
#include "orbitclt/error.hpp"
#include "orbitclt/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace orbitclt;

namespace {

double gw_oracle(const Word& w, double lambda, const std::vector<double>& phi, std::size_t shift)
{
    double total = 0.0, weight = 1.0;
    for (std::size_t i = 0; i < 80; ++i, weight *= lambda)
        total += weight * phi[oracle::at(w, shift + i)];
    return total;
}

double sum_oracle(const Word& w, double lambda, const std::vector<double>& phi, std::size_t m, std::size_t n)
{
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t)
        s += gw_oracle(w, lambda, phi, m + t);
    return s;
}

} // namespace

TEST_CASE("evaluation of every variant")
{
    const auto golden = SymbolicSystem::golden_mean();
    const auto lc = Observable::locally_constant(golden, 2, {{Word{0, 0}, 1.5}, {Word{0, 1}, -2.0}, {Word{1, 0}, 0.25}});
    CHECK(lc.evaluate(PeriodicPoint(Word{0, 1})) == -2.0);
    CHECK(lc.evaluate(PeriodicPoint(Word{0, 1}), 1) == 0.25);
    CHECK(lc.spread() == 3.5);
    CHECK(lc.sup_abs() == 2.0);
    CHECK_THROWS_AS(Observable::locally_constant(golden, 2, {{Word{0, 0}, 1.0}}), Error);

    const auto si = Observable::symbol_indicator(golden, 0, -0.25);
    CHECK(si.evaluate(PeriodicPoint(Word{0, 1})) == 0.75);
    CHECK(si.evaluate(PeriodicPoint(Word{0, 1}), 1) == -0.25);
    CHECK(Observable::constant(golden, 3.0).evaluate(PeriodicPoint(Word{1, 0})) == 3.0);

    const auto full = SymbolicSystem::full_shift(2);
    const auto gw = Observable::geometric_weight(full, 0.5, {1.0, -1.0});
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        Word w(1 + rng() % 12);
        for (auto& s : w)
            s = rng() % 2;
        const PeriodicPoint p(w);
        const std::size_t shift = rng() % 20;
        CHECK(gw.evaluate(p, shift) == doctest::Approx(gw_oracle(w, 0.5, {1.0, -1.0}, shift)).epsilon(1e-11));
    }
    CHECK(gw.truncation_error() > 0.0);
    CHECK(gw.truncation_error() <= 1e-12);
}

TEST_CASE("evaluation reads only the leading symbols")
{
    const auto full = SymbolicSystem::full_shift(2);
    std::mt19937_64 rng(5);
    std::vector<std::pair<Word, double>> table;
    for (const auto& w : oracle::all_words(2, 3))
        table.emplace_back(w, static_cast<double>(rng() % 100) / 7.0);
    const auto lc = Observable::locally_constant(full, 3, table);
    CHECK(lc.read_depth() == 3);
    for (int trial = 0; trial < 200; ++trial) {
        Word a(3 + rng() % 6), b(3 + rng() % 6);
        for (auto& s : a)
            s = rng() % 2;
        for (auto& s : b)
            s = rng() % 2;
        std::copy(a.begin(), a.begin() + 3, b.begin());
        CHECK(lc.evaluate(PeriodicPoint(a)) == lc.evaluate(PeriodicPoint(b)));
    }
}

TEST_CASE("Lipschitz bound dominates sampled difference quotients")
{
    const auto full = SymbolicSystem::full_shift(2);
    const Rational r = full.metric_base();
    const auto gw = Observable::geometric_weight(full, 0.5, {0.3, -1.0});
    const auto lc = Observable::locally_constant(full, 2, {{Word{0, 0}, 1}, {Word{0, 1}, 2}, {Word{1, 0}, 0}, {Word{1, 1}, 5}});
    std::mt19937_64 rng(6);
    for (const auto* h : {&gw, &lc}) {
        const double L = h->lipschitz_bound(r);
        for (int trial = 0; trial < 500; ++trial) {
            Word a(1 + rng() % 10), b(1 + rng() % 10);
            for (auto& s : a)
                s = rng() % 2;
            for (auto& s : b)
                s = rng() % 2;
            const std::size_t m = oracle::disagreement(a, b);
            if (m == SIZE_MAX)
                continue;
            const double d = to_double(oracle::rpow(r, m));
            CHECK(std::fabs(h->evaluate(PeriodicPoint(a)) - h->evaluate(PeriodicPoint(b))) <= L * d * (1 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("Birkhoff sums are shift equivariant")
{
    const auto golden = SymbolicSystem::golden_mean();
    const auto h = Observable::geometric_weight(golden, 0.4, {1.0, -2.0});
    for (const auto& p : enumerate_periodic(golden, 9))
        for (std::size_t m = 0; m < 12; m += 3)
            CHECK(birkhoff_sum(h, p, m, 5) == doctest::Approx(birkhoff_sum(h, shift_point(p, m), 0, 5)).epsilon(1e-12));
}

TEST_CASE("exact oscillation against brute force")
{
    const auto full = SymbolicSystem::full_shift(2);
    const Rational r = full.metric_base();
    const std::vector<double> phi{1.0, -1.0};
    const auto h = Observable::geometric_weight(full, 0.5, phi);
    const auto Y = enumerate_periodic(full, 6);
    const PeriodicPoint x(Word{0});
    const Rational eps(1, 4);
    double expect = 0.0;
    const double sx = sum_oracle(x.word(), 0.5, phi, 0, 2);
    for (const auto& y : Y)
        if (oracle::bowen(r, 2, x.word(), y.word()) < eps)
            expect = std::max(expect, std::fabs(sx - sum_oracle(y.word(), 0.5, phi, 0, 2)));
    const double got = oscillation(full, h, eps, 0, 2, x, Y, OscillationMode::Exact);
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));
    CHECK(got <= oscillation(full, h, eps, 0, 2, x, Y, OscillationMode::Bound) + 1e-12);
}

TEST_CASE("oscillation properties on random instances")
{
    std::mt19937_64 rng(7);
    const auto golden = SymbolicSystem::golden_mean();
    const auto Y = enumerate_periodic(golden, 10);
    const std::vector<Rational> radii{Rational(1, 16), Rational(1, 8), Rational(1, 4), Rational(1, 2)};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::pair<Word, double>> table;
        for (const auto& w : oracle::admissible_words(golden.transitions(), 2))
            table.emplace_back(w, static_cast<double>(rng() % 50) / 10.0);
        const auto lc = Observable::locally_constant(golden, 2, table);
        const auto gw = Observable::geometric_weight(golden, 0.3 + 0.1 * (rng() % 5), {1.0, -0.5});
        const Observable& h = rng() % 2 ? lc : gw;
        const auto& x = Y[rng() % Y.size()];
        const std::size_t n = 1 + rng() % 4;
        const std::size_t m = rng() % 10;
        double previous = 0.0;
        for (const auto& eps : radii) {
            const double w = oscillation(golden, h, eps, m, n, x, Y, OscillationMode::Exact);
            CHECK(w >= previous - 1e-12);
            CHECK(w <= oscillation_bound(golden, h, eps, n) + 1e-9);
            // Y = P_10 is shift invariant.
            CHECK(w == doctest::Approx(oscillation(golden, h, eps, 0, n, shift_point(x, m), Y, OscillationMode::Exact))
                           .epsilon(1e-12));
            std::vector<PeriodicPoint> half(Y.begin(), Y.begin() + Y.size() / 2);
            CHECK(oscillation(golden, h, eps, m, n, x, half, OscillationMode::Exact) <= w + 1e-12);
            previous = w;
        }
    }
}

TEST_CASE("locally constant observables have zero oscillation at deep agreement")
{
    const auto full = SymbolicSystem::full_shift(2);
    const auto h = Observable::locally_constant(full, 2, {{Word{0, 0}, 1}, {Word{0, 1}, 2}, {Word{1, 0}, 0}, {Word{1, 1}, 5}});
    const auto Y = enumerate_periodic(full, 8);
    // a(1/8) = 2 >= depth.
    for (const auto& x : Y)
        CHECK(oscillation(full, h, Rational(1, 8), 0, 3, x, Y, OscillationMode::Exact) == 0.0);
}
