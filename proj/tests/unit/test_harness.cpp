#include "../oracles.hpp"
#include "orbitclt/error.hpp"
#include "orbitclt/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace orbitclt;

TEST_CASE("block layouts")
{
    const auto g = global_layout(3, 4, 2);
    REQUIRE(g.blocks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(g.blocks[i].first == i * 6);
        CHECK(g.blocks[i].second == 4);
        CHECK(g.gaps[i].first == i * 6 + 4);
        CHECK(g.gaps[i].second == 2);
    }
    const auto golden = SymbolicSystem::golden_mean();
    const auto set = build_local_indep(golden, CylinderSchedule{4, {Word{0, 0}, Word{0, 0}, Word{0, 0}}}, Rational(1, 4), 16);
    const auto l = local_layout(set);
    REQUIRE(l.blocks.size() == 3);
    CHECK(l.blocks[0] == std::pair<std::size_t, std::size_t>{0, 4});
    CHECK(l.blocks[1] == std::pair<std::size_t, std::size_t>{4, 4});
    CHECK(l.blocks[2] == std::pair<std::size_t, std::size_t>{8, 8});
}

TEST_CASE("k = 1 on the full shift reproduces the binomial law")
{
    const auto full = SymbolicSystem::full_shift(2);
    const auto h = Observable::symbol_indicator(full, 0);
    for (const Rational& eps : {Rational(1, 4), Rational(1, 8)})
        for (std::size_t n = 1; n <= 8; ++n) {
            const std::size_t M = specification_parameters(full, eps).M_of_eps;
            if (n + M > 12)
                continue;
            const auto set = build_global_indep(full, eps, 1, n, M);
            // Separation classes are the prefixes of length L, which are free.
            const std::size_t L = separation_length(full, n, 2 * eps);
            SamplingOptions so;
            const auto st = array_statistics(set, global_layout(1, n, M), {&h}, h, so);
            std::map<long, std::size_t> hist;
            for (double t : st.totals)
                ++hist[std::lround(t)];
            const auto row = oracle::binomial_row(L);
            REQUIRE(hist.size() == row.size());
            std::size_t j = 0;
            for (const auto& [value, count] : hist)
                CHECK(BigInt(std::to_string(count)) == row[j++]);
            CHECK(st.conditions.exact);
            CHECK(st.conditions.s_l_squared == doctest::Approx(static_cast<double>(n) / 4.0).epsilon(1e-12));
        }
}

TEST_CASE("condition report invariants")
{
    GlobalPlan plan;
    plan.system = SymbolicSystem::golden_mean();
    plan.eps = {Rational(1, 8), Rational(1, 8)};
    plan.k = {2, 6};
    plan.n = {4, 6};
    const std::size_t M = specification_parameters(plan.system, Rational(1, 8)).M_of_eps;
    plan.M = {M, M};
    plan.observables.push_back(Observable::geometric_weight(plan.system, 0.5, {1.0, -1.0}));
    plan.samples = 5000;
    plan.seed = 99;
    const auto results = run_global_clt(plan, 1);
    REQUIRE(results.size() == 2);
    for (const auto& r : results) {
        const auto& c = r.conditions;
        CHECK(c.s_l > 0.0);
        CHECK(c.oscillation_ratio_j1 >= 0.0);
        CHECK(c.oscillation_ratio_j2 >= 0.0);
        CHECK(c.gap_ratio >= 0.0);
        double previous = INFINITY;
        for (const auto& row : c.eta) {
            CHECK(row.lindeberg_ratio >= 0.0);
            CHECK(row.lindeberg_ratio <= previous);
            CHECK(row.negligibility >= 0.0);
            previous = row.lindeberg_ratio;
        }
        REQUIRE(r.ks.has_value());
        CHECK(r.ks->ks_statistic >= 0.0);
        CHECK(r.ks->ks_statistic <= 1.0);
    }
    CHECK(results[0].conditions.exact);
    CHECK_FALSE(results[1].conditions.exact);

    const auto again = run_global_clt(plan, 3);
    for (std::size_t l = 0; l < 2; ++l) {
        CHECK(again[l].normalized == results[l].normalized);
        CHECK(again[l].conditions.s_l == results[l].conditions.s_l);
        CHECK(again[l].conditions.oscillation_ratio_j1 == results[l].conditions.oscillation_ratio_j1);
        CHECK(again[l].ks->ks_statistic == results[l].ks->ks_statistic);
    }
}

TEST_CASE("plan validation")
{
    GlobalPlan plan;
    plan.system = SymbolicSystem::golden_mean();
    plan.eps = {Rational(1, 8)};
    plan.k = {2};
    plan.n = {4};
    plan.M = {3};
    plan.observables.push_back(Observable::symbol_indicator(plan.system, 0));
    CHECK_THROWS_AS(plan.validate(), Error);
    plan.M = {4};
    CHECK_NOTHROW(plan.validate());
    plan.n = {4, 5};
    CHECK_THROWS_AS(plan.validate(), Error);
}

TEST_CASE("periodic cylinder discrepancy against enumeration")
{
    const auto golden = SymbolicSystem::golden_mean();
    const auto mu = parry(golden);
    for (std::size_t n = 3; n <= 12; ++n) {
        const auto words = oracle::periodic_words(golden.transitions(), n);
        double worst = 0.0;
        for (std::size_t len = 1; len <= 3; ++len)
            for (const auto& w : oracle::admissible_words(golden.transitions(), len)) {
                std::size_t hits = 0;
                for (const auto& p : words)
                    hits += oracle::prefix(p, len) == w;
                worst = std::max(worst, std::fabs(static_cast<double>(hits) / words.size() - mu.cylinder(golden, w)));
            }
        CHECK(periodic_cylinder_discrepancy(golden, mu, n, 3) == doctest::Approx(worst).epsilon(1e-12));
    }
}

TEST_CASE("orbit discrepancy of a fixed point")
{
    const auto full = SymbolicSystem::full_shift(2);
    const auto mu = parry(full);
    // Along 0^inf the word 0 has frequency 1 against measure 1/2.
    CHECK(orbit_measure_discrepancy(full, mu, PeriodicPoint(Word{0}), 1) == doctest::Approx(0.5));
    CHECK(orbit_measure_discrepancy(full, mu, PeriodicPoint(Word{0, 1}), 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mme report entropy estimates approach log lambda")
{
    MmePlan plan;
    plan.system = SymbolicSystem::golden_mean();
    plan.periodic_n = {5, 20};
    plan.eps = {Rational(1, 8)};
    plan.k = {4};
    plan.n = {6};
    plan.M = {specification_parameters(plan.system, Rational(1, 8)).M_of_eps};
    plan.samples = 2000;
    const auto report = run_mme_convergence(plan, 1);
    REQUIRE(report.entropy_estimates.size() == 60);
    for (const auto& [n, est] : report.entropy_estimates)
        CHECK(std::fabs(est - report.parry.entropy) <= std::log(2.0) / static_cast<double>(n) + 1e-12);
    CHECK(report.rows.size() == 3);
}

TEST_CASE("concentration masses are probabilities")
{
    ConcentrationPlan plan;
    plan.system = SymbolicSystem::full_shift(2);
    plan.eps = {Rational(1, 8), Rational(1, 8)};
    plan.k = {4, 16};
    plan.n = {8, 10};
    const std::size_t M = specification_parameters(plan.system, Rational(1, 8)).M_of_eps;
    plan.M = {M, M};
    plan.observables.push_back(Observable::symbol_indicator(plan.system, 0, -0.5));
    plan.samples = 4000;
    plan.orbit_samples = 4;
    const auto report = run_birkhoff_concentration(plan, 1);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.mass >= 0.0);
        CHECK(row.mass <= 1.0);
        CHECK(row.threshold == doctest::Approx(std::pow(static_cast<double>(row.k), -0.5 + plan.eta)));
        CHECK(row.summability_term == doctest::Approx(row.fourth_moment_ratio / std::sqrt(static_cast<double>(row.k))));
    }
}

TEST_CASE("mixture cells and coverage")
{
    MixturePlan plan;
    plan.system = SymbolicSystem::golden_mean();
    plan.cylinders = {Word{0}, Word{1}};
    plan.n = {4, 4};
    plan.k = {4, 8};
    plan.observables.push_back(Observable::symbol_indicator(plan.system, 0, -0.5));
    plan.samples = 5000;
    const auto report = run_mixture_clt(plan, 1);
    REQUIRE(report.levels.size() == 2);
    for (const auto& level : report.levels) {
        CHECK(level.coverage_deficiency == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(level.cell_variance_min <= level.cell_variance_max);
        double total = 0.0;
        for (const auto& a : level.atoms)
            total += a.probability;
        CHECK(total == doctest::Approx(1.0));
        CHECK(level.j % level.n == 0);
        CHECK(level.j >= level.k * level.n);
    }
    plan.cylinders = {Word{0}};
    CHECK_THROWS_AS(run_mixture_clt(plan, 1), Error);
}

TEST_CASE("pinned sampler draws only admissible points with the pins")
{
    const auto golden = SymbolicSystem::golden_mean();
    std::vector<int> pins(10, -1);
    pins[0] = 1;
    pins[5] = 1;
    PinnedSampler sampler(golden, pins);
    REQUIRE_FALSE(sampler.empty());
    CounterRng rng(1, 2);
    std::map<Word, std::size_t> freq;
    Word w;
    const std::size_t draws = 40000;
    for (std::size_t i = 0; i < draws; ++i) {
        sampler.draw(rng, w);
        CHECK(oracle::cyclic_ok(golden.transitions(), w));
        CHECK(w[0] == 1);
        CHECK(w[5] == 1);
        ++freq[w];
    }
    std::size_t expected = 0;
    for (const auto& p : oracle::periodic_words(golden.transitions(), 10))
        expected += p[0] == 1 && p[5] == 1;
    CHECK(freq.size() == expected);
    const double q = 1.0 / static_cast<double>(expected);
    for (const auto& [word, count] : freq)
        CHECK(std::fabs(static_cast<double>(count) / draws - q) < 5 * std::sqrt(q / draws));
}
