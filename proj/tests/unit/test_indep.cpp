#include "../oracles.hpp"
#include "orbitclt/error.hpp"
#include "orbitclt/indep.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace orbitclt;

namespace {

PeriodicPoint pt(const char* s) { return PeriodicPoint(word_from_string(s)); }

} // namespace

TEST_CASE("global set on the full 2-shift")
{
    const auto full = SymbolicSystem::full_shift(2);
    const auto set = build_global_indep(full, Rational(1, 4), 2, 2, 2);
    CHECK(set.validation().all_passed());
    CHECK(set.copied_length() == 4);
    // d_2 > 1/2 iff the first two symbols differ.
    CHECK(set.E().size() == 4);
    CHECK(set.materialized());
    CHECK(set.image().size() == 16);
    std::size_t i = 0, j = 0;
    for (std::size_t t = 0; t < set.E().size(); ++t) {
        if (word_to_string(unrolled_prefix(set.E()[t], 4)) == "0100")
            i = t;
        if (word_to_string(unrolled_prefix(set.E()[t], 4)) == "1100")
            j = t;
    }
    CHECK(word_to_string(set.phi(IndexTuple{i, j}).word()) == "01001100");
    const auto zero = std::find_if(set.E().begin(), set.E().end(),
                                   [](const PeriodicPoint& p) { return unrolled_prefix(p, 4) == Word{0, 0, 0, 0}; });
    REQUIRE(zero != set.E().end());
    const std::size_t z = zero - set.E().begin();
    CHECK(same_point(set.phi(IndexTuple{z, z}), pt("0")));
    for (std::size_t flat = 0; flat < 16; ++flat) {
        const auto t = set.tuple_from_flat(flat);
        CHECK(set.phi_inverse(set.image()[flat]) == t);
        CHECK(set.phi(t) == set.image()[flat]);
    }
}

TEST_CASE("global set errors")
{
    const auto golden = SymbolicSystem::golden_mean();
    try {
        build_global_indep(golden, Rational(1, 8), 2, 3, 3);
        FAIL("expected GapTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GapTooShort);
    }
    const auto set = build_global_indep(golden, Rational(1, 8), 2, 3, 4);
    CHECK_THROWS_AS(set.phi(IndexTuple{0, set.E().size()}), Error);
}

TEST_CASE("sampling is reproducible and uniform on coordinates")
{
    const auto full = SymbolicSystem::full_shift(2);
    IndepOptions io;
    io.materialize_budget = 0;
    const auto set = build_global_indep(full, Rational(1, 4), 3, 2, 2, io);
    CHECK_FALSE(set.materialized());
    const auto a = sample_uniform(set, 42, 3);
    const auto b = sample_uniform(set, 42, 3);
    CHECK(a == b);
    const std::size_t count = 100000;
    const auto many = sample_uniform(set, 7, count);
    std::vector<std::size_t> freq(set.E().size());
    for (const auto& [t, p] : many) {
        ++freq[t[1]];
        CHECK(p == set.phi(t));
    }
    const double q = 1.0 / static_cast<double>(set.E().size());
    const double se = std::sqrt(q * (1 - q) / count);
    for (auto f : freq)
        CHECK(std::fabs(static_cast<double>(f) / count - q) < 4 * se);
}

TEST_CASE("local set on the golden mean shift")
{
    const auto golden = SymbolicSystem::golden_mean();
    CylinderSchedule s{4, {Word{0, 0}, Word{0, 0}}};
    const auto set = build_local_indep(golden, s, Rational(1, 4), 8);
    CHECK(set.validation().all_passed());
    std::set<Word> image;
    for (const auto& p : set.image())
        image.insert(p.word());
    for (const auto& w : oracle::periodic_words(golden.transitions(), 8))
        if (w[0] == 0 && w[1] == 0 && w[4] == 0 && w[5] == 0)
            CHECK(image.count(w));
    CHECK(count_cylinder_points(golden, s, 8) == BigInt(std::to_string(enumerate_cylinder_points(golden, s, 8).size())));
}

TEST_CASE("local set errors and degenerate schedule")
{
    const auto golden = SymbolicSystem::golden_mean();
    try {
        build_local_indep(golden, CylinderSchedule{3, {Word{0, 0, 1}, Word{1, 0, 0}}}, Rational(1, 4), 6);
        FAIL("expected IncompatibleSchedule");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleSchedule);
    }
    try {
        build_local_indep(golden, CylinderSchedule{2, {Word{0, 0}, Word{0, 0}}}, Rational(1, 4), 4);
        FAIL("expected WindowTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WindowTooShort);
    }
    const auto single = build_local_indep(golden, CylinderSchedule{6, {Word{0, 1}}}, Rational(1, 4), 6);
    CHECK(single.blocks() == 1);
    for (std::size_t t = 0; t < single.factor_size(0); ++t)
        CHECK(single.phi(IndexTuple{t}) == single.factor(0)[t]);
}

TEST_CASE("weighted measure")
{
    const auto full = SymbolicSystem::full_shift(2);
    const Rational eps(1, 4);
    const auto set = build_global_indep(full, eps, 2, 2, 2);
    const auto wm = weighted_measure(set);
    Rational total = 0;
    for (const auto& w : wm.weights) {
        CHECK(w > 0);
        total += w;
    }
    CHECK(total == 1);
    CHECK(wm.support.size() == 256);
    const Rational r = full.metric_base();
    for (std::size_t i = 0; i < set.image().size(); ++i)
        for (std::size_t q : wm.q_sets[i])
            for (std::size_t b = 0; b < 2; ++b)
                CHECK(oracle::bowen(r, 2, oracle::shifted(set.image()[i].word(), b * 4),
                                    oracle::shifted(wm.support[q].word(), b * 4)) < 4 * eps);
}

TEST_CASE("specify_two")
{
    const auto full = SymbolicSystem::full_shift(2);
    const Rational eps(1, 4);
    const auto p = specify_two(full, pt("0"), 2, pt("1"), 3, 3, 3, eps);
    CHECK(p.period() == 11);
    CHECK(oracle::bowen(full.metric_base(), 2, p.word(), Word{0}) < eps);
    CHECK(oracle::bowen(full.metric_base(), 3, oracle::shifted(p.word(), 5), Word{1}) < eps);
    const auto q = specify_two(full, pt("01"), 3, pt("01"), 3, 3, 3, eps);
    CHECK(oracle::prefix(q.word(), 6) == oracle::prefix(q.word(), 6, 6));
    const auto golden = SymbolicSystem::golden_mean();
    CHECK_THROWS_AS(specify_two(golden, pt("0"), 2, pt("0"), 2, 2, 2, eps), Error);
}
