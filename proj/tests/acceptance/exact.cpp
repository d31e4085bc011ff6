#include "common.hpp"

#include "orbitclt/error.hpp"
#include "orbitclt/stats.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace orbitclt;

namespace {

const std::vector<std::uint64_t> kGoldenCounts{1, 3, 4, 7, 11, 18};

std::size_t oracle_a(const Rational& r, const Rational& eps)
{
    std::size_t j = 0;
    while (!(oracle::rpow(r, j) < eps))
        ++j;
    return j - 1;
}

std::size_t oracle_mixing(const oracle::Matrix& A)
{
    for (std::size_t p = 1;; ++p) {
        const auto P = oracle::mat_pow(A, p);
        bool positive = true;
        for (auto& row : P)
            for (auto& x : row)
                positive = positive && x > 0;
        if (positive)
            return p;
    }
}

} // namespace

Verdict criterion_1()
{
    const auto golden = SymbolicSystem::golden_mean();
    const auto full = SymbolicSystem::full_shift(2);
    Stopwatch lib_time;
    std::vector<BigInt> g, f;
    std::vector<std::size_t> g_enum, f_enum;
    for (std::size_t n = 1; n <= 30; ++n) {
        g.push_back(periodic_count(golden, n));
        f.push_back(periodic_count(full, n));
    }
    for (std::size_t n = 1; n <= 16; ++n) {
        g_enum.push_back(enumerate_periodic(golden, n).size());
        f_enum.push_back(enumerate_periodic(full, n).size());
    }
    const double seconds = lib_time.seconds();
    bool ok = true;
    std::string bad;
    for (std::size_t n = 1; n <= 6; ++n)
        if (g[n - 1] != BigInt(std::to_string(kGoldenCounts[n - 1]))) {
            ok = false;
            bad += " golden n=" + std::to_string(n);
        }
    for (std::size_t n = 1; n <= 30; ++n) {
        if (g[n - 1] != oracle::trace_pow(golden.transitions(), n)) {
            ok = false;
            bad += " trace n=" + std::to_string(n);
        }
        BigInt two = 1;
        two <<= n;
        if (f[n - 1] != two) {
            ok = false;
            bad += " 2^n n=" + std::to_string(n);
        }
    }
    for (std::size_t n = 1; n <= 16; ++n) {
        const auto brute_g = oracle::periodic_words(golden.transitions(), n).size();
        const auto brute_f = oracle::periodic_words(full.transitions(), n).size();
        if (g[n - 1] != BigInt(std::to_string(brute_g)) || g_enum[n - 1] != brute_g ||
            f[n - 1] != BigInt(std::to_string(brute_f)) || f_enum[n - 1] != brute_f) {
            ok = false;
            bad += " brute n=" + std::to_string(n);
        }
    }
    ok = ok && seconds < 1.0;
    return {ok, "golden 1,3,4,7,11,18; trace(A^n) n<=30; 2^n; brute force n<=16; library time " + fmt(seconds, 3) +
                    " s" + (bad.empty() ? "" : "; mismatches:" + bad)};
}

namespace {

struct DrawOutcome {
    bool separated = true, spanning = true, phi_matches = true, shadowing = true, injective = true, admissible = true,
         mean_identity = true, m_formula = true;
};

DrawOutcome check_global_draw(const SymbolicSystem& sys, const Rational& eps, std::size_t k, std::size_t n,
                              std::size_t M, std::mt19937_64& rng)
{
    DrawOutcome out;
    const auto& A = sys.transitions();
    const Rational r = sys.metric_base();
    const std::size_t a = oracle_a(r, eps);
    out.m_formula = specification_parameters(sys, eps).M_of_eps == a + oracle_mixing(A) - 1;
    IndepOptions io;
    io.validation_seed = rng();
    const auto set = build_global_indep(sys, eps, k, n, M, io);
    std::vector<Word> E;
    for (const auto& x : set.E())
        E.push_back(x.word());

    // (n, 2eps)-separation.
    if (E.size() <= 256) {
        for (std::size_t i = 0; i < E.size(); ++i)
            for (std::size_t j = i + 1; j < E.size(); ++j)
                if (!(oracle::bowen(r, n, E[i], E[j]) > 2 * eps))
                    out.separated = false;
    } else {
        std::size_t T = 0;
        while (oracle::bowen_from_disagreement(r, n, T) > 2 * eps)
            ++T;
        std::set<Word> prefixes;
        for (const auto& w : E)
            prefixes.insert(oracle::prefix(w, T));
        out.separated = prefixes.size() == E.size();
    }

    // (n, 3eps)-spanning of P_N through the prefixes that occur in P_N.
    const std::size_t N = k * (n + M);
    const std::size_t T3 = oracle::agreement_needed(r, n, 3 * eps);
    std::set<Word> centers;
    for (const auto& w : E)
        centers.insert(oracle::prefix(w, T3));
    if (T3 <= N) {
        const auto P = oracle::mat_pow(A, N - T3 + 1);
        for (const auto& w : oracle::admissible_words(A, T3))
            if (P[w.back()][w.front()] > 0 && !centers.count(w))
                out.spanning = false;
    } else {
        for (const auto& w : oracle::periodic_words(A, N))
            if (!centers.count(oracle::prefix(w, T3)))
                out.spanning = false;
    }

    // Phi against an independent construction, on all or sampled tuples.
    auto oracle_phi = [&](const IndexTuple& t) {
        Word p;
        for (std::size_t i = 0; i < k; ++i) {
            const Word block = oracle::prefix(E[t[i]], n + a);
            p.insert(p.end(), block.begin(), block.end());
            const Symbol next = E[t[(i + 1) % k]][0];
            const auto bridge = oracle::least_bridge(A, block.back(), next, M - a);
            if (!bridge)
                return Word{};
            p.insert(p.end(), bridge->begin(), bridge->end());
        }
        return p;
    };
    double total = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        total *= static_cast<double>(E.size());
    std::vector<IndexTuple> tuples;
    const bool all = total <= 4096.0;
    if (all) {
        for (std::uint64_t flat = 0; flat < static_cast<std::uint64_t>(total); ++flat)
            tuples.push_back(set.tuple_from_flat(flat));
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, E.size() - 1);
        std::set<IndexTuple> seen;
        while (tuples.size() < 300) {
            IndexTuple t(k);
            for (auto& x : t)
                x = pick(rng);
            if (seen.insert(t).second)
                tuples.push_back(t);
        }
    }
    std::set<Word> images;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::pair<Word, double>> table;
    for (const auto& w : oracle::admissible_words(A, 2))
        table.emplace_back(w, unit(rng));
    const Observable f = Observable::locally_constant(sys, 2, table);
    auto f_oracle = [&](const Word& p) {
        const Word w{p[0], p[1 % p.size()]};
        for (const auto& [key, v] : table)
            if (key == w)
                return v;
        return 0.0;
    };
    double mean_oracle = 0.0;
    for (const auto& t : tuples) {
        const Word expect = oracle_phi(t);
        const Word got = set.phi(t).word();
        if (expect != got)
            out.phi_matches = false;
        if (!oracle::cyclic_ok(A, got))
            out.admissible = false;
        for (std::size_t i = 0; i < k; ++i)
            if (!(oracle::bowen(r, n, oracle::shifted(got, i * (n + M)), E[t[i]]) < eps))
                out.shadowing = false;
        images.insert(got);
        mean_oracle += f_oracle(expect);
    }
    out.injective = images.size() == tuples.size();
    mean_oracle /= static_cast<double>(tuples.size());

    // E_{nu_P}(f) from the library's own image against the pushforward mean.
    if (all && set.materialized()) {
        double mean_lib = 0.0;
        for (const auto& p : set.image())
            mean_lib += f.evaluate(p);
        mean_lib /= static_cast<double>(set.image().size());
        out.mean_identity = std::fabs(mean_lib - mean_oracle) <= 1e-12;
    } else {
        const auto samples = sample_uniform(set, rng(), 200);
        double lib = 0.0, orc = 0.0;
        for (const auto& [t, p] : samples) {
            if (p.word() != oracle_phi(t))
                out.mean_identity = false;
            lib += f.evaluate(p);
            orc += f_oracle(oracle_phi(t));
        }
        out.mean_identity = out.mean_identity && std::fabs(lib - orc) <= 1e-9;
    }
    return out;
}

} // namespace

Verdict criterion_2()
{
    Stopwatch watch;
    std::mt19937_64 rng(0xC2C2);
    const std::vector<SymbolicSystem> systems{SymbolicSystem::full_shift(2), SymbolicSystem::golden_mean()};
    const std::vector<Rational> epsilons{Rational(1, 4), Rational(1, 8), Rational(1, 16)};
    std::size_t draws = 0, passed = 0;
    std::map<std::string, int> failures;
    while (draws < 200) {
        const auto& sys = systems[rng() % 2];
        const Rational eps = epsilons[rng() % 3];
        const std::size_t k = 1 + rng() % 4;
        const std::size_t n = 1 + rng() % 8;
        const std::size_t M = specification_parameters(sys, eps).M_of_eps + rng() % 4;
        ++draws;
        try {
            const DrawOutcome o = check_global_draw(sys, eps, k, n, M, rng);
            const bool ok = o.separated && o.spanning && o.phi_matches && o.shadowing && o.injective && o.admissible &&
                            o.mean_identity && o.m_formula;
            if (ok)
                ++passed;
            if (!o.separated) ++failures["separation"];
            if (!o.spanning) ++failures["spanning"];
            if (!o.phi_matches) ++failures["phi"];
            if (!o.shadowing) ++failures["shadowing"];
            if (!o.injective) ++failures["injectivity"];
            if (!o.admissible) ++failures["admissible"];
            if (!o.mean_identity) ++failures["mean identity"];
            if (!o.m_formula) ++failures["M(eps)"];
        } catch (const Error& e) {
            ++failures[std::string("build error ") + to_string(e.code())];
        }
    }
    const double seconds = watch.seconds();
    std::string detail = std::to_string(passed) + "/" + std::to_string(draws) + " draws pass, " + fmt(seconds, 3) + " s";
    for (const auto& [name, count] : failures)
        detail += "; " + name + " x" + std::to_string(count);
    return {passed == draws && seconds < 60.0, detail};
}

Verdict criterion_3()
{
    std::mt19937_64 rng(0xC3C3);
    const std::vector<SymbolicSystem> systems{SymbolicSystem::full_shift(2), SymbolicSystem::golden_mean()};
    const std::vector<Rational> epsilons{Rational(1, 8), Rational(1, 16)};
    std::size_t accepted = 0, passed = 0, attempts = 0, skipped = 0;
    while (accepted < 60 && attempts < 5000) {
        ++attempts;
        const auto& sys = systems[rng() % 2];
        const auto& A = sys.transitions();
        const Rational eps = epsilons[rng() % 2];
        const Rational r = sys.metric_base();
        const std::size_t a = oracle_a(r, eps);
        const std::size_t d = std::max<std::size_t>(a, 1) + rng() % 2;
        const std::size_t k = 1 + rng() % 3;
        const std::size_t n = d + rng() % 3;
        const std::size_t least = k * n;
        if (least > 16)
            continue;
        const std::size_t m = n * (k + rng() % (16 / n - k + 1));
        const auto words = oracle::admissible_words(A, d);
        CylinderSchedule schedule;
        schedule.n = n;
        for (std::size_t i = 0; i < k; ++i)
            schedule.cylinders.push_back(words[rng() % words.size()]);
        LocalIndepOptions lo;
        lo.validation_seed = rng();
        std::optional<LocalEpsIndependentSet> set;
        try {
            set.emplace(build_local_indep(sys, schedule, eps, m, lo));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::IncompatibleSchedule || e.code() == ErrorCode::WindowTooShort) {
                ++skipped;
                continue;
            }
            throw;
        }
        ++accepted;
        std::vector<int> pins(m, -1);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t t = 0; t < d; ++t)
                pins[i * n + t] = schedule.cylinders[i][t];
        std::set<Word> image;
        for (const auto& p : set->image())
            image.insert(p.word());
        bool ok = set->materialized();
        for (const auto& w : oracle::periodic_words(A, m)) {
            bool in_A = true;
            for (std::size_t t = 0; t < m; ++t)
                in_A = in_A && (pins[t] < 0 || pins[t] == w[t]);
            if (in_A && !image.count(w))
                ok = false;
        }
        const std::size_t T = oracle::agreement_needed(r, m, eps);
        for (const auto& w : image) {
            if (w.size() != m || !oracle::cyclic_ok(A, w))
                ok = false;
            if (!oracle::extendable(A, oracle::prefix(w, T), pins))
                ok = false;
        }
        if (ok)
            ++passed;
    }
    return {accepted >= 50 && passed == accepted,
            std::to_string(passed) + "/" + std::to_string(accepted) + " schedules satisfy the sandwich (" +
                std::to_string(skipped) + " incompatible draws skipped)"};
}

Verdict criterion_4()
{
    const auto full = SymbolicSystem::full_shift(2);
    const Observable h = Observable::symbol_indicator(full, 0);
    bool ok = true;
    std::string bad;
    for (std::size_t N = 1; N <= 12; ++N) {
        const auto points = enumerate_periodic(full, N);
        std::vector<BigInt> hist(N + 1, BigInt(0));
        std::vector<double> values;
        for (const auto& p : points) {
            const double s = birkhoff_sum(h, p, 0, N);
            values.push_back(s);
            hist[static_cast<std::size_t>(std::lround(s))] += 1;
        }
        const auto binom = oracle::binomial_row(N);
        Rational tv = 0;
        const BigInt total = BigInt(1) << N;
        for (std::size_t j = 0; j <= N; ++j) {
            Rational diff(BigInt(hist[j] - binom[j]), total);
            diff.canonicalize();
            tv += abs(diff);
        }
        tv /= 2;
        const MomentReport m = moments(values);
        if (tv != 0 || std::fabs(m.variance - static_cast<double>(N) / 4.0) > 1e-12) {
            ok = false;
            bad += " N=" + std::to_string(N);
        }
    }
    return {ok, "exact law of S^N 1_[0] under nu_{P_N} equals Binomial(N,1/2), TV 0, variance N/4 for N<=12" +
                    (bad.empty() ? std::string() : "; mismatch at" + bad)};
}
