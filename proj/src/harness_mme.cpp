#include "orbitclt/harness.hpp"

#include "orbitclt/error.hpp"
#include "parallel.hpp"

#include <cmath>

namespace orbitclt {

namespace {

double log_bigint(const BigInt& v)
{
    if (v <= 0)
        return -std::numeric_limits<double>::infinity();
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

std::size_t ipow(std::size_t b, std::size_t e)
{
    std::size_t r = 1;
    while (e-- > 0)
        r *= b;
    return r;
}

Word decode(std::size_t code, std::size_t len, std::size_t S)
{
    Word w(len);
    for (std::size_t i = len; i-- > 0;) {
        w[i] = static_cast<Symbol>(code % S);
        code /= S;
    }
    return w;
}

// Counts of words of length 1..max_len, indexed [len - 1][base-S code].
using WordCounts = std::vector<std::vector<double>>;

WordCounts empty_counts(std::size_t S, std::size_t max_len)
{
    WordCounts c(max_len);
    for (std::size_t L = 1; L <= max_len; ++L)
        c[L - 1].assign(ipow(S, L), 0.0);
    return c;
}

void add_counts(WordCounts& into, const WordCounts& from)
{
    for (std::size_t L = 0; L < into.size(); ++L)
        for (std::size_t c = 0; c < into[L].size(); ++c)
            into[L][c] += from[L][c];
}

void count_prefix(const PeriodicPoint& p, std::size_t S, WordCounts& c, double weight = 1.0)
{
    std::size_t code = 0;
    for (std::size_t L = 1; L <= c.size(); ++L) {
        code = code * S + p.at(L - 1);
        c[L - 1][code] += weight;
    }
}

void count_orbit(const PeriodicPoint& p, std::size_t S, WordCounts& c, double weight)
{
    for (std::size_t t = 0; t < p.period(); ++t) {
        std::size_t code = 0;
        for (std::size_t L = 1; L <= c.size(); ++L) {
            code = code * S + p.at(t + L - 1);
            c[L - 1][code] += weight;
        }
    }
}

// max over admissible words of |count / total - mu([w])|.
double max_discrepancy(const SymbolicSystem& system, const ParryMeasure& mu, const WordCounts& c, double total,
                       std::string* worst)
{
    const std::size_t S = system.num_symbols();
    double best = 0.0;
    for (std::size_t L = 1; L <= c.size(); ++L)
        for (std::size_t code = 0; code < c[L - 1].size(); ++code) {
            const Word w = decode(code, L, S);
            if (!system.is_admissible(w))
                continue;
            const double d = std::fabs(c[L - 1][code] / total - mu.cylinder(system, w));
            if (d > best || (worst && worst->empty())) {
                best = std::max(best, d);
                if (worst)
                    *worst = word_to_string(w);
            }
        }
    return best;
}

} // namespace

double periodic_cylinder_discrepancy(const SymbolicSystem& system, const ParryMeasure& mu, std::size_t n,
                                     std::size_t max_len, std::string* worst)
{
    const BigInt trace = [&] {
        const auto P = system.power(n);
        BigInt t = 0;
        for (std::size_t a = 0; a < P.size(); ++a)
            t += P[a][a];
        return t;
    }();
    if (trace == 0)
        throw Error(ErrorCode::InvalidArgument, "no periodic points of period " + std::to_string(n));
    if (worst)
        worst->clear();
    double best = 0.0;
    for (std::size_t L = 1; L <= std::min(max_len, n); ++L) {
        const auto P = system.power(n - L + 1);
        for (const Word& w : enumerate_words(system, L)) {
            const Rational freq(P[w.back()][w.front()], trace);
            const double d = std::fabs(to_double(freq) - mu.cylinder(system, w));
            if (d > best || (worst && worst->empty())) {
                best = std::max(best, d);
                if (worst)
                    *worst = word_to_string(w);
            }
        }
    }
    return best;
}

double orbit_measure_discrepancy(const SymbolicSystem& system, const ParryMeasure& mu, const PeriodicPoint& p,
                                 std::size_t max_len)
{
    WordCounts c = empty_counts(system.num_symbols(), max_len);
    count_orbit(p, system.num_symbols(), c, 1.0);
    return max_discrepancy(system, mu, c, static_cast<double>(p.period()), nullptr);
}

MmeReport run_mme_convergence(const MmePlan& plan, unsigned workers)
{
    const std::size_t L = plan.k.size();
    if (plan.eps.size() != L || plan.n.size() != L || plan.M.size() != L)
        throw Error(ErrorCode::InvalidArgument, "eps, k, n and M must have one entry per level");
    if (plan.max_word_length == 0)
        throw Error(ErrorCode::InvalidArgument, "max_word_length must be positive");
    MmeReport report;
    report.parry = parry(plan.system);
    const std::size_t S = plan.system.num_symbols();

    for (std::size_t n : plan.periodic_n) {
        MmeRow row;
        row.source = "periodic";
        row.n = n;
        row.period = n;
        row.max_discrepancy = periodic_cylinder_discrepancy(plan.system, report.parry, n, plan.max_word_length,
                                                            &row.worst_word);
        row.shift_averaged_discrepancy = row.max_discrepancy;
        report.rows.push_back(row);
    }
    for (std::size_t n = 1; n <= 60; ++n) {
        const auto P = plan.system.power(n);
        BigInt t = 0;
        for (std::size_t a = 0; a < S; ++a)
            t += P[a][a];
        report.entropy_estimates.emplace_back(n, log_bigint(t) / static_cast<double>(n));
    }

    std::vector<double> indep_disc;
    for (std::size_t l = 0; l < L; ++l) {
        IndepOptions io;
        io.enumeration_budget = plan.enumeration_budget;
        io.validation_seed = derive_seed(plan.seed, "validate-mme", l);
        const auto set = build_global_indep(plan.system, plan.eps[l], plan.k[l], plan.n[l], plan.M[l], io);
        const bool exact = set.materialized();
        const std::size_t N = exact ? set.image().size() : plan.samples;
        const std::uint64_t seed = derive_seed(plan.seed, "mme", l);
        // The orbit average over every position is costly; it uses an evenly
        // strided subset of at most this many points.
        const std::size_t orbit_points = std::min<std::size_t>(N, 2000);
        const std::size_t stride = N / orbit_points;
        const std::size_t chunks = detail::chunk_count(N);
        std::vector<WordCounts> first(chunks, empty_counts(S, plan.max_word_length));
        std::vector<WordCounts> orbit(chunks, empty_counts(S, plan.max_word_length));
        detail::parallel_tasks(chunks, workers, [&](std::size_t c) {
            IndexTuple tuple;
            Word buf;
            for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
                PeriodicPoint p;
                if (exact) {
                    p = set.image()[idx];
                } else {
                    draw_tuple(set, seed, idx, tuple);
                    set.phi_into(tuple, buf);
                    p = PeriodicPoint(buf);
                }
                count_prefix(p, S, first[c]);
                if (idx % stride == 0 && idx / stride < orbit_points)
                    count_orbit(p, S, orbit[c], 1.0);
            }
        });
        WordCounts total_first = empty_counts(S, plan.max_word_length);
        WordCounts total_orbit = empty_counts(S, plan.max_word_length);
        for (std::size_t c = 0; c < chunks; ++c) {
            add_counts(total_first, first[c]);
            add_counts(total_orbit, orbit[c]);
        }
        MmeRow row;
        row.source = "indep";
        row.l = l;
        row.n = set.n();
        row.period = set.period();
        row.exact = exact;
        row.max_discrepancy =
            max_discrepancy(plan.system, report.parry, total_first, static_cast<double>(N), &row.worst_word);
        row.shift_averaged_discrepancy =
            max_discrepancy(plan.system, report.parry, total_orbit,
                            static_cast<double>(orbit_points) * static_cast<double>(set.period()), nullptr);
        indep_disc.push_back(row.max_discrepancy);
        report.rows.push_back(row);
    }
    report.indep_decreasing = true;
    for (std::size_t l = 1; l < indep_disc.size(); ++l)
        if (indep_disc[l] > indep_disc[l - 1])
            report.indep_decreasing = false;
    return report;
}

ConcentrationReport run_birkhoff_concentration(const ConcentrationPlan& plan, unsigned workers)
{
    const std::size_t L = plan.k.size();
    if (L == 0 || plan.eps.size() != L || plan.n.size() != L || plan.M.size() != L)
        throw Error(ErrorCode::InvalidArgument, "eps, k, n and M must have one entry per level");
    if (plan.observables.size() != 1 && plan.observables.size() != L)
        throw Error(ErrorCode::InvalidArgument, "give one observable or one per level");
    const ParryMeasure mu = parry(plan.system);
    ConcentrationReport report;
    for (std::size_t l = 0; l < L; ++l) {
        const Observable& h = plan.observables.size() == 1 ? plan.observables[0] : plan.observables[l];
        IndepOptions io;
        io.enumeration_budget = plan.enumeration_budget;
        io.validation_seed = derive_seed(plan.seed, "validate-concentration", l);
        const auto set = build_global_indep(plan.system, plan.eps[l], plan.k[l], plan.n[l], plan.M[l], io);
        SamplingOptions so;
        so.samples = plan.samples;
        so.seed = derive_seed(plan.seed, "concentration", l);
        so.workers = workers;
        so.eta_grid = {};
        so.y = OscillationY::BoundOnly;
        const auto st = array_statistics(set, global_layout(set.k(), set.n(), set.M()),
                                         std::vector<const Observable*>(set.k(), &h), h, so);
        const std::size_t N = st.totals.size();
        const double period = static_cast<double>(set.period());
        ConcentrationRow row;
        row.l = l;
        row.k = set.k();
        row.n = set.n();
        row.M = set.M();
        row.N = set.period();
        row.sample_count = N;
        row.s_l_squared = st.conditions.s_l_squared;
        row.threshold = std::pow(static_cast<double>(set.k()), -0.5 + plan.eta);
        std::size_t inside = 0;
        for (double t : st.totals)
            if (std::fabs(t - st.mean_total) / period <= row.threshold)
                ++inside;
        row.mass = static_cast<double>(inside) / static_cast<double>(N);

        // Fourth moment of the first block sum over the same points.
        const bool exact = set.materialized();
        auto point = [&](std::size_t idx) {
            if (exact)
                return set.image()[idx];
            IndexTuple tuple;
            Word buf;
            draw_tuple(set, so.seed, idx, tuple);
            set.phi_into(tuple, buf);
            return PeriodicPoint(buf);
        };
        std::vector<double> b0(N);
        const std::size_t chunks = detail::chunk_count(N);
        detail::parallel_tasks(chunks, workers, [&](std::size_t c) {
            for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx)
                b0[idx] = birkhoff_sum(h, point(idx), 0, set.n());
        });
        const MomentReport m = moments(b0);
        std::vector<double> fourth(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double d = b0[i] - m.mean;
            fourth[i] = d * d * d * d;
        }
        const double m4 = pairwise_sum(fourth) / static_cast<double>(N);
        row.fourth_moment_ratio = m.variance > 0.0 ? m4 / (m.variance * m.variance) : 0.0;
        row.summability_term = row.fourth_moment_ratio / std::sqrt(static_cast<double>(set.k()));

        const std::size_t orbits = std::min(plan.orbit_samples, N);
        std::vector<double> disc(orbits);
        for (std::size_t i = 0; i < orbits; ++i)
            disc[i] = orbit_measure_discrepancy(plan.system, mu, point(i * (N / std::max<std::size_t>(orbits, 1))),
                                                plan.max_word_length);
        if (orbits > 0) {
            row.equidistribution_mean = pairwise_sum(disc) / static_cast<double>(orbits);
            row.equidistribution_max = *std::max_element(disc.begin(), disc.end());
        }
        report.rows.push_back(row);
    }
    report.mass_nondecreasing = true;
    for (std::size_t l = 1; l < report.rows.size(); ++l)
        if (report.rows[l].mass < report.rows[l - 1].mass)
            report.mass_nondecreasing = false;
    return report;
}

} // namespace orbitclt
