#include "orbitclt/harness.hpp"

#include "orbitclt/error.hpp"
#include "parallel.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

namespace orbitclt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Fixed-order reduction of per-chunk partial sums.
double reduce(const std::vector<std::vector<double>>& parts, std::size_t slot)
{
    double s = 0.0;
    for (const auto& p : parts)
        s += p[slot];
    return s;
}

} // namespace

const char* to_string(OscillationY y)
{
    switch (y) {
    case OscillationY::ProductSet:
        return "product_set";
    case OscillationY::Ambient:
        return "ambient";
    case OscillationY::BoundOnly:
        return "bound";
    }
    return "?";
}

OscillationY oscillation_y_from_string(const std::string& s)
{
    if (s == "product_set")
        return OscillationY::ProductSet;
    if (s == "ambient")
        return OscillationY::Ambient;
    if (s == "bound")
        return OscillationY::BoundOnly;
    throw Error(ErrorCode::ParseError, "unknown oscillation Y policy '" + s + "'");
}

BlockLayout global_layout(std::size_t k, std::size_t n, std::size_t M)
{
    BlockLayout layout;
    for (std::size_t i = 0; i < k; ++i) {
        layout.blocks.emplace_back(i * (n + M), n);
        if (M > 0)
            layout.gaps.emplace_back(i * (n + M) + n, M);
    }
    return layout;
}

BlockLayout local_layout(const LocalEpsIndependentSet& set)
{
    BlockLayout layout;
    for (std::size_t i = 0; i < set.blocks(); ++i)
        layout.blocks.emplace_back(i * set.window(), set.factor_data(i).window);
    return layout;
}

SetSummary summarize(const EpsIndependentSet& set)
{
    SetSummary s;
    s.kind = "global";
    s.epsilon = set.epsilon();
    s.k = set.k();
    s.n = set.n();
    s.M = set.M();
    s.period = set.period();
    s.factor_sizes = {set.E().size()};
    s.size = format_bigint(set.size());
    s.materialized = set.materialized();
    s.validation = set.validation();
    return s;
}

SetSummary summarize(const LocalEpsIndependentSet& set)
{
    SetSummary s;
    s.kind = "local";
    s.epsilon = set.epsilon();
    s.k = set.blocks();
    s.n = set.window();
    s.M = 0;
    s.period = set.period();
    for (std::size_t i = 0; i < set.blocks(); ++i)
        s.factor_sizes.push_back(set.factor_size(i));
    s.size = format_bigint(set.size());
    s.materialized = set.materialized();
    s.validation = set.validation();
    return s;
}

ArrayStatistics array_statistics(const ProductSet& set, const BlockLayout& layout,
                                 const std::vector<const Observable*>& block_observables, const Observable& gap_observable,
                                 const SamplingOptions& options)
{
    const std::size_t k = layout.blocks.size();
    if (block_observables.size() != k)
        throw Error(ErrorCode::InvalidArgument, "one observable per block is required");
    const bool exact = set.materialized();
    const std::size_t N = exact ? set.image().size() : options.samples;
    if (N == 0)
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    const auto& system = set.system();
    const Rational eps4 = 4 * set.epsilon();
    const Rational eps2 = 2 * set.epsilon();

    // Oscillation sources.
    std::vector<PeriodicPoint> ambient;
    std::span<const PeriodicPoint> Y;
    std::string y_used = "none";
    if (options.y == OscillationY::ProductSet && exact) {
        Y = set.image();
        y_used = to_string(OscillationY::ProductSet);
    } else if (options.y == OscillationY::Ambient &&
               periodic_count(system, set.period()) <= BigInt(std::to_string(options.enumeration_budget))) {
        ambient = enumerate_periodic(system, set.period(), options.enumeration_budget);
        Y = ambient;
        y_used = to_string(OscillationY::Ambient);
    }
    const bool exact_osc = y_used != "none";
    std::map<std::pair<const Observable*, std::size_t>, OscillationTable> tables;
    std::vector<const OscillationTable*> block_table(k, nullptr);
    std::vector<double> block_bound(k, 0.0);
    std::optional<OscillationTable> uniform_table;
    double uniform_bound = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto key = std::make_pair(block_observables[i], layout.blocks[i].second);
        if (exact_osc) {
            auto it = tables.find(key);
            if (it == tables.end())
                it = tables.emplace(key, OscillationTable(system, *key.first, eps4, key.second, Y)).first;
            block_table[i] = &it->second;
        } else {
            block_bound[i] = oscillation_bound(system, *key.first, eps4, key.second);
        }
    }
    if (exact_osc)
        uniform_table.emplace(system, *block_observables[0], eps2, layout.blocks[0].second, Y);
    else
        uniform_bound = oscillation_bound(system, *block_observables[0], eps2, layout.blocks[0].second);

    auto load = [&](std::size_t idx, IndexTuple& tuple, Word& buf) {
        if (exact)
            return set.image()[idx];
        draw_tuple(set, options.seed, idx, tuple);
        set.phi_into(tuple, buf);
        return PeriodicPoint(buf);
    };
    auto block_sums = [&](const PeriodicPoint& p, std::vector<double>& B) {
        for (std::size_t i = 0; i < k; ++i)
            B[i] = birkhoff_sum(*block_observables[i], p, layout.blocks[i].first, layout.blocks[i].second);
        double g = 0.0;
        for (const auto& [start, len] : layout.gaps)
            g += birkhoff_sum(gap_observable, p, start, len);
        return g;
    };

    const std::size_t chunks = detail::chunk_count(N);
    ArrayStatistics out;
    out.totals.assign(N, 0.0);

    // Pass 1: means. Slots 0..k-1 blocks, k gaps, k+1 totals.
    std::vector<std::vector<double>> p1(chunks, std::vector<double>(k + 2, 0.0));
    detail::parallel_tasks(chunks, options.workers, [&](std::size_t c) {
        IndexTuple tuple;
        Word buf;
        std::vector<double> B(k);
        for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
            const PeriodicPoint p = load(idx, tuple, buf);
            const double g = block_sums(p, B);
            double total = g;
            for (std::size_t i = 0; i < k; ++i) {
                p1[c][i] += B[i];
                total += B[i];
            }
            p1[c][k] += g;
            p1[c][k + 1] += total;
            out.totals[idx] = total;
        }
    });
    const double w = 1.0 / static_cast<double>(N);
    std::vector<double> mean(k + 2);
    for (std::size_t s = 0; s < k + 2; ++s)
        mean[s] = reduce(p1, s) * w;
    out.mean_total = mean[k + 1];

    // Pass 2: variances and oscillation moments. Slots 0..k-1 block
    // variances, k gap variance, k+1 sum omega, k+2 sum omega^2, k+3 uniform omega^2.
    std::vector<std::vector<double>> p2(chunks, std::vector<double>(k + 4, 0.0));
    detail::parallel_tasks(chunks, options.workers, [&](std::size_t c) {
        IndexTuple tuple;
        Word buf;
        std::vector<double> B(k);
        for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
            const PeriodicPoint p = load(idx, tuple, buf);
            const double g = block_sums(p, B);
            for (std::size_t i = 0; i < k; ++i) {
                const double d = B[i] - mean[i];
                p2[c][i] += d * d;
                const double om = exact_osc ? block_table[i]->query(p, layout.blocks[i].first, B[i]) : block_bound[i];
                p2[c][k + 1] += om;
                p2[c][k + 2] += om * om;
            }
            p2[c][k] += (g - mean[k]) * (g - mean[k]);
            const double u = exact_osc ? uniform_table->query(p, 0, B[0]) : uniform_bound;
            p2[c][k + 3] += u * u;
        }
    });
    std::vector<double> var(k);
    double s2 = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        var[i] = reduce(p2, i) * w;
        s2 += var[i];
    }
    const double s = std::sqrt(s2);
    ConditionReport& cr = out.conditions;
    cr.exact = exact;
    cr.sample_count = N;
    cr.s_l = s;
    cr.s_l_squared = s2;
    cr.oscillation_mode = exact_osc ? "exact" : "bound";
    cr.oscillation_y = y_used;
    const double gap_var = reduce(p2, k) * w;
    std::size_t max_gap = 0;
    for (const auto& g : layout.gaps)
        max_gap = std::max(max_gap, g.second);
    const double sup_h = gap_observable.sup_abs();
    const double kk = static_cast<double>(k), mm = static_cast<double>(max_gap);
    if (s2 > 0.0) {
        cr.oscillation_ratio_j1 = reduce(p2, k + 1) * w / s;
        cr.oscillation_ratio_j2 = reduce(p2, k + 2) * w / s2;
        cr.gap_ratio = gap_var / s2;
        cr.gap_hypothesis = kk * kk * mm * mm * sup_h * sup_h / s2;
    } else {
        cr.oscillation_ratio_j1 = cr.oscillation_ratio_j2 = cr.gap_ratio = kNaN;
        cr.gap_hypothesis = max_gap == 0 ? 0.0 : kNaN;
    }
    cr.uniform_oscillation_ratio = var[0] > 0.0 ? reduce(p2, k + 3) * w / var[0] : kNaN;

    // Pass 3: Lindeberg function and negligibility on the eta grid.
    const auto& grid = options.eta_grid;
    const std::size_t G = grid.size();
    std::vector<std::vector<double>> p3(chunks, std::vector<double>(G * (k + 1), 0.0));
    if (s2 > 0.0)
        detail::parallel_tasks(chunks, options.workers, [&](std::size_t c) {
            IndexTuple tuple;
            Word buf;
            std::vector<double> B(k);
            for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
                const PeriodicPoint p = load(idx, tuple, buf);
                block_sums(p, B);
                for (std::size_t i = 0; i < k; ++i) {
                    const double d = std::fabs(B[i] - mean[i]);
                    for (std::size_t e = 0; e < G; ++e) {
                        const double cut = grid[e] * s;
                        if (d > cut)
                            p3[c][e * (k + 1)] += d * d;
                        if (d >= cut)
                            p3[c][e * (k + 1) + 1 + i] += 1.0;
                    }
                }
            }
        });
    double window_sup = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        window_sup = std::max(window_sup, static_cast<double>(layout.blocks[i].second) * block_observables[i]->sup_abs());
    for (std::size_t e = 0; e < G; ++e) {
        EtaRow row;
        row.eta = grid[e];
        if (s2 > 0.0) {
            row.lindeberg_ratio = reduce(p3, e * (k + 1)) * w / s2;
            double worst = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                worst = std::max(worst, reduce(p3, e * (k + 1) + 1 + i) * w);
            row.negligibility = worst;
        } else {
            row.lindeberg_ratio = row.negligibility = kNaN;
        }
        row.uniform_bound_holds = s2 > 0.0 && 2.0 * window_sup <= grid[e] * s;
        cr.eta.push_back(row);
    }
    return out;
}

void GlobalPlan::validate() const
{
    const std::size_t L = k.size();
    if (L == 0)
        throw Error(ErrorCode::InvalidArgument, "plan has no levels");
    if (eps.size() != L || n.size() != L || M.size() != L)
        throw Error(ErrorCode::InvalidArgument, "eps, k, n and M must have one entry per level");
    if (observables.size() != 1 && observables.size() != L)
        throw Error(ErrorCode::InvalidArgument, "give one observable or one per level");
    if (samples == 0)
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    for (std::size_t l = 0; l < L; ++l)
        if (M[l] < specification_parameters(system, eps[l]).M_of_eps)
            throw Error(ErrorCode::GapTooShort, "level " + std::to_string(l) + ": M below M(eps)");
}

void LocalPlan::validate() const
{
    const std::size_t L = schedules.size();
    if (L == 0)
        throw Error(ErrorCode::InvalidArgument, "plan has no levels");
    if (eps.size() != L || m.size() != L || block_observables.size() != L)
        throw Error(ErrorCode::InvalidArgument, "eps, m, schedules and observables must have one entry per level");
    for (std::size_t l = 0; l < L; ++l) {
        const auto& obs = block_observables[l];
        if (obs.size() != 1 && obs.size() != schedules[l].k())
            throw Error(ErrorCode::InvalidArgument, "level " + std::to_string(l) +
                                                        ": give one observable or one per block");
        if (schedules[l].n < specification_parameters(system, eps[l]).N_of_eps)
            throw Error(ErrorCode::WindowTooShort, "level " + std::to_string(l) + ": n below N(eps)");
    }
    if (samples == 0)
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
}

namespace {

void finish_run(CLTRunResult& r, const ArrayStatistics& st)
{
    r.conditions = st.conditions;
    r.mean_total = st.mean_total;
    r.degenerate = !(st.conditions.s_l > 0.0);
    if (!r.degenerate) {
        r.normalized.resize(st.totals.size());
        for (std::size_t i = 0; i < st.totals.size(); ++i)
            r.normalized[i] = (st.totals[i] - st.mean_total) / st.conditions.s_l;
        r.ks = ks_distance(r.normalized, Reference::standard_normal());
    }
}

IndepOptions indep_options(std::uint64_t budget, std::uint64_t materialize, std::uint64_t seed, std::size_t l,
                           const char* label)
{
    IndepOptions o;
    o.enumeration_budget = budget;
    o.materialize_budget = materialize;
    o.validation_seed = derive_seed(seed, label, l);
    return o;
}

} // namespace

std::vector<CLTRunResult> run_global_clt(const GlobalPlan& plan, unsigned workers)
{
    plan.validate();
    std::vector<CLTRunResult> results;
    for (std::size_t l = 0; l < plan.levels(); ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto set = build_global_indep(plan.system, plan.eps[l], plan.k[l], plan.n[l], plan.M[l],
                                            indep_options(plan.enumeration_budget, plan.materialize_budget, plan.seed,
                                                          l, "validate-global"));
        const Observable& h = plan.observable(l);
        SamplingOptions so{plan.samples, derive_seed(plan.seed, "clt-global", l), workers, plan.eta_grid, plan.y,
                           plan.enumeration_budget};
        const auto st = array_statistics(set, global_layout(set.k(), set.n(), set.M()),
                                         std::vector<const Observable*>(set.k(), &h), h, so);
        CLTRunResult r;
        r.l = l;
        r.set = summarize(set);
        finish_run(r, st);
        r.wall_seconds = seconds_since(t0);
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<CLTRunResult> run_weighted_clt(const GlobalPlan& plan, unsigned workers)
{
    plan.validate();
    std::vector<CLTRunResult> results;
    for (std::size_t l = 0; l < plan.levels(); ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto set = build_global_indep(plan.system, plan.eps[l], plan.k[l], plan.n[l], plan.M[l],
                                            indep_options(plan.enumeration_budget, plan.materialize_budget, plan.seed,
                                                          l, "validate-weighted"));
        if (!set.materialized())
            throw Error(ErrorCode::BudgetExceeded, "weighted runs need |P| within the materialize budget (level " +
                                                       std::to_string(l) + ")");
        const WeightedMeasure wm = weighted_measure(set, plan.enumeration_budget);
        const Observable& h = plan.observable(l);
        SamplingOptions so{plan.samples, derive_seed(plan.seed, "clt-weighted", l), workers, plan.eta_grid, plan.y,
                           plan.enumeration_budget};
        const auto st = array_statistics(set, global_layout(set.k(), set.n(), set.M()),
                                         std::vector<const Observable*>(set.k(), &h), h, so);
        CLTRunResult r;
        r.l = l;
        r.set = summarize(set);
        r.conditions = st.conditions;
        r.degenerate = !(st.conditions.s_l > 0.0);

        std::vector<double> totals(wm.support.size()), probs(wm.support.size());
        std::vector<double> terms(wm.support.size());
        for (std::size_t q = 0; q < wm.support.size(); ++q) {
            totals[q] = birkhoff_sum(h, wm.support[q], 0, set.period());
            probs[q] = to_double(wm.weights[q]);
            terms[q] = probs[q] * totals[q];
        }
        const double mean_w = pairwise_sum(terms);
        for (std::size_t q = 0; q < terms.size(); ++q)
            terms[q] = probs[q] * (totals[q] - mean_w) * (totals[q] - mean_w);
        const double var_w = pairwise_sum(terms);
        r.mean_total = mean_w;
        const double s2 = st.conditions.s_l_squared;
        const double kk = static_cast<double>(set.k()), mm = static_cast<double>(set.M());
        r.extra["uniform_mean"] = st.mean_total;
        r.extra["weighted_mean"] = mean_w;
        r.extra["mean_difference"] = std::fabs(mean_w - st.mean_total);
        r.extra["support_size"] = static_cast<double>(wm.support.size());
        r.extra["uniform_gap_hypothesis"] = s2 > 0.0 ? kk * kk * mm * mm * h.sup_abs() * h.sup_abs() / s2 : kNaN;
        r.extra["weighted_variance_ratio"] = s2 > 0.0 ? var_w / s2 : kNaN;
        if (!r.degenerate) {
            r.normalized.resize(totals.size());
            for (std::size_t q = 0; q < totals.size(); ++q)
                r.normalized[q] = (totals[q] - mean_w) / st.conditions.s_l;
            r.ks = ks_distance(r.normalized, probs, Reference::standard_normal());
        }
        r.wall_seconds = seconds_since(t0);
        results.push_back(std::move(r));
    }
    return results;
}

std::vector<CLTRunResult> run_local_clt(const LocalPlan& plan, unsigned workers)
{
    plan.validate();
    std::vector<CLTRunResult> results;
    for (std::size_t l = 0; l < plan.levels(); ++l) {
        const auto t0 = std::chrono::steady_clock::now();
        LocalIndepOptions lo;
        lo.enumeration_budget = plan.enumeration_budget;
        lo.materialize_budget = plan.materialize_budget;
        lo.validation_seed = derive_seed(plan.seed, "validate-local", l);
        const auto set = build_local_indep(plan.system, plan.schedules[l], plan.eps[l], plan.m[l], lo);
        const auto& obs = plan.block_observables[l];
        std::vector<const Observable*> per_block(set.blocks());
        for (std::size_t i = 0; i < set.blocks(); ++i)
            per_block[i] = obs.size() == 1 ? &obs[0] : &obs[i];
        SamplingOptions so{plan.samples, derive_seed(plan.seed, "clt-local", l), workers, plan.eta_grid, plan.y,
                           plan.enumeration_budget};
        const auto st = array_statistics(set, local_layout(set), per_block, *per_block[0], so);
        CLTRunResult r;
        r.l = l;
        r.set = summarize(set);
        finish_run(r, st);
        r.wall_seconds = seconds_since(t0);
        results.push_back(std::move(r));
    }
    return results;
}

} // namespace orbitclt
