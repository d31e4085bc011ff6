#include "orbitclt/harness.hpp"

#include "orbitclt/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

namespace orbitclt {

PinnedSampler::PinnedSampler(const SymbolicSystem& system, std::vector<int> pins)
    : system_(&system), pins_(std::move(pins)), m_(pins_.size()), s_(system.num_symbols())
{
    if (m_ == 0)
        throw Error(ErrorCode::InvalidArgument, "pinned sampler needs a positive period");
    for (int p : pins_)
        if (p >= static_cast<int>(s_))
            throw Error(ErrorCode::InvalidArgument, "pin symbol out of range");
    auto pin_ok = [&](std::size_t t, std::size_t a) { return pins_[t] < 0 || pins_[t] == static_cast<int>(a); };
    std::vector<double> log_weight(s_, -std::numeric_limits<double>::infinity());
    scaled_.assign(s_, {});
    for (std::size_t s0 = 0; s0 < s_; ++s0) {
        if (!pin_ok(0, s0))
            continue;
        auto& b = scaled_[s0];
        b.assign(m_ * s_, 0.0);
        double log_scale = 0.0;
        for (std::size_t t = m_; t-- > 0;) {
            double top = 0.0;
            for (std::size_t a = 0; a < s_; ++a) {
                if (!pin_ok(t, a) || (t == 0 && a != s0))
                    continue;
                double v = 0.0;
                if (t + 1 == m_) {
                    v = system.allowed(static_cast<Symbol>(a), static_cast<Symbol>(s0)) ? 1.0 : 0.0;
                } else {
                    for (std::size_t c = 0; c < s_; ++c)
                        if (system.allowed(static_cast<Symbol>(a), static_cast<Symbol>(c)))
                            v += b[(t + 1) * s_ + c];
                }
                b[t * s_ + a] = v;
                top = std::max(top, v);
            }
            if (top == 0.0)
                break;
            for (std::size_t a = 0; a < s_; ++a)
                b[t * s_ + a] /= top;
            log_scale += std::log(top);
            if (t == 0)
                log_weight[s0] = log_scale;
        }
    }
    const double best = *std::max_element(log_weight.begin(), log_weight.end());
    start_weight_.assign(s_, 0.0);
    if (std::isfinite(best)) {
        empty_ = false;
        for (std::size_t s0 = 0; s0 < s_; ++s0)
            start_weight_[s0] = std::isfinite(log_weight[s0]) ? std::exp(log_weight[s0] - best) : 0.0;
    }
}

namespace {

std::size_t pick(CounterRng& rng, const double* weights, std::size_t count, std::size_t stride = 1)
{
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        total += weights[i * stride];
    double u = rng.uniform01() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double w = weights[i * stride];
        if (w <= 0.0)
            continue;
        last = i;
        if (u < w)
            return i;
        u -= w;
    }
    return last;
}

} // namespace

void PinnedSampler::draw(CounterRng& rng, Word& out) const
{
    if (empty_)
        throw Error(ErrorCode::EmptyInput, "no periodic point carries these pins");
    out.resize(m_);
    const std::size_t s0 = pick(rng, start_weight_.data(), s_);
    out[0] = static_cast<Symbol>(s0);
    const auto& b = scaled_[s0];
    std::vector<double> w(s_);
    for (std::size_t t = 1; t < m_; ++t) {
        for (std::size_t c = 0; c < s_; ++c)
            w[c] = system_->allowed(out[t - 1], static_cast<Symbol>(c)) ? b[t * s_ + c] : 0.0;
        out[t] = static_cast<Symbol>(pick(rng, w.data(), s_));
    }
}

namespace {

// Distribution of the block sum S^n h for one (start cell, end cell) pair.
struct BlockType {
    std::vector<double> values;
    std::vector<double> weights;
    std::vector<double> cumulative;
    BigInt count = 0;
    double total_weight = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double third = 0.0; // absolute third central moment
};

void finish_type(BlockType& t)
{
    if (t.total_weight <= 0.0)
        return;
    double e = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i)
        e += t.weights[i] * t.values[i];
    e /= t.total_weight;
    double v = 0.0, m3 = 0.0;
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        const double d = t.values[i] - e;
        v += t.weights[i] * d * d;
        m3 += t.weights[i] * std::fabs(d) * d * d;
    }
    t.cumulative.resize(t.weights.size());
    double run = 0.0;
    for (std::size_t i = 0; i < t.weights.size(); ++i) {
        run += t.weights[i];
        t.cumulative[i] = run;
    }
    t.mean = e;
    t.variance = v / t.total_weight;
    t.third = m3 / t.total_weight;
}

struct LevelTables {
    std::size_t u = 0;
    std::vector<BlockType> regular; // index a * u + b
    std::vector<BlockType> last;
    bool has_last = false;
    const BlockType& last_type(std::size_t a, std::size_t b) const
    {
        return has_last ? last[a * u + b] : regular[a * u + b];
    }
};

LevelTables block_tables(const SymbolicSystem& system, const std::vector<Word>& cylinders, std::size_t n,
                         std::size_t k, std::size_t j, const Observable& h, std::uint64_t budget)
{
    const std::size_t u = cylinders.size();
    const std::size_t d = cylinders[0].size();
    LevelTables T;
    T.u = u;
    T.regular.assign(u * u, {});
    T.has_last = j > k * n;
    if (T.has_last)
        T.last.assign(u * u, {});
    std::map<Word, std::size_t> index;
    for (std::size_t a = 0; a < u; ++a)
        index[cylinders[a]] = a;
    const std::size_t steps = T.has_last ? j - (k * n + d - 1) : 0;
    const CountMatrix P = T.has_last ? system.power(steps) : CountMatrix{};
    for (const Word& w : enumerate_words(system, n + d, budget)) {
        const Word head(w.begin(), w.begin() + d);
        const Word tail(w.begin() + n, w.end());
        const std::size_t a = index.at(head);
        const double value = birkhoff_sum(h, PeriodicPoint(w), 0, n);
        auto& reg = T.regular[a * u + index.at(tail)];
        reg.values.push_back(value);
        reg.weights.push_back(1.0);
        reg.count += 1;
        reg.total_weight += 1.0;
        if (T.has_last)
            for (std::size_t b = 0; b < u; ++b) {
                const BigInt& c = P[w.back()][cylinders[b][0]];
                if (c == 0)
                    continue;
                auto& lt = T.last[a * u + b];
                lt.values.push_back(value);
                lt.weights.push_back(to_double(Rational(c)));
                lt.count += c;
                lt.total_weight += lt.weights.back();
            }
    }
    for (auto& t : T.regular)
        finish_type(t);
    for (auto& t : T.last)
        finish_type(t);
    return T;
}

// Closed walks of k edges (k - 1 regular, then one last edge back to the
// start); returns the extreme total variance over nonempty cells.
double extreme_variance(const LevelTables& T, std::size_t k, bool maximize)
{
    const double none = maximize ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    auto better = [&](double x, double y) { return maximize ? std::max(x, y) : std::min(x, y); };
    const std::size_t u = T.u;
    double best = none;
    for (std::size_t a = 0; a < u; ++a) {
        std::vector<double> f(u, none);
        f[a] = 0.0;
        for (std::size_t step = 0; step + 1 < k; ++step) {
            std::vector<double> g(u, none);
            for (std::size_t x = 0; x < u; ++x) {
                if (f[x] == none)
                    continue;
                for (std::size_t y = 0; y < u; ++y)
                    if (T.regular[x * u + y].total_weight > 0.0)
                        g[y] = better(g[y], f[x] + T.regular[x * u + y].variance);
            }
            f = std::move(g);
        }
        for (std::size_t x = 0; x < u; ++x)
            if (f[x] != none && T.last_type(x, a).total_weight > 0.0)
                best = better(best, f[x] + T.last_type(x, a).variance);
    }
    return best;
}

// Backward products R_i = W^{k-1-i} W_last, each rescaled by its largest entry.
struct CellChain {
    std::size_t u = 0, k = 0;
    std::vector<std::vector<double>> R;
    std::vector<double> W;
    std::vector<double> start;

    CellChain(const LevelTables& T, std::size_t k_) : u(T.u), k(k_)
    {
        W.assign(u * u, 0.0);
        std::vector<double> WL(u * u, 0.0);
        for (std::size_t i = 0; i < u * u; ++i) {
            W[i] = T.regular[i].total_weight;
            WL[i] = T.last_type(i / u, i % u).total_weight;
        }
        R.assign(k, {});
        R[k - 1] = WL;
        for (std::size_t i = k - 1; i-- > 0;) {
            std::vector<double> next(u * u, 0.0);
            double top = 0.0;
            for (std::size_t x = 0; x < u; ++x)
                for (std::size_t z = 0; z < u; ++z) {
                    double s = 0.0;
                    for (std::size_t y = 0; y < u; ++y)
                        s += W[x * u + y] * R[i + 1][y * u + z];
                    next[x * u + z] = s;
                    top = std::max(top, s);
                }
            if (top > 0.0)
                for (double& v : next)
                    v /= top;
            R[i] = std::move(next);
        }
        start.assign(u, 0.0);
        for (std::size_t a = 0; a < u; ++a)
            start[a] = R[0][a * u + a];
    }

    void draw(CounterRng& rng, std::vector<std::size_t>& cells) const
    {
        cells.resize(k);
        cells[0] = pick(rng, start.data(), u);
        std::vector<double> w(u);
        for (std::size_t i = 1; i < k; ++i) {
            for (std::size_t b = 0; b < u; ++b)
                w[b] = W[cells[i - 1] * u + b] * R[i][b * u + cells[0]];
            cells[i] = pick(rng, w.data(), u);
        }
    }
};

double draw_value(CounterRng& rng, const BlockType& t)
{
    const double u = rng.uniform01() * t.cumulative.back();
    const auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), u);
    return t.values[std::min<std::size_t>(it - t.cumulative.begin(), t.values.size() - 1)];
}

double cell_variance(const LevelTables& T, const std::vector<std::size_t>& cells, std::size_t k)
{
    const std::size_t u = T.u;
    double v = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i)
        v += T.regular[cells[i] * u + cells[i + 1]].variance;
    const BlockType& wrap = T.last_type(cells[k - 1], cells[0]);
    if (wrap.total_weight > 0.0)
        v += wrap.variance;
    else if (T.regular[cells[k - 1] * u + cells[0]].total_weight > 0.0)
        v += T.regular[cells[k - 1] * u + cells[0]].variance;
    else
        return std::numeric_limits<double>::quiet_NaN();
    return v;
}

void check_cylinders(const SymbolicSystem& system, const std::vector<Word>& cylinders)
{
    if (cylinders.empty() || cylinders[0].empty())
        throw Error(ErrorCode::InvalidArgument, "mixture cells need cylinders of positive depth");
    const std::size_t d = cylinders[0].size();
    std::set<Word> given;
    for (const Word& c : cylinders) {
        if (c.size() != d)
            throw Error(ErrorCode::InvalidArgument, "mixture cylinders must share one depth");
        if (!given.insert(c).second)
            throw Error(ErrorCode::InvalidArgument, "mixture cylinders must be distinct");
    }
    const auto all = enumerate_words(system, d);
    if (std::set<Word>(all.begin(), all.end()) != given)
        throw Error(ErrorCode::InvalidArgument, "mixture cylinders must partition X (all admissible words of one depth)");
}

} // namespace

MixtureReport run_mixture_clt(const MixturePlan& plan, unsigned workers)
{
    check_cylinders(plan.system, plan.cylinders);
    const std::size_t L = plan.n.size();
    if (L == 0 || plan.k.size() != L)
        throw Error(ErrorCode::InvalidArgument, "n and k must have one entry per level");
    if (plan.observables.size() != 1 && plan.observables.size() != L)
        throw Error(ErrorCode::InvalidArgument, "give one observable or one per level");
    if (plan.samples == 0)
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    const std::size_t d = plan.cylinders[0].size();
    const std::size_t u = plan.cylinders.size();
    const ParryMeasure mu = parry(plan.system);

    MixtureReport report;
    std::optional<LevelTables> prev_tables;
    std::size_t prev_k = 0, prev_n = 0;
    double prev_s = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t n = plan.n[l], k = plan.k[l];
        const Observable& h = plan.observables.size() == 1 ? plan.observables[0] : plan.observables[l];
        if (n < d)
            throw Error(ErrorCode::InvalidArgument, "block length must be at least the cylinder depth");
        if (k == 0)
            throw Error(ErrorCode::InvalidArgument, "k must be positive");
        if (h.read_depth() > d + 1)
            throw Error(ErrorCode::InvalidArgument, "observable reads " + std::to_string(h.read_depth()) +
                                                        " symbols; mixture cells of depth " + std::to_string(d) +
                                                        " allow at most " + std::to_string(d + 1));
        std::size_t j = std::max(plan.j, k * n);
        j = (j + n - 1) / n * n;

        const LevelTables T = block_tables(plan.system, plan.cylinders, n, k, j, h, plan.enumeration_budget);
        const CellChain chain(T, k);
        MixtureLevel lv;
        lv.l = l;
        lv.n = n;
        lv.k = k;
        lv.j = j;
        lv.sample_count = plan.samples;
        lv.cell_variance_max = extreme_variance(T, k, true);
        lv.cell_variance_min = extreme_variance(T, k, false);
        if (lv.cell_variance_min > 0.0)
            lv.variance_ratio = lv.cell_variance_max / lv.cell_variance_min;
        lv.s_l = std::sqrt(std::max(lv.cell_variance_max, 0.0));
        for (const BlockType& t : T.regular)
            if (t.total_weight > 0.0 && t.variance > 0.0)
                lv.third_moment_constant = std::max(lv.third_moment_constant, t.third / std::pow(t.variance, 1.5));
        for (const BlockType& t : T.last)
            if (t.total_weight > 0.0 && t.variance > 0.0)
                lv.third_moment_constant = std::max(lv.third_moment_constant, t.third / std::pow(t.variance, 1.5));

        double covered = 0.0;
        for (const Word& c : plan.cylinders)
            covered += mu.cylinder(plan.system, c);
        lv.coverage_deficiency = 1.0 - covered;
        lv.coverage_deficiency_times_k = lv.coverage_deficiency * static_cast<double>(k);
        {
            // Cells of A ∩ P_j counted by exact integer transfer products.
            std::vector<BigInt> Wm(u * u), M(u * u);
            for (std::size_t i = 0; i < u * u; ++i) {
                Wm[i] = T.regular[i].count;
                M[i] = T.last_type(i / u, i % u).count;
            }
            for (std::size_t step = 0; step + 1 < k; ++step) {
                std::vector<BigInt> next(u * u, BigInt(0));
                for (std::size_t x = 0; x < u; ++x)
                    for (std::size_t y = 0; y < u; ++y)
                        for (std::size_t z = 0; z < u; ++z)
                            next[x * u + z] += Wm[x * u + y] * M[y * u + z];
                M = std::move(next);
            }
            BigInt cells = 0;
            for (std::size_t a = 0; a < u; ++a)
                cells += M[a * u + a];
            lv.periodic_coverage = to_double(Rational(cells, periodic_count(plan.system, j)));
        }
        {
            // Radius r^d in d_{kn}: agreement on kn + d - 1 symbols covers every pin.
            Rational radius = 1;
            for (std::size_t i = 0; i < d; ++i)
                radius *= plan.system.metric_base();
            const std::size_t agree = ball_agreement_length(plan.system, k * n, radius);
            lv.thickening_ratio = agree >= (k - 1) * n + d ? 1.0 : std::numeric_limits<double>::quiet_NaN();
        }

        // Pooled per-cell centred sums.
        const std::uint64_t seed = derive_seed(plan.seed, "mixture", l);
        const std::size_t N = plan.samples;
        std::vector<double> z(N);
        std::vector<std::uint64_t> cell_hash(N);
        const bool degenerate = !(lv.s_l > 0.0);
        const std::size_t chunks = detail::chunk_count(N);
        detail::parallel_tasks(chunks, workers, [&](std::size_t c) {
            std::vector<std::size_t> cells;
            for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
                CounterRng rng(seed, idx);
                chain.draw(rng, cells);
                double total = 0.0, mean = 0.0;
                std::uint64_t hsh = 0;
                for (std::size_t i = 0; i < k; ++i) {
                    const BlockType& t = i + 1 < k ? T.regular[cells[i] * u + cells[i + 1]] : T.last_type(cells[i], cells[0]);
                    total += draw_value(rng, t);
                    mean += t.mean;
                    hsh = splitmix64(hsh ^ cells[i]);
                }
                z[idx] = degenerate ? 0.0 : (total - mean) / lv.s_l;
                cell_hash[idx] = hsh;
            }
        });
        lv.distinct_cells_sampled = std::unordered_set<std::uint64_t>(cell_hash.begin(), cell_hash.end()).size();

        // Reference atoms from an independent stream of cell draws, binned to 1e-3.
        const std::uint64_t cell_seed = derive_seed(plan.seed, "mixture-cells", l);
        std::vector<double> sigma(N), prev_diff(N, std::numeric_limits<double>::quiet_NaN());
        const bool compare_prev = prev_tables && prev_n == n && prev_k <= k && prev_s > 0.0 && !degenerate;
        detail::parallel_tasks(chunks, workers, [&](std::size_t c) {
            std::vector<std::size_t> cells;
            for (std::size_t idx = c * detail::kChunk; idx < std::min(N, (c + 1) * detail::kChunk); ++idx) {
                CounterRng rng(cell_seed, idx);
                chain.draw(rng, cells);
                const double v = cell_variance(T, cells, k);
                sigma[idx] = degenerate ? 0.0 : std::sqrt(std::max(v, 0.0)) / lv.s_l;
                if (compare_prev) {
                    const double pv = cell_variance(*prev_tables, cells, prev_k);
                    if (!std::isnan(pv))
                        prev_diff[idx] = std::fabs(sigma[idx] - std::sqrt(std::max(pv, 0.0)) / prev_s);
                }
            }
        });
        std::map<long long, std::size_t> bins;
        for (double s : sigma)
            ++bins[std::llround(s * 1000.0)];
        for (const auto& [key, count] : bins)
            lv.atoms.push_back({static_cast<double>(key) / 1000.0,
                                static_cast<double>(count) / static_cast<double>(N)});
        if (compare_prev) {
            std::vector<double> kept;
            for (double x : prev_diff)
                if (!std::isnan(x))
                    kept.push_back(x);
            if (!kept.empty())
                lv.sigma_field_l1_change = pairwise_sum(kept) / static_cast<double>(kept.size());
        }
        if (degenerate) {
            lv.ks_mixture = lv.ks_single_normal = std::numeric_limits<double>::quiet_NaN();
        } else {
            lv.ks_mixture = ks_distance(z, Reference::mixture(lv.atoms)).ks_statistic;
            lv.ks_single_normal = ks_distance(z, Reference::standard_normal()).ks_statistic;
            lv.normalized = std::move(z);
        }
        report.levels.push_back(std::move(lv));
        prev_tables = T;
        prev_k = k;
        prev_n = n;
        prev_s = report.levels.back().s_l;
    }
    return report;
}

WildReport check_wildly_oscillating(const WildPlan& plan, unsigned workers)
{
    const std::size_t L = plan.n.size();
    if (L == 0 || plan.W.size() != L || plan.eps.size() != L || plan.partition_depth.size() != L)
        throw Error(ErrorCode::InvalidArgument, "partition_depth, W, n and eps must have one entry per level");
    if (plan.cells == 0 || plan.samples_per_cell < 2)
        throw Error(ErrorCode::InvalidArgument, "need at least one cell and two samples per cell");
    const auto& system = plan.system;
    const Observable& h = plan.observable;
    WildReport report;
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t n = plan.n[l], W = plan.W[l], depth = plan.partition_depth[l];
        if (n == 0 || W < n)
            throw Error(ErrorCode::InvalidArgument, "need W >= n >= 1");
        if (depth > n)
            throw Error(ErrorCode::InvalidArgument, "partition depth may not exceed n");
        Rational diameter = 1;
        for (std::size_t i = 0; i < depth; ++i)
            diameter *= system.metric_base();
        if (!(diameter < plan.eps[l]))
            throw Error(ErrorCode::InvalidArgument, "partition diameter must be below eps");
        const std::size_t k = W / n;
        WildLevel lv;
        lv.l = l;
        lv.k = k;
        lv.n = n;
        lv.W = W;
        lv.depth = depth;
        lv.epsilon = plan.eps[l];
        lv.cells_sampled = plan.cells;

        // Cells of the join are read off points drawn from nu_{P_W}.
        const PinnedSampler ambient(system, std::vector<int>(W, -1));
        const std::uint64_t seed = derive_seed(plan.seed, "wild", l);
        struct CellStats {
            double var_total = 0.0;
            double var_short = 0.0;
        };
        std::vector<CellStats> stats(plan.cells);
        detail::parallel_tasks(plan.cells, workers, [&](std::size_t c) {
            CounterRng rng(seed, c);
            Word x;
            ambient.draw(rng, x);
            std::vector<int> pins(W, -1);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t t = 0; t < depth; ++t)
                    pins[i * n + t] = x[i * n + t];
            const PinnedSampler cell(system, pins);
            CounterRng inner(derive_seed(seed, "cell", c), 0);
            const std::size_t S = plan.samples_per_cell;
            std::vector<double> total(S);
            std::vector<std::vector<double>> prefix(n, std::vector<double>(S, 0.0));
            Word w;
            for (std::size_t s = 0; s < S; ++s) {
                cell.draw(inner, w);
                const PeriodicPoint p(w);
                double acc = 0.0;
                for (std::size_t r = 1; r < n; ++r) {
                    acc += h.evaluate(p, r - 1);
                    prefix[r][s] = acc;
                }
                total[s] = birkhoff_sum(h, p, 0, k * n);
            }
            stats[c].var_total = moments(total).variance;
            for (std::size_t r = 1; r < n; ++r)
                stats[c].var_short = std::max(stats[c].var_short, moments(prefix[r]).variance);
        });
        double s2 = 0.0, short_max = 0.0;
        for (const auto& st : stats) {
            s2 = std::max(s2, st.var_total);
            short_max = std::max(short_max, st.var_short);
        }
        lv.s_l = std::sqrt(s2);
        const double omega = oscillation_bound(system, h, plan.eps[l], n);
        if (s2 > 0.0) {
            lv.short_sum_ratio = short_max / s2;
            lv.oscillation_ratio = static_cast<double>(k) * omega * omega / s2;
        } else {
            lv.short_sum_ratio = lv.oscillation_ratio = std::numeric_limits<double>::infinity();
        }
        report.levels.push_back(lv);
    }
    const auto& lv = report.levels;
    report.s_increasing = report.short_sum_decreasing = report.oscillation_decreasing = true;
    for (std::size_t l = 1; l < lv.size(); ++l) {
        if (!(lv[l].s_l > lv[l - 1].s_l))
            report.s_increasing = false;
        if (!(lv[l].short_sum_ratio <= lv[l - 1].short_sum_ratio))
            report.short_sum_decreasing = false;
        if (!(lv[l].oscillation_ratio <= lv[l - 1].oscillation_ratio))
            report.oscillation_decreasing = false;
    }
    const auto& final_level = lv.back();
    report.verdict = report.s_increasing && report.short_sum_decreasing && report.oscillation_decreasing &&
                     final_level.short_sum_ratio < plan.threshold && final_level.oscillation_ratio < plan.threshold;
    return report;
}

} // namespace orbitclt
