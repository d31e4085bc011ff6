#include "orbitclt/indep.hpp"

#include "orbitclt/error.hpp"
#include "orbitclt/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace orbitclt {

void ValidationReport::add(std::string name, bool passed, std::string detail)
{
    checks.push_back({std::move(name), passed, std::move(detail)});
}

bool ValidationReport::all_passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string prefix_key(const PeriodicPoint& point, std::size_t length, std::size_t offset)
{
    std::string key(length, '\0');
    for (std::size_t i = 0; i < length; ++i)
        key[i] = static_cast<char>(point.at(offset + i));
    return key;
}

Factor::Factor(std::vector<PeriodicPoint> pts, std::size_t w, std::size_t key_len)
    : points(std::move(pts)), window(w), key_length(key_len)
{
    index.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        index.emplace(prefix_key(points[i], key_length), i);
}

std::optional<std::size_t> Factor::find(const PeriodicPoint& point, std::size_t offset) const
{
    auto it = index.find(prefix_key(point, key_length, offset));
    if (it == index.end())
        return std::nullopt;
    return it->second;
}

std::vector<PeriodicPoint> maximal_separated(const SymbolicSystem& system, std::span<const PeriodicPoint> candidates,
                                             std::size_t n, const Rational& threshold)
{
    if (candidates.empty())
        throw Error(ErrorCode::EmptyInput, "maximal_separated needs candidates");
    const std::size_t length = separation_length(system, n, threshold);
    std::vector<PeriodicPoint> kept;
    if (length == 0) {
        kept.push_back(candidates.front());
        return kept;
    }
    // Separation is "prefixes of this length differ", an equivalence relation:
    // the greedy pass keeps the first member of every prefix class.
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& c : candidates)
        if (seen.emplace(prefix_key(c, length), kept.size()).second)
            kept.push_back(c);
    return kept;
}

SpanningResult check_spanning(const SymbolicSystem& system, std::span<const PeriodicPoint> centers,
                              std::span<const PeriodicPoint> targets, std::size_t n, const Rational& radius)
{
    const std::size_t length = ball_agreement_length(system, n, radius);
    if (centers.empty())
        return {targets.empty(), targets.empty() ? std::nullopt : std::optional<PeriodicPoint>(targets.front())};
    std::unordered_map<std::string, char> covered;
    for (const auto& c : centers)
        covered.emplace(prefix_key(c, length), 1);
    for (const auto& t : targets)
        if (!covered.contains(prefix_key(t, length)))
            return {false, t};
    return {true, std::nullopt};
}

SpanningResult check_spans_periodic(const SymbolicSystem& system, std::span<const PeriodicPoint> centers,
                                    std::size_t period, std::size_t n, const Rational& radius, std::uint64_t budget)
{
    const std::size_t length = ball_agreement_length(system, n, radius);
    if (length > period) {
        auto targets = enumerate_periodic(system, period, budget);
        return check_spanning(system, centers, targets, n, radius);
    }
    if (centers.empty())
        return {false, enumerate_periodic(system, period, 1).front()};
    std::unordered_map<std::string, char> covered;
    for (const auto& c : centers)
        covered.emplace(prefix_key(c, length), 1);
    if (length == 0)
        return {true, std::nullopt};

    // A word w of this length is the prefix of some point of P_period iff w is
    // admissible and a path of period - length + 1 steps leads from its last
    // symbol back to its first.
    const BoolMatrix close = system.reach(period - length + 1);
    for (auto& w : enumerate_words(system, length, budget)) {
        if (!close[w.back()][w.front()])
            continue;
        std::string key(w.begin(), w.end());
        if (!covered.contains(key)) {
            Word full = w;
            auto bridge = connect_words(system, w.back(), w.front(), period - length);
            full.insert(full.end(), bridge.begin(), bridge.end());
            return {false, PeriodicPoint(std::move(full))};
        }
    }
    return {true, std::nullopt};
}

BigInt ProductSet::size() const
{
    BigInt total = 1;
    for (const auto& f : factors_)
        total *= static_cast<unsigned long>(f->points.size());
    return total;
}

PeriodicPoint ProductSet::phi(std::span<const std::size_t> tuple) const
{
    if (tuple.size() != blocks())
        throw Error(ErrorCode::IndexOutOfRange, "tuple has " + std::to_string(tuple.size()) + " entries, expected " +
                                                    std::to_string(blocks()));
    for (std::size_t i = 0; i < tuple.size(); ++i)
        if (tuple[i] >= factor_size(i))
            throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(tuple[i]) + " out of range for factor " +
                                                        std::to_string(i + 1));
    Word w;
    phi_into(tuple, w);
    return PeriodicPoint(std::move(w));
}

std::optional<IndexTuple> ProductSet::phi_inverse(const PeriodicPoint& point) const
{
    if (point.period() != period_)
        return std::nullopt;
    IndexTuple tuple(blocks());
    for (std::size_t i = 0; i < blocks(); ++i) {
        auto found = factors_[i]->find(point, i * stride_);
        if (!found)
            return std::nullopt;
        tuple[i] = *found;
    }
    Word w;
    phi_into(tuple, w);
    if (w != point.word())
        return std::nullopt;
    return tuple;
}

IndexTuple ProductSet::tuple_from_flat(std::uint64_t flat) const
{
    IndexTuple tuple(blocks());
    for (std::size_t i = blocks(); i-- > 0;) {
        const std::uint64_t radix = factor_size(i);
        tuple[i] = static_cast<std::size_t>(flat % radix);
        flat /= radix;
    }
    return tuple;
}

void ProductSet::materialize(std::uint64_t budget)
{
    image_.clear();
    if (size() > BigInt(std::to_string(budget)))
        return;
    const std::uint64_t total = size().get_ui();
    image_.reserve(total);
    Word w;
    for (std::uint64_t flat = 0; flat < total; ++flat) {
        auto tuple = tuple_from_flat(flat);
        phi_into(tuple, w);
        image_.emplace_back(w);
    }
}

namespace {

// First index t >= 0 with a.at(offset + t) != b.at(t); nullopt when the
// shifted sequences coincide.
std::optional<std::size_t> first_disagreement_at(const PeriodicPoint& a, std::size_t offset, const PeriodicPoint& b)
{
    const std::size_t horizon = std::lcm(a.period(), b.period());
    for (std::size_t t = 0; t < horizon; ++t)
        if (a.at(offset + t) != b.at(t))
            return t;
    return std::nullopt;
}

} // namespace

void ProductSet::validate_tuples(std::size_t samples, std::uint64_t seed,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& block_windows)
{
    std::vector<IndexTuple> tuples;
    if (materialized()) {
        for (std::uint64_t flat = 0; flat < image_.size(); ++flat)
            tuples.push_back(tuple_from_flat(flat));
    } else {
        IndexTuple t;
        tuples.push_back(IndexTuple(blocks(), 0));
        IndexTuple last(blocks());
        for (std::size_t i = 0; i < blocks(); ++i)
            last[i] = factor_size(i) - 1;
        tuples.push_back(last);
        for (std::size_t s = 0; s < samples; ++s) {
            draw_tuple(*this, seed, s, t);
            tuples.push_back(t);
        }
    }

    const Rational& r = system_.metric_base();
    bool shadow_ok = true, admissible_ok = true, inverse_ok = true;
    std::string shadow_detail, admissible_detail, inverse_detail;
    Word w;
    for (const auto& tuple : tuples) {
        phi_into(tuple, w);
        PeriodicPoint p(w);
        if (admissible_ok && (!system_.is_cyclic_admissible(w) || p.period() != period_)) {
            admissible_ok = false;
            admissible_detail = "Phi image not admissible: " + to_string(p);
        }
        for (std::size_t i = 0; i < blocks() && shadow_ok; ++i) {
            const auto [offset, win] = block_windows[i];
            const auto& x = factors_[i]->points[tuple[i]];
            auto m = first_disagreement_at(p, offset, x);
            bool inside = true;
            if (m) {
                const std::size_t e = *m + 1 >= win ? *m + 1 - win : 0;
                inside = rational_pow(r, static_cast<unsigned>(e)) < epsilon_;
            }
            if (!inside) {
                shadow_ok = false;
                shadow_detail = "block " + std::to_string(i + 1) + " of " + to_string(p) + " leaves the Bowen ball";
            }
        }
        if (!materialized() && inverse_ok) {
            auto back = phi_inverse(p);
            if (!back || *back != tuple) {
                inverse_ok = false;
                inverse_detail = "Phi^-1(Phi(x)) != x for " + to_string(p);
            }
        }
    }
    validation_.add("phi_admissible", admissible_ok, admissible_detail);
    validation_.add("shadowing", shadow_ok,
                    shadow_ok ? std::to_string(tuples.size()) + " tuples checked" : shadow_detail);
    if (materialized()) {
        std::vector<Word> words;
        words.reserve(image_.size());
        for (const auto& p : image_)
            words.push_back(p.word());
        std::sort(words.begin(), words.end());
        const bool distinct = std::adjacent_find(words.begin(), words.end()) == words.end();
        validation_.add("phi_injective", distinct,
                        distinct ? std::to_string(words.size()) + " distinct images" : "duplicate image");
    } else {
        validation_.add("phi_injective", inverse_ok,
                        inverse_ok ? "left inverse verified on " + std::to_string(tuples.size()) + " tuples"
                                   : inverse_detail);
    }
}

void EpsIndependentSet::phi_into(std::span<const std::size_t> tuple, Word& out) const
{
    const std::size_t k = blocks();
    const std::size_t s = system_.num_symbols();
    out.resize(period_);
    auto it = out.begin();
    for (std::size_t i = 0; i < k; ++i) {
        const Word& head = copied_words_[tuple[i]];
        const Word& next = copied_words_[tuple[(i + 1) % k]];
        it = std::copy(head.begin(), head.end(), it);
        const Word& bridge = bridges_[head.back() * s + next.front()];
        it = std::copy(bridge.begin(), bridge.end(), it);
    }
}

EpsIndependentSet build_global_indep(const SymbolicSystem& system, const Rational& eps, std::size_t k, std::size_t n,
                                     std::size_t M, const IndepOptions& options)
{
    if (k == 0 || n == 0)
        throw Error(ErrorCode::InvalidArgument, "k and n must be positive");
    const SpecificationParams sp = specification_parameters(system, eps);
    if (M < sp.M_of_eps)
        throw Error(ErrorCode::GapTooShort,
                    "M = " + std::to_string(M) + " < M(eps) = " + std::to_string(sp.M_of_eps));

    EpsIndependentSet set(system, eps);
    set.window_ = n;
    set.gap_ = M;
    set.stride_ = n + M;
    set.period_ = k * (n + M);
    set.copied_ = n + sp.agreement_depth;

    const auto candidates = enumerate_periodic(system, n + M, options.enumeration_budget);
    auto E = maximal_separated(system, candidates, n, 2 * eps);
    const std::size_t key_length = separation_length(system, n, 2 * eps);

    const std::size_t s = system.num_symbols();
    const std::size_t bridge_length = M - sp.agreement_depth;
    set.bridges_.resize(s * s);
    for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = 0; b < s; ++b)
            set.bridges_[a * s + b] = connect_words(system, static_cast<Symbol>(a), static_cast<Symbol>(b), bridge_length);
    set.copied_words_.reserve(E.size());
    for (const auto& x : E)
        set.copied_words_.push_back(unrolled_prefix(x, set.copied_));

    auto factor = std::make_shared<const Factor>(std::move(E), n, key_length);
    set.factors_.assign(k, factor);

    // Separation and maximality: distinct key prefixes, and every candidate's
    // prefix class is represented.
    {
        const auto& pts = factor->points;
        bool separated = factor->index.size() == pts.size();
        bool maximal = true;
        if (key_length > 0)
            for (const auto& c : candidates)
                if (!factor->index.contains(prefix_key(c, key_length))) {
                    maximal = false;
                    break;
                }
        if (pts.size() <= 1500) {
            for (std::size_t i = 0; i < pts.size() && separated; ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j)
                    if (!bowen_distance_greater(system, bowen_separation(pts[i], pts[j], n), 2 * eps)) {
                        separated = false;
                        break;
                    }
        }
        set.validation_.add("separated", separated, std::to_string(pts.size()) + " points, threshold 2eps");
        set.validation_.add("maximal", maximal);
    }
    {
        auto span = check_spans_periodic(system, factor->points, set.period_, n, 3 * eps, options.enumeration_budget);
        set.validation_.add("spanning", span.spans,
                            span.spans ? "E (n,3eps)-spans P_" + std::to_string(set.period_)
                                       : "uncovered " + to_string(*span.witness));
    }

    set.materialize(options.materialize_budget);
    std::vector<std::pair<std::size_t, std::size_t>> windows;
    for (std::size_t i = 0; i < k; ++i)
        windows.emplace_back(i * set.stride_, n);
    set.validate_tuples(options.validation_samples, options.validation_seed, windows);

    if (!set.validation_.all_passed()) {
        std::string failed;
        for (const auto& c : set.validation_.checks)
            if (!c.passed)
                failed += c.name + " (" + c.detail + ") ";
        throw Error(ErrorCode::ValidationFailure, failed);
    }
    return set;
}

PeriodicPoint phi_apply(const ProductSet& set, std::span<const std::size_t> tuple)
{
    if (set.materialized()) {
        // Validate indices the same way as phi.
        for (std::size_t i = 0; i < tuple.size() && tuple.size() == set.blocks(); ++i)
            if (tuple[i] >= set.factor_size(i))
                return set.phi(tuple); // throws
        if (tuple.size() != set.blocks())
            return set.phi(tuple);
        std::uint64_t flat = 0;
        for (std::size_t i = 0; i < tuple.size(); ++i)
            flat = flat * set.factor_size(i) + tuple[i];
        return set.image()[flat];
    }
    return set.phi(tuple);
}

void draw_tuple(const ProductSet& set, std::uint64_t seed, std::uint64_t index, IndexTuple& out)
{
    CounterRng rng(seed, index);
    out.resize(set.blocks());
    for (std::size_t i = 0; i < set.blocks(); ++i)
        out[i] = static_cast<std::size_t>(rng.uniform_index(set.factor_size(i)));
}

std::vector<std::pair<IndexTuple, PeriodicPoint>> sample_uniform(const ProductSet& set, std::uint64_t seed,
                                                                 std::size_t count)
{
    if (count == 0)
        throw Error(ErrorCode::InvalidArgument, "sample count must be positive");
    std::vector<std::pair<IndexTuple, PeriodicPoint>> out;
    out.reserve(count);
    IndexTuple t;
    for (std::size_t s = 0; s < count; ++s) {
        draw_tuple(set, seed, s, t);
        out.emplace_back(t, set.phi(t));
    }
    return out;
}

PeriodicPoint specify_two(const SymbolicSystem& system, const PeriodicPoint& x1, std::size_t n1,
                          const PeriodicPoint& x2, std::size_t n2, std::size_t M1, std::size_t M2, const Rational& eps)
{
    if (n1 == 0 || n2 == 0)
        throw Error(ErrorCode::InvalidArgument, "windows must be positive");
    const SpecificationParams third = specification_parameters(system, eps / 3);
    if (M1 < third.M_of_eps || M2 < third.M_of_eps)
        throw Error(ErrorCode::GapTooShort, "gaps must be at least M(eps/3) = " + std::to_string(third.M_of_eps));
    // Copy n_i + a(eps) symbols of each orbit piece, then bridge. a(eps) <= a(eps/3) <= M_i - gap_min.
    const SpecificationParams sp = specification_parameters(system, eps);
    const std::size_t a = sp.agreement_depth;
    Word head1 = unrolled_prefix(x1, n1 + a);
    Word head2 = unrolled_prefix(x2, n2 + a);
    Word w = head1;
    auto b1 = connect_words(system, head1.back(), head2.front(), M1 - a);
    w.insert(w.end(), b1.begin(), b1.end());
    w.insert(w.end(), head2.begin(), head2.end());
    auto b2 = connect_words(system, head2.back(), head1.front(), M2 - a);
    w.insert(w.end(), b2.begin(), b2.end());
    PeriodicPoint p(std::move(w));

    auto inside = [&](std::size_t offset, const PeriodicPoint& x, std::size_t win) {
        auto m = first_disagreement_at(p, offset, x);
        if (!m)
            return true;
        const std::size_t e = *m + 1 >= win ? *m + 1 - win : 0;
        return rational_pow(system.metric_base(), static_cast<unsigned>(e)) < eps;
    };
    if (!system.is_cyclic_admissible(p.word()) || !inside(0, x1, n1) || !inside(n1 + M1, x2, n2))
        throw Error(ErrorCode::ValidationFailure, "specify_two produced a point outside the Bowen balls");
    return p;
}

WeightedMeasure weighted_measure(const EpsIndependentSet& set, std::uint64_t budget)
{
    if (!set.materialized())
        throw Error(ErrorCode::BudgetExceeded, "weighted measure needs a materialized independent set");
    const auto& system = set.system();
    const std::size_t k = set.k();
    const std::size_t L = ball_agreement_length(system, set.n(), 3 * set.epsilon());

    WeightedMeasure wm;
    wm.support = enumerate_periodic(system, set.period(), budget);

    auto key_of_point = [&](const PeriodicPoint& q) {
        std::string key;
        for (std::size_t i = 0; i < k; ++i)
            key += prefix_key(q, L, i * set.stride());
        return key;
    };
    // Q(p) depends on p only through the L-prefixes of its factors x_i.
    std::unordered_map<std::string, std::vector<std::size_t>> q_by_key;
    for (std::size_t qi = 0; qi < wm.support.size(); ++qi)
        q_by_key[key_of_point(wm.support[qi])].push_back(qi);

    std::unordered_map<std::string, std::size_t> p_count_by_key;
    std::vector<std::string> p_keys;
    p_keys.reserve(set.image().size());
    for (std::uint64_t flat = 0; flat < set.image().size(); ++flat) {
        auto tuple = set.tuple_from_flat(flat);
        std::string key;
        for (std::size_t i = 0; i < k; ++i)
            key += prefix_key(set.E()[tuple[i]], L);
        ++p_count_by_key[key];
        p_keys.push_back(std::move(key));
    }

    wm.q_sets.reserve(p_keys.size());
    for (const auto& key : p_keys) {
        auto it = q_by_key.find(key);
        wm.q_sets.push_back(it == q_by_key.end() ? std::vector<std::size_t>{} : it->second);
    }

    const Rational total_p(static_cast<unsigned long>(set.image().size()));
    wm.weights.assign(wm.support.size(), Rational(0));
    for (const auto& [key, qs] : q_by_key) {
        auto pc = p_count_by_key.find(key);
        if (pc == p_count_by_key.end())
            continue;
        Rational w(static_cast<unsigned long>(pc->second));
        w /= total_p * static_cast<unsigned long>(qs.size());
        for (auto qi : qs)
            wm.weights[qi] = w;
    }
    return wm;
}

} // namespace orbitclt
