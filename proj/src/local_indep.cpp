#include "orbitclt/error.hpp"
#include "orbitclt/indep.hpp"

#include <algorithm>
#include <unordered_set>

namespace orbitclt {

bool CylinderSchedule::contains(const PeriodicPoint& point) const
{
    for (std::size_t i = 0; i < cylinders.size(); ++i)
        for (std::size_t j = 0; j < cylinders[i].size(); ++j)
            if (point.at(i * n + j) != cylinders[i][j])
                return false;
    return true;
}

namespace {

// Cyclic words of length m with some positions pinned to a symbol.
class PinnedCycles {
public:
    PinnedCycles(const SymbolicSystem& system, std::vector<int> pinned)
        : system_(system), pinned_(std::move(pinned)), m_(pinned_.size()), s_(system.num_symbols())
    {
        feasible_.resize(s_);
        for (std::size_t s0 = 0; s0 < s_; ++s0) {
            auto& f = feasible_[s0];
            f.assign(m_ * s_, 0);
            for (std::size_t pos = m_; pos-- > 1;)
                for (std::size_t b = 0; b < s_; ++b) {
                    if (!ok(pos, b))
                        continue;
                    if (pos == m_ - 1) {
                        f[pos * s_ + b] = system_.allowed(b, s0);
                        continue;
                    }
                    for (std::size_t c = 0; c < s_ && !f[pos * s_ + b]; ++c)
                        f[pos * s_ + b] = system_.allowed(b, c) && f[(pos + 1) * s_ + c];
                }
        }
    }

    bool starts(std::size_t s0) const
    {
        if (!ok(0, s0))
            return false;
        if (m_ == 1)
            return system_.allowed(s0, s0);
        for (std::size_t c = 0; c < s_; ++c)
            if (system_.allowed(s0, c) && next_ok(s0, 1, c))
                return true;
        return false;
    }

    BigInt count() const
    {
        BigInt total = 0;
        for (std::size_t s0 = 0; s0 < s_; ++s0) {
            if (!ok(0, s0))
                continue;
            if (m_ == 1) {
                if (system_.allowed(s0, s0))
                    total += 1;
                continue;
            }
            std::vector<BigInt> ways(s_, 0), next(s_);
            ways[s0] = 1;
            for (std::size_t pos = 1; pos < m_; ++pos) {
                for (std::size_t c = 0; c < s_; ++c) {
                    next[c] = 0;
                    if (!ok(pos, c))
                        continue;
                    for (std::size_t b = 0; b < s_; ++b)
                        if (system_.allowed(b, c))
                            next[c] += ways[b];
                }
                std::swap(ways, next);
            }
            for (std::size_t b = 0; b < s_; ++b)
                if (system_.allowed(b, s0))
                    total += ways[b];
        }
        return total;
    }

    std::vector<PeriodicPoint> enumerate() const
    {
        std::vector<PeriodicPoint> out;
        Word w(m_);
        for (std::size_t s0 = 0; s0 < s_; ++s0) {
            if (!starts(s0))
                continue;
            w[0] = static_cast<Symbol>(s0);
            extend(s0, 1, m_, w, [&](Word& full) { out.emplace_back(full); });
        }
        return out;
    }

    /// Lexicographically smallest point of every class of points sharing
    /// their first `length` symbols (length 0: one class), in lexicographic order.
    std::vector<PeriodicPoint> class_minima(std::size_t length, std::uint64_t budget) const
    {
        std::vector<PeriodicPoint> out;
        const std::size_t prefix = std::max<std::size_t>(1, std::min(length, m_));
        Word w(m_);
        for (std::size_t s0 = 0; s0 < s_; ++s0) {
            if (!starts(s0))
                continue;
            w[0] = static_cast<Symbol>(s0);
            extend(s0, 1, prefix, w, [&](Word& partial) {
                for (std::size_t pos = prefix; pos < m_; ++pos) {
                    std::size_t c = 0;
                    while (!(system_.allowed(partial[pos - 1], c) && next_ok(s0, pos, c)))
                        ++c;
                    partial[pos] = static_cast<Symbol>(c);
                }
                if (out.size() >= budget)
                    throw Error(ErrorCode::BudgetExceeded, "separated set exceeds the enumeration budget");
                out.emplace_back(partial);
            });
            if (length == 0)
                break;
        }
        return out;
    }

private:
    bool ok(std::size_t pos, std::size_t sym) const { return pinned_[pos] < 0 || pinned_[pos] == static_cast<int>(sym); }
    bool next_ok(std::size_t s0, std::size_t pos, std::size_t sym) const { return feasible_[s0][pos * s_ + sym] != 0; }

    template <class Visit>
    void extend(std::size_t s0, std::size_t pos, std::size_t stop, Word& w, Visit&& visit) const
    {
        if (pos == stop) {
            visit(w);
            return;
        }
        for (std::size_t c = 0; c < s_; ++c)
            if (system_.allowed(w[pos - 1], c) && next_ok(s0, pos, c)) {
                w[pos] = static_cast<Symbol>(c);
                extend(s0, pos + 1, stop, w, visit);
            }
    }

    const SymbolicSystem& system_;
    std::vector<int> pinned_;
    std::size_t m_;
    std::size_t s_;
    std::vector<std::vector<char>> feasible_; // per first symbol: completion exists from (pos, symbol)
};

std::vector<int> pin_schedule(const SymbolicSystem& system, const CylinderSchedule& schedule, std::size_t m,
                              std::size_t shift)
{
    std::vector<int> pinned(m, -1);
    for (std::size_t i = 0; i < schedule.k(); ++i) {
        const Word& cyl = schedule.cylinders[i];
        for (std::size_t j = 0; j < cyl.size(); ++j) {
            if (cyl[j] >= system.num_symbols())
                throw Error(ErrorCode::InvalidArgument, "cylinder symbol out of range");
            const std::size_t pos = (i * schedule.n + j + m - shift % m) % m;
            if (pinned[pos] >= 0 && pinned[pos] != cyl[j])
                throw Error(ErrorCode::IncompatibleSchedule,
                            "cylinders " + std::to_string(i + 1) + " and another pin different symbols at one position");
            pinned[pos] = cyl[j];
        }
    }
    return pinned;
}

void check_shape(const CylinderSchedule& schedule, std::size_t m)
{
    if (schedule.n == 0 || schedule.k() == 0)
        throw Error(ErrorCode::InvalidArgument, "schedule needs n >= 1 and at least one cylinder");
    if (m % schedule.n != 0 || m < schedule.k() * schedule.n)
        throw Error(ErrorCode::InvalidArgument,
                    "m = " + std::to_string(m) + " must be a multiple of n and at least k*n");
}

} // namespace

std::vector<PeriodicPoint> enumerate_cylinder_points(const SymbolicSystem& system, const CylinderSchedule& schedule,
                                                     std::size_t m, std::uint64_t budget)
{
    check_shape(schedule, m);
    PinnedCycles cycles(system, pin_schedule(system, schedule, m, 0));
    if (cycles.count() > BigInt(std::to_string(budget)))
        throw Error(ErrorCode::BudgetExceeded, "|A ∩ P_m| exceeds the enumeration budget");
    return cycles.enumerate();
}

BigInt count_cylinder_points(const SymbolicSystem& system, const CylinderSchedule& schedule, std::size_t m)
{
    check_shape(schedule, m);
    return PinnedCycles(system, pin_schedule(system, schedule, m, 0)).count();
}

void LocalEpsIndependentSet::phi_into(std::span<const std::size_t> tuple, Word& out) const
{
    out.resize(period_);
    auto it = out.begin();
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        const Word& head = heads_[i][tuple[i]];
        it = std::copy(head.begin(), head.end(), it);
    }
}

LocalEpsIndependentSet build_local_indep(const SymbolicSystem& system, const CylinderSchedule& schedule,
                                         const Rational& eps, std::size_t m, const LocalIndepOptions& options)
{
    check_shape(schedule, m);
    const std::size_t k = schedule.k();
    const std::size_t n = schedule.n;
    for (std::size_t i = 0; i < k; ++i) {
        const Word& cyl = schedule.cylinders[i];
        if (!system.is_admissible(cyl))
            throw Error(ErrorCode::IncompatibleSchedule, "cylinder " + std::to_string(i + 1) + " is not admissible");
    }
    const auto base_pins = pin_schedule(system, schedule, m, 0);
    PinnedCycles base(system, base_pins);
    if (base.count() == 0)
        throw Error(ErrorCode::IncompatibleSchedule, "no point of P_" + std::to_string(m) + " meets the schedule");
    const SpecificationParams sp = specification_parameters(system, eps);
    if (n < sp.N_of_eps)
        throw Error(ErrorCode::WindowTooShort,
                    "n = " + std::to_string(n) + " < N(eps) = " + std::to_string(sp.N_of_eps));
    const std::size_t a = sp.agreement_depth;
    // Blocks are glued without gaps, so block i+1 must pin the a(eps)
    // symbols that follow block i's window.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t depth = schedule.cylinders[i].size();
        if (depth < std::max<std::size_t>(a, 1) || depth > a + 1)
            throw Error(ErrorCode::IncompatibleSchedule,
                        "cylinder " + std::to_string(i + 1) + " has depth " + std::to_string(depth) +
                            "; gap-free gluing at eps needs depth in [" + std::to_string(std::max<std::size_t>(a, 1)) +
                            ", " + std::to_string(a + 1) + "]");
    }

    LocalEpsIndependentSet set(system, eps);
    set.schedule_ = schedule;
    set.window_ = n;
    set.stride_ = n;
    set.period_ = m;
    set.rotation_ = options.enumerate_with_rotation.value_or(0);

    const bool small = base.count() <= BigInt(std::to_string(options.enumeration_budget));
    bool separated = true, maximal = true;
    std::string sep_detail;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t window = i + 1 < k ? n : m - (k - 1) * n;
        const std::size_t key_length = separation_length(system, window, 2 * eps);
        PinnedCycles shifted(system, pin_schedule(system, schedule, m, i * n));

        std::vector<PeriodicPoint> E;
        std::vector<PeriodicPoint> candidates;
        if (options.enumerate_with_rotation || small)
            candidates = shifted.enumerate();
        if (options.enumerate_with_rotation) {
            const std::size_t r = *options.enumerate_with_rotation % candidates.size();
            std::vector<PeriodicPoint> rotated(candidates.begin() + r, candidates.end());
            rotated.insert(rotated.end(), candidates.begin(), candidates.begin() + r);
            E = maximal_separated(system, rotated, window, 2 * eps);
        } else {
            E = shifted.class_minima(key_length, options.enumeration_budget);
        }

        auto factor = std::make_shared<const Factor>(std::move(E), window, key_length);
        const auto& pts = factor->points;
        if (factor->index.size() != pts.size() && key_length > 0) {
            separated = false;
            sep_detail = "factor " + std::to_string(i + 1) + " repeats a class";
        }
        if (pts.size() <= 1500)
            for (std::size_t x = 0; x < pts.size() && separated; ++x)
                for (std::size_t y = x + 1; y < pts.size(); ++y)
                    if (!bowen_distance_greater(system, bowen_separation(pts[x], pts[y], window), 2 * eps)) {
                        separated = false;
                        sep_detail = "factor " + std::to_string(i + 1) + " is not separated";
                        break;
                    }
        if (key_length > 0)
            for (const auto& c : candidates)
                if (!factor->index.contains(prefix_key(c, key_length))) {
                    maximal = false;
                    break;
                }
        std::vector<Word> heads;
        heads.reserve(pts.size());
        for (const auto& x : pts)
            heads.push_back(unrolled_prefix(x, window));
        set.heads_.push_back(std::move(heads));
        set.factors_.push_back(std::move(factor));
    }
    set.validation_.add("separated", separated, sep_detail);
    set.validation_.add("maximal", maximal, small ? "checked against T^{(i-1)n}(A ∩ P_m)" : "by construction");

    set.materialize(options.materialize_budget);
    std::vector<std::pair<std::size_t, std::size_t>> windows;
    for (std::size_t i = 0; i < k; ++i)
        windows.emplace_back(i * n, set.factor_data(i).window);
    set.validate_tuples(options.validation_samples, options.validation_seed, windows);

    if (options.check_sandwich && 3 * eps < system.expansiveness_constant() &&
        periodic_count(system, m) <= BigInt(std::to_string(options.enumeration_budget))) {
        if (!set.materialized()) {
            set.validation_.add("sandwich", true, "skipped: image not materialized");
        } else {
            std::vector<PeriodicPoint> in_a;
            for (auto& p : enumerate_periodic(system, m, options.enumeration_budget))
                if (schedule.contains(p))
                    in_a.push_back(std::move(p));
            std::vector<PeriodicPoint> image = set.image();
            std::sort(image.begin(), image.end());
            bool lower = std::includes(image.begin(), image.end(), in_a.begin(), in_a.end());
            const std::size_t L = ball_agreement_length(system, m, eps);
            std::unordered_set<std::string> balls;
            for (const auto& p : in_a)
                balls.insert(prefix_key(p, L));
            bool upper = std::all_of(image.begin(), image.end(),
                                     [&](const PeriodicPoint& p) { return balls.contains(prefix_key(p, L)); });
            set.validation_.add("sandwich", lower && upper,
                                std::string(lower ? "" : "A ∩ P_m not contained; ") +
                                    (upper ? "" : "image leaves B^m_eps(A)"));
        }
    }

    if (!set.validation_.all_passed()) {
        std::string failed;
        for (const auto& c : set.validation_.checks)
            if (!c.passed)
                failed += c.name + " (" + c.detail + ") ";
        throw Error(ErrorCode::ValidationFailure, failed);
    }
    return set;
}

} // namespace orbitclt
