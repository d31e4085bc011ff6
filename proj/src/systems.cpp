#include "orbitclt/systems.hpp"

#include "orbitclt/error.hpp"

#include <algorithm>
#include <numeric>

namespace orbitclt {

namespace {

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b)
{
    const std::size_t s = a.size();
    BoolMatrix out(s, std::vector<char>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k)
            if (a[i][k])
                for (std::size_t j = 0; j < s; ++j)
                    out[i][j] |= b[k][j];
    return out;
}

CountMatrix count_multiply(const CountMatrix& a, const CountMatrix& b)
{
    const std::size_t s = a.size();
    CountMatrix out(s, std::vector<BigInt>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < s; ++j)
                    out[i][j] += a[i][k] * b[k][j];
    return out;
}

BoolMatrix to_bool(const std::vector<std::vector<int>>& t)
{
    BoolMatrix out(t.size(), std::vector<char>(t.size(), 0));
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            out[i][j] = t[i][j] != 0;
    return out;
}

bool all_positive(const BoolMatrix& m)
{
    return std::all_of(m.begin(), m.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](char c) { return c != 0; });
    });
}

} // namespace

unsigned mixing_index(const std::vector<std::vector<int>>& transitions)
{
    const std::size_t s = transitions.size();
    if (s == 0)
        throw Error(ErrorCode::InvalidArgument, "empty transition matrix");
    const std::size_t cap = s * s - 2 * s + 2;
    const BoolMatrix base = to_bool(transitions);
    BoolMatrix current = base;
    for (std::size_t m = 1; m <= cap; ++m) {
        if (all_positive(current))
            return static_cast<unsigned>(m);
        current = bool_multiply(current, base);
    }
    throw Error(ErrorCode::NotPrimitive, "no power up to the Wielandt bound is positive");
}

SymbolicSystem SymbolicSystem::create(std::vector<std::vector<int>> transitions, Rational metric_base,
                                      Rational expansiveness)
{
    const std::size_t s = transitions.size();
    if (s == 0 || s > 255)
        throw Error(ErrorCode::InvalidArgument, "number of symbols must be in [1, 255]");
    for (const auto& row : transitions) {
        if (row.size() != s)
            throw Error(ErrorCode::InvalidArgument, "transition matrix is not square");
        for (int v : row)
            if (v != 0 && v != 1)
                throw Error(ErrorCode::InvalidArgument, "transition entries must be 0 or 1");
    }
    for (std::size_t i = 0; i < s; ++i) {
        bool row_ok = false, col_ok = false;
        for (std::size_t j = 0; j < s; ++j) {
            row_ok |= transitions[i][j] != 0;
            col_ok |= transitions[j][i] != 0;
        }
        if (!row_ok || !col_ok)
            throw Error(ErrorCode::InvalidArgument, "every row and column needs an allowed transition");
    }
    metric_base.canonicalize();
    expansiveness.canonicalize();
    if (metric_base <= 0 || metric_base >= 1)
        throw Error(ErrorCode::InvalidArgument, "metric base must lie in (0, 1)");
    if (expansiveness <= 0 || expansiveness >= 1)
        throw Error(ErrorCode::InvalidArgument, "expansiveness constant must lie in (0, 1)");

    SymbolicSystem sys;
    sys.mixing_index_ = orbitclt::mixing_index(transitions);
    sys.transitions_ = std::move(transitions);
    sys.metric_base_ = metric_base;
    sys.expansiveness_ = expansiveness;
    return sys;
}

SymbolicSystem SymbolicSystem::full_shift(std::size_t symbols)
{
    return create(std::vector<std::vector<int>>(symbols, std::vector<int>(symbols, 1)));
}

SymbolicSystem SymbolicSystem::golden_mean() { return create({{1, 1}, {1, 0}}); }

bool SymbolicSystem::is_admissible(std::span<const Symbol> word) const
{
    for (Symbol s : word)
        if (s >= num_symbols())
            return false;
    for (std::size_t i = 1; i < word.size(); ++i)
        if (!allowed(word[i - 1], word[i]))
            return false;
    return true;
}

bool SymbolicSystem::is_cyclic_admissible(std::span<const Symbol> word) const
{
    if (word.empty() || !is_admissible(word))
        return false;
    return allowed(word.back(), word.front());
}

BoolMatrix SymbolicSystem::reach(std::size_t steps) const
{
    const std::size_t s = num_symbols();
    BoolMatrix result(s, std::vector<char>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
        result[i][i] = 1;
    BoolMatrix base = to_bool(transitions_);
    while (steps > 0) {
        if (steps & 1U)
            result = bool_multiply(result, base);
        steps >>= 1U;
        if (steps > 0)
            base = bool_multiply(base, base);
    }
    return result;
}

CountMatrix SymbolicSystem::power(std::size_t steps) const
{
    const std::size_t s = num_symbols();
    CountMatrix result(s, std::vector<BigInt>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
        result[i][i] = 1;
    CountMatrix base(s, std::vector<BigInt>(s, 0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            base[i][j] = transitions_[i][j];
    while (steps > 0) {
        if (steps & 1U)
            result = count_multiply(result, base);
        steps >>= 1U;
        if (steps > 0)
            base = count_multiply(base, base);
    }
    return result;
}

PeriodicPoint::PeriodicPoint(Word word) : word_(std::move(word))
{
    if (word_.empty())
        throw Error(ErrorCode::InvalidArgument, "periodic point needs a nonempty word");
}

std::string word_to_string(std::span<const Symbol> word)
{
    std::string out;
    bool wide = std::any_of(word.begin(), word.end(), [](Symbol s) { return s > 9; });
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (wide && i > 0)
            out += '.';
        out += wide ? std::to_string(word[i]) : std::string(1, static_cast<char>('0' + word[i]));
    }
    return out;
}

Word word_from_string(std::string_view text)
{
    Word out;
    if (text.find('.') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('.', start);
            if (end == std::string_view::npos)
                end = text.size();
            auto piece = text.substr(start, end - start);
            if (piece.empty())
                throw Error(ErrorCode::ParseError, "empty symbol in word");
            int value = 0;
            for (char c : piece) {
                if (c < '0' || c > '9')
                    throw Error(ErrorCode::ParseError, "bad symbol in word");
                value = value * 10 + (c - '0');
                if (value > 255)
                    throw Error(ErrorCode::ParseError, "symbol out of range");
            }
            out.push_back(static_cast<Symbol>(value));
            start = end + 1;
        }
        return out;
    }
    for (char c : text) {
        if (c < '0' || c > '9')
            throw Error(ErrorCode::ParseError, "bad symbol in word");
        out.push_back(static_cast<Symbol>(c - '0'));
    }
    return out;
}

std::string to_string(const PeriodicPoint& point) { return word_to_string(point.word()); }

bool same_point(const PeriodicPoint& a, const PeriodicPoint& b) { return !first_disagreement(a, b).has_value(); }

std::optional<std::size_t> first_disagreement(const PeriodicPoint& a, const PeriodicPoint& b)
{
    const std::size_t horizon = std::lcm(a.period(), b.period());
    for (std::size_t i = 0; i < horizon; ++i)
        if (a.at(i) != b.at(i))
            return i;
    return std::nullopt;
}

bool agree_on_prefix(const PeriodicPoint& a, const PeriodicPoint& b, std::size_t length, std::size_t offset_a,
                     std::size_t offset_b)
{
    for (std::size_t i = 0; i < length; ++i)
        if (a.at(offset_a + i) != b.at(offset_b + i))
            return false;
    return true;
}

Word unrolled_prefix(const PeriodicPoint& point, std::size_t length, std::size_t offset)
{
    Word out(length);
    for (std::size_t i = 0; i < length; ++i)
        out[i] = point.at(offset + i);
    return out;
}

Rational BowenDistance::value(const Rational& metric_base) const
{
    if (zero)
        return Rational(0);
    return rational_pow(metric_base, exponent);
}

BowenDistance bowen_separation(const PeriodicPoint& a, const PeriodicPoint& b, std::size_t n)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "Bowen window must be positive");
    auto m = first_disagreement(a, b);
    if (!m)
        return {true, 0};
    const std::size_t e = *m + 1 >= n ? *m + 1 - n : 0;
    return {false, static_cast<unsigned>(e)};
}

bool bowen_distance_less(const SymbolicSystem& system, const BowenDistance& d, const Rational& radius)
{
    return d.value(system.metric_base()) < radius;
}

bool bowen_distance_greater(const SymbolicSystem& system, const BowenDistance& d, const Rational& threshold)
{
    return d.value(system.metric_base()) > threshold;
}

std::size_t ball_agreement_length(const SymbolicSystem& system, std::size_t n, const Rational& radius)
{
    if (n == 0 || radius <= 0)
        throw Error(ErrorCode::InvalidArgument, "ball needs n >= 1 and positive radius");
    // r^e < radius iff e >= j; e = max(0, m - n + 1) >= j iff m >= n + j - 1 (for j >= 1).
    const unsigned j = min_exponent_below(system.metric_base(), radius);
    return j == 0 ? 0 : n + j - 1;
}

std::size_t separation_length(const SymbolicSystem& system, std::size_t n, const Rational& threshold)
{
    if (n == 0 || threshold <= 0)
        throw Error(ErrorCode::InvalidArgument, "separation needs n >= 1 and positive threshold");
    // r^e > threshold iff e < j'; with e = max(0, m - n + 1) this is m < n + j' - 1.
    const unsigned j = min_exponent_at_or_below(system.metric_base(), threshold);
    return j == 0 ? 0 : n + j - 1;
}

BigInt periodic_count(const SymbolicSystem& system, std::size_t n)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "period must be positive");
    auto p = system.power(n);
    BigInt trace = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        trace += p[i][i];
    return trace;
}

std::vector<PeriodicPoint> enumerate_periodic(const SymbolicSystem& system, std::size_t n, std::uint64_t budget)
{
    const BigInt count = periodic_count(system, n);
    if (count > BigInt(std::to_string(budget)))
        throw Error(ErrorCode::BudgetExceeded,
                    "|P_" + std::to_string(n) + "| = " + count.get_str() + " exceeds budget " + std::to_string(budget));

    // closable[k][a][b]: path of k steps from a to b.
    std::vector<BoolMatrix> closable(n + 1);
    closable[0] = system.reach(0);
    const BoolMatrix one = system.reach(1);
    for (std::size_t k = 1; k <= n; ++k)
        closable[k] = bool_multiply(closable[k - 1], one);

    const std::size_t s = system.num_symbols();
    std::vector<PeriodicPoint> out;
    out.reserve(count.get_ui());
    Word word(n);
    // Iterative DFS in lexicographic order.
    std::vector<int> next(n, 0);
    std::size_t pos = 0;
    next[0] = 0;
    while (true) {
        bool advanced = false;
        while (next[pos] < static_cast<int>(s)) {
            const auto sym = static_cast<Symbol>(next[pos]++);
            if (pos > 0 && !system.allowed(word[pos - 1], sym))
                continue;
            if (pos > 0 && !closable[n - pos][sym][word[0]])
                continue;
            if (pos == 0 && !closable[n][sym][sym])
                continue;
            word[pos] = sym;
            advanced = true;
            break;
        }
        if (!advanced) {
            if (pos == 0)
                break;
            --pos;
            continue;
        }
        if (pos + 1 == n) {
            out.emplace_back(word);
            continue;
        }
        ++pos;
        next[pos] = 0;
    }
    return out;
}

std::vector<Word> enumerate_words(const SymbolicSystem& system, std::size_t length, std::uint64_t budget)
{
    std::vector<Word> out;
    if (length == 0) {
        out.emplace_back();
        return out;
    }
    auto p = system.power(length - 1);
    BigInt total = 0;
    for (const auto& row : p)
        for (const auto& v : row)
            total += v;
    if (total > BigInt(std::to_string(budget)))
        throw Error(ErrorCode::BudgetExceeded, "word count " + total.get_str() + " exceeds budget");
    out.reserve(total.get_ui());
    Word word(length);
    const std::size_t s = system.num_symbols();
    std::vector<int> next(length, 0);
    std::size_t pos = 0;
    while (true) {
        bool advanced = false;
        while (next[pos] < static_cast<int>(s)) {
            const auto sym = static_cast<Symbol>(next[pos]++);
            if (pos > 0 && !system.allowed(word[pos - 1], sym))
                continue;
            word[pos] = sym;
            advanced = true;
            break;
        }
        if (!advanced) {
            if (pos == 0)
                break;
            --pos;
            continue;
        }
        if (pos + 1 == length) {
            out.push_back(word);
            continue;
        }
        ++pos;
        next[pos] = 0;
    }
    return out;
}

PeriodicPoint shift_point(const PeriodicPoint& point, std::size_t t)
{
    const std::size_t n = point.period();
    Word w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = point.at(t % n + i);
    return PeriodicPoint(std::move(w));
}

Word connect_words(const SymbolicSystem& system, Symbol from, Symbol to, std::size_t length)
{
    const std::size_t s = system.num_symbols();
    if (from >= s || to >= s)
        throw Error(ErrorCode::InvalidArgument, "symbol out of range");
    // tail[k][a]: a path of k steps from a reaches `to`.
    std::vector<std::vector<char>> tail(length + 2, std::vector<char>(s, 0));
    tail[0][to] = 1;
    for (std::size_t k = 1; k <= length + 1; ++k)
        for (std::size_t a = 0; a < s; ++a)
            for (std::size_t b = 0; b < s; ++b)
                if (system.allowed(static_cast<Symbol>(a), static_cast<Symbol>(b)) && tail[k - 1][b]) {
                    tail[k][a] = 1;
                    break;
                }
    if (!tail[length + 1][from])
        throw Error(ErrorCode::NoPath, "no admissible bridge of length " + std::to_string(length) + " from " +
                                           std::to_string(from) + " to " + std::to_string(to));
    Word w;
    w.reserve(length);
    Symbol prev = from;
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t remaining = length - i; // steps from the chosen symbol to `to`
        for (std::size_t c = 0; c < s; ++c) {
            if (system.allowed(prev, static_cast<Symbol>(c)) && tail[remaining][c]) {
                prev = static_cast<Symbol>(c);
                w.push_back(prev);
                break;
            }
        }
    }
    return w;
}

SpecificationParams specification_parameters(const SymbolicSystem& system, const Rational& eps)
{
    if (eps <= 0 || eps > 1)
        throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1]");
    SpecificationParams p;
    p.agreement_depth = min_exponent_below(system.metric_base(), eps) - 1;
    p.gap_min = system.mixing_index() - 1;
    p.M_of_eps = p.agreement_depth + p.gap_min;
    p.N_of_eps = p.agreement_depth + 1;
    p.delta_of_eps = rational_pow(system.metric_base(), p.agreement_depth);
    return p;
}

} // namespace orbitclt
