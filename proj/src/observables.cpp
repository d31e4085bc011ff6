#include "orbitclt/observables.hpp"

#include "orbitclt/error.hpp"
#include "orbitclt/indep.hpp"

#include <algorithm>
#include <cmath>

namespace orbitclt {

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

std::size_t word_code(const PeriodicPoint& p, std::size_t shift, std::size_t depth, std::size_t symbols)
{
    std::size_t code = 0;
    for (std::size_t j = 0; j < depth; ++j)
        code = code * symbols + p.at(shift + j);
    return code;
}

double phi_spread(const GeometricWeight& g)
{
    auto [lo, hi] = std::minmax_element(g.phi.begin(), g.phi.end());
    return *hi - *lo;
}

} // namespace

Observable Observable::locally_constant(const SymbolicSystem& system, std::size_t depth,
                                        const std::vector<std::pair<Word, double>>& table)
{
    if (depth == 0 || depth > 24)
        throw Error(ErrorCode::InvalidArgument, "locally constant depth must be in [1, 24]");
    const std::size_t s = system.num_symbols();
    std::size_t entries = 1;
    for (std::size_t j = 0; j < depth; ++j)
        entries *= s;
    LocallyConstant lc{depth, std::vector<double>(entries, std::nan(""))};
    for (const auto& [w, v] : table) {
        if (w.size() != depth)
            throw Error(ErrorCode::InvalidArgument, "table word " + word_to_string(w) + " has the wrong length");
        std::size_t code = 0;
        for (Symbol c : w) {
            if (c >= s)
                throw Error(ErrorCode::InvalidArgument, "table word " + word_to_string(w) + " uses an unknown symbol");
            code = code * s + c;
        }
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "table values must be finite");
        lc.table[code] = v;
    }
    for (const auto& w : enumerate_words(system, depth)) {
        std::size_t code = 0;
        for (Symbol c : w)
            code = code * s + c;
        if (std::isnan(lc.table[code]))
            throw Error(ErrorCode::InvalidArgument, "table misses admissible word " + word_to_string(w));
    }
    Observable h(std::move(lc), s);
    h.finish();
    return h;
}

Observable Observable::geometric_weight(const SymbolicSystem& system, double lambda, std::vector<double> phi,
                                        double tol)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw Error(ErrorCode::InvalidArgument, "decay must lie in (0, 1)");
    if (phi.size() != system.num_symbols())
        throw Error(ErrorCode::InvalidArgument, "phi needs one value per symbol");
    if (!(tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "truncation tolerance must be positive");
    for (double v : phi)
        if (!std::isfinite(v))
            throw Error(ErrorCode::InvalidArgument, "phi values must be finite");
    Observable h(GeometricWeight{lambda, std::move(phi), tol}, system.num_symbols());
    h.finish();
    return h;
}

Observable Observable::symbol_indicator(const SymbolicSystem& system, Symbol symbol, double offset)
{
    if (symbol >= system.num_symbols())
        throw Error(ErrorCode::InvalidArgument, "indicator symbol out of range");
    Observable h(SymbolIndicator{symbol, offset}, system.num_symbols());
    h.finish();
    return h;
}

Observable Observable::constant(const SymbolicSystem& system, double value)
{
    std::vector<std::pair<Word, double>> table;
    for (std::size_t a = 0; a < system.num_symbols(); ++a)
        table.emplace_back(Word{static_cast<Symbol>(a)}, value);
    return locally_constant(system, 1, table);
}

void Observable::finish()
{
    std::visit(overloaded{
                   [&](const LocallyConstant& lc) {
                       depth_ = lc.depth;
                       double lo = INFINITY, hi = -INFINITY;
                       for (double v : lc.table)
                           if (!std::isnan(v)) {
                               lo = std::min(lo, v);
                               hi = std::max(hi, v);
                           }
                       spread_ = hi - lo;
                       sup_abs_ = std::max(std::fabs(lo), std::fabs(hi));
                   },
                   [&](const GeometricWeight& g) {
                       double top = 0.0;
                       for (double v : g.phi)
                           top = std::max(top, std::fabs(v));
                       const double tail = top / (1.0 - g.lambda);
                       std::size_t d = 1;
                       double lam_d = g.lambda;
                       while (lam_d * tail >= g.tol && d < 100000) {
                           lam_d *= g.lambda;
                           ++d;
                       }
                       depth_ = d;
                       truncation_error_ = lam_d * tail;
                       spread_ = phi_spread(g) / (1.0 - g.lambda);
                       sup_abs_ = tail;
                   },
                   [&](const SymbolIndicator& si) {
                       depth_ = 1;
                       spread_ = 1.0;
                       sup_abs_ = std::max(std::fabs(si.offset), std::fabs(1.0 + si.offset));
                   },
               },
               variant_);
}

double Observable::lipschitz_bound(const Rational& metric_base) const
{
    const double r = to_double(metric_base);
    return std::visit(overloaded{
                          [&](const LocallyConstant& lc) {
                              return spread_ / std::pow(r, static_cast<double>(lc.depth - 1));
                          },
                          [&](const GeometricWeight& g) {
                              return g.lambda <= r ? phi_spread(g) / (1.0 - g.lambda)
                                                   : std::numeric_limits<double>::infinity();
                          },
                          [&](const SymbolIndicator&) { return 1.0; },
                      },
                      variant_);
}

double Observable::evaluate(const PeriodicPoint& p, std::size_t shift) const
{
    return std::visit(overloaded{
                          [&](const LocallyConstant& lc) { return lc.table[word_code(p, shift, lc.depth, symbols_)]; },
                          [&](const GeometricWeight& g) {
                              double v = 0.0;
                              for (std::size_t i = depth_; i-- > 0;)
                                  v = g.phi[p.at(shift + i)] + g.lambda * v;
                              return v;
                          },
                          [&](const SymbolIndicator& si) { return (p.at(shift) == si.symbol ? 1.0 : 0.0) + si.offset; },
                      },
                      variant_);
}

double birkhoff_sum(const Observable& h, const PeriodicPoint& p, std::size_t m, std::size_t n)
{
    if (n == 0)
        return 0.0;
    if (const auto* g = std::get_if<GeometricWeight>(&h.variant())) {
        // Truncated values satisfy h(t) = phi(p_t) + lambda h(t+1) - lambda^D phi(p_{t+D}).
        const std::size_t d = h.read_depth();
        const double lam_d = std::pow(g->lambda, static_cast<double>(d));
        double v = h.evaluate(p, m + n - 1);
        double total = v;
        for (std::size_t t = m + n - 1; t-- > m;) {
            v = g->phi[p.at(t)] + g->lambda * v - lam_d * g->phi[p.at(t + d)];
            total += v;
        }
        return total;
    }
    if (const auto* si = std::get_if<SymbolIndicator>(&h.variant())) {
        const std::size_t period = p.period();
        std::size_t hits = 0;
        const Word& w = p.word();
        std::size_t pos = m % period;
        for (std::size_t t = 0; t < n; ++t) {
            hits += w[pos] == si->symbol;
            if (++pos == period)
                pos = 0;
        }
        return static_cast<double>(hits) + si->offset * static_cast<double>(n);
    }
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t)
        total += h.evaluate(p, m + t);
    return total;
}

OscillationTable::OscillationTable(const SymbolicSystem& system, const Observable& h, const Rational& eps,
                                   std::size_t n, std::span<const PeriodicPoint> Y)
    : h_(&h), n_(n), length_(ball_agreement_length(system, n, eps))
{
    for (const auto& y : Y) {
        const double s = birkhoff_sum(h, y, 0, n);
        auto [it, fresh] = extremes_.try_emplace(prefix_key(y, length_), s, s);
        if (!fresh) {
            it->second.first = std::min(it->second.first, s);
            it->second.second = std::max(it->second.second, s);
        }
    }
}

double OscillationTable::query(const PeriodicPoint& x, std::size_t m) const
{
    return query(x, m, birkhoff_sum(*h_, x, m, n_));
}

double OscillationTable::query(const PeriodicPoint& x, std::size_t m, double sum_at_x) const
{
    auto it = extremes_.find(prefix_key(x, length_, m));
    if (it == extremes_.end())
        return 0.0;
    return std::max(std::fabs(sum_at_x - it->second.first), std::fabs(it->second.second - sum_at_x));
}

double oscillation(const SymbolicSystem& system, const Observable& h, const Rational& eps, std::size_t m,
                   std::size_t n, const PeriodicPoint& x, std::span<const PeriodicPoint> Y, OscillationMode mode,
                   std::uint64_t budget)
{
    if (mode == OscillationMode::Bound)
        return oscillation_bound(system, h, eps, n);
    if (Y.size() > budget)
        throw Error(ErrorCode::BudgetExceeded, "oscillation set Y exceeds the enumeration budget");
    return OscillationTable(system, h, eps, n, Y).query(x, m);
}

double oscillation_bound(const SymbolicSystem& system, const Observable& h, const Rational& eps, std::size_t n)
{
    const std::size_t L = ball_agreement_length(system, n, eps);
    const double r = to_double(system.metric_base());
    const double lip = h.lipschitz_bound(system.metric_base());
    const double trunc = 2.0 * h.truncation_error();
    double total = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        // Summand t compares points agreeing on their first L - t symbols.
        const std::size_t agree = L > t ? L - t : 0;
        double term = std::visit(overloaded{
                                     [&](const GeometricWeight& g) {
                                         return std::pow(g.lambda, static_cast<double>(agree)) * phi_spread(g) /
                                                (1.0 - g.lambda);
                                     },
                                     [&](const auto&) { return agree >= h.read_depth() ? 0.0 : h.spread(); },
                                 },
                                 h.variant());
        if (std::isfinite(lip))
            term = std::min(term, lip * std::pow(r, static_cast<double>(agree)));
        total += term + trunc;
    }
    return total;
}

} // namespace orbitclt
