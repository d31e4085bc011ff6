#pragma once

#include "orbitclt/systems.hpp"

#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace orbitclt {

struct LocallyConstant {
    std::size_t depth = 1;
    /// Indexed by the base-S code of a depth-word; NaN for inadmissible words.
    std::vector<double> table;
};

/// h(x) = sum_i lambda^i phi(x_i), truncated once the tail is below tol.
struct GeometricWeight {
    double lambda = 0.5;
    std::vector<double> phi;
    double tol = 1e-12;
};

/// h(x) = 1{x_0 = symbol} + offset.
struct SymbolIndicator {
    Symbol symbol = 0;
    double offset = 0.0;
};

class Observable {
public:
    using Variant = std::variant<LocallyConstant, GeometricWeight, SymbolIndicator>;

    /// Table keys are words of length `depth`; every admissible word must be present.
    static Observable locally_constant(const SymbolicSystem& system, std::size_t depth,
                                       const std::vector<std::pair<Word, double>>& table);
    static Observable geometric_weight(const SymbolicSystem& system, double lambda, std::vector<double> phi,
                                       double tol = 1e-12);
    static Observable symbol_indicator(const SymbolicSystem& system, Symbol symbol, double offset = 0.0);
    static Observable constant(const SymbolicSystem& system, double value);

    const Variant& variant() const { return variant_; }
    std::size_t num_symbols() const { return symbols_; }
    /// Number of leading symbols evaluation reads.
    std::size_t read_depth() const { return depth_; }
    /// Bound on |h - truncated h| (0 for exact variants).
    double truncation_error() const { return truncation_error_; }
    bool exact() const { return truncation_error_ == 0.0; }
    /// max h - min h over the values the representation can take.
    double spread() const { return spread_; }
    double sup_abs() const { return sup_abs_; }
    /// sup |h(x) - h(y)| / d(x, y); +inf when no such bound exists.
    double lipschitz_bound(const Rational& metric_base) const;

    double evaluate(const PeriodicPoint& p, std::size_t shift = 0) const;

private:
    Observable(Variant v, std::size_t symbols) : variant_(std::move(v)), symbols_(symbols) {}
    void finish();

    Variant variant_;
    std::size_t symbols_ = 0;
    std::size_t depth_ = 1;
    double truncation_error_ = 0.0;
    double spread_ = 0.0;
    double sup_abs_ = 0.0;
};

/// S_m^n h(p) = sum_{i=m}^{m+n-1} h(T^i p).
double birkhoff_sum(const Observable& h, const PeriodicPoint& p, std::size_t m, std::size_t n);

/// Block layout of a dynamical array: block i covers [i(n+M), i(n+M)+n).
struct DynamicalArray {
    std::size_t k = 1;
    std::size_t n = 1;
    std::size_t M = 0;

    std::size_t start(std::size_t i) const { return i * (n + M); }
    std::size_t length() const { return k * (n + M); }
};

enum class OscillationMode { Exact, Bound };

/// Exact oscillations over a finite Y: for every L-prefix class of Y the
/// extreme values of S^n h, so that each query is one hash lookup.
class OscillationTable {
public:
    OscillationTable(const SymbolicSystem& system, const Observable& h, const Rational& eps, std::size_t n,
                     std::span<const PeriodicPoint> Y);

    /// omega_m^n(h, eps, x) over Y; 0 when the ball misses Y.
    double query(const PeriodicPoint& x, std::size_t m) const;
    double query(const PeriodicPoint& x, std::size_t m, double sum_at_x) const;
    std::size_t agreement_length() const { return length_; }

private:
    const Observable* h_;
    std::size_t n_;
    std::size_t length_;
    std::unordered_map<std::string, std::pair<double, double>> extremes_;
};

double oscillation(const SymbolicSystem& system, const Observable& h, const Rational& eps, std::size_t m,
                   std::size_t n, const PeriodicPoint& x, std::span<const PeriodicPoint> Y, OscillationMode mode,
                   std::uint64_t budget = kDefaultEnumerationBudget);

/// Analytic upper bound for omega^n(h, eps, .), valid for every x and Y.
double oscillation_bound(const SymbolicSystem& system, const Observable& h, const Rational& eps, std::size_t n);

} // namespace orbitclt
