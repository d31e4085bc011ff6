#pragma once

#include "orbitclt/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace orbitclt {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using BoolMatrix = std::vector<std::vector<char>>;
using CountMatrix = std::vector<std::vector<BigInt>>;

inline constexpr std::uint64_t kDefaultEnumerationBudget = std::uint64_t{1} << 22;

/// One-sided subshift of finite type with the ultrametric d(x, y) = r^m,
/// m the first index where x and y disagree.
class SymbolicSystem {
public:
    /// Throws InvalidArgument for malformed input and NotPrimitive when no
    /// power of the transition matrix is entrywise positive.
    static SymbolicSystem create(std::vector<std::vector<int>> transitions,
                                 Rational metric_base = Rational(1, 2),
                                 Rational expansiveness = Rational(1, 2));

    static SymbolicSystem full_shift(std::size_t symbols);
    static SymbolicSystem golden_mean();

    std::size_t num_symbols() const { return transitions_.size(); }
    bool allowed(Symbol from, Symbol to) const { return transitions_[from][to] != 0; }
    const std::vector<std::vector<int>>& transitions() const { return transitions_; }
    const Rational& metric_base() const { return metric_base_; }
    const Rational& expansiveness_constant() const { return expansiveness_; }
    unsigned mixing_index() const { return mixing_index_; }

    bool is_admissible(std::span<const Symbol> word) const;
    bool is_cyclic_admissible(std::span<const Symbol> word) const;

    /// reach(k)[a][b] != 0 iff there is an admissible path of k steps from a to b.
    BoolMatrix reach(std::size_t steps) const;
    CountMatrix power(std::size_t steps) const;

private:
    SymbolicSystem() = default;

    std::vector<std::vector<int>> transitions_;
    Rational metric_base_{1, 2};
    Rational expansiveness_{1, 2};
    unsigned mixing_index_ = 1;
};

/// A point x = word^infinity with T^period x = x.
class PeriodicPoint {
public:
    PeriodicPoint() = default;
    explicit PeriodicPoint(Word word);

    std::size_t period() const { return word_.size(); }
    const Word& word() const { return word_; }
    Symbol at(std::size_t index) const { return word_[index % word_.size()]; }

    friend bool operator==(const PeriodicPoint&, const PeriodicPoint&) = default;
    friend auto operator<=>(const PeriodicPoint&, const PeriodicPoint&) = default;

private:
    Word word_;
};

std::string word_to_string(std::span<const Symbol> word);
Word word_from_string(std::string_view text);
std::string to_string(const PeriodicPoint& point);

/// Equality of the represented infinite sequences (periods may differ).
bool same_point(const PeriodicPoint& a, const PeriodicPoint& b);

/// First index where the unrolled sequences differ; nullopt when equal.
std::optional<std::size_t> first_disagreement(const PeriodicPoint& a, const PeriodicPoint& b);

/// Whether the unrolled sequences agree on their first `length` symbols.
bool agree_on_prefix(const PeriodicPoint& a, const PeriodicPoint& b, std::size_t length,
                     std::size_t offset_a = 0, std::size_t offset_b = 0);

/// The first `length` symbols of the unrolled sequence starting at `offset`.
Word unrolled_prefix(const PeriodicPoint& point, std::size_t length, std::size_t offset = 0);

/// d_n(x, y) = r^exponent, or zero.
struct BowenDistance {
    bool zero = false;
    unsigned exponent = 0;

    Rational value(const Rational& metric_base) const;
};

BowenDistance bowen_separation(const PeriodicPoint& a, const PeriodicPoint& b, std::size_t n);
bool bowen_distance_less(const SymbolicSystem& system, const BowenDistance& d, const Rational& radius);
bool bowen_distance_greater(const SymbolicSystem& system, const BowenDistance& d, const Rational& threshold);

/// d_n(x, y) < radius iff x and y agree on their first L symbols; returns L.
std::size_t ball_agreement_length(const SymbolicSystem& system, std::size_t n, const Rational& radius);

/// d_n(x, y) > threshold iff x and y disagree somewhere among their first L
/// symbols; returns L (0: no pair is ever that far apart).
std::size_t separation_length(const SymbolicSystem& system, std::size_t n, const Rational& threshold);

BigInt periodic_count(const SymbolicSystem& system, std::size_t n);

/// All admissible cyclic words of length n in lexicographic order.
std::vector<PeriodicPoint> enumerate_periodic(const SymbolicSystem& system, std::size_t n,
                                              std::uint64_t budget = kDefaultEnumerationBudget);

/// All admissible (linear) words of the given length in lexicographic order.
std::vector<Word> enumerate_words(const SymbolicSystem& system, std::size_t length,
                                  std::uint64_t budget = kDefaultEnumerationBudget);

PeriodicPoint shift_point(const PeriodicPoint& point, std::size_t t);

unsigned mixing_index(const std::vector<std::vector<int>>& transitions);
inline unsigned mixing_index(const SymbolicSystem& system) { return system.mixing_index(); }

/// Lexicographically smallest w of length g with (from, w, to) admissible.
Word connect_words(const SymbolicSystem& system, Symbol from, Symbol to, std::size_t length);

struct SpecificationParams {
    unsigned agreement_depth = 0;
    unsigned gap_min = 0;
    unsigned M_of_eps = 0;
    unsigned N_of_eps = 0;
    Rational delta_of_eps;
};

SpecificationParams specification_parameters(const SymbolicSystem& system, const Rational& eps);

} // namespace orbitclt
