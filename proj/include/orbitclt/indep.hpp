#pragma once

#include "orbitclt/systems.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace orbitclt {

using IndexTuple = std::vector<std::size_t>;

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    void add(std::string name, bool passed, std::string detail = {});
    bool all_passed() const;
};

/// Greedy pass in input order keeping a point iff it is d_n-farther than
/// `threshold` from every kept point.
std::vector<PeriodicPoint> maximal_separated(const SymbolicSystem& system, std::span<const PeriodicPoint> candidates,
                                             std::size_t n, const Rational& threshold);

struct SpanningResult {
    bool spans = false;
    std::optional<PeriodicPoint> witness;
};

SpanningResult check_spanning(const SymbolicSystem& system, std::span<const PeriodicPoint> centers,
                              std::span<const PeriodicPoint> targets, std::size_t n, const Rational& radius);

/// Whether `centers` (n, radius)-spans all of P_period, decided through
/// prefix completability instead of enumerating P_period.
SpanningResult check_spans_periodic(const SymbolicSystem& system, std::span<const PeriodicPoint> centers,
                                    std::size_t period, std::size_t n, const Rational& radius,
                                    std::uint64_t budget = kDefaultEnumerationBudget);

struct IndepOptions {
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    /// The image of Phi is materialized when the product set is at most this large.
    std::uint64_t materialize_budget = std::uint64_t{1} << 16;
    std::size_t validation_samples = 256;
    std::uint64_t validation_seed = 0x5EEDULL;
};

/// One factor E_i of a product set, indexed by the prefix that identifies
/// its separation class.
struct Factor {
    std::vector<PeriodicPoint> points;
    std::size_t window = 0;     // Bowen window the factor was separated with
    std::size_t key_length = 0; // d_window > 2 eps iff prefixes of this length differ
    std::unordered_map<std::string, std::size_t> index;

    Factor(std::vector<PeriodicPoint> pts, std::size_t window, std::size_t key_length);
    std::optional<std::size_t> find(const PeriodicPoint& point, std::size_t offset) const;
};

std::string prefix_key(const PeriodicPoint& point, std::size_t length, std::size_t offset = 0);

/// A set of periodic points in bijection with a product of factor sets
/// E_1 x ... x E_k, each block of Phi(x) shadowing the matching factor.
class ProductSet {
public:
    virtual ~ProductSet() = default;

    const SymbolicSystem& system() const { return system_; }
    const Rational& epsilon() const { return epsilon_; }
    std::size_t blocks() const { return factors_.size(); }
    /// Block length n of the dynamical array.
    std::size_t window() const { return window_; }
    /// Offset between consecutive blocks: n + M (global) or n (local).
    std::size_t stride() const { return stride_; }
    std::size_t period() const { return period_; }
    std::size_t factor_size(std::size_t i) const { return factors_[i]->points.size(); }
    const std::vector<PeriodicPoint>& factor(std::size_t i) const { return factors_[i]->points; }
    const Factor& factor_data(std::size_t i) const { return *factors_[i]; }

    /// |E_1| * ... * |E_k|.
    BigInt size() const;

    PeriodicPoint phi(std::span<const std::size_t> tuple) const;
    std::optional<IndexTuple> phi_inverse(const PeriodicPoint& point) const;

    bool materialized() const { return !image_.empty(); }
    /// Phi over all tuples in mixed-radix order (only when materialized).
    const std::vector<PeriodicPoint>& image() const { return image_; }
    const ValidationReport& validation() const { return validation_; }

    /// Writes the symbols of Phi(tuple) into `out` (resized to period()).
    virtual void phi_into(std::span<const std::size_t> tuple, Word& out) const = 0;

    /// Mixed-radix decoding of `flat` (block 1 most significant).
    IndexTuple tuple_from_flat(std::uint64_t flat) const;

protected:
    ProductSet(SymbolicSystem system, Rational epsilon) : system_(std::move(system)), epsilon_(std::move(epsilon)) {}

    void materialize(std::uint64_t budget);
    /// Exact shadowing, injectivity and admissibility checks on every tuple
    /// (materialized) or on sampled tuples. Adds results to validation_.
    void validate_tuples(std::size_t samples, std::uint64_t seed,
                         const std::vector<std::pair<std::size_t, std::size_t>>& block_windows);

    SymbolicSystem system_;
    Rational epsilon_;
    std::size_t window_ = 0;
    std::size_t stride_ = 0;
    std::size_t period_ = 0;
    std::vector<std::shared_ptr<const Factor>> factors_;
    std::vector<PeriodicPoint> image_;
    ValidationReport validation_;
};

class EpsIndependentSet final : public ProductSet {
public:
    std::size_t k() const { return blocks(); }
    std::size_t n() const { return window(); }
    std::size_t M() const { return gap_; }
    const std::vector<PeriodicPoint>& E() const { return factors_.front()->points; }
    /// Symbols of x_i copied verbatim into each block (n + a(eps)).
    std::size_t copied_length() const { return copied_; }

    void phi_into(std::span<const std::size_t> tuple, Word& out) const override;

private:
    friend EpsIndependentSet build_global_indep(const SymbolicSystem&, const Rational&, std::size_t, std::size_t,
                                                std::size_t, const IndepOptions&);
    EpsIndependentSet(SymbolicSystem system, Rational epsilon) : ProductSet(std::move(system), std::move(epsilon)) {}

    std::size_t gap_ = 0;
    std::size_t copied_ = 0;
    std::vector<Word> bridges_; // indexed by from * S + to
    std::vector<Word> copied_words_; // first n + a symbols of each element of E
};

EpsIndependentSet build_global_indep(const SymbolicSystem& system, const Rational& eps, std::size_t k, std::size_t n,
                                     std::size_t M, const IndepOptions& options = {});

/// Cylinder constraints at block starts: symbols at positions (i-1)n ... match cylinder i.
struct CylinderSchedule {
    std::size_t n = 1;
    std::vector<Word> cylinders;

    std::size_t k() const { return cylinders.size(); }
    /// Whether the cyclic point of period m satisfies every cylinder.
    bool contains(const PeriodicPoint& point) const;
};

struct LocalIndepOptions : IndepOptions {
    /// Build each E_i by a greedy pass over the explicitly enumerated
    /// T^{(i-1)n}(A ∩ P_m), started at this offset (cyclically). Without it
    /// the lexicographic representatives are constructed directly.
    std::optional<std::size_t> enumerate_with_rotation;
    /// Verify the sandwich A ∩ P_m ⊆ P ⊆ B^m_eps(A) ∩ P_m by brute force when
    /// eps < eps*/3 and |P_m| is within the enumeration budget.
    bool check_sandwich = true;
};

class LocalEpsIndependentSet final : public ProductSet {
public:
    const CylinderSchedule& schedule() const { return schedule_; }
    std::size_t m() const { return period(); }
    std::size_t tail_window() const { return period() - (blocks() - 1) * window(); }
    std::size_t candidate_rotation() const { return rotation_; }

    void phi_into(std::span<const std::size_t> tuple, Word& out) const override;

private:
    friend LocalEpsIndependentSet build_local_indep(const SymbolicSystem&, const CylinderSchedule&, const Rational&,
                                                    std::size_t, const LocalIndepOptions&);
    LocalEpsIndependentSet(SymbolicSystem system, Rational epsilon) : ProductSet(std::move(system), std::move(epsilon)) {}

    CylinderSchedule schedule_;
    std::size_t rotation_ = 0;
    std::vector<std::vector<Word>> heads_; // first window symbols of each element of E_i
};


LocalEpsIndependentSet build_local_indep(const SymbolicSystem& system, const CylinderSchedule& schedule,
                                         const Rational& eps, std::size_t m, const LocalIndepOptions& options = {});

/// All points of A ∩ P_m, lexicographic.
std::vector<PeriodicPoint> enumerate_cylinder_points(const SymbolicSystem& system, const CylinderSchedule& schedule,
                                                     std::size_t m, std::uint64_t budget = kDefaultEnumerationBudget);

/// |A ∩ P_m| by a constrained transfer-matrix product.
BigInt count_cylinder_points(const SymbolicSystem& system, const CylinderSchedule& schedule, std::size_t m);

PeriodicPoint phi_apply(const ProductSet& set, std::span<const std::size_t> tuple);

/// Draws sample `index` of the stream `seed`: a uniform tuple of the product set.
void draw_tuple(const ProductSet& set, std::uint64_t seed, std::uint64_t index, IndexTuple& out);

std::vector<std::pair<IndexTuple, PeriodicPoint>> sample_uniform(const ProductSet& set, std::uint64_t seed,
                                                                 std::size_t count);

/// A p with p in B^{n1}_eps(x1) and T^{n1+M1} p in B^{n2}_eps(x2), of period n1+M1+n2+M2.
PeriodicPoint specify_two(const SymbolicSystem& system, const PeriodicPoint& x1, std::size_t n1,
                          const PeriodicPoint& x2, std::size_t n2, std::size_t M1, std::size_t M2, const Rational& eps);

struct WeightedMeasure {
    std::vector<PeriodicPoint> support;     // P_{k(n+M)}, lexicographic
    std::vector<Rational> weights;          // aligned with support
    std::vector<std::vector<std::size_t>> q_sets; // Q(p) for p in image(), as support indices
};

WeightedMeasure weighted_measure(const EpsIndependentSet& set, std::uint64_t budget = kDefaultEnumerationBudget);

} // namespace orbitclt
