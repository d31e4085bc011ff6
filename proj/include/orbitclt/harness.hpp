#pragma once

#include "orbitclt/indep.hpp"
#include "orbitclt/observables.hpp"
#include "orbitclt/parry.hpp"
#include "orbitclt/rng.hpp"
#include "orbitclt/stats.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace orbitclt {

/// Which finite Y stands in for the set of all periodic points in oscillations.
enum class OscillationY {
    ProductSet, // Y = the independent set itself (needs a materialized set)
    Ambient,    // Y = P_period (needs |P_period| within the enumeration budget)
    BoundOnly,  // analytic bound, no Y
};

const char* to_string(OscillationY y);
OscillationY oscillation_y_from_string(const std::string& s);

struct SamplingOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 0; // 0: hardware concurrency
    std::vector<double> eta_grid = default_eta_grid();
    OscillationY y = OscillationY::ProductSet;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

/// Window positions of a dynamical array on one orbit.
struct BlockLayout {
    std::vector<std::pair<std::size_t, std::size_t>> blocks; // (start, length)
    std::vector<std::pair<std::size_t, std::size_t>> gaps;
};

BlockLayout global_layout(std::size_t k, std::size_t n, std::size_t M);
BlockLayout local_layout(const LocalEpsIndependentSet& set);

struct EtaRow {
    double eta = 0.0;
    double lindeberg_ratio = 0.0;
    double negligibility = 0.0;
    /// 2 * max_i (window_i * sup|h_i|) <= eta * s_l: every block deviation is at most eta * s_l.
    bool uniform_bound_holds = false;
};

struct ConditionReport {
    double s_l = 0.0;
    double s_l_squared = 0.0;
    double oscillation_ratio_j1 = 0.0;
    double oscillation_ratio_j2 = 0.0;
    double uniform_oscillation_ratio = 0.0;
    double gap_ratio = 0.0;
    /// k^2 M^2 sup|h|^2 / s_l^2.
    double gap_hypothesis = 0.0;
    std::vector<EtaRow> eta;
    std::string oscillation_mode; // "exact" or "bound"
    std::string oscillation_y;
    bool exact = false;
    std::size_t sample_count = 0;
};

struct SetSummary {
    std::string kind;
    Rational epsilon;
    std::size_t k = 0, n = 0, M = 0, period = 0;
    std::vector<std::size_t> factor_sizes;
    std::string size;
    bool materialized = false;
    ValidationReport validation;
};

SetSummary summarize(const EpsIndependentSet& set);
SetSummary summarize(const LocalEpsIndependentSet& set);

struct CLTRunResult {
    std::size_t l = 0;
    SetSummary set;
    ConditionReport conditions;
    double mean_total = 0.0;
    bool degenerate = false;
    std::optional<DistributionDistance> ks;
    std::map<std::string, double> extra;
    double wall_seconds = 0.0;
    std::vector<double> normalized; // samples of (S - E S) / s_l, for CDF dumps
};

/// Statistics of the dynamical array over a product set under its uniform
/// measure: exact over the image when materialized, Monte Carlo otherwise.
struct ArrayStatistics {
    ConditionReport conditions;
    std::vector<double> totals; // S over the whole period, one per sample
    double mean_total = 0.0;
};

ArrayStatistics array_statistics(const ProductSet& set, const BlockLayout& layout,
                                 const std::vector<const Observable*>& block_observables, const Observable& gap_observable,
                                 const SamplingOptions& options);

struct GlobalPlan {
    SymbolicSystem system = SymbolicSystem::full_shift(2);
    std::vector<Rational> eps;
    std::vector<std::size_t> k, n, M;
    std::vector<Observable> observables; // one shared or one per level
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    std::uint64_t materialize_budget = std::uint64_t{1} << 16;
    OscillationY y = OscillationY::ProductSet;
    std::vector<double> eta_grid = default_eta_grid();

    std::size_t levels() const { return k.size(); }
    const Observable& observable(std::size_t l) const { return observables.size() == 1 ? observables[0] : observables[l]; }
    void validate() const;
};

struct LocalPlan {
    SymbolicSystem system = SymbolicSystem::full_shift(2);
    std::vector<Rational> eps;
    std::vector<std::size_t> m;
    std::vector<CylinderSchedule> schedules;
    /// Per level: one observable for every block or one per block.
    std::vector<std::vector<Observable>> block_observables;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
    std::uint64_t materialize_budget = std::uint64_t{1} << 16;
    OscillationY y = OscillationY::ProductSet;
    std::vector<double> eta_grid = default_eta_grid();

    std::size_t levels() const { return schedules.size(); }
    void validate() const;
};

std::vector<CLTRunResult> run_global_clt(const GlobalPlan& plan, unsigned workers = 0);
std::vector<CLTRunResult> run_weighted_clt(const GlobalPlan& plan, unsigned workers = 0);
std::vector<CLTRunResult> run_local_clt(const LocalPlan& plan, unsigned workers = 0);

struct MmeRow {
    std::string source; // "periodic" or "indep"
    std::size_t l = 0;
    std::size_t n = 0;
    std::size_t period = 0;
    double max_discrepancy = 0.0;
    std::string worst_word;
    /// Orbit-averaged cylinder frequencies against mu (independent sets only).
    double shift_averaged_discrepancy = 0.0;
    bool exact = true;
};

struct MmePlan {
    SymbolicSystem system = SymbolicSystem::full_shift(2);
    std::vector<std::size_t> periodic_n;
    std::vector<Rational> eps;
    std::vector<std::size_t> k, n, M;
    std::size_t max_word_length = 3;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

struct MmeReport {
    ParryMeasure parry;
    std::vector<MmeRow> rows;
    bool indep_decreasing = false;
    /// (n, log trace(A^n) / n) for the entropy consistency check.
    std::vector<std::pair<std::size_t, double>> entropy_estimates;
};

MmeReport run_mme_convergence(const MmePlan& plan, unsigned workers = 0);

/// max over admissible words w with |w| <= max_len of |nu_{P_n}([w]) - mu([w])|.
double periodic_cylinder_discrepancy(const SymbolicSystem& system, const ParryMeasure& mu, std::size_t n,
                                     std::size_t max_len, std::string* worst = nullptr);

struct ConcentrationRow {
    std::size_t l = 0;
    std::size_t k = 0, n = 0, M = 0, N = 0;
    double threshold = 0.0; // k^{-1/2 + eta}
    double mass = 0.0;
    double s_l_squared = 0.0;
    double fourth_moment_ratio = 0.0; // E(S^n h - E)^4 / sigma^4 on the first block
    double summability_term = 0.0;   // fourth_moment_ratio / sqrt(k)
    double equidistribution_mean = 0.0;
    double equidistribution_max = 0.0;
    std::size_t sample_count = 0;
};

struct ConcentrationPlan {
    SymbolicSystem system = SymbolicSystem::full_shift(2);
    std::vector<Rational> eps;
    std::vector<std::size_t> k, n, M;
    std::vector<Observable> observables;
    double eta = 0.2;
    std::size_t samples = 100000;
    std::size_t orbit_samples = 16;
    std::size_t max_word_length = 3;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

struct ConcentrationReport {
    std::vector<ConcentrationRow> rows;
    bool mass_nondecreasing = false;
};

ConcentrationReport run_birkhoff_concentration(const ConcentrationPlan& plan, unsigned workers = 0);

/// Cylinder frequencies along one orbit: max over admissible w, |w| <= max_len,
/// of |(1/N) #{0 <= i < N: T^i p in [w]} - mu([w])|.
double orbit_measure_discrepancy(const SymbolicSystem& system, const ParryMeasure& mu, const PeriodicPoint& p,
                                 std::size_t max_len);

/// Mixture CLT over cells alpha = U v T^{-n}U v ... v T^{-(k-1)n}U, U a family
/// of disjoint cylinders of one depth d. mu_A is realized as the uniform
/// measure on A ∩ P_j; observables may read at most d + 1 symbols so that
/// blocks are independent given the cell.
struct MixturePlan {
    SymbolicSystem system = SymbolicSystem::golden_mean();
    std::vector<Word> cylinders;
    std::vector<std::size_t> n, k;
    std::size_t j = 24; // ambient period, raised to a multiple of n that is >= k n
    std::vector<Observable> observables;
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t enumeration_budget = kDefaultEnumerationBudget;
};

struct MixtureLevel {
    std::size_t l = 0;
    std::size_t n = 0, k = 0, j = 0;
    double s_l = 0.0;
    double cell_variance_max = 0.0;
    double cell_variance_min = 0.0;
    std::optional<double> variance_ratio; // empty when some cell has zero variance
    double ks_mixture = 0.0;
    double ks_single_normal = 0.0;
    double third_moment_constant = 0.0;
    std::optional<double> sigma_field_l1_change;
    double coverage_deficiency = 0.0;
    double coverage_deficiency_times_k = 0.0;
    double periodic_coverage = 0.0;
    double thickening_ratio = 1.0; // the ball-thickened to plain cell mass at j
    std::vector<MixtureAtom> atoms;
    std::size_t distinct_cells_sampled = 0;
    std::size_t sample_count = 0;
    std::vector<double> normalized;
};

struct MixtureReport {
    std::vector<MixtureLevel> levels;
};

MixtureReport run_mixture_clt(const MixturePlan& plan, unsigned workers = 0);

struct WildLevel {
    std::size_t l = 0;
    std::size_t k = 0, n = 0, W = 0, depth = 0;
    Rational epsilon;
    double s_l = 0.0;
    double short_sum_ratio = 0.0;  // max_{r<n} max_A var(S^r h) / s_l^2
    double oscillation_ratio = 0.0; // bound-mode sum of squared oscillations / s_l^2
    std::size_t cells_sampled = 0;
};

struct WildPlan {
    SymbolicSystem system = SymbolicSystem::full_shift(2);
    Observable observable = Observable::constant(SymbolicSystem::full_shift(2), 0.0);
    std::vector<std::size_t> partition_depth, W, n;
    std::vector<Rational> eps;
    std::size_t cells = 16;
    std::size_t samples_per_cell = 2000;
    double threshold = 0.1;
    std::uint64_t seed = 0;
};

struct WildReport {
    std::vector<WildLevel> levels;
    bool s_increasing = false;
    bool short_sum_decreasing = false;
    bool oscillation_decreasing = false;
    bool verdict = false;
};

WildReport check_wildly_oscillating(const WildPlan& plan, unsigned workers = 0);

/// Uniform sampler on the points of P_m that carry given symbols at given positions.
class PinnedSampler {
public:
    PinnedSampler(const SymbolicSystem& system, std::vector<int> pins);
    bool empty() const { return empty_; }
    void draw(CounterRng& rng, Word& out) const;

private:
    const SymbolicSystem* system_;
    std::vector<int> pins_;
    std::size_t m_, s_;
    std::vector<double> start_weight_;
    std::vector<std::vector<double>> scaled_; // per first symbol, per (pos, symbol) completions up to scale
    bool empty_ = true;
};

} // namespace orbitclt
