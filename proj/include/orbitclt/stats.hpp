#pragma once

#include "orbitclt/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace orbitclt {

/// Pairwise summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

struct MomentReport {
    double mean = 0.0;
    double variance = 0.0; // population variance
    bool exact = true;
    std::size_t sample_count = 0;
    double standard_error = 0.0; // batch means, Monte Carlo only
};

/// Uniform weights; exact over the given population.
MomentReport moments(std::span<const double> values);
/// Weights must sum to exactly 1.
MomentReport moments(std::span<const double> values, std::span<const Rational> weights);
/// Values are i.i.d. draws; the mean's standard error comes from 16 batch means.
MomentReport monte_carlo_moments(std::span<const double> values);

inline constexpr std::size_t kBatchCount = 16;
double batch_means_standard_error(std::span<const double> values, std::size_t batches = kBatchCount);

/// sum_j w_j (v_j - mean)^2 1{|v_j - mean| > cutoff}; uniform weights when `weights` is empty.
double lindeberg_function(std::span<const double> values, double mean, double cutoff,
                          std::span<const double> weights = {});

std::vector<double> default_eta_grid();

double normal_cdf(double t);

struct MixtureAtom {
    double sigma = 1.0;
    double probability = 1.0;
};

/// Standard normal when `atoms` is a single (1, 1); sigma = 0 is a point mass at 0.
struct Reference {
    std::vector<MixtureAtom> atoms{MixtureAtom{}};

    static Reference standard_normal() { return {}; }
    static Reference mixture(std::vector<MixtureAtom> atoms);
    bool is_standard_normal() const;
    double cdf(double t) const;
    double cdf_left(double t) const;
};

struct DistributionDistance {
    double ks_statistic = 0.0;
    std::size_t sample_count = 0;
    Reference reference;
};

DistributionDistance ks_distance(std::span<const double> samples, const Reference& reference);
/// Kolmogorov distance between a discrete distribution (values with
/// probabilities summing to 1) and the reference.
DistributionDistance ks_distance(std::span<const double> values, std::span<const double> probabilities,
                                 const Reference& reference);

struct CdfPoint {
    double t = 0.0;
    double empirical = 0.0;
    double reference = 0.0;
};

/// At most `max_points` evaluation points of the empirical and reference CDFs.
std::vector<CdfPoint> cdf_dump(std::span<const double> samples, const Reference& reference,
                               std::size_t max_points = 512);

} // namespace orbitclt
