#include "orbitclt/stats.hpp"

#include "orbitclt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace orbitclt {

double pairwise_sum(std::span<const double> values)
{
    if (values.size() <= 64) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MomentReport moments(std::span<const double> values)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyInput, "moments of an empty list");
    const double n = static_cast<double>(values.size());
    const double mean = pairwise_sum(values) / n;
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [&](double v) { return (v - mean) * (v - mean); });
    return {mean, pairwise_sum(sq) / n, true, values.size(), 0.0};
}

MomentReport moments(std::span<const double> values, std::span<const Rational> weights)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyInput, "moments of an empty list");
    if (weights.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "one weight per value is required");
    Rational total = 0;
    for (const auto& w : weights) {
        if (w < 0)
            throw Error(ErrorCode::InvalidArgument, "weights must be nonnegative");
        total += w;
    }
    if (total != 1)
        throw Error(ErrorCode::InvalidArgument, "weights sum to " + format_rational(total) + ", not 1");
    std::vector<double> w(weights.size()), terms(values.size());
    std::transform(weights.begin(), weights.end(), w.begin(), [](const Rational& q) { return to_double(q); });
    for (std::size_t i = 0; i < values.size(); ++i)
        terms[i] = w[i] * values[i];
    const double mean = pairwise_sum(terms);
    for (std::size_t i = 0; i < values.size(); ++i)
        terms[i] = w[i] * (values[i] - mean) * (values[i] - mean);
    return {mean, pairwise_sum(terms), true, values.size(), 0.0};
}

double batch_means_standard_error(std::span<const double> values, std::size_t batches)
{
    batches = std::min(batches, values.size());
    if (batches < 2)
        return 0.0;
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * values.size() / batches, hi = (b + 1) * values.size() / batches;
        means[b] = pairwise_sum(values.subspan(lo, hi - lo)) / static_cast<double>(hi - lo);
    }
    const double grand = pairwise_sum(means) / static_cast<double>(batches);
    double ss = 0.0;
    for (double m : means)
        ss += (m - grand) * (m - grand);
    return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

MomentReport monte_carlo_moments(std::span<const double> values)
{
    MomentReport r = moments(values);
    r.exact = false;
    r.standard_error = batch_means_standard_error(values);
    return r;
}

double lindeberg_function(std::span<const double> values, double mean, double cutoff, std::span<const double> weights)
{
    if (!weights.empty() && weights.size() != values.size())
        throw Error(ErrorCode::InvalidArgument, "one weight per value is required");
    std::vector<double> terms(values.size(), 0.0);
    const double uniform = values.empty() ? 0.0 : 1.0 / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mean;
        if (std::fabs(d) > cutoff)
            terms[i] = (weights.empty() ? uniform : weights[i]) * d * d;
    }
    return pairwise_sum(terms);
}

std::vector<double> default_eta_grid() { return {0.05, 0.1, 0.25, 0.5, 1.0}; }

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

Reference Reference::mixture(std::vector<MixtureAtom> atoms)
{
    if (atoms.empty())
        throw Error(ErrorCode::EmptyInput, "mixture needs at least one atom");
    double total = 0.0;
    for (const auto& a : atoms) {
        if (a.sigma < 0.0 || a.probability < 0.0)
            throw Error(ErrorCode::InvalidArgument, "mixture atoms need sigma >= 0 and probability >= 0");
        total += a.probability;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw Error(ErrorCode::InvalidArgument, "mixture probabilities must sum to 1");
    return Reference{std::move(atoms)};
}

bool Reference::is_standard_normal() const
{
    return atoms.size() == 1 && atoms[0].sigma == 1.0;
}

double Reference::cdf(double t) const
{
    double f = 0.0;
    for (const auto& a : atoms)
        f += a.probability * (a.sigma > 0.0 ? normal_cdf(t / a.sigma) : (t >= 0.0 ? 1.0 : 0.0));
    return f;
}

double Reference::cdf_left(double t) const
{
    double f = 0.0;
    for (const auto& a : atoms)
        f += a.probability * (a.sigma > 0.0 ? normal_cdf(t / a.sigma) : (t > 0.0 ? 1.0 : 0.0));
    return f;
}

namespace {

// Sup distance for a step function given by sorted support points and
// cumulative masses, against a reference with a possible jump at 0.
double step_ks(const std::vector<std::pair<double, double>>& sorted, const Reference& ref)
{
    double d = 0.0, below = 0.0;
    bool zero_seen = false;
    auto probe_zero = [&](double mass_below) {
        d = std::max({d, std::fabs(mass_below - ref.cdf(0.0)), std::fabs(mass_below - ref.cdf_left(0.0))});
        zero_seen = true;
    };
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double t = sorted[i].first;
        double mass = 0.0;
        while (i < sorted.size() && sorted[i].first == t)
            mass += sorted[i++].second;
        if (!zero_seen && t > 0.0)
            probe_zero(below);
        d = std::max(d, std::fabs(below - ref.cdf_left(t)));
        below += mass;
        d = std::max(d, std::fabs(below - ref.cdf(t)));
        if (t == 0.0)
            zero_seen = true;
    }
    if (!zero_seen)
        probe_zero(below);
    return std::min(d, 1.0);
}

} // namespace

DistributionDistance ks_distance(std::span<const double> samples, const Reference& reference)
{
    if (samples.empty())
        throw Error(ErrorCode::EmptyInput, "KS distance of an empty sample");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(samples.size());
    const double w = 1.0 / static_cast<double>(samples.size());
    for (double s : samples)
        pts.emplace_back(s, w);
    std::sort(pts.begin(), pts.end());
    // Cumulative masses from counts rather than repeated additions of w.
    std::vector<std::pair<double, double>> grouped;
    for (std::size_t i = 0; i < pts.size();) {
        std::size_t j = i;
        while (j < pts.size() && pts[j].first == pts[i].first)
            ++j;
        grouped.emplace_back(pts[i].first, static_cast<double>(j - i) / static_cast<double>(samples.size()));
        i = j;
    }
    return {step_ks(grouped, reference), samples.size(), reference};
}

DistributionDistance ks_distance(std::span<const double> values, std::span<const double> probabilities,
                                 const Reference& reference)
{
    if (values.empty())
        throw Error(ErrorCode::EmptyInput, "KS distance of an empty distribution");
    if (values.size() != probabilities.size())
        throw Error(ErrorCode::InvalidArgument, "one probability per value is required");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < values.size(); ++i)
        pts.emplace_back(values[i], probabilities[i]);
    std::sort(pts.begin(), pts.end());
    return {step_ks(pts, reference), values.size(), reference};
}

std::vector<CdfPoint> cdf_dump(std::span<const double> samples, const Reference& reference, std::size_t max_points)
{
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<CdfPoint> out;
    if (sorted.empty() || max_points == 0)
        return out;
    const std::size_t stride = std::max<std::size_t>(1, sorted.size() / max_points);
    for (std::size_t i = 0; i < sorted.size(); i += stride) {
        const double t = sorted[i];
        const auto upto = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        out.push_back({t, static_cast<double>(upto) / static_cast<double>(sorted.size()), reference.cdf(t)});
    }
    return out;
}

} // namespace orbitclt
