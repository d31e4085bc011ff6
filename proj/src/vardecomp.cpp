#include "orbitclt/vardecomp.hpp"

#include "orbitclt/error.hpp"

#include <cmath>

namespace orbitclt {

namespace {

// Neumaier summation.
class Accumulator {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

double ambient_mean(const SymbolicSystem& system, const Observable& h, std::size_t m, std::uint64_t budget)
{
    const BigInt total = periodic_count(system, m);
    if (total == 0)
        throw Error(ErrorCode::InvalidArgument, "no periodic points of period " + std::to_string(m));
    const bool finite_read = !std::holds_alternative<GeometricWeight>(h.variant());
    const std::size_t D = h.read_depth();
    if (finite_read && D <= m) {
        const auto P = system.power(m - D + 1);
        Accumulator acc;
        for (const Word& w : enumerate_words(system, D, budget)) {
            const BigInt& c = P[w.back()][w.front()];
            if (c == 0)
                continue;
            Word full = w;
            acc.add(to_double(Rational(c, total)) * h.evaluate(PeriodicPoint(std::move(full))));
        }
        return acc.value();
    }
    if (total > BigInt(std::to_string(budget)))
        throw Error(ErrorCode::BudgetExceeded, "P_" + std::to_string(m) + " exceeds the enumeration budget");
    Accumulator acc;
    const auto points = enumerate_periodic(system, m, budget);
    for (const auto& p : points)
        acc.add(h.evaluate(p));
    return acc.value() / static_cast<double>(points.size());
}

VarDecomp variance_components(const Observable& h, const LocalEpsIndependentSet& set, std::uint64_t budget)
{
    if (!set.materialized())
        throw Error(ErrorCode::BudgetExceeded, "variance components need the product set materialized");
    const std::size_t k = set.blocks();
    const std::size_t n = set.window();
    VarDecomp out;
    out.ambient_mean = ambient_mean(set.system(), h, set.period(), budget);
    out.set_size = set.image().size();
    const double E = out.ambient_mean;

    std::vector<std::vector<double>> hx(k);
    std::vector<double> mean(k);
    Accumulator loc_plain, hoel;
    for (std::size_t i = 0; i < k; ++i) {
        Accumulator s;
        for (const auto& x : set.factor(i)) {
            hx[i].push_back(h.evaluate(x));
            s.add(hx[i].back());
        }
        mean[i] = s.value() / static_cast<double>(hx[i].size());
        for (double v : hx[i])
            loc_plain.add((v - mean[i]) * (v - mean[i]));
        hoel.add((mean[i] - E) * (mean[i] - E));
    }
    out.var_loc_per_factor = loc_plain.value();
    out.var_hoel = static_cast<double>(out.set_size) * hoel.value();

    Accumulator per, loc, tot, cov;
    for (std::size_t idx = 0; idx < set.image().size(); ++idx) {
        const PeriodicPoint& p = set.image()[idx];
        const IndexTuple t = set.tuple_from_flat(idx);
        for (std::size_t i = 0; i < k; ++i) {
            const double a = h.evaluate(p, i * n);
            const double b = hx[i][t[i]];
            per.add((a - b) * (a - b));
            loc.add((b - mean[i]) * (b - mean[i]));
            tot.add((a - E) * (a - E));
            cov.add((a - b) * (b - E));
        }
    }
    out.var_per = per.value();
    out.var_loc = loc.value();
    out.var_tot = tot.value();
    out.cov = cov.value();
    out.residual = out.var_tot - (out.var_per + out.var_loc + out.var_hoel + 2.0 * out.cov);
    out.bound_slack = std::sqrt(out.var_per * (out.var_loc + out.var_hoel)) - out.cov;
    return out;
}

ProductChoice find_clt_admissible(const SymbolicSystem& system, const Observable& h, const CylinderSchedule& schedule,
                                  const Rational& eps, std::size_t m, std::size_t generator_budget,
                                  const IndepOptions& options)
{
    if (generator_budget == 0)
        throw Error(ErrorCode::InvalidArgument, "generator budget must be at least 1");
    const BigInt cell = count_cylinder_points(system, schedule, m);
    std::size_t rotations = generator_budget;
    if (cell < BigInt(std::to_string(generator_budget)))
        rotations = std::max<std::size_t>(1, cell.get_ui());
    ProductChoice best;
    for (std::size_t r = 0; r < rotations; ++r) {
        LocalIndepOptions lo;
        static_cast<IndepOptions&>(lo) = options;
        lo.enumerate_with_rotation = r;
        auto set = std::make_shared<const LocalEpsIndependentSet>(build_local_indep(system, schedule, eps, m, lo));
        const VarDecomp d = variance_components(h, *set, options.enumeration_budget);
        const bool better = !best.set || d.var_per < best.var_per_objective ||
                            (d.var_per == best.var_per_objective && d.var_loc < best.var_loc_objective);
        if (better) {
            best.set = std::move(set);
            best.rotation = r;
            best.var_per_objective = d.var_per;
            best.var_loc_objective = d.var_loc;
            best.decomposition = d;
        }
    }
    best.candidate_count = rotations;
    return best;
}

} // namespace orbitclt
