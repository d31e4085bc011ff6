#include "orbitclt/parry.hpp"

#include "orbitclt/error.hpp"

#include <cmath>
#include <numeric>

namespace orbitclt {

namespace {

std::vector<double> perron_vector(const SymbolicSystem& system, bool transpose, double tol, double& root, int& iters)
{
    const std::size_t s = system.num_symbols();
    std::vector<double> v(s, 1.0 / static_cast<double>(s)), next(s);
    for (iters = 1; iters <= 1000000; ++iters) {
        for (std::size_t i = 0; i < s; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < s; ++j)
                acc += (transpose ? system.allowed(j, i) : system.allowed(i, j)) ? v[j] : 0.0;
            next[i] = acc;
        }
        root = std::accumulate(next.begin(), next.end(), 0.0);
        double change = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            next[i] /= root;
            change = std::max(change, std::fabs(next[i] - v[i]) / next[i]);
        }
        v.swap(next);
        if (change < tol)
            return v;
    }
    throw Error(ErrorCode::NotPrimitive, "power iteration did not converge");
}

} // namespace

ParryMeasure parry(const SymbolicSystem& system, double tol)
{
    ParryMeasure mu;
    int it_left = 0, it_right = 0;
    double root_left = 0.0;
    mu.right = perron_vector(system, false, tol, mu.perron_root, it_right);
    mu.left = perron_vector(system, true, tol, root_left, it_left);
    mu.iterations = std::max(it_left, it_right);
    mu.entropy = std::log(mu.perron_root);
    return mu;
}

double ParryMeasure::cylinder(const SymbolicSystem& system, std::span<const Symbol> w) const
{
    if (w.empty())
        return 1.0;
    if (!system.is_admissible(w))
        return 0.0;
    double dot = 0.0;
    for (std::size_t i = 0; i < left.size(); ++i)
        dot += left[i] * right[i];
    return left[w.front()] * right[w.back()] / std::pow(perron_root, static_cast<double>(w.size() - 1)) / dot;
}

Rational cylinder_frequency(const SymbolicSystem& system, std::size_t n, std::span<const Symbol> w)
{
    if (n == 0)
        throw Error(ErrorCode::InvalidArgument, "period must be positive");
    if (w.size() > n)
        throw Error(ErrorCode::InvalidArgument, "cylinder longer than the period");
    for (Symbol c : w)
        if (c >= system.num_symbols())
            throw Error(ErrorCode::InvalidArgument, "cylinder symbol out of range");
    const BigInt total = periodic_count(system, n);
    if (w.empty())
        return Rational(1);
    if (!system.is_admissible(w))
        return Rational(0);
    BigInt count;
    if (w.size() == n)
        count = system.is_cyclic_admissible(w) ? 1 : 0;
    else
        count = system.power(n - w.size() + 1)[w.back()][w.front()];
    Rational q(count, total);
    q.canonicalize();
    return q;
}

} // namespace orbitclt
