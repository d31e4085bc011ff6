#pragma once

#include "orbitclt/systems.hpp"

#include <vector>

namespace orbitclt {

/// The measure of maximal entropy of a primitive SFT from its Perron data.
struct ParryMeasure {
    double perron_root = 0.0;
    std::vector<double> left;  // u A = lambda u
    std::vector<double> right; // A v = lambda v
    double entropy = 0.0;      // log lambda
    int iterations = 0;

    /// mu([w]) = u_{w_0} v_{w_last} lambda^{-(|w|-1)} / (u . v); 0 for inadmissible w.
    double cylinder(const SymbolicSystem& system, std::span<const Symbol> w) const;
};

ParryMeasure parry(const SymbolicSystem& system, double tol = 1e-12);

/// nu_{P_n}([w]): the fraction of P_n whose word begins with w, by matrix powers.
Rational cylinder_frequency(const SymbolicSystem& system, std::size_t n, std::span<const Symbol> w);

} // namespace orbitclt
