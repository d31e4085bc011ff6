#pragma once

#include "orbitclt/indep.hpp"
#include "orbitclt/observables.hpp"

#include <memory>

namespace orbitclt {

/// Components of the total variation of h over a locally independent set.
/// var_loc sums over p in P (each x_i weighted by |F| / |E_i|), which is the
/// form in which the decomposition identity holds; var_loc_per_factor is the
/// plain sum over x_i in E_i.
struct VarDecomp {
    double var_per = 0.0;
    double var_loc = 0.0;
    double var_loc_per_factor = 0.0;
    double var_hoel = 0.0;
    double var_tot = 0.0;
    double cov = 0.0;
    double residual = 0.0;
    double bound_slack = 0.0; // sqrt(var_per (var_loc + var_hoel)) - cov
    double ambient_mean = 0.0; // E_{P_kn}(h)
    std::size_t set_size = 0;
};

/// E_{P_m}(h): by transfer matrices when h reads at most m symbols and is
/// locally constant, otherwise by enumerating P_m.
double ambient_mean(const SymbolicSystem& system, const Observable& h, std::size_t m,
                    std::uint64_t budget = kDefaultEnumerationBudget);

VarDecomp variance_components(const Observable& h, const LocalEpsIndependentSet& set,
                              std::uint64_t budget = kDefaultEnumerationBudget);

struct ProductChoice {
    std::shared_ptr<const LocalEpsIndependentSet> set;
    std::size_t rotation = 0;
    double var_per_objective = 0.0;
    double var_loc_objective = 0.0;
    std::size_t candidate_count = 0;
    VarDecomp decomposition;
};

/// Candidates are the greedy separated sets over every rotation of the
/// enumeration order (at most generator_budget of them); the first candidate
/// minimizing var_per, then var_loc, wins.
ProductChoice find_clt_admissible(const SymbolicSystem& system, const Observable& h, const CylinderSchedule& schedule,
                                  const Rational& eps, std::size_t m, std::size_t generator_budget,
                                  const IndepOptions& options = {});

} // namespace orbitclt
