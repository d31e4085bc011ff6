#include "orbitclt/serialize.hpp"

#include "orbitclt/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace orbitclt {

namespace {

void write_string(std::ostringstream& os, const std::string& s)
{
    os << Json(s).dump();
}

void write(std::ostringstream& os, const Json& v, int depth)
{
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            if (!first)
                os << ",\n";
            first = false;
            os << pad;
            write_string(os, key);
            os << ": ";
            write(os, item, depth + 1);
        }
        os << "\n" << close << "}";
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            os << "[]";
            return;
        }
        const bool scalars = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
        if (scalars) {
            os << "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0)
                    os << ", ";
                write(os, v[i], depth + 1);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0)
                os << ",\n";
            os << pad;
            write(os, v[i], depth + 1);
        }
        os << "\n" << close << "]";
        return;
    }
    case Json::value_t::number_float: {
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            os << "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        std::string s = buf;
        if (s.find_first_of(".eEn") == std::string::npos)
            s += ".0";
        os << s;
        return;
    }
    default:
        os << v.dump();
    }
}

const Json& require(const Json& obj, const char* key)
{
    if (!obj.is_object() || !obj.contains(key))
        throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
    return obj.at(key);
}

std::uint64_t uint_from_json(const Json& v, const char* what)
{
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw Error(ErrorCode::ParseError, std::string("'") + what + "' must be a non-negative integer");
}

std::uint64_t uint_or(const Json& obj, const char* key, std::uint64_t fallback)
{
    return obj.contains(key) ? uint_from_json(obj.at(key), key) : fallback;
}

std::size_t level_count(const Json& plan, const char* key)
{
    const Json& v = require(plan, key);
    if (!v.is_array() || v.empty())
        throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be a non-empty array (one entry per level)");
    return v.size();
}

// A scalar applies to every level; an array gives one entry per level.
template <class F>
auto per_level(const Json& plan, const char* key, std::size_t L, F convert)
{
    const Json& v = require(plan, key);
    std::vector<decltype(convert(v))> out;
    if (v.is_array()) {
        if (v.size() != L)
            throw Error(ErrorCode::ParseError, std::string("'") + key + "' must have " + std::to_string(L) + " entries");
        for (const auto& x : v)
            out.push_back(convert(x));
    } else {
        out.assign(L, convert(v));
    }
    return out;
}

std::vector<std::size_t> sizes(const Json& plan, const char* key, std::size_t L)
{
    return per_level(plan, key, L, [key](const Json& x) { return static_cast<std::size_t>(uint_from_json(x, key)); });
}

std::vector<Rational> rationals(const Json& plan, const char* key, std::size_t L)
{
    return per_level(plan, key, L, [](const Json& x) { return rational_from_json(x); });
}

std::vector<Observable> observables(const SymbolicSystem& system, const Json& plan)
{
    std::vector<Observable> out;
    if (plan.contains("observables")) {
        for (const auto& o : plan.at("observables"))
            out.push_back(observable_from_json(system, o));
    } else {
        out.push_back(observable_from_json(system, require(plan, "observable")));
    }
    if (out.empty())
        throw Error(ErrorCode::ParseError, "at least one observable is required");
    return out;
}

std::vector<double> eta_grid(const Json& plan)
{
    if (!plan.contains("eta_grid"))
        return default_eta_grid();
    std::vector<double> g;
    for (const auto& x : plan.at("eta_grid"))
        g.push_back(real_from_json(x));
    return g;
}

// "M": "minimal" picks M(eps) level by level.
std::vector<std::size_t> gaps(const SymbolicSystem& system, const Json& plan, const std::vector<Rational>& eps)
{
    const Json& v = require(plan, "M");
    if (v.is_string() && v.get<std::string>() == "minimal") {
        std::vector<std::size_t> out;
        for (const auto& e : eps)
            out.push_back(specification_parameters(system, e).M_of_eps);
        return out;
    }
    return sizes(plan, "M", eps.size());
}

Json rat(const Rational& r)
{
    return format_rational(r);
}

} // namespace

std::string dump_canonical(const Json& value)
{
    std::ostringstream os;
    write(os, value, 0);
    os << "\n";
    return os.str();
}

Json parse_json(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

Rational rational_from_json(const Json& value)
{
    if (value.is_string())
        return parse_rational(value.get<std::string>());
    if (value.is_number_integer())
        return Rational(value.get<long>());
    throw Error(ErrorCode::ParseError, "rationals are written as \"p/q\" strings or integers");
}

double real_from_json(const Json& value)
{
    if (value.is_number())
        return value.get<double>();
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw Error(ErrorCode::ParseError, "not a decimal number: '" + s + "'");
        return x;
    }
    throw Error(ErrorCode::ParseError, "expected a decimal string or number");
}

SymbolicSystem system_from_json(const Json& value)
{
    if (!value.is_object())
        throw Error(ErrorCode::ParseError, "system definition must be an object");
    const std::size_t S = uint_from_json(require(value, "symbols"), "symbols");
    const Json& t = require(value, "transitions");
    if (!t.is_array() || t.size() != S)
        throw Error(ErrorCode::ParseError, "'transitions' must be an S x S array");
    std::vector<std::vector<int>> A(S, std::vector<int>(S));
    for (std::size_t a = 0; a < S; ++a) {
        if (!t[a].is_array() || t[a].size() != S)
            throw Error(ErrorCode::ParseError, "'transitions' must be an S x S array");
        for (std::size_t b = 0; b < S; ++b) {
            const auto v = uint_from_json(t[a][b], "transitions");
            if (v > 1)
                throw Error(ErrorCode::ParseError, "transition entries are 0 or 1");
            A[a][b] = static_cast<int>(v);
        }
    }
    const Rational r = value.contains("metric_base") ? rational_from_json(value.at("metric_base")) : Rational(1, 2);
    const Rational e = value.contains("expansiveness") ? rational_from_json(value.at("expansiveness")) : Rational(1, 2);
    return SymbolicSystem::create(std::move(A), r, e);
}

Json to_json(const SymbolicSystem& system)
{
    return Json{{"symbols", system.num_symbols()},
                {"transitions", system.transitions()},
                {"metric_base", rat(system.metric_base())},
                {"expansiveness", rat(system.expansiveness_constant())}};
}

Observable observable_from_json(const SymbolicSystem& system, const Json& value)
{
    const std::string type = require(value, "type").get<std::string>();
    if (type == "locally_constant") {
        const std::size_t depth = uint_from_json(require(value, "depth"), "depth");
        std::vector<std::pair<Word, double>> table;
        const Json& values = require(value, "values");
        if (!values.is_object())
            throw Error(ErrorCode::ParseError, "'values' maps words to decimal strings");
        for (const auto& [word, v] : values.items())
            table.emplace_back(word_from_string(word), real_from_json(v));
        return Observable::locally_constant(system, depth, table);
    }
    if (type == "geometric_weight") {
        std::vector<double> phi;
        for (const auto& x : require(value, "phi"))
            phi.push_back(real_from_json(x));
        const double tol = value.contains("tol") ? real_from_json(value.at("tol")) : 1e-12;
        return Observable::geometric_weight(system, real_from_json(require(value, "lambda")), std::move(phi), tol);
    }
    if (type == "symbol_indicator") {
        const auto symbol = uint_from_json(require(value, "symbol"), "symbol");
        if (symbol >= system.num_symbols())
            throw Error(ErrorCode::ParseError, "symbol out of range");
        double offset = value.contains("offset") ? real_from_json(value.at("offset")) : 0.0;
        if (value.contains("center") && value.at("center").get<bool>()) {
            const Word w{static_cast<Symbol>(symbol)};
            offset -= parry(system).cylinder(system, w);
        }
        return Observable::symbol_indicator(system, static_cast<Symbol>(symbol), offset);
    }
    if (type == "constant")
        return Observable::constant(system, real_from_json(require(value, "value")));
    throw Error(ErrorCode::ParseError, "unknown observable type '" + type + "'");
}

Json to_json(const Observable& observable)
{
    const std::size_t S = observable.num_symbols();
    return std::visit(
        [&](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LocallyConstant>) {
                Json values = Json::object();
                for (std::size_t code = 0; code < v.table.size(); ++code) {
                    if (std::isnan(v.table[code]))
                        continue;
                    Word w(v.depth);
                    std::size_t c = code;
                    for (std::size_t i = v.depth; i-- > 0;) {
                        w[i] = static_cast<Symbol>(c % S);
                        c /= S;
                    }
                    values[word_to_string(w)] = v.table[code];
                }
                return Json{{"type", "locally_constant"}, {"depth", v.depth}, {"values", values}};
            } else if constexpr (std::is_same_v<T, GeometricWeight>) {
                return Json{{"type", "geometric_weight"}, {"lambda", v.lambda}, {"phi", v.phi}, {"tol", v.tol}};
            } else {
                return Json{{"type", "symbol_indicator"}, {"symbol", static_cast<unsigned>(v.symbol)},
                            {"offset", v.offset}};
            }
        },
        observable.variant());
}

CylinderSchedule schedule_from_json(const Json& value)
{
    CylinderSchedule s;
    s.n = uint_from_json(require(value, "n"), "n");
    for (const auto& c : require(value, "cylinders"))
        s.cylinders.push_back(word_from_string(c.get<std::string>()));
    if (s.cylinders.empty())
        throw Error(ErrorCode::ParseError, "a schedule needs at least one cylinder");
    return s;
}

GlobalPlan global_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    GlobalPlan p;
    p.system = system;
    const std::size_t L = level_count(plan, "k");
    p.k = sizes(plan, "k", L);
    p.eps = rationals(plan, "eps", L);
    p.n = sizes(plan, "n", L);
    p.M = gaps(system, plan, p.eps);
    p.observables = observables(system, plan);
    p.samples = uint_or(plan, "samples", p.samples);
    p.enumeration_budget = uint_or(plan, "enumeration_budget", p.enumeration_budget);
    p.materialize_budget = uint_or(plan, "materialize_budget", p.materialize_budget);
    if (plan.contains("oscillation_y"))
        p.y = oscillation_y_from_string(plan.at("oscillation_y").get<std::string>());
    p.eta_grid = eta_grid(plan);
    return p;
}

LocalPlan local_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    LocalPlan p;
    p.system = system;
    const std::size_t L = level_count(plan, "schedules");
    for (const auto& s : plan.at("schedules"))
        p.schedules.push_back(schedule_from_json(s));
    p.eps = rationals(plan, "eps", L);
    p.m = sizes(plan, "m", L);
    if (plan.contains("block_observables")) {
        const Json& b = plan.at("block_observables");
        if (!b.is_array() || b.size() != L)
            throw Error(ErrorCode::ParseError, "'block_observables' needs one list per level");
        for (const auto& level : b) {
            std::vector<Observable> obs;
            for (const auto& o : level)
                obs.push_back(observable_from_json(system, o));
            p.block_observables.push_back(std::move(obs));
        }
    } else {
        p.block_observables.assign(L, {observable_from_json(system, require(plan, "observable"))});
    }
    p.samples = uint_or(plan, "samples", p.samples);
    p.enumeration_budget = uint_or(plan, "enumeration_budget", p.enumeration_budget);
    p.materialize_budget = uint_or(plan, "materialize_budget", p.materialize_budget);
    if (plan.contains("oscillation_y"))
        p.y = oscillation_y_from_string(plan.at("oscillation_y").get<std::string>());
    p.eta_grid = eta_grid(plan);
    return p;
}

MmePlan mme_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    MmePlan p;
    p.system = system;
    if (plan.contains("periodic_n"))
        for (const auto& x : plan.at("periodic_n"))
            p.periodic_n.push_back(uint_from_json(x, "periodic_n"));
    if (plan.contains("k")) {
        const std::size_t L = level_count(plan, "k");
        p.k = sizes(plan, "k", L);
        p.eps = rationals(plan, "eps", L);
        p.n = sizes(plan, "n", L);
        p.M = gaps(system, plan, p.eps);
    }
    p.max_word_length = uint_or(plan, "max_word_length", p.max_word_length);
    p.samples = uint_or(plan, "samples", p.samples);
    p.enumeration_budget = uint_or(plan, "enumeration_budget", p.enumeration_budget);
    return p;
}

ConcentrationPlan concentration_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    ConcentrationPlan p;
    p.system = system;
    const std::size_t L = level_count(plan, "k");
    p.k = sizes(plan, "k", L);
    p.eps = rationals(plan, "eps", L);
    p.n = sizes(plan, "n", L);
    p.M = gaps(system, plan, p.eps);
    p.observables = observables(system, plan);
    if (plan.contains("eta"))
        p.eta = real_from_json(plan.at("eta"));
    p.samples = uint_or(plan, "samples", p.samples);
    p.orbit_samples = uint_or(plan, "orbit_samples", p.orbit_samples);
    p.max_word_length = uint_or(plan, "max_word_length", p.max_word_length);
    p.enumeration_budget = uint_or(plan, "enumeration_budget", p.enumeration_budget);
    return p;
}

MixturePlan mixture_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    MixturePlan p;
    p.system = system;
    for (const auto& c : require(plan, "cylinders"))
        p.cylinders.push_back(word_from_string(c.get<std::string>()));
    const std::size_t L = level_count(plan, "k");
    p.k = sizes(plan, "k", L);
    p.n = sizes(plan, "n", L);
    p.j = uint_or(plan, "j", p.j);
    p.observables = observables(system, plan);
    p.samples = uint_or(plan, "samples", p.samples);
    p.enumeration_budget = uint_or(plan, "enumeration_budget", p.enumeration_budget);
    return p;
}

WildPlan wild_plan_from_json(const SymbolicSystem& system, const Json& plan)
{
    WildPlan p;
    p.system = system;
    p.observable = observable_from_json(system, require(plan, "observable"));
    const std::size_t L = level_count(plan, "n");
    p.n = sizes(plan, "n", L);
    p.W = sizes(plan, "W", L);
    p.partition_depth = sizes(plan, "partition_depth", L);
    p.eps = rationals(plan, "eps", L);
    p.cells = uint_or(plan, "cells", p.cells);
    p.samples_per_cell = uint_or(plan, "samples_per_cell", p.samples_per_cell);
    if (plan.contains("threshold"))
        p.threshold = real_from_json(plan.at("threshold"));
    return p;
}

Json to_json(const ValidationReport& report)
{
    Json checks = Json::array();
    for (const auto& c : report.checks)
        checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return Json{{"all_passed", report.all_passed()}, {"checks", checks}};
}

Json to_json(const SetSummary& s)
{
    return Json{{"kind", s.kind},
                {"epsilon", rat(s.epsilon)},
                {"k", s.k},
                {"n", s.n},
                {"M", s.M},
                {"period", s.period},
                {"factor_sizes", s.factor_sizes},
                {"size", s.size},
                {"materialized", s.materialized},
                {"validation", to_json(s.validation)}};
}

Json to_json(const ConditionReport& c)
{
    Json eta = Json::array();
    for (const auto& row : c.eta)
        eta.push_back(Json{{"eta", row.eta},
                           {"lindeberg_ratio", row.lindeberg_ratio},
                           {"negligibility", row.negligibility},
                           {"uniform_bound_holds", row.uniform_bound_holds}});
    return Json{{"s_l", c.s_l},
                {"s_l_squared", c.s_l_squared},
                {"oscillation_ratio_j1", c.oscillation_ratio_j1},
                {"oscillation_ratio_j2", c.oscillation_ratio_j2},
                {"uniform_oscillation_ratio", c.uniform_oscillation_ratio},
                {"gap_ratio", c.gap_ratio},
                {"gap_hypothesis", c.gap_hypothesis},
                {"eta", eta},
                {"oscillation_mode", c.oscillation_mode},
                {"oscillation_y", c.oscillation_y},
                {"exact", c.exact},
                {"sample_count", c.sample_count}};
}

Json to_json(const DistributionDistance& d)
{
    Json ref;
    if (d.reference.is_standard_normal()) {
        ref = "standard-normal";
    } else {
        Json atoms = Json::array();
        for (const auto& a : d.reference.atoms)
            atoms.push_back(Json{{"sigma", a.sigma}, {"probability", a.probability}});
        ref = Json{{"mixture", atoms}};
    }
    return Json{{"ks_statistic", d.ks_statistic}, {"sample_count", d.sample_count}, {"reference", ref}};
}

Json to_json(const CLTRunResult& r)
{
    Json j{{"l", r.l},
           {"set", to_json(r.set)},
           {"conditions", to_json(r.conditions)},
           {"mean_total", r.mean_total},
           {"degenerate", r.degenerate},
           {"ks", r.ks ? to_json(*r.ks) : Json(nullptr)}};
    if (!r.extra.empty())
        j["extra"] = r.extra;
    return j;
}

Json to_json(const MmeReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back(Json{{"source", row.source},
                            {"l", row.l},
                            {"n", row.n},
                            {"period", row.period},
                            {"max_discrepancy", row.max_discrepancy},
                            {"worst_word", row.worst_word},
                            {"shift_averaged_discrepancy", row.shift_averaged_discrepancy},
                            {"exact", row.exact}});
    Json entropy = Json::array();
    for (const auto& [n, h] : r.entropy_estimates)
        entropy.push_back(Json{{"n", n}, {"estimate", h}});
    return Json{{"parry",
                 Json{{"perron_root", r.parry.perron_root},
                      {"entropy", r.parry.entropy},
                      {"left", r.parry.left},
                      {"right", r.parry.right},
                      {"iterations", r.parry.iterations}}},
                {"rows", rows},
                {"indep_decreasing", r.indep_decreasing},
                {"entropy_estimates", entropy}};
}

Json to_json(const ConcentrationReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back(Json{{"l", row.l},
                            {"k", row.k},
                            {"n", row.n},
                            {"M", row.M},
                            {"N", row.N},
                            {"threshold", row.threshold},
                            {"mass", row.mass},
                            {"s_l_squared", row.s_l_squared},
                            {"fourth_moment_ratio", row.fourth_moment_ratio},
                            {"summability_term", row.summability_term},
                            {"equidistribution_mean", row.equidistribution_mean},
                            {"equidistribution_max", row.equidistribution_max},
                            {"sample_count", row.sample_count}});
    return Json{{"rows", rows}, {"mass_nondecreasing", r.mass_nondecreasing}};
}

Json to_json(const MixtureLevel& lv)
{
    Json atoms = Json::array();
    for (const auto& a : lv.atoms)
        atoms.push_back(Json{{"sigma", a.sigma}, {"probability", a.probability}});
    return Json{{"l", lv.l},
                {"n", lv.n},
                {"k", lv.k},
                {"j", lv.j},
                {"s_l", lv.s_l},
                {"cell_variance_max", lv.cell_variance_max},
                {"cell_variance_min", lv.cell_variance_min},
                {"variance_ratio", lv.variance_ratio ? Json(*lv.variance_ratio) : Json(nullptr)},
                {"ks_mixture", lv.ks_mixture},
                {"ks_single_normal", lv.ks_single_normal},
                {"third_moment_constant", lv.third_moment_constant},
                {"sigma_field_l1_change", lv.sigma_field_l1_change ? Json(*lv.sigma_field_l1_change) : Json(nullptr)},
                {"coverage_deficiency", lv.coverage_deficiency},
                {"coverage_deficiency_times_k", lv.coverage_deficiency_times_k},
                {"periodic_coverage", lv.periodic_coverage},
                {"thickening_ratio", lv.thickening_ratio},
                {"atoms", atoms},
                {"distinct_cells_sampled", lv.distinct_cells_sampled},
                {"sample_count", lv.sample_count}};
}

Json to_json(const WildReport& r)
{
    Json levels = Json::array();
    for (const auto& lv : r.levels)
        levels.push_back(Json{{"l", lv.l},
                              {"k", lv.k},
                              {"n", lv.n},
                              {"W", lv.W},
                              {"partition_depth", lv.depth},
                              {"epsilon", rat(lv.epsilon)},
                              {"s_l", lv.s_l},
                              {"short_sum_ratio", lv.short_sum_ratio},
                              {"oscillation_ratio", lv.oscillation_ratio},
                              {"cells_sampled", lv.cells_sampled}});
    return Json{{"levels", levels},
                {"s_increasing", r.s_increasing},
                {"short_sum_decreasing", r.short_sum_decreasing},
                {"oscillation_decreasing", r.oscillation_decreasing},
                {"verdict", r.verdict}};
}

Json to_json(const VarDecomp& d)
{
    return Json{{"var_per", d.var_per},
                {"var_loc", d.var_loc},
                {"var_loc_per_factor", d.var_loc_per_factor},
                {"var_hoel", d.var_hoel},
                {"var_tot", d.var_tot},
                {"cov", d.cov},
                {"residual", d.residual},
                {"bound_slack", d.bound_slack},
                {"ambient_mean", d.ambient_mean},
                {"set_size", d.set_size}};
}

Json to_json(const ProductChoice& c)
{
    Json factors = Json::array();
    for (std::size_t i = 0; i < c.set->blocks(); ++i) {
        Json words = Json::array();
        for (const auto& p : c.set->factor(i))
            words.push_back(to_string(p));
        factors.push_back(words);
    }
    return Json{{"rotation", c.rotation},
                {"var_per_objective", c.var_per_objective},
                {"var_loc_objective", c.var_loc_objective},
                {"candidate_count", c.candidate_count},
                {"decomposition", to_json(c.decomposition)},
                {"set", to_json(summarize(*c.set))},
                {"factors", factors}};
}

std::string cdf_csv(const std::vector<CdfPoint>& points)
{
    std::ostringstream os;
    os << "t,empirical,reference\n";
    char buf[128];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.t, p.empirical, p.reference);
        os << buf;
    }
    return os.str();
}

} // namespace orbitclt
