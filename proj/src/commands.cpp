#include "orbitclt/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace orbitclt {

namespace {

using Files = std::vector<std::pair<std::string, std::string>>;

SymbolicSystem load_system(const Json& source, const std::string& base_dir)
{
    if (source.is_string()) {
        std::filesystem::path path(source.get<std::string>());
        if (path.is_relative())
            path = std::filesystem::path(base_dir) / path;
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::ParseError, "cannot read system file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return system_from_json(parse_json(ss.str()));
    }
    if (source.is_object() && source.contains("preset")) {
        const std::string name = source.at("preset").get<std::string>();
        if (name == "golden_mean")
            return SymbolicSystem::golden_mean();
        if (name == "full_shift")
            return SymbolicSystem::full_shift(source.value("symbols", 2u));
        throw Error(ErrorCode::ParseError, "unknown system preset '" + name + "'");
    }
    return system_from_json(source);
}

const Json& plan_of(const Json& config)
{
    if (!config.contains("plan") || !config.at("plan").is_object())
        throw Error(ErrorCode::ParseError, "config needs a 'plan' object");
    return config.at("plan");
}

bool sets_valid(const std::vector<CLTRunResult>& results)
{
    for (const auto& r : results)
        if (!r.set.validation.all_passed())
            return false;
    return true;
}

CommandOutput clt_output(const std::string& name, const std::vector<CLTRunResult>& results, bool plots)
{
    CommandOutput out;
    out.command = name;
    out.passed = sets_valid(results);
    Json levels = Json::array();
    for (const auto& r : results) {
        const std::string stem = name + "_l" + std::to_string(r.l);
        out.files.emplace_back(stem + ".json", dump_canonical(to_json(r)));
        if (plots && !r.normalized.empty() && name != "clt-weighted")
            out.files.emplace_back(stem + "_cdf.csv", cdf_csv(cdf_dump(r.normalized, Reference::standard_normal())));
        levels.push_back(Json{{"l", r.l},
                              {"s_l", r.conditions.s_l},
                              {"ks", r.ks ? Json(r.ks->ks_statistic) : Json(nullptr)},
                              {"degenerate", r.degenerate},
                              {"valid", r.set.validation.all_passed()}});
    }
    out.summary = Json{{"command", name}, {"levels", levels}, {"passed", out.passed}};
    out.files.emplace_back(name + ".json", dump_canonical(out.summary));
    return out;
}

CommandOutput run_periodic(const SymbolicSystem& system, const Json& plan)
{
    std::vector<std::size_t> ns;
    if (plan.contains("n")) {
        for (const auto& x : plan.at("n"))
            ns.push_back(x.get<std::size_t>());
    } else {
        const std::size_t lo = plan.value("n_min", std::size_t{1});
        const std::size_t hi = plan.value("n_max", std::size_t{6});
        for (std::size_t n = lo; n <= hi; ++n)
            ns.push_back(n);
    }
    const std::uint64_t budget = plan.value("brute_force_budget", std::uint64_t{1} << 16);
    const bool list = plan.value("enumerate", false);
    CommandOutput out;
    out.command = "periodic";
    Json rows = Json::array();
    for (std::size_t n : ns) {
        if (n == 0)
            throw Error(ErrorCode::ParseError, "periods start at 1");
        const BigInt count = periodic_count(system, n);
        Json row{{"n", n}, {"count", format_bigint(count)}};
        if (count <= BigInt(std::to_string(budget))) {
            const auto points = enumerate_periodic(system, n, budget);
            const bool agree = BigInt(std::to_string(points.size())) == count;
            row["brute_force"] = points.size();
            row["agrees"] = agree;
            out.passed = out.passed && agree;
            if (list) {
                Json words = Json::array();
                for (const auto& p : points)
                    words.push_back(to_string(p));
                row["points"] = words;
            }
        }
        rows.push_back(row);
    }
    out.summary = Json{{"command", "periodic"}, {"system", to_json(system)}, {"counts", rows}, {"passed", out.passed}};
    out.files.emplace_back("periodic.json", dump_canonical(out.summary));
    return out;
}

IndepOptions indep_options(const Json& plan, std::uint64_t seed)
{
    IndepOptions o;
    o.enumeration_budget = plan.value("enumeration_budget", o.enumeration_budget);
    o.materialize_budget = plan.value("materialize_budget", o.materialize_budget);
    o.validation_samples = plan.value("validation_samples", o.validation_samples);
    o.validation_seed = derive_seed(seed, "indep");
    return o;
}

CommandOutput run_indep(const SymbolicSystem& system, const Json& plan, std::uint64_t seed)
{
    CommandOutput out;
    out.command = "indep";
    const std::string kind = plan.value("kind", std::string("global"));
    const Rational eps = rational_from_json(plan.at("eps"));
    Json manifest;
    if (kind == "global") {
        const std::size_t k = plan.at("k").get<std::size_t>(), n = plan.at("n").get<std::size_t>();
        std::size_t M = 0;
        if (plan.at("M").is_string() && plan.at("M").get<std::string>() == "minimal")
            M = specification_parameters(system, eps).M_of_eps;
        else
            M = plan.at("M").get<std::size_t>();
        const auto set = build_global_indep(system, eps, k, n, M, indep_options(plan, seed));
        Json words = Json::array();
        for (const auto& p : set.E())
            words.push_back(to_string(p));
        const SetSummary s = summarize(set);
        manifest = Json{{"parameters", Json{{"kind", "global"}, {"eps", format_rational(eps)}, {"k", k}, {"n", n}, {"M", M}}},
                        {"E_size", set.E().size()},
                        {"E", words},
                        {"set", to_json(s)},
                        {"validation", to_json(set.validation())}};
        out.passed = set.validation().all_passed();
    } else if (kind == "local") {
        const CylinderSchedule schedule = schedule_from_json(plan.at("schedule"));
        const std::size_t m = plan.at("m").get<std::size_t>();
        LocalIndepOptions lo;
        static_cast<IndepOptions&>(lo) = indep_options(plan, seed);
        if (plan.contains("rotation"))
            lo.enumerate_with_rotation = plan.at("rotation").get<std::size_t>();
        const auto set = build_local_indep(system, schedule, eps, m, lo);
        Json factors = Json::array();
        for (std::size_t i = 0; i < set.blocks(); ++i) {
            Json words = Json::array();
            for (const auto& p : set.factor(i))
                words.push_back(to_string(p));
            factors.push_back(words);
        }
        Json cyl = Json::array();
        for (const auto& c : schedule.cylinders)
            cyl.push_back(word_to_string(c));
        manifest = Json{{"parameters", Json{{"kind", "local"}, {"eps", format_rational(eps)}, {"m", m},
                                            {"schedule", Json{{"n", schedule.n}, {"cylinders", cyl}}}}},
                        {"factor_sizes", summarize(set).factor_sizes},
                        {"E", factors},
                        {"set", to_json(summarize(set))},
                        {"validation", to_json(set.validation())}};
        out.passed = set.validation().all_passed();
    } else {
        throw Error(ErrorCode::ParseError, "indep kind must be 'global' or 'local'");
    }
    manifest["command"] = "indep";
    manifest["passed"] = out.passed;
    out.summary = manifest;
    out.files.emplace_back("indep.json", dump_canonical(manifest));
    return out;
}

CommandOutput run_vardecomp(const SymbolicSystem& system, const Json& plan, std::uint64_t seed)
{
    const Rational eps = rational_from_json(plan.at("eps"));
    const std::size_t m = plan.at("m").get<std::size_t>();
    const CylinderSchedule schedule = schedule_from_json(plan.at("schedule"));
    const Observable h = observable_from_json(system, plan.at("observable"));
    const std::size_t budget = plan.value("generator_budget", std::size_t{8});
    const ProductChoice choice = find_clt_admissible(system, h, schedule, eps, m, budget, indep_options(plan, seed));
    const VarDecomp& d = choice.decomposition;
    CommandOutput out;
    out.command = "vardecomp";
    const bool identity = std::fabs(d.residual) <= 1e-9 * std::max(1.0, d.var_tot);
    const bool bound = d.bound_slack >= -1e-9;
    out.passed = identity && bound && choice.set->validation().all_passed();
    Json j = to_json(choice);
    j["command"] = "vardecomp";
    j["identity_holds"] = identity;
    j["bound_holds"] = bound;
    j["passed"] = out.passed;
    out.summary = j;
    out.files.emplace_back("vardecomp.json", dump_canonical(j));
    return out;
}

} // namespace

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
        return 2;
    case ErrorCode::BudgetExceeded:
        return 3;
    default:
        return 1;
    }
}

static CommandOutput run_config_impl(const Json& config, const RunOptions& options)
{
    if (!config.is_object())
        throw Error(ErrorCode::ParseError, "config must be a JSON object");
    if (!config.contains("command") || !config.at("command").is_string())
        throw Error(ErrorCode::ParseError, "config needs a 'command' string");
    const std::string command = config.at("command").get<std::string>();
    if (!config.contains("system"))
        throw Error(ErrorCode::ParseError, "config needs a 'system'");
    const SymbolicSystem system = load_system(config.at("system"), options.base_dir);
    const std::uint64_t seed = options.seed ? *options.seed : config.value("seed", std::uint64_t{0});
    const Json& plan = plan_of(config);
    const unsigned workers = options.workers;
    const bool plots = options.emit_plot_data;

    try {
        if (command == "periodic")
            return run_periodic(system, plan);
        if (command == "indep")
            return run_indep(system, plan, seed);
        if (command == "clt-global" || command == "clt-weighted") {
            GlobalPlan p = global_plan_from_json(system, plan);
            p.seed = seed;
            return clt_output(command, command == "clt-global" ? run_global_clt(p, workers) : run_weighted_clt(p, workers),
                              plots);
        }
        if (command == "clt-local") {
            LocalPlan p = local_plan_from_json(system, plan);
            p.seed = seed;
            return clt_output(command, run_local_clt(p, workers), plots);
        }
        if (command == "mme") {
            MmePlan p = mme_plan_from_json(system, plan);
            p.seed = seed;
            const MmeReport r = run_mme_convergence(p, workers);
            CommandOutput out;
            out.command = command;
            out.summary = to_json(r);
            out.summary["command"] = command;
            out.files.emplace_back("mme.json", dump_canonical(out.summary));
            if (plots) {
                std::ostringstream csv;
                csv << "source,l,n,period,max_discrepancy,shift_averaged_discrepancy\n";
                char buf[160];
                for (const auto& row : r.rows) {
                    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%zu,%.17g,%.17g\n", row.source.c_str(), row.l, row.n,
                                  row.period, row.max_discrepancy, row.shift_averaged_discrepancy);
                    csv << buf;
                }
                out.files.emplace_back("mme.csv", csv.str());
            }
            return out;
        }
        if (command == "concentration") {
            ConcentrationPlan p = concentration_plan_from_json(system, plan);
            p.seed = seed;
            CommandOutput out;
            out.command = command;
            out.summary = to_json(run_birkhoff_concentration(p, workers));
            out.summary["command"] = command;
            out.files.emplace_back("concentration.json", dump_canonical(out.summary));
            return out;
        }
        if (command == "mixture") {
            MixturePlan p = mixture_plan_from_json(system, plan);
            p.seed = seed;
            const MixtureReport r = run_mixture_clt(p, workers);
            CommandOutput out;
            out.command = command;
            Json levels = Json::array();
            for (const auto& lv : r.levels) {
                const std::string stem = "mixture_l" + std::to_string(lv.l);
                const Json j = to_json(lv);
                out.files.emplace_back(stem + ".json", dump_canonical(j));
                if (plots && !lv.normalized.empty())
                    out.files.emplace_back(stem + "_cdf.csv",
                                           cdf_csv(cdf_dump(lv.normalized, Reference::mixture(lv.atoms))));
                levels.push_back(Json{{"l", lv.l}, {"ks_mixture", lv.ks_mixture},
                                      {"ks_single_normal", lv.ks_single_normal}, {"s_l", lv.s_l}});
            }
            out.summary = Json{{"command", command}, {"levels", levels}};
            out.files.emplace_back("mixture.json", dump_canonical(out.summary));
            return out;
        }
        if (command == "vardecomp")
            return run_vardecomp(system, plan, seed);
        if (command == "oscillation-check") {
            WildPlan p = wild_plan_from_json(system, plan);
            p.seed = seed;
            CommandOutput out;
            out.command = command;
            out.summary = to_json(check_wildly_oscillating(p, workers));
            out.summary["command"] = command;
            out.files.emplace_back("oscillation_check.json", dump_canonical(out.summary));
            return out;
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    throw Error(ErrorCode::ParseError, "unknown command '" + command + "'");
}

CommandOutput run_config(const Json& config, const RunOptions& options)
{
    try {
        return run_config_impl(config, options);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

} // namespace orbitclt
