#pragma once

#include "orbitclt/harness.hpp"
#include "orbitclt/vardecomp.hpp"

#include <json.hpp>

#include <string>

namespace orbitclt {

using Json = nlohmann::json;

/// Sorted keys, two-space indent, doubles with 17 significant digits,
/// non-finite doubles as null.
std::string dump_canonical(const Json& value);

/// Parse errors surface as Error(ParseError).
Json parse_json(const std::string& text);

Rational rational_from_json(const Json& value);
double real_from_json(const Json& value);

SymbolicSystem system_from_json(const Json& value);
Json to_json(const SymbolicSystem& system);

/// {"type": "locally_constant", "depth": d, "values": {"01": "0.5", ...}}
/// {"type": "geometric_weight", "lambda": "0.5", "phi": ["1", "-1"], "tol": "1e-12"}
/// {"type": "symbol_indicator", "symbol": 0, "offset": "-0.5"} or "center": true
/// {"type": "constant", "value": "1"}
Observable observable_from_json(const SymbolicSystem& system, const Json& value);
Json to_json(const Observable& observable);

CylinderSchedule schedule_from_json(const Json& value);

GlobalPlan global_plan_from_json(const SymbolicSystem& system, const Json& plan);
LocalPlan local_plan_from_json(const SymbolicSystem& system, const Json& plan);
MmePlan mme_plan_from_json(const SymbolicSystem& system, const Json& plan);
ConcentrationPlan concentration_plan_from_json(const SymbolicSystem& system, const Json& plan);
MixturePlan mixture_plan_from_json(const SymbolicSystem& system, const Json& plan);
WildPlan wild_plan_from_json(const SymbolicSystem& system, const Json& plan);

Json to_json(const ValidationReport& report);
Json to_json(const SetSummary& summary);
Json to_json(const ConditionReport& report);
Json to_json(const DistributionDistance& distance);
Json to_json(const CLTRunResult& result);
Json to_json(const MmeReport& report);
Json to_json(const ConcentrationReport& report);
Json to_json(const MixtureLevel& level);
Json to_json(const WildReport& report);
Json to_json(const VarDecomp& decomposition);
Json to_json(const ProductChoice& choice);

/// "t,empirical,reference" rows.
std::string cdf_csv(const std::vector<CdfPoint>& points);

} // namespace orbitclt
