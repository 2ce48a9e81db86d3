#pragma once

// JSON forms of every report. Field order is fixed (ordered_json) so equal
// inputs serialize to identical bytes.

#include "json.hpp"

#include "dcq/catalog.hpp"
#include "dcq/conjugate.hpp"
#include "dcq/diagnostics.hpp"
#include "dcq/weight.hpp"

namespace dcq {

using Json = nlohmann::ordered_json;

Json to_json(const WeightFunction& w);
/// Rebuilds a weight from {expr, t0, delta, t_max}; re-audits it.
WeightFunction weight_from_json(const Json& j);

Json to_json(const ConditionResult& c);
Json to_json(const ValidityReport& r);
Json to_json(const ConjugatePoint& p);
Json to_json(const SandwichReport& r);
Json to_json(const CarlemanSweep& s);
Json to_json(const ScaleFit& f);
Json to_json(const AnalyticDetection& d);
Json to_json(const DiagnosticsReport& r);
Json to_json(const CheckResult& c);
Json to_json(const LoglogReproduction& r);
Json to_json(const ShiftedReproduction& r);
Json to_json(const TildeProbe& p);

}  // namespace dcq
