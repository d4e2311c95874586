#pragma once

// JSON schemas for the file formats the CLI reads and writes.
//   distribution: {"p": [8 floats], "order": "abc"}
//   local model:  {"cardinalities": [ca, cb, cg], "q": [...], "r": [...],
//                  "s": [...], "p_a": [[...]], "p_b": [[...]], "p_c": [[...]]}
//                 (tables hold the probability of outcome 0; rows/columns in
//                  the argument order pA(a|beta,gamma), pB(b|gamma,alpha),
//                  pC(c|alpha,beta))
//   model params: {"p0":, "p_empty":, "omega":, "theta0":, "theta1":}
//   tester:       {"d_in":, "d_out":, "elements": [{"re": [[..]], "im": [[..]]}]}
//                 (element matrices on wire order (out, in), row-major)

#include <json.hpp>

#include "trinet/dist.hpp"
#include "trinet/inflation.hpp"
#include "trinet/local_model.hpp"
#include "trinet/quantum_model.hpp"
#include "trinet/tester.hpp"

namespace trinet::jsonio {

using json = nlohmann::json;

json to_json(const TripartiteDistribution& d);
TripartiteDistribution distribution_from_json(const json& j);

json to_json(const LocalModel& m);
LocalModel local_model_from_json(const json& j);

json to_json(const ModelParams& p);
ModelParams params_from_json(const json& j);

json to_json(const FitResult& f);

json to_json(const Tester& t);
Tester tester_from_json(const json& j);

// Certificate with context; rational coefficients as num/den strings.
json certificate_json(const inflation::InflationLP& lp,
                      const inflation::Certificate& cert);

}  // namespace trinet::jsonio
