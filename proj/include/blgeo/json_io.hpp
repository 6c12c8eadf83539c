#pragma once

#include <json.hpp>
#include <string>

#include "blgeo/datum.hpp"
#include "blgeo/opscale.hpp"
#include "blgeo/solvers.hpp"
#include "blgeo/verify.hpp"

namespace blgeo {

/// Parses a datum from its JSON form:
///   {
///     "n": 2,
///     "maps": [[[1.0, 0.0]], [[0.0, 1.0]]],
///     "p": [{"num": 1, "den": 2}, {"num": 1, "den": 2}]
///   }
/// Map entries are real; exponents must be exact integer fractions, since
/// they become copy counts in the operator-scaling reduction.
[[nodiscard]] BLDatum datum_from_json(const nlohmann::json& j);

/// Reads and parses a datum file. Parse and schema errors carry the path.
[[nodiscard]] BLDatum load_datum(const std::string& path);

[[nodiscard]] nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
[[nodiscard]] nlohmann::json to_json(const FeasibilityReport& rep);
[[nodiscard]] nlohmann::json to_json(const SolveResult& res);
[[nodiscard]] nlohmann::json to_json(const CapacityResult& res);
[[nodiscard]] nlohmann::json to_json(const PropertyReport& rep);
[[nodiscard]] nlohmann::json to_json(const KrausSet& k);

[[nodiscard]] std::string verdict_name(FeasibilityVerdict v);

}  // namespace blgeo
