#pragma once

#include "weightlab/check.hpp"
#include "weightlab/constants.hpp"
#include "weightlab/czd.hpp"
#include "weightlab/grid.hpp"
#include "weightlab/space.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace weightlab {

/// Malformed configuration: missing or ill-typed field. The message names the
/// field. The command line maps this (and StructuralError at ingestion) to
/// exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using json = nlohmann::json;

/// {"points": n, "dist": [[...]], "measure": [...], "kappa": optional}
QuasiMetricSpace space_from_json(const json& j);
/// {"grid": {"dim": d, "depth": K, "cell_measure": [...] | "lebesgue"}} or the
/// inner object directly.
DyadicGrid grid_from_json(const json& j);

/// Weight / test-function descriptors:
///   {"type":"ones"} | {"type":"power","alpha":a} |
///   {"type":"cascade","bound":b,"seed":s} |
///   {"type":"spike","position":i,"height":h,"base":1.0} |
///   {"type":"values","values":[...]}
/// `seedOverride` replaces any seed found in the descriptor. Weights must be
/// strictly positive; nonnegative functions may contain zeros.
ArrayXd weight_from_json(const json& j, const DyadicGrid& g,
                         std::optional<std::uint64_t> seedOverride = std::nullopt);
ArrayXd weight_from_json(const json& j, Index n,
                         std::optional<std::uint64_t> seedOverride = std::nullopt);
/// Short stable label for report rows ("cascade(b=4,seed=7)", ...).
std::string weight_label(const json& j, std::optional<std::uint64_t> seedOverride = std::nullopt);

json to_json(const CheckResult& r);
json to_json(const CZDecomposition& dec);
json to_json(const ConstantsReport& rep);

/// 17 significant digits: binary64 round-trips exactly.
std::string format_g17(double x);
std::string constants_csv_header();
std::string constants_csv_row(const ConstantsReport& rep);

json require_field(const json& j, const char* field, const char* where);
void require_schema_version(const json& j);

}  // namespace weightlab
