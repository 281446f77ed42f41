#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "isospec/operator.hpp"

namespace isospec {

using json = nlohmann::json;

/// Deterministic JSON text: object keys sorted, every floating-point number
/// printed with 17 significant digits (lossless for doubles), non-finite
/// values as the strings "inf", "-inf", "nan".
std::string dump_json(const json& value, int indent = 2);

/// {dim, entries: row-major [re, im] pairs, band, truncated}
json operator_to_json(const Operator& op);
Operator operator_from_json(const json& j);

Operator load_operator(const std::filesystem::path& path);
void save_operator(const Operator& op, const std::filesystem::path& path);

/// Reads a JSON number, accepting the "inf"/"nan" strings `dump_json` emits.
double json_to_double(const json& j);

}  // namespace isospec
