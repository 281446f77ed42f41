#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "isospec/report.hpp"

namespace isospec {

struct ParamSpec {
  enum class Type { Int, Real, Bool, Choice, Text };
  std::string key;
  Type type = Type::Real;
  json default_value;
  std::string help;
  std::vector<std::string> choices;  ///< Choice only
};

using ScenarioBody = std::function<void(const json& config, RunReport& report)>;

struct Scenario {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::vector<Bound> expected;
  ScenarioBody body;
};

/// The 13 registered scenarios, sorted by name.
const std::vector<Scenario>& scenario_registry();
const Scenario& find_scenario(const std::string& name);

/// Raw string overrides keyed by parameter name.
using Overrides = std::map<std::string, std::string>;

/// Defaults merged with type-checked overrides. Unknown keys and values that
/// do not parse throw a Config error.
json resolve_config(const Scenario& scenario, const Overrides& overrides);

/// ISOSPEC_TOL_SCALE, default 1. A malformed or nonpositive value is a
/// Config error.
double tolerance_scale_from_env();

/// Runs a scenario. Module errors end up in report.error, never as exceptions;
/// unknown names and bad overrides still throw Config errors.
RunReport run_scenario(const std::string& name, const Overrides& overrides = {},
                       double tol_scale = 1.0);

/// Runs every scenario concurrently, each with the overrides it declares.
/// Keys declared by none of them are rejected.
std::vector<RunReport> run_all(const Overrides& overrides = {}, double tol_scale = 1.0);

std::string list_scenarios();

/// Verifies a user-supplied pair and reports it like a scenario.
RunReport verify_pair(const std::string& h1_path, const std::string& x1_path,
                      std::optional<std::size_t> margin, bool allow_kernel, double tol_scale);

}  // namespace isospec
