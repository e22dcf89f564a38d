// The negai command line: calibrate, simulate, estimate, scenarios, validate.
// Exit codes: 0 success, 1 a target or assertion failed, 2 usage or input error.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "negai/estimators.hpp"

namespace negai {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

// Settings shared by every command. Loaded from a JSON config (relative paths
// resolve against the config's directory), then overridden by flags.
struct RunConfig {
  std::string command;
  std::string params;    // calibrated parameter ledger
  std::string targets;   // calibration targets; "self" = the start params' own moments
  std::string manifest;  // scenario manifest
  std::string panel;     // estimate/validate: CSV panel instead of the DGP
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string filter;                // scenarios: id or tag substring
  std::vector<std::string> methods;  // estimate: method tags, empty = all five
  std::string scenario;              // simulate: project this scenario instead of history
  int horizon = 2023;                // simulate/validate: last simulated year
  bool fit_manifest = false;         // calibrate: also refit the scenario levers
  nlohmann::json overrides = nlohmann::json::object();  // merge patch onto the params
  nlohmann::json dgp = nlohmann::json::object();        // merge patch onto the DGP
  nlohmann::json estimator = nlohmann::json::object();  // EstimatorSpec fields

  // Defaults point at the shipped data directory.
  static RunConfig defaults();
  // ConfigError on unknown keys or wrong types.
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir, RunConfig start);
  nlohmann::json to_json() const;
};

EstimatorSpec estimator_spec_from_json(const nlohmann::json& j, std::uint64_t seed);
nlohmann::json to_json(const EstimatorSpec& s);

int cmd_calibrate(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_estimate(const RunConfig& cfg, std::ostream& log);
int cmd_scenarios(const RunConfig& cfg, std::ostream& log);
int cmd_validate(const RunConfig& cfg, std::ostream& log);

// Parses argv and dispatches; never throws.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace negai
