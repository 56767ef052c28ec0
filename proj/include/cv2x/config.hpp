#pragma once
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "cv2x/channel.hpp"
#include "cv2x/hil.hpp"
#include "cv2x/mobility.hpp"
#include "cv2x/params.hpp"

namespace cv2x {

// Everything one run needs. Exactly one of {scenario, trace_path} is set.
struct RunConfig {
  SimParams sim;
  ChannelModelConfig channel;
  std::optional<ScenarioSpec> scenario;
  std::optional<std::string> trace_path;
  int hv_id = 0;  // authoritative in trace mode; scenario carries its own
  // Set when the config pinned scenario.placement_seed itself, so a --seed
  // override changes the simulation streams but keeps the layout.
  bool placement_seed_explicit = false;
  std::string bler_table_path;  // empty = built-in table
  std::string out_dir = "out";
  PacingConfig pacing;
};

int resolved_hv_id(const RunConfig& cfg);

// Strict parse: unknown keys, bad types, and violated invariants all throw
// std::invalid_argument / std::runtime_error with a field name.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Fully-resolved effective config (defaults applied), stable key order.
nlohmann::ordered_json to_json(const RunConfig& cfg);
void write_resolved_config(const RunConfig& cfg, const std::string& path);

const char* to_string(ChannelModel m);
const char* to_string(SinrCombiner c);

}  // namespace cv2x
