#include "cv2x/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace cv2x {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

// Rejects unknown keys so typos never silently fall back to defaults.
void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) bad(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      bad("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("bad value for '") + key + "'");
  }
}

void parse_sim(const json& j, SimParams& p) {
  check_keys(j, "sim",
             {"bandwidth_mhz", "packet_size_bytes", "mcs", "tx_rate_hz",
              "tx_power_dbm", "rri_ms", "slrrc_min", "slrrc_max", "p_resel",
              "sim_duration_ms", "rbs_per_subchannel", "packet_subchannels",
              "noise_figure_db", "sps_initial_threshold_dbm",
              "sensing_horizon_ms", "sinr_combiner", "rng_seed"});
  read(j, "bandwidth_mhz", p.bandwidth_mhz);
  read(j, "packet_size_bytes", p.packet_size_bytes);
  read(j, "mcs", p.mcs);
  read(j, "tx_rate_hz", p.tx_rate_hz);
  read(j, "tx_power_dbm", p.tx_power_dbm);
  read(j, "rri_ms", p.rri_ms);
  read(j, "slrrc_min", p.slrrc_min);
  read(j, "slrrc_max", p.slrrc_max);
  read(j, "p_resel", p.p_resel);
  read(j, "sim_duration_ms", p.sim_duration_ms);
  read(j, "rbs_per_subchannel", p.rbs_per_subchannel);
  read(j, "packet_subchannels", p.packet_subchannels);
  read(j, "noise_figure_db", p.noise_figure_db);
  read(j, "sps_initial_threshold_dbm", p.sps_initial_threshold_dbm);
  read(j, "sensing_horizon_ms", p.sensing_horizon_ms);
  read(j, "rng_seed", p.rng_seed);
  if (j.contains("sinr_combiner")) {
    std::string s = j.at("sinr_combiner").get<std::string>();
    if (s == "linear_mean") p.sinr_combiner = SinrCombiner::LinearMean;
    else if (s == "min_subchannel") p.sinr_combiner = SinrCombiner::MinSubchannel;
    else bad("sinr_combiner must be 'linear_mean' or 'min_subchannel'");
  }
}

void parse_channel(const json& j, ChannelModelConfig& c) {
  check_keys(j, "channel",
             {"model", "carrier_ghz", "shadowing_sigma_db", "fowlerville",
              "winner"});
  if (j.contains("model")) {
    std::string s = j.at("model").get<std::string>();
    if (s == "Fowlerville") c.model = ChannelModel::Fowlerville;
    else if (s == "WinnerB1") c.model = ChannelModel::WinnerB1;
    else bad("channel.model must be 'Fowlerville' or 'WinnerB1'");
  }
  read(j, "carrier_ghz", c.carrier_ghz);
  read(j, "shadowing_sigma_db", c.shadowing_sigma_db);
  if (j.contains("fowlerville")) {
    const json& f = j.at("fowlerville");
    check_keys(f, "channel.fowlerville",
               {"pl0_db", "d0_m", "exponent_near", "exponent_far",
                "breakpoint_m"});
    read(f, "pl0_db", c.fowlerville.pl0_db);
    read(f, "d0_m", c.fowlerville.d0_m);
    read(f, "exponent_near", c.fowlerville.exponent_near);
    read(f, "exponent_far", c.fowlerville.exponent_far);
    read(f, "breakpoint_m", c.fowlerville.breakpoint_m);
  }
  if (j.contains("winner")) {
    const json& w = j.at("winner");
    check_keys(w, "channel.winner",
               {"a", "b", "c", "use_breakpoint", "antenna_height_m"});
    read(w, "a", c.winner.a);
    read(w, "b", c.winner.b);
    read(w, "c", c.winner.c);
    read(w, "use_breakpoint", c.winner.use_breakpoint);
    read(w, "antenna_height_m", c.winner.antenna_height_m);
  }
}

void parse_scenario(const json& j, ScenarioSpec& s) {
  check_keys(j, "scenario",
             {"road_length_m", "lanes", "lane_width_m", "n_vehicles",
              "speed_mps", "hv_id", "placement_seed"});
  read(j, "road_length_m", s.road_length_m);
  read(j, "lanes", s.lanes);
  read(j, "lane_width_m", s.lane_width_m);
  read(j, "n_vehicles", s.n_vehicles);
  read(j, "speed_mps", s.speed_mps);
  read(j, "hv_id", s.hv_id);
  read(j, "placement_seed", s.placement_seed);
}

void parse_pacing(const json& j, PacingConfig& p) {
  check_keys(j, "pacing",
             {"real_time_factor", "endpoint", "max_lag_ms",
              "max_buffer_sim_ms", "lag_violation_streak"});
  read(j, "real_time_factor", p.real_time_factor);
  read(j, "endpoint", p.endpoint);
  read(j, "max_lag_ms", p.max_lag_ms);
  read(j, "max_buffer_sim_ms", p.max_buffer_sim_ms);
  read(j, "lag_violation_streak", p.lag_violation_streak);
}

}  // namespace

int resolved_hv_id(const RunConfig& cfg) {
  return cfg.scenario ? cfg.scenario->hv_id : cfg.hv_id;
}

RunConfig parse_run_config(const nlohmann::json& j) {
  check_keys(j, "top level",
             {"sim", "channel", "scenario", "trace", "hv_id", "bler_table",
              "out_dir", "pacing"});
  RunConfig cfg;
  if (j.contains("sim")) parse_sim(j.at("sim"), cfg.sim);
  if (j.contains("channel")) parse_channel(j.at("channel"), cfg.channel);
  if (j.contains("scenario")) {
    ScenarioSpec s;
    parse_scenario(j.at("scenario"), s);
    cfg.scenario = s;
  }
  if (j.contains("trace")) {
    std::string t;
    read(j, "trace", t);
    cfg.trace_path = t;
  }
  read(j, "hv_id", cfg.hv_id);
  read(j, "bler_table", cfg.bler_table_path);
  read(j, "out_dir", cfg.out_dir);
  if (j.contains("pacing")) parse_pacing(j.at("pacing"), cfg.pacing);

  if (cfg.scenario.has_value() == cfg.trace_path.has_value())
    bad("exactly one of 'scenario' and 'trace' must be present");
  validate(cfg.sim);
  validate(cfg.channel);
  if (cfg.scenario) {
    validate(*cfg.scenario);
    // One seed drives the whole run unless placement is pinned explicitly.
    cfg.placement_seed_explicit = j.at("scenario").contains("placement_seed");
    if (!cfg.placement_seed_explicit)
      cfg.scenario->placement_seed = cfg.sim.rng_seed;
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " +
                             e.what());
  }
  return parse_run_config(j);
}

const char* to_string(ChannelModel m) {
  return m == ChannelModel::Fowlerville ? "Fowlerville" : "WinnerB1";
}

const char* to_string(SinrCombiner c) {
  return c == SinrCombiner::LinearMean ? "linear_mean" : "min_subchannel";
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["sim"] = {{"bandwidth_mhz", cfg.sim.bandwidth_mhz},
              {"packet_size_bytes", cfg.sim.packet_size_bytes},
              {"mcs", cfg.sim.mcs},
              {"tx_rate_hz", cfg.sim.tx_rate_hz},
              {"tx_power_dbm", cfg.sim.tx_power_dbm},
              {"rri_ms", cfg.sim.rri_ms},
              {"slrrc_min", cfg.sim.slrrc_min},
              {"slrrc_max", cfg.sim.slrrc_max},
              {"p_resel", cfg.sim.p_resel},
              {"sim_duration_ms", cfg.sim.sim_duration_ms},
              {"rbs_per_subchannel", cfg.sim.rbs_per_subchannel},
              {"packet_subchannels", cfg.sim.packet_subchannels},
              {"noise_figure_db", cfg.sim.noise_figure_db},
              {"sps_initial_threshold_dbm", cfg.sim.sps_initial_threshold_dbm},
              {"sensing_horizon_ms", cfg.sim.sensing_horizon_ms},
              {"sinr_combiner", to_string(cfg.sim.sinr_combiner)},
              {"rng_seed", cfg.sim.rng_seed}};
  j["channel"] = {
      {"model", to_string(cfg.channel.model)},
      {"carrier_ghz", cfg.channel.carrier_ghz},
      {"shadowing_sigma_db", cfg.channel.shadowing_sigma_db},
      {"fowlerville",
       {{"pl0_db", cfg.channel.fowlerville.pl0_db},
        {"d0_m", cfg.channel.fowlerville.d0_m},
        {"exponent_near", cfg.channel.fowlerville.exponent_near},
        {"exponent_far", cfg.channel.fowlerville.exponent_far},
        {"breakpoint_m", cfg.channel.fowlerville.breakpoint_m}}},
      {"winner",
       {{"a", cfg.channel.winner.a},
        {"b", cfg.channel.winner.b},
        {"c", cfg.channel.winner.c},
        {"use_breakpoint", cfg.channel.winner.use_breakpoint},
        {"antenna_height_m", cfg.channel.winner.antenna_height_m}}}};
  if (cfg.scenario) {
    j["scenario"] = {{"road_length_m", cfg.scenario->road_length_m},
                     {"lanes", cfg.scenario->lanes},
                     {"lane_width_m", cfg.scenario->lane_width_m},
                     {"n_vehicles", cfg.scenario->n_vehicles},
                     {"speed_mps", cfg.scenario->speed_mps},
                     {"hv_id", cfg.scenario->hv_id},
                     {"placement_seed", cfg.scenario->placement_seed}};
  } else if (cfg.trace_path) {
    j["trace"] = *cfg.trace_path;
    j["hv_id"] = cfg.hv_id;
  }
  if (!cfg.bler_table_path.empty()) j["bler_table"] = cfg.bler_table_path;
  j["out_dir"] = cfg.out_dir;
  j["pacing"] = {{"real_time_factor", cfg.pacing.real_time_factor},
                 {"endpoint", cfg.pacing.endpoint},
                 {"max_lag_ms", cfg.pacing.max_lag_ms},
                 {"max_buffer_sim_ms", cfg.pacing.max_buffer_sim_ms},
                 {"lag_violation_streak", cfg.pacing.lag_violation_streak}};
  return j;
}

void write_resolved_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_json(cfg).dump(2) << '\n';
}

}  // namespace cv2x
