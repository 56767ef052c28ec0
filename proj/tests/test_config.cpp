#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cv2x/config.hpp"

using namespace cv2x;
using nlohmann::json;

namespace {

json minimal() { return json::parse(R"({"scenario":{"n_vehicles":20}})"); }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal config fills every default") {
  RunConfig cfg = parse_run_config(minimal());
  CHECK(cfg.sim.bandwidth_mhz == 10);
  CHECK(cfg.sim.rri_ms == 100);
  CHECK(cfg.sim.sim_duration_ms == 40000);
  CHECK(cfg.sim.sinr_combiner == SinrCombiner::MinSubchannel);
  CHECK(cfg.channel.model == ChannelModel::Fowlerville);
  REQUIRE(cfg.scenario.has_value());
  CHECK(cfg.scenario->n_vehicles == 20);
  CHECK(cfg.scenario->road_length_m == doctest::Approx(1200.0));
  CHECK_FALSE(cfg.trace_path.has_value());
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.bler_table_path.empty());
  CHECK(cfg.pacing.real_time_factor == doctest::Approx(1.0));
}

TEST_CASE("explicit fields land where they belong") {
  json j = json::parse(R"({
    "sim": {"bandwidth_mhz": 20, "tx_power_dbm": 23.0, "rng_seed": 9,
            "sinr_combiner": "linear_mean"},
    "channel": {"model": "WinnerB1", "shadowing_sigma_db": 1.5,
                "winner": {"use_breakpoint": true, "antenna_height_m": 1.6}},
    "scenario": {"n_vehicles": 50, "lanes": 4, "hv_id": 3},
    "out_dir": "results/x",
    "bler_table": "tbl.csv",
    "pacing": {"real_time_factor": 4.0, "endpoint": "udp://h:9",
               "max_lag_ms": 7}
  })");
  RunConfig cfg = parse_run_config(j);
  CHECK(cfg.sim.bandwidth_mhz == 20);
  CHECK(cfg.sim.tx_power_dbm == doctest::Approx(23.0));
  CHECK(cfg.sim.rng_seed == 9);
  CHECK(cfg.sim.sinr_combiner == SinrCombiner::LinearMean);
  CHECK(cfg.channel.model == ChannelModel::WinnerB1);
  CHECK(cfg.channel.shadowing_sigma_db == doctest::Approx(1.5));
  CHECK(cfg.channel.winner.use_breakpoint);
  CHECK(cfg.channel.winner.antenna_height_m == doctest::Approx(1.6));
  CHECK(cfg.scenario->lanes == 4);
  CHECK(cfg.scenario->hv_id == 3);
  CHECK(resolved_hv_id(cfg) == 3);
  CHECK(cfg.out_dir == "results/x");
  CHECK(cfg.bler_table_path == "tbl.csv");
  CHECK(cfg.pacing.real_time_factor == doctest::Approx(4.0));
  CHECK(cfg.pacing.endpoint == "udp://h:9");
  CHECK(cfg.pacing.max_lag_ms == 7);
}

TEST_CASE("unknown keys are rejected at every level") {
  auto expect_bad = [](const char* text, const char* needle) {
    try {
      parse_run_config(json::parse(text));
      FAIL("expected invalid_argument for: ", text);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_bad(R"({"scenario":{"n_vehicles":5},"bogus":1})", "bogus");
  expect_bad(R"({"scenario":{"n_vehicles":5},"sim":{"bandwidth":10}})",
             "bandwidth");
  expect_bad(R"({"scenario":{"n_vehicles":5},"channel":{"sigma":3}})", "sigma");
  expect_bad(
      R"({"scenario":{"n_vehicles":5},"channel":{"fowlerville":{"pl0":1}}})",
      "pl0");
  expect_bad(
      R"({"scenario":{"n_vehicles":5},"channel":{"winner":{"height":1}}})",
      "height");
  expect_bad(R"({"scenario":{"n_vehicles":5,"count":2}})", "count");
  expect_bad(R"({"scenario":{"n_vehicles":5},"pacing":{"rtf":2}})", "rtf");
}

TEST_CASE("bad value types name the field") {
  try {
    parse_run_config(
        json::parse(R"({"scenario":{"n_vehicles":5},"sim":{"rri_ms":"fast"}})"));
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("rri_ms") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_run_config(json::parse(
                      R"({"scenario":{"n_vehicles":5},
                          "channel":{"model":"FreeSpace"}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config(json::parse(
                      R"({"scenario":{"n_vehicles":5},
                          "sim":{"sinr_combiner":"best_case"}})")),
                  std::invalid_argument);
}

TEST_CASE("exactly one source of vehicles") {
  CHECK_THROWS_AS(parse_run_config(json::parse("{}")), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config(json::parse(
                      R"({"scenario":{"n_vehicles":5},"trace":"t.csv"})")),
                  std::invalid_argument);
  RunConfig cfg =
      parse_run_config(json::parse(R"({"trace":"t.csv","hv_id":2})"));
  CHECK(cfg.trace_path == "t.csv");
  CHECK_FALSE(cfg.scenario.has_value());
  CHECK(resolved_hv_id(cfg) == 2);
}

TEST_CASE("invariant violations surface from the parse") {
  CHECK_THROWS_AS(parse_run_config(json::parse(
                      R"({"scenario":{"n_vehicles":5},"sim":{"p_resel":1.5}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      parse_run_config(json::parse(
          R"({"scenario":{"n_vehicles":5},"channel":{"shadowing_sigma_db":-1}})")),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config(json::parse(
                      R"({"scenario":{"n_vehicles":0}})")),
                  std::invalid_argument);
}

TEST_CASE("placement seed follows the run seed unless pinned") {
  RunConfig follows = parse_run_config(
      json::parse(R"({"sim":{"rng_seed":7},"scenario":{"n_vehicles":5}})"));
  CHECK_FALSE(follows.placement_seed_explicit);
  CHECK(follows.scenario->placement_seed == 7);

  RunConfig pinned = parse_run_config(json::parse(
      R"({"sim":{"rng_seed":7},"scenario":{"n_vehicles":5,"placement_seed":3}})"));
  CHECK(pinned.placement_seed_explicit);
  CHECK(pinned.scenario->placement_seed == 3);
}

TEST_CASE("resolved config is a parse fixpoint") {
  json j = json::parse(R"({
    "sim": {"bandwidth_mhz": 20, "rng_seed": 5},
    "channel": {"model": "WinnerB1"},
    "scenario": {"n_vehicles": 30},
    "pacing": {"real_time_factor": 2.0}
  })");
  RunConfig cfg = parse_run_config(j);
  auto resolved = to_json(cfg);
  RunConfig again = parse_run_config(resolved);
  CHECK(to_json(again).dump(2) == resolved.dump(2));
  CHECK(again.sim.bandwidth_mhz == 20);
  CHECK(again.scenario->placement_seed == 5);

  RunConfig trace_cfg =
      parse_run_config(json::parse(R"({"trace":"t.csv","hv_id":4})"));
  RunConfig trace_again = parse_run_config(to_json(trace_cfg));
  CHECK(to_json(trace_again).dump(2) == to_json(trace_cfg).dump(2));
  CHECK(trace_again.hv_id == 4);
}

TEST_CASE("config files load, fail loudly, and write back stably") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cv2x_config_test";
  fs::create_directories(dir);
  fs::path path = dir / "run.json";
  {
    std::ofstream out(path);
    out << R"({"scenario":{"n_vehicles":12},"sim":{"rng_seed":6}})";
  }
  RunConfig cfg = load_run_config(path.string());
  CHECK(cfg.scenario->n_vehicles == 12);

  CHECK_THROWS_AS(load_run_config((dir / "absent.json").string()),
                  std::runtime_error);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  try {
    load_run_config(path.string());
    FAIL("expected runtime_error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(path.string()) != std::string::npos);
  }

  fs::path echo = dir / "resolved.json";
  write_resolved_config(cfg, echo.string());
  std::string first = slurp(echo.string());
  CHECK(first.back() == '\n');
  CHECK(json::parse(first).is_object());
  write_resolved_config(cfg, echo.string());
  CHECK(slurp(echo.string()) == first);
  fs::remove_all(dir);
}

TEST_CASE("enum names round trip") {
  CHECK(std::string(to_string(ChannelModel::Fowlerville)) == "Fowlerville");
  CHECK(std::string(to_string(ChannelModel::WinnerB1)) == "WinnerB1");
  CHECK(std::string(to_string(SinrCombiner::LinearMean)) == "linear_mean");
  CHECK(std::string(to_string(SinrCombiner::MinSubchannel)) ==
        "min_subchannel");
}
