#include "cv2x/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cv2x {

EngineInputs make_engine_inputs(const RunConfig& cfg) {
  EngineInputs in;
  in.sim = cfg.sim;
  in.channel = cfg.channel;
  in.bler = cfg.bler_table_path.empty() ? default_bler_table_mcs5()
                                        : load_bler_csv(cfg.bler_table_path);
  if (cfg.scenario) {
    in.tracks = generate_linear_scenario(*cfg.scenario, cfg.sim.sim_duration_ms);
  } else {
    in.tracks = load_trace_csv(*cfg.trace_path);
  }
  in.hv_id = resolved_hv_id(cfg);
  return in;
}

void reset_peak_rss() {
  // "5" resets the peak-RSS high-water mark (Linux >= 4.0); best effort.
  std::ofstream f("/proc/self/clear_refs");
  if (f) f << "5";
}

uint64_t peak_rss_bytes() {
  std::ifstream f("/proc/self/status");
  std::string line;
  while (std::getline(f, line)) {
    if (line.rfind("VmHWM:", 0) == 0) {
      std::istringstream ls(line.substr(6));
      uint64_t kb = 0;
      std::string unit;
      if (ls >> kb >> unit) return kb * 1024;
    }
  }
  struct rusage ru {};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<uint64_t>(ru.ru_maxrss) * 1024;
}

BenchMatrix parse_bench_matrix(const nlohmann::json& j) {
  if (!j.is_object())
    throw std::invalid_argument("bench config must be an object");
  static const std::set<std::string> allowed{
      "channels", "bandwidths", "vehicles", "repetitions", "sim_duration_ms",
      "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("bench config: unknown key '" + it.key() +
                                  "'");
  BenchMatrix m;
  if (j.contains("channels")) {
    m.models.clear();
    for (const auto& s : j.at("channels")) {
      std::string name = s.get<std::string>();
      if (name == "Fowlerville") m.models.push_back(ChannelModel::Fowlerville);
      else if (name == "WinnerB1") m.models.push_back(ChannelModel::WinnerB1);
      else throw std::invalid_argument("bench config: unknown channel '" +
                                       name + "'");
    }
  }
  if (j.contains("bandwidths"))
    m.bandwidths = j.at("bandwidths").get<std::vector<int>>();
  if (j.contains("vehicles"))
    m.vehicle_counts = j.at("vehicles").get<std::vector<int>>();
  if (j.contains("repetitions")) m.repetitions = j.at("repetitions").get<int>();
  if (j.contains("sim_duration_ms"))
    m.sim_duration_ms = j.at("sim_duration_ms").get<int64_t>();
  if (j.contains("seed")) m.seed = j.at("seed").get<uint64_t>();
  if (m.models.empty() || m.bandwidths.empty() || m.vehicle_counts.empty())
    throw std::invalid_argument("bench config: empty matrix axis");
  if (m.repetitions < 1)
    throw std::invalid_argument("bench config: repetitions must be >= 1");
  return m;
}

std::vector<BenchCell> run_bench(const BenchMatrix& m) {
  std::vector<BenchCell> cells;
  for (ChannelModel model : m.models) {
    for (int bw : m.bandwidths) {
      for (int n : m.vehicle_counts) {
        RunConfig cfg;
        cfg.sim.bandwidth_mhz = bw;
        cfg.sim.sim_duration_ms = m.sim_duration_ms;
        cfg.sim.rng_seed = m.seed;
        cfg.channel.model = model;
        ScenarioSpec spec;
        spec.n_vehicles = n;
        spec.placement_seed = m.seed;
        cfg.scenario = spec;
        EngineInputs in = make_engine_inputs(cfg);

        BenchCell cell;
        cell.model = model;
        cell.bandwidth_mhz = bw;
        cell.n_vehicles = n;
        cell.repetitions = m.repetitions;
        reset_peak_rss();
        std::vector<double> walls;
        for (int r = 0; r < m.repetitions; ++r) {
          auto t0 = std::chrono::steady_clock::now();
          run_engine(in);
          auto t1 = std::chrono::steady_clock::now();
          walls.push_back(
              std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        cell.wall_ms_mean =
            std::accumulate(walls.begin(), walls.end(), 0.0) / walls.size();
        cell.wall_ms_min = *std::min_element(walls.begin(), walls.end());
        cell.wall_ms_max = *std::max_element(walls.begin(), walls.end());
        cell.peak_rss_bytes = peak_rss_bytes();
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

void write_bench_csv(const std::vector<BenchCell>& cells, std::ostream& out) {
  out << "channel,bandwidth_mhz,vehicles,repetitions,wall_ms_mean,wall_ms_min,"
         "wall_ms_max,peak_rss_bytes\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.1f,%.1f,%.1f,%llu\n",
                  to_string(c.model), c.bandwidth_mhz, c.n_vehicles,
                  c.repetitions, c.wall_ms_mean, c.wall_ms_min, c.wall_ms_max,
                  static_cast<unsigned long long>(c.peak_rss_bytes));
    out << buf;
  }
}

}  // namespace cv2x
