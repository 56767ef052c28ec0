#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cv2x/config.hpp"
#include "cv2x/engine.hpp"

namespace cv2x {

// Resolves a config into concrete engine inputs: generates the synthetic
// scenario or loads the trace file, and loads the error-rate table.
EngineInputs make_engine_inputs(const RunConfig& cfg);

struct BenchCell {
  ChannelModel model = ChannelModel::Fowlerville;
  int bandwidth_mhz = 10;
  int n_vehicles = 0;
  int repetitions = 1;
  double wall_ms_mean = 0.0;
  double wall_ms_min = 0.0;
  double wall_ms_max = 0.0;
  uint64_t peak_rss_bytes = 0;
};

struct BenchMatrix {
  std::vector<ChannelModel> models{ChannelModel::Fowlerville,
                                   ChannelModel::WinnerB1};
  std::vector<int> bandwidths{10, 20};
  std::vector<int> vehicle_counts{100, 200, 500};
  int repetitions = 1;
  int64_t sim_duration_ms = 40000;
  uint64_t seed = 1;
};

BenchMatrix parse_bench_matrix(const nlohmann::json& j);

// Runs every cell (model x bandwidth x vehicle count) as fast as possible
// and reports wall-clock statistics plus the peak resident set per cell.
std::vector<BenchCell> run_bench(const BenchMatrix& m);

void write_bench_csv(const std::vector<BenchCell>& cells, std::ostream& out);

// High-water-mark RSS of this process, in bytes. reset_peak_rss clears the
// kernel counter where supported so per-cell peaks are meaningful.
void reset_peak_rss();
uint64_t peak_rss_bytes();

}  // namespace cv2x
