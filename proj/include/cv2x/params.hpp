#pragma once
#include <cstdint>
#include <string>

namespace cv2x {

// How per-subchannel SINR values combine into one packet-level SINR.
enum class SinrCombiner { LinearMean, MinSubchannel };

// Radio/MAC knobs, fixed for the lifetime of a run.
struct SimParams {
  int bandwidth_mhz = 10;  // 10 or 20
  int packet_size_bytes = 190;
  int mcs = 5;
  int tx_rate_hz = 10;  // packets per second
  double tx_power_dbm = 20.0;
  int rri_ms = 100;  // resource reservation interval
  int slrrc_min = 5;
  int slrrc_max = 15;
  double p_resel = 0.8;
  int64_t sim_duration_ms = 40000;
  int rbs_per_subchannel = 10;
  int packet_subchannels = 2;  // L, footprint of one transmission
  double noise_figure_db = 9.0;
  double sps_initial_threshold_dbm = -110.0;
  int sensing_horizon_ms = 1000;
  // A transport block is coded across its whole span, so one overwhelmed
  // subchannel defeats the block; the worst-subchannel rule reproduces the
  // reference congestion results, the linear mean is far more optimistic.
  SinrCombiner sinr_combiner = SinrCombiner::MinSubchannel;
  uint64_t rng_seed = 1;
};

// 50 resource blocks at 10 MHz, 100 at 20 MHz (LTE numerology).
int total_rbs(int bandwidth_mhz);

int num_subchannels(const SimParams& p);
double packet_bandwidth_hz(const SimParams& p);
double subchannel_bandwidth_hz(const SimParams& p);

// Throws std::invalid_argument with a description on any violated invariant.
void validate(const SimParams& p);

}  // namespace cv2x
