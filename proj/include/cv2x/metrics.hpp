#pragma once
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cv2x/phy.hpp"

namespace cv2x {

struct PerBin {
  double start_m = 0.0;
  double end_m = 0.0;  // half-open [start, end)
  int64_t sent = 0;
  int64_t failed = 0;

  double per() const {
    return sent > 0 ? static_cast<double>(failed) / static_cast<double>(sent)
                    : 0.0;
  }
};

struct RssiSample {
  double distance_m = 0.0;
  double rssi_dbm = 0.0;
};

// Distance bands for gap statistics. Half-open: 400 m falls in the last.
inline constexpr int kIpgBinCount = 3;
inline constexpr std::array<const char*, kIpgBinCount> kIpgBinLabels = {
    "0-150", "150-400", "400+"};
inline constexpr std::array<double, kIpgBinCount> kIpgBinLower = {0.0, 150.0,
                                                                  400.0};

struct IpgStats {
  int64_t count = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p95_ms = 0.0;
};

struct MetricsReport {
  double bin_width_m = 25.0;
  double report_range_m = 600.0;
  std::vector<PerBin> per_bins;  // contiguous from 0, 25 m wide
  // (distance band, gap in ms) -> occurrences; gaps at generation-timestamp
  // resolution, so multiples of the reservation interval by construction.
  std::map<std::pair<int, int64_t>, int64_t> ipg_hist;
  std::vector<RssiSample> rssi;  // reception order

  int64_t total_sent = 0;
  int64_t total_decoded = 0;
  int64_t lost_half_duplex = 0;
  int64_t lost_propagation = 0;
  int64_t lost_collision = 0;

  int64_t sim_duration_ms = 0;
  int n_vehicles = 0;
  int64_t wall_ms = 0;          // filled by the caller around the run
  uint64_t peak_rss_bytes = 0;  // likewise

  // PER of the bin containing distance d; 0 if the bin is empty/absent.
  double per_at(double distance_m) const;
  IpgStats ipg_stats(int bin) const;
};

class MetricsCollector {
 public:
  MetricsCollector(double bin_width_m = 25.0, double report_range_m = 600.0);

  // Distance is between transmitter and host at the transmission subframe.
  void record(const ReceptionOutcome& outcome, double distance_m);

  MetricsReport take();

 private:
  MetricsReport report_;
  std::map<int, int64_t> last_decoded_gen_;  // per transmitter
};

// Writes per_by_distance.csv, ipg.csv, rssi_scatter.csv, runtime.json.
void export_metrics(const MetricsReport& report, const std::string& out_dir);

}  // namespace cv2x
