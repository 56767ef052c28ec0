#include "cv2x/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace cv2x {

double MetricsReport::per_at(double distance_m) const {
  size_t idx = static_cast<size_t>(distance_m / bin_width_m);
  if (idx >= per_bins.size()) return 0.0;
  return per_bins[idx].per();
}

IpgStats MetricsReport::ipg_stats(int bin) const {
  IpgStats st;
  double sum = 0.0;
  std::vector<std::pair<int64_t, int64_t>> gaps;  // (gap, count)
  for (const auto& [key, count] : ipg_hist) {
    if (key.first != bin) continue;
    st.count += count;
    sum += static_cast<double>(key.second) * static_cast<double>(count);
    gaps.emplace_back(key.second, count);
  }
  if (st.count == 0) return st;
  st.mean_ms = sum / static_cast<double>(st.count);
  auto quantile = [&](double q) {
    int64_t target = static_cast<int64_t>(
        std::ceil(q * static_cast<double>(st.count)));
    if (target < 1) target = 1;
    int64_t seen = 0;
    for (const auto& [gap, count] : gaps) {  // gaps ascend (map order)
      seen += count;
      if (seen >= target) return static_cast<double>(gap);
    }
    return static_cast<double>(gaps.back().first);
  };
  st.median_ms = quantile(0.5);
  st.p95_ms = quantile(0.95);
  return st;
}

MetricsCollector::MetricsCollector(double bin_width_m, double report_range_m) {
  report_.bin_width_m = bin_width_m;
  report_.report_range_m = report_range_m;
  size_t base_bins = static_cast<size_t>(report_range_m / bin_width_m);
  report_.per_bins.resize(base_bins);
  for (size_t i = 0; i < base_bins; ++i) {
    report_.per_bins[i].start_m = bin_width_m * static_cast<double>(i);
    report_.per_bins[i].end_m = bin_width_m * static_cast<double>(i + 1);
  }
}

void MetricsCollector::record(const ReceptionOutcome& outcome,
                              double distance_m) {
  if (distance_m < 0 || !std::isfinite(distance_m))
    throw std::invalid_argument("reception distance must be finite and >= 0");
  size_t idx = static_cast<size_t>(distance_m / report_.bin_width_m);
  if (idx >= report_.per_bins.size()) {
    size_t old = report_.per_bins.size();
    report_.per_bins.resize(idx + 1);
    for (size_t i = old; i <= idx; ++i) {
      report_.per_bins[i].start_m = report_.bin_width_m * static_cast<double>(i);
      report_.per_bins[i].end_m =
          report_.bin_width_m * static_cast<double>(i + 1);
    }
  }
  auto& bin = report_.per_bins[idx];
  bin.sent += 1;
  report_.total_sent += 1;
  if (outcome.decoded) {
    report_.total_decoded += 1;
    int ipg_bin = 0;
    for (int b = kIpgBinCount - 1; b >= 0; --b) {
      if (distance_m >= kIpgBinLower[b]) {
        ipg_bin = b;
        break;
      }
    }
    auto it = last_decoded_gen_.find(outcome.tx_id);
    if (it != last_decoded_gen_.end()) {
      int64_t gap = outcome.gen_time_ms - it->second;
      report_.ipg_hist[{ipg_bin, gap}] += 1;
      it->second = outcome.gen_time_ms;
    } else {
      last_decoded_gen_[outcome.tx_id] = outcome.gen_time_ms;
    }
  } else {
    bin.failed += 1;
    switch (outcome.cause) {
      case LossCause::HalfDuplex: report_.lost_half_duplex += 1; break;
      case LossCause::Propagation: report_.lost_propagation += 1; break;
      case LossCause::Collision: report_.lost_collision += 1; break;
      case LossCause::None:
        throw std::logic_error("undecoded outcome without a loss cause");
    }
  }
  if (outcome.cause != LossCause::HalfDuplex)
    report_.rssi.push_back({distance_m, outcome.rssi_dbm});
}

MetricsReport MetricsCollector::take() { return std::move(report_); }

namespace {

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void open_or_throw(std::ofstream& out, const std::string& path) {
  out.open(path, std::ios::binary);  // binary: byte-stable across platforms
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace

void export_metrics(const MetricsReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + out_dir +
                             ": " + ec.message());

  {
    std::ofstream out;
    open_or_throw(out, out_dir + "/per_by_distance.csv");
    out << "bin_start_m,bin_end_m,sent,failed,per\n";
    size_t report_bins =
        static_cast<size_t>(report.report_range_m / report.bin_width_m);
    for (size_t i = 0; i < report.per_bins.size(); ++i) {
      const PerBin& b = report.per_bins[i];
      if (i >= report_bins && b.sent == 0) continue;
      out << format_fixed(b.start_m, 0) << ',' << format_fixed(b.end_m, 0)
          << ',' << b.sent << ',' << b.failed << ',';
      if (b.sent > 0) out << format_fixed(b.per(), 6);
      out << '\n';
    }
  }
  {
    std::ofstream out;
    open_or_throw(out, out_dir + "/ipg.csv");
    out << "bin,gap_ms,count\n";
    for (const auto& [key, count] : report.ipg_hist)
      out << kIpgBinLabels[static_cast<size_t>(key.first)] << ',' << key.second
          << ',' << count << '\n';
  }
  {
    std::ofstream out;
    open_or_throw(out, out_dir + "/rssi_scatter.csv");
    out << "distance_m,rssi_dbm\n";
    for (const RssiSample& s : report.rssi)
      out << format_fixed(s.distance_m, 3) << ',' << format_fixed(s.rssi_dbm, 3)
          << '\n';
  }
  {
    std::ofstream out;
    open_or_throw(out, out_dir + "/runtime.json");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "{\"sim_duration_ms\":%lld,\"wall_ms\":%lld,"
                  "\"n_vehicles\":%d,\"peak_rss_bytes\":%llu}\n",
                  static_cast<long long>(report.sim_duration_ms),
                  static_cast<long long>(report.wall_ms), report.n_vehicles,
                  static_cast<unsigned long long>(report.peak_rss_bytes));
    out << buf;
  }
}

}  // namespace cv2x
