#include "cv2x/grid.hpp"

#include <stdexcept>
#include <string>

#include "cv2x/params.hpp"

namespace cv2x {

int num_subchannels(int total_rbs, int rbs_per_subchannel) {
  if (total_rbs <= 0 || rbs_per_subchannel <= 0)
    throw std::invalid_argument("resource block counts must be positive");
  if (rbs_per_subchannel > total_rbs)
    throw std::invalid_argument("subchannel wider than the channel");
  return total_rbs / rbs_per_subchannel;
}

std::vector<int> candidate_starts(int n_subchannels, int l_subchannels) {
  if (n_subchannels <= 0 || l_subchannels <= 0)
    throw std::invalid_argument("subchannel counts must be positive");
  if (l_subchannels > n_subchannels)
    throw std::invalid_argument("packet wider than the channel");
  std::vector<int> starts;
  starts.reserve(n_subchannels - l_subchannels + 1);
  for (int s = 0; s + l_subchannels <= n_subchannels; ++s) starts.push_back(s);
  return starts;
}

std::vector<Csr> enumerate_csrs(const SelectionWindow& window,
                                int n_subchannels, int l_subchannels) {
  if (window.last < window.first)
    throw std::invalid_argument("selection window is empty");
  auto starts = candidate_starts(n_subchannels, l_subchannels);
  std::vector<Csr> out;
  out.reserve(static_cast<size_t>(window.length()) * starts.size());
  for (int64_t sf = window.first; sf <= window.last; ++sf)
    for (int s : starts) out.push_back(Csr{sf, s, l_subchannels});
  return out;
}

double subchannel_bandwidth_hz(int rbs_per_subchannel) {
  if (rbs_per_subchannel <= 0)
    throw std::invalid_argument("rbs_per_subchannel must be positive");
  return rbs_per_subchannel * kRbBandwidthHz;
}

double packet_bandwidth_hz(int l_subchannels, int rbs_per_subchannel) {
  if (l_subchannels <= 0)
    throw std::invalid_argument("l_subchannels must be positive");
  return l_subchannels * subchannel_bandwidth_hz(rbs_per_subchannel);
}

int total_rbs(int bandwidth_mhz) {
  switch (bandwidth_mhz) {
    case 10: return 50;
    case 20: return 100;
    default:
      throw std::invalid_argument("bandwidth_mhz must be 10 or 20, got " +
                                  std::to_string(bandwidth_mhz));
  }
}

int num_subchannels(const SimParams& p) {
  return num_subchannels(total_rbs(p.bandwidth_mhz), p.rbs_per_subchannel);
}

double packet_bandwidth_hz(const SimParams& p) {
  return packet_bandwidth_hz(p.packet_subchannels, p.rbs_per_subchannel);
}

double subchannel_bandwidth_hz(const SimParams& p) {
  return subchannel_bandwidth_hz(p.rbs_per_subchannel);
}

void validate(const SimParams& p) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("sim params: " + msg);
  };
  int rbs = total_rbs(p.bandwidth_mhz);  // throws on bad bandwidth
  if (p.rbs_per_subchannel <= 0 || p.rbs_per_subchannel > rbs)
    fail("rbs_per_subchannel out of range for the channel");
  if (p.packet_size_bytes <= 0) fail("packet_size_bytes must be positive");
  if (p.tx_rate_hz <= 0) fail("tx_rate_hz must be positive");
  if (p.rri_ms <= 0) fail("rri_ms must be positive");
  if (p.rri_ms * p.tx_rate_hz != 1000)
    fail("rri_ms must equal 1000 / tx_rate_hz");
  if (p.slrrc_min > p.slrrc_max || p.slrrc_min < 0)
    fail("slrrc range invalid");
  if (p.p_resel < 0.0 || p.p_resel > 1.0) fail("p_resel must be in [0,1]");
  if (p.sim_duration_ms <= 0) fail("sim_duration_ms must be positive");
  if (p.packet_subchannels <= 0 || p.packet_subchannels > num_subchannels(p))
    fail("packet_subchannels must be in [1, num_subchannels]");
  if (p.sensing_horizon_ms < p.rri_ms)
    fail("sensing_horizon_ms must cover at least one reservation interval");
}

}  // namespace cv2x
