#pragma once
#include <vector>
#include <cstdint>

namespace cv2x {

// Time resolution of the resource grid: one subframe per millisecond.
inline constexpr int kSubframeMs = 1;
// LTE resource block bandwidth.
inline constexpr double kRbBandwidthHz = 180e3;

// A candidate single-subframe resource: `subchannel_len` contiguous
// subchannels starting at `subchannel_start` in subframe `subframe`.
struct Csr {
  int64_t subframe = 0;
  int subchannel_start = 0;
  int subchannel_len = 1;

  friend bool operator==(const Csr&, const Csr&) = default;
};

// Subchannel-span intersection width between two half-open spans.
inline int span_overlap(int a_start, int a_len, int b_start, int b_len) {
  int lo = a_start > b_start ? a_start : b_start;
  int hi = (a_start + a_len) < (b_start + b_len) ? a_start + a_len
                                                 : b_start + b_len;
  return hi > lo ? hi - lo : 0;
}

// Inclusive subframe range [first, last] a grant may be placed in.
struct SelectionWindow {
  int64_t first = 0;
  int64_t last = 0;

  int64_t length() const { return last - first + 1; }
};

// floor(total_rbs / rbs_per_subchannel); trailing RBs are unused.
int num_subchannels(int total_rbs, int rbs_per_subchannel);

// All valid starting subchannel indices for a block of l contiguous
// subchannels: 0 .. n_subchannels - l, ascending.
std::vector<int> candidate_starts(int n_subchannels, int l_subchannels);

// Every candidate resource in the window, ordered by (subframe,
// subchannel_start) ascending. Size = window.length() * (N - L + 1).
std::vector<Csr> enumerate_csrs(const SelectionWindow& window,
                                int n_subchannels, int l_subchannels);

double subchannel_bandwidth_hz(int rbs_per_subchannel);
double packet_bandwidth_hz(int l_subchannels, int rbs_per_subchannel);

}  // namespace cv2x
