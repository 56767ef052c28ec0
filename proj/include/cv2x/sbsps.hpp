#pragma once
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "cv2x/grid.hpp"
#include "cv2x/rng.hpp"

namespace cv2x {

// One transmission as measured by one sensing radio. rssi_dbm is the
// received power of THIS transmission over its own span; per-candidate
// channel totals (noise + every overlapping transmission) are reassembled
// from these during shortlist ranking, so nothing is double counted.
struct SensedEntry {
  int64_t subframe = 0;
  Csr csr;  // csr.subframe equals subframe
  double rsrp_dbm = 0.0;
  double rssi_dbm = 0.0;
  bool decoded = false;  // control + payload decoded as one event
  int source_id = -1;
};

// Trailing measurement history of one vehicle's radio. Entries older than
// the horizon are evicted as new ones arrive; queries additionally filter
// to the exact [T - horizon, T) range.
class SensingWindow {
 public:
  SensingWindow(int owner_id, int horizon_ms)
      : owner_id_(owner_id), horizon_ms_(horizon_ms) {}

  void record_sensed(const SensedEntry& entry);
  void record_own_tx(int64_t subframe);

  const std::deque<SensedEntry>& entries() const { return entries_; }
  const std::deque<int64_t>& own_tx_subframes() const { return own_tx_; }
  int owner_id() const { return owner_id_; }
  int horizon_ms() const { return horizon_ms_; }

 private:
  void evict(int64_t newest);
  int owner_id_;
  int horizon_ms_;
  std::deque<SensedEntry> entries_;  // time-ordered
  std::deque<int64_t> own_tx_;       // time-ordered
};

// Scheduler knobs, derived once per run from the radio configuration.
struct SpsParams {
  int n_subchannels = 5;
  int l_subchannels = 2;
  int rri_ms = 100;
  int horizon_ms = 1000;
  int slrrc_min = 5;
  int slrrc_max = 15;
  double p_resel = 0.8;
  // Channel total over one candidate span when nothing was measured.
  double noise_floor_dbm = -99.44;
  double initial_threshold_dbm = -110.0;
  double threshold_step_db = 3.0;
  // Shortlist size as a fraction of M, kept as a rational so the ceil is
  // exact: min candidates = ceil(M * num / den).
  int candidate_fraction_num = 1;
  int candidate_fraction_den = 5;
};

// Minimum shortlist size: ceil(M / 5) under defaults.
inline size_t min_candidates(const SpsParams& p, size_t m) {
  return (m * static_cast<size_t>(p.candidate_fraction_num) +
          static_cast<size_t>(p.candidate_fraction_den) - 1) /
         static_cast<size_t>(p.candidate_fraction_den);
}

struct CandidateSet {
  SelectionWindow window;
  std::vector<Csr> all;    // every candidate, canonical order, size M
  std::vector<Csr> set_a;  // after exclusions, canonical order
  std::vector<Csr> set_b;  // lowest-average-RSSI shortlist, canonical order
  double threshold_dbm = 0.0;  // final exclusion threshold after escalation
};

struct SpsState {
  int slrrc = -1;  // -1 = never scheduled
  std::optional<Csr> reserved;
};

enum class ReselectionDecision { KeepCsr, Reselect };

// Subframes inside the window that line up with a sensed subframe under
// RRI periodicity.
std::vector<int64_t> project_to_window(int64_t sensed_subframe,
                                       const SelectionWindow& window,
                                       int rri_ms);

// Candidate filtering: drop every candidate in a subframe aligned with an
// own transmission (the radio was deaf there), and every candidate whose
// span intersects a decoded transmission with RSRP above the threshold.
// The threshold rises in fixed steps until enough candidates survive.
CandidateSet build_set_a(const SensingWindow& win,
                         const SelectionWindow& window, const SpsParams& p);

// Ranks set_a by linear-mean RSSI over each candidate's periodic
// occurrences in the sensing range and keeps the lowest fifth.
void build_set_b(CandidateSet& cands, const SensingWindow& win,
                 const SpsParams& p);

Csr select_csr(const CandidateSet& cands, rng::Stream& stream);

int draw_slrrc(const SpsParams& p, rng::Stream& stream);

// Keep-or-reselect coin at counter expiry; caller draws the fresh counter.
ReselectionDecision on_counter_zero(const SpsState& state, const SpsParams& p,
                                    rng::Stream& stream);

}  // namespace cv2x
