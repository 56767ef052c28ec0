#include "cv2x/sbsps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace cv2x {

namespace {
int64_t positive_mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}
double to_linear_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

// Order among equal averages. Untouched candidates all measure exactly the
// noise floor, and if every radio ranked those ties identically the whole
// fleet would agree on one shortlist, inflating same-pick collisions; real
// receivers disagree through measurement noise. A per-radio hash keeps the
// decision deterministic and reproducible without that correlation.
uint64_t tie_key(int owner_id, int64_t window_first, int64_t subframe,
                 int subchannel_start) {
  uint64_t h = rng::splitmix64(0x9d39247e33776d41ULL ^
                               static_cast<uint64_t>(owner_id));
  h = rng::splitmix64(h ^ static_cast<uint64_t>(window_first));
  h = rng::splitmix64(h ^ static_cast<uint64_t>(subframe));
  h = rng::splitmix64(h ^ static_cast<uint64_t>(subchannel_start));
  return h;
}
}  // namespace

void SensingWindow::record_sensed(const SensedEntry& entry) {
  entries_.push_back(entry);
  evict(entry.subframe);
}

void SensingWindow::record_own_tx(int64_t subframe) {
  own_tx_.push_back(subframe);
  evict(subframe);
}

void SensingWindow::evict(int64_t newest) {
  int64_t oldest_kept = newest - horizon_ms_;
  while (!entries_.empty() && entries_.front().subframe < oldest_kept)
    entries_.pop_front();
  while (!own_tx_.empty() && own_tx_.front() < oldest_kept)
    own_tx_.pop_front();
}

std::vector<int64_t> project_to_window(int64_t sensed_subframe,
                                       const SelectionWindow& window,
                                       int rri_ms) {
  std::vector<int64_t> out;
  int64_t first =
      window.first + positive_mod(sensed_subframe - window.first, rri_ms);
  for (int64_t s = first; s <= window.last; s += rri_ms) out.push_back(s);
  return out;
}

CandidateSet build_set_a(const SensingWindow& win,
                         const SelectionWindow& window, const SpsParams& p) {
  CandidateSet cs;
  cs.window = window;
  cs.all = enumerate_csrs(window, p.n_subchannels, p.l_subchannels);
  const size_t m = cs.all.size();
  const size_t min_keep = min_candidates(p, m);
  const int n_starts = p.n_subchannels - p.l_subchannels + 1;
  const int64_t trigger = window.first - 1;  // sensing covers [T-H, T)
  const int64_t oldest = trigger - p.horizon_ms;

  auto flat_index = [&](int64_t subframe, int start) -> size_t {
    return static_cast<size_t>(subframe - window.first) * n_starts + start;
  };

  // Condition (i): a half-duplex radio heard nothing while transmitting, so
  // every candidate aligned with an own transmission is unusable.
  std::vector<char> deaf(m, 0);
  for (int64_t own : win.own_tx_subframes()) {
    if (own < oldest || own >= trigger) continue;
    for (int64_t proj : project_to_window(own, window, p.rri_ms))
      for (int s = 0; s < n_starts; ++s) deaf[flat_index(proj, s)] = 1;
  }
  size_t deaf_count = static_cast<size_t>(
      std::count(deaf.begin(), deaf.end(), static_cast<char>(1)));
  if (m - deaf_count < min_keep)
    throw std::runtime_error(
        "scheduler: own transmissions block " + std::to_string(deaf_count) +
        " of " + std::to_string(m) +
        " candidates; cannot reach the minimum shortlist");

  // Condition (ii): decoded reservations above the threshold exclude the
  // candidates they overlap; the threshold escalates until enough survive.
  double threshold = p.initial_threshold_dbm;
  std::vector<char> excluded;
  while (true) {
    excluded = deaf;
    for (const SensedEntry& e : win.entries()) {
      if (e.subframe < oldest || e.subframe >= trigger) continue;
      if (!e.decoded || !(e.rsrp_dbm > threshold)) continue;
      for (int64_t proj : project_to_window(e.subframe, window, p.rri_ms)) {
        for (int s = 0; s < n_starts; ++s) {
          if (span_overlap(s, p.l_subchannels, e.csr.subchannel_start,
                           e.csr.subchannel_len) > 0)
            excluded[flat_index(proj, s)] = 1;
        }
      }
    }
    size_t kept = m - static_cast<size_t>(std::count(
                          excluded.begin(), excluded.end(),
                          static_cast<char>(1)));
    if (kept >= min_keep) break;
    threshold += p.threshold_step_db;
  }

  cs.set_a.reserve(m);
  for (size_t i = 0; i < m; ++i)
    if (!excluded[i]) cs.set_a.push_back(cs.all[i]);
  cs.threshold_dbm = threshold;
  return cs;
}

void build_set_b(CandidateSet& cands, const SensingWindow& win,
                 const SpsParams& p) {
  const size_t keep = min_candidates(p, cands.all.size());
  if (cands.set_a.size() < keep)
    throw std::logic_error("scheduler: shortlist requested before enough "
                           "candidates survived filtering");
  const int64_t trigger = cands.window.first - 1;
  const int64_t oldest = trigger - p.horizon_ms;

  // Entries grouped by subframe, preserving arrival order within each
  // group so the floating-point accumulation order is reproducible.
  std::unordered_map<int64_t, std::vector<const SensedEntry*>> by_subframe;
  for (const SensedEntry& e : win.entries()) {
    if (e.subframe < oldest || e.subframe >= trigger) continue;
    by_subframe[e.subframe].push_back(&e);
  }

  const double noise_lin = to_linear_mw(p.noise_floor_dbm);
  struct Ranked {
    double avg_lin;
    uint64_t tie;
    size_t order;  // index into set_a (already canonical order)
  };
  std::vector<Ranked> ranked;
  ranked.reserve(cands.set_a.size());
  for (size_t i = 0; i < cands.set_a.size(); ++i) {
    const Csr& c = cands.set_a[i];
    int64_t first_occ =
        oldest + positive_mod(c.subframe - oldest, p.rri_ms);
    double acc = 0.0;
    int64_t n_occ = 0;
    for (int64_t z = first_occ; z < trigger; z += p.rri_ms) {
      ++n_occ;
      auto it = by_subframe.find(z);
      if (it == by_subframe.end()) continue;
      for (const SensedEntry* e : it->second) {
        int ov = span_overlap(c.subchannel_start, p.l_subchannels,
                              e->csr.subchannel_start, e->csr.subchannel_len);
        if (ov > 0)
          acc += to_linear_mw(e->rssi_dbm) / e->csr.subchannel_len * ov;
      }
    }
    double avg = noise_lin + (n_occ > 0 ? acc / static_cast<double>(n_occ)
                                        : 0.0);
    ranked.push_back({avg,
                      tie_key(win.owner_id(), cands.window.first, c.subframe,
                              c.subchannel_start),
                      i});
  }

  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) {
                     if (a.avg_lin != b.avg_lin) return a.avg_lin < b.avg_lin;
                     return a.tie < b.tie;
                   });

  std::vector<size_t> chosen;
  chosen.reserve(keep);
  for (size_t i = 0; i < keep; ++i) chosen.push_back(ranked[i].order);
  std::sort(chosen.begin(), chosen.end());
  cands.set_b.clear();
  cands.set_b.reserve(keep);
  for (size_t idx : chosen) cands.set_b.push_back(cands.set_a[idx]);
}

Csr select_csr(const CandidateSet& cands, rng::Stream& stream) {
  if (cands.set_b.empty())
    throw std::logic_error("scheduler: selection from an empty shortlist");
  uint64_t idx = stream.uniform_int(0, cands.set_b.size() - 1);
  return cands.set_b[static_cast<size_t>(idx)];
}

int draw_slrrc(const SpsParams& p, rng::Stream& stream) {
  return static_cast<int>(stream.uniform_int(
      static_cast<uint64_t>(p.slrrc_min), static_cast<uint64_t>(p.slrrc_max)));
}

ReselectionDecision on_counter_zero(const SpsState& state, const SpsParams& p,
                                    rng::Stream& stream) {
  if (state.slrrc != 0)
    throw std::logic_error(
        "reselection decision requested with counter at " +
        std::to_string(state.slrrc));
  return stream.uniform() < p.p_resel ? ReselectionDecision::KeepCsr
                                      : ReselectionDecision::Reselect;
}

}  // namespace cv2x
