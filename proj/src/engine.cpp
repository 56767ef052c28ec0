#include "cv2x/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace cv2x {

namespace {

struct ScheduledTx {
  int tx_id = 0;
  Csr csr;
  int64_t gen_time_ms = 0;
  int64_t seq = 0;
  TraceRecord snapshot;
};

struct EventAfter {
  bool operator()(const BsmEvent& a, const BsmEvent& b) const {
    if (a.gen_time_ms != b.gen_time_ms) return a.gen_time_ms > b.gen_time_ms;
    return a.tx_id > b.tx_id;
  }
};

class Engine {
 public:
  Engine(const EngineInputs& in, const EngineHooks& hooks)
      : in_(in), hooks_(hooks) {
    validate(in_.sim);
    cv2x::validate(in_.channel);
    cv2x::validate(in_.bler);

    n_ = static_cast<int>(in_.tracks.size());
    for (int i = 0; i < n_; ++i) {
      const Track& t = in_.tracks[i];
      if (t.records.empty())
        throw std::invalid_argument("track " + std::to_string(t.vehicle_id) +
                                    " has no records");
      if (!index_by_id_.emplace(t.vehicle_id, i).second)
        throw std::invalid_argument("duplicate vehicle id " +
                                    std::to_string(t.vehicle_id));
      if (t.first_time_ms() > 0 || t.last_time_ms() < in_.sim.sim_duration_ms)
        throw std::invalid_argument(
            "track for vehicle " + std::to_string(t.vehicle_id) +
            " does not cover the run ([" + std::to_string(t.first_time_ms()) +
            ", " + std::to_string(t.last_time_ms()) + "] ms vs duration " +
            std::to_string(in_.sim.sim_duration_ms) + " ms)");
    }
    auto hv_it = index_by_id_.find(in_.hv_id);
    if (hv_it == index_by_id_.end())
      throw std::invalid_argument("host vehicle id " +
                                  std::to_string(in_.hv_id) +
                                  " not present in the tracks");
    hv_ = hv_it->second;

    // Generated scenarios are a ring road; distances take the shorter way
    // round. Only applies when every track agrees on the wrap length.
    wrap_x_ = in_.tracks[0].wrap_length_m;
    for (int i = 1; i < n_ && wrap_x_; ++i)
      if (in_.tracks[i].wrap_length_m != wrap_x_) wrap_x_.reset();

    sps_.n_subchannels = num_subchannels(in_.sim);
    sps_.l_subchannels = in_.sim.packet_subchannels;
    sps_.rri_ms = in_.sim.rri_ms;
    sps_.horizon_ms = in_.sim.sensing_horizon_ms;
    sps_.slrrc_min = in_.sim.slrrc_min;
    sps_.slrrc_max = in_.sim.slrrc_max;
    sps_.p_resel = in_.sim.p_resel;
    sps_.noise_floor_dbm = noise_power_dbm(in_.sim);
    sps_.initial_threshold_dbm = in_.sim.sps_initial_threshold_dbm;

    phy_.n_subchannels = sps_.n_subchannels;
    phy_.subchannel_noise_dbm = subchannel_noise_dbm(in_.sim);
    phy_.combiner = in_.sim.sinr_combiner;
    log_l_ = 10.0 * std::log10(static_cast<double>(sps_.l_subchannels));

    state_.assign(n_, SpsState{});
    for (int i = 0; i < n_; ++i) {
      windows_.emplace_back(in_.tracks[i].vehicle_id, sps_.horizon_ms);
      mac_.push_back(rng::Stream::keyed(in_.sim.rng_seed,
                                        rng::Domain::MacStream,
                                        uid(in_.tracks[i].vehicle_id)));
    }
  }

  MetricsReport run() {
    MetricsCollector metrics;
    metrics_ = &metrics;

    std::priority_queue<BsmEvent, std::vector<BsmEvent>, EventAfter> queue;
    for (int i = 0; i < n_; ++i) {
      auto phase_stream = rng::Stream::keyed(
          in_.sim.rng_seed, rng::Domain::Phase, uid(in_.tracks[i].vehicle_id));
      int64_t first = static_cast<int64_t>(phase_stream.uniform_int(
          0, static_cast<uint64_t>(in_.sim.rri_ms) - 1));
      if (first < in_.sim.sim_duration_ms)
        queue.push(BsmEvent{first, in_.tracks[i].vehicle_id, 0,
                            snapshot_at(in_.tracks[i], first)});
    }

    while (!queue.empty()) {
      BsmEvent ev = queue.top();
      queue.pop();
      commit_before(ev.gen_time_ms);
      dispatch(ev);
      int64_t next = ev.gen_time_ms + in_.sim.rri_ms;
      if (next < in_.sim.sim_duration_ms) {
        int idx = index_by_id_.at(ev.tx_id);
        queue.push(BsmEvent{next, ev.tx_id, ev.seq + 1,
                            snapshot_at(in_.tracks[idx], next)});
      }
    }
    // Grants already issued extend past the last generation; commit them.
    while (!pending_.empty()) {
      auto it = pending_.begin();
      commit_subframe(it->first, it->second);
      pending_.erase(it);
    }

    MetricsReport report = metrics.take();
    report.sim_duration_ms = in_.sim.sim_duration_ms;
    report.n_vehicles = n_;
    metrics_ = nullptr;
    return report;
  }

 private:
  static uint64_t uid(int vehicle_id) {
    return static_cast<uint64_t>(static_cast<int64_t>(vehicle_id));
  }

  void commit_before(int64_t subframe) {
    while (!pending_.empty() && pending_.begin()->first < subframe) {
      auto it = pending_.begin();
      commit_subframe(it->first, it->second);
      pending_.erase(it);
    }
  }

  // Conditions A (never scheduled), B (counter expired), C (counter > 0).
  void dispatch(const BsmEvent& ev) {
    int idx = index_by_id_.at(ev.tx_id);
    SpsState& st = state_[idx];
    Csr csr;
    if (st.slrrc == -1) {
      csr = run_selection(ev, idx);
      st.slrrc = draw_slrrc(sps_, mac_[idx]);
    } else if (st.slrrc == 0) {
      ReselectionDecision d = on_counter_zero(st, sps_, mac_[idx]);
      if (d == ReselectionDecision::KeepCsr) {
        csr = advance_reservation(st);
      } else {
        csr = run_selection(ev, idx);
      }
      st.slrrc = draw_slrrc(sps_, mac_[idx]);
    } else {
      csr = advance_reservation(st);
    }

    if (csr.subframe <= ev.gen_time_ms ||
        csr.subframe > ev.gen_time_ms + in_.sim.rri_ms)
      throw std::logic_error(
          "latency bound violated: transmission at " +
          std::to_string(csr.subframe) + " for packet generated at " +
          std::to_string(ev.gen_time_ms));

    pending_[csr.subframe].push_back(
        ScheduledTx{ev.tx_id, csr, ev.gen_time_ms, ev.seq, ev.snapshot});
    st.reserved = csr;
    st.slrrc -= 1;  // decremented by one after every transmission
    if (hooks_.on_transmission)
      hooks_.on_transmission(ev.tx_id, csr, ev.gen_time_ms);
  }

  Csr run_selection(const BsmEvent& ev, int idx) {
    SelectionWindow window{ev.gen_time_ms + 1, ev.gen_time_ms + in_.sim.rri_ms};
    CandidateSet cands = build_set_a(windows_[idx], window, sps_);
    build_set_b(cands, windows_[idx], sps_);
    if (hooks_.on_selection) hooks_.on_selection(ev.tx_id, ev.gen_time_ms);
    return select_csr(cands, mac_[idx]);
  }

  Csr advance_reservation(const SpsState& st) {
    if (!st.reserved)
      throw std::logic_error("reservation advance without a reserved grant");
    Csr next = *st.reserved;
    next.subframe += in_.sim.rri_ms;
    return next;
  }

  void commit_subframe(int64_t subframe, const std::vector<ScheduledTx>& txs) {
    std::vector<Position> pos(n_);
    for (int i = 0; i < n_; ++i)
      pos[i] = position_at_clamped(in_.tracks[i], subframe);

    std::vector<char> transmitted(n_, 0);
    for (const ScheduledTx& t : txs) transmitted[index_by_id_.at(t.tx_id)] = 1;

    for (int r = 0; r < n_; ++r) {
      if (transmitted[r]) {
        windows_[r].record_own_tx(subframe);
        if (r == hv_) half_duplex_outcomes(subframe, txs, pos);
        continue;
      }
      receive_at(r, subframe, txs, pos);
    }
  }

  // All receptions at a transmitting host are lost: the radio was deaf.
  void half_duplex_outcomes(int64_t subframe,
                            const std::vector<ScheduledTx>& txs,
                            const std::vector<Position>& pos) {
    for (const ScheduledTx& t : txs) {
      int ti = index_by_id_.at(t.tx_id);
      if (ti == hv_) continue;
      ReceptionOutcome o;
      o.tx_id = t.tx_id;
      o.rx_id = in_.hv_id;
      o.subframe = subframe;
      o.gen_time_ms = t.gen_time_ms;
      o.seq = t.seq;
      o.sinr_db = -std::numeric_limits<double>::infinity();
      o.rssi_dbm = -std::numeric_limits<double>::infinity();
      o.decoded = false;
      o.cause = LossCause::HalfDuplex;
      metrics_->record(o, distance_m(pos[ti], pos[hv_], wrap_x_));
    }
  }

  // MAC-level measurements for every listener; full reception treatment
  // (loss attribution, metrics, emission) only at the host vehicle.
  void receive_at(int r, int64_t subframe, const std::vector<ScheduledTx>& txs,
                  const std::vector<Position>& pos) {
    if (txs.empty()) return;
    int rx_vehicle_id = in_.tracks[r].vehicle_id;
    rx_txs_.clear();
    for (const ScheduledTx& t : txs) {
      int ti = index_by_id_.at(t.tx_id);
      double d = distance_m(pos[ti], pos[r], wrap_x_);
      auto shadow_stream = rng::Stream::keyed(
          in_.sim.rng_seed, rng::Domain::Shadowing, uid(t.tx_id),
          uid(rx_vehicle_id), static_cast<uint64_t>(t.gen_time_ms));
      double shadow = shadowing_sample(in_.channel, shadow_stream);
      double rx_power =
          received_power_dbm(in_.channel, in_.sim.tx_power_dbm, d, shadow);
      rx_txs_.push_back(
          RxTransmission{t.tx_id, t.csr, rx_power, t.gen_time_ms, t.seq});
    }

    std::vector<SinrValue> sinrs = batch_sinr(rx_txs_, phy_);
    for (size_t i = 0; i < rx_txs_.size(); ++i) {
      const RxTransmission& t = rx_txs_[i];
      double bler = in_.bler(sinrs[i].sinr_db);
      auto decode_stream = rng::Stream::keyed(
          in_.sim.rng_seed, rng::Domain::Decode, uid(t.tx_id),
          uid(rx_vehicle_id), static_cast<uint64_t>(t.gen_time_ms));
      double u = decode_stream.uniform();
      bool ok = decode(bler, u);

      SensedEntry entry;
      entry.subframe = subframe;
      entry.csr = t.csr;
      entry.rsrp_dbm = t.rx_power_dbm - log_l_;
      entry.rssi_dbm = t.rx_power_dbm;
      entry.decoded = ok;
      entry.source_id = t.tx_id;
      windows_[r].record_sensed(entry);

      if (r != hv_) continue;

      ReceptionOutcome o;
      o.tx_id = t.tx_id;
      o.rx_id = in_.hv_id;
      o.subframe = subframe;
      o.gen_time_ms = t.gen_time_ms;
      o.seq = t.seq;
      o.sinr_db = sinrs[i].sinr_db;
      o.rssi_dbm = t.rx_power_dbm;
      o.decoded = ok;
      o.cause = ok ? LossCause::None
                   : classify_loss(u, bler, in_.bler(sinrs[i].snr_db));
      int ti = index_by_id_.at(t.tx_id);
      metrics_->record(o, distance_m(pos[ti], pos[hv_], wrap_x_));

      if (ok && hooks_.on_decoded) {
        const ScheduledTx& sched = txs[i];
        hooks_.on_decoded(make_emitted(
            subframe, t.tx_id, t.seq, sched.snapshot.x_m, sched.snapshot.y_m,
            sched.snapshot.speed_mps, sched.snapshot.heading_deg,
            o.rssi_dbm, o.sinr_db));
      }
    }
  }

  const EngineInputs& in_;
  const EngineHooks& hooks_;
  int n_ = 0;
  int hv_ = 0;
  std::optional<double> wrap_x_;
  std::unordered_map<int, int> index_by_id_;
  SpsParams sps_;
  PhyParams phy_;
  double log_l_ = 0.0;
  std::vector<SpsState> state_;
  std::vector<SensingWindow> windows_;
  std::vector<rng::Stream> mac_;
  std::map<int64_t, std::vector<ScheduledTx>> pending_;
  std::vector<RxTransmission> rx_txs_;  // per-subframe scratch
  MetricsCollector* metrics_ = nullptr;
};

}  // namespace

MetricsReport run_engine(const EngineInputs& inputs,
                         const EngineHooks& hooks) {
  if (inputs.tracks.empty()) {
    MetricsReport empty;
    empty.sim_duration_ms = inputs.sim.sim_duration_ms;
    return empty;
  }
  Engine engine(inputs, hooks);
  return engine.run();
}

}  // namespace cv2x
