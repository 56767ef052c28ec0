#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cv2x/grid.hpp"
#include "cv2x/params.hpp"
#include "cv2x/rng.hpp"

namespace cv2x {

enum class LossCause { None, HalfDuplex, Propagation, Collision };

// One transmission as it arrives at one receiver in one subframe. Power is
// the total over the transmission's span; the PSD is uniform across it.
struct RxTransmission {
  int tx_id = 0;
  Csr csr;
  double rx_power_dbm = 0.0;
  int64_t gen_time_ms = 0;
  int64_t seq = 0;
};

struct PhyParams {
  int n_subchannels = 5;
  double subchannel_noise_dbm = -102.45;
  SinrCombiner combiner = SinrCombiner::LinearMean;
};

struct SinrValue {
  double sinr_db = 0.0;  // with co-channel interference
  double snr_db = 0.0;   // interference-free, for loss attribution
};

// Result of one transmission arriving at the host vehicle.
struct ReceptionOutcome {
  int tx_id = 0;
  int rx_id = 0;
  int64_t subframe = 0;
  int64_t gen_time_ms = 0;
  int64_t seq = 0;
  double sinr_db = 0.0;
  double rssi_dbm = 0.0;  // received power of this transmission over its span
  bool decoded = false;
  LossCause cause = LossCause::None;
};

// Per-subchannel SINR_c = S_c / (sum of interferer PSDs + noise), combined
// over the packet span per the configured rule. All transmissions must
// share one subframe.
std::vector<SinrValue> batch_sinr(const std::vector<RxTransmission>& txs,
                                  const PhyParams& p);

// Total received power (every transmission + noise) over the span of
// txs[target] — the channel-total counterpart of per-transmission power.
double measured_rssi_dbm(const std::vector<RxTransmission>& txs,
                         size_t target, const PhyParams& p);

// Received power per subchannel of a transmission spanning l subchannels.
double rsrp_dbm(double rx_power_dbm, int l_subchannels);

struct BlerTable {
  std::vector<std::pair<double, double>> points;  // (sinr_db, bler) ascending

  // Linear interpolation; clamps to 1 below the first point and 0 above
  // the last.
  double operator()(double sinr_db) const;
};

void validate(const BlerTable& table);
BlerTable default_bler_table_mcs5();
// CSV with header `sinr_db,bler`, rows sorted by SINR ascending.
BlerTable load_bler_csv(const std::string& path);

// One uniform draw decides a packet: success iff u >= bler. Exposing the
// draw lets the caller reuse it to attribute the loss.
bool decode(double bler, double u01);
bool decode(double bler, rng::Stream& stream);

// For a failed packet: had it failed even without interference (u below
// the interference-free BLER) the loss is propagation, otherwise the
// interference pushed it under — a collision.
LossCause classify_loss(double u01, double bler_with_interference,
                        double bler_interference_free);

}  // namespace cv2x
