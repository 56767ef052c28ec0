#pragma once
#include "cv2x/params.hpp"
#include "cv2x/rng.hpp"

namespace cv2x {

enum class ChannelModel { Fowlerville, WinnerB1 };

// Dual-slope log-distance model for the Fowlerville freeway environment.
// PL(d) = pl0 + 10*n_near*log10(d/d0)                        for d <= breakpoint
//       = PL(breakpoint) + 10*n_far*log10(d/breakpoint)      for d >  breakpoint
// Defaults: free-space anchor at d0 = 10 m for 5.9 GHz (67.9 dB), near
// exponent 2.0 up to a 220 m breakpoint, far exponent 2.7 beyond it.
struct FowlervilleParams {
  double pl0_db = 67.9;
  double d0_m = 10.0;
  double exponent_near = 2.0;
  double exponent_far = 2.7;
  double breakpoint_m = 220.0;
};

// WINNER+ B1 LOS street model.
// Below the effective breakpoint: PL = a*log10(d) + b + c*log10(fc/5).
// Above it (use_breakpoint=true): PL = PL(d_bp) + 40*log10(d/d_bp), the
// standard steeper slope, continuous at d_bp = 4*(h-1)^2 * fc / c0.
struct WinnerParams {
  double a = 22.7;
  double b = 41.0;
  double c = 20.0;
  bool use_breakpoint = true;
  double antenna_height_m = 1.5;  // both ends; vehicle rooftop height
};

struct ChannelModelConfig {
  ChannelModel model = ChannelModel::Fowlerville;
  double carrier_ghz = 5.9;
  double shadowing_sigma_db = 3.0;
  FowlervilleParams fowlerville;
  WinnerParams winner;
};

struct LinkSample {
  double distance_m = 0.0;
  double rx_power_dbm = 0.0;
  double shadow_db = 0.0;
};

void validate(const ChannelModelConfig& cfg);

// WINNER+ B1 effective breakpoint distance for the configured geometry.
double winner_breakpoint_m(const ChannelModelConfig& cfg);

// Deterministic, monotone non-decreasing in distance. Distances below 1 m
// are clamped to 1 m; d <= 0 is a domain error.
double path_loss_db(const ChannelModelConfig& cfg, double distance_m);

// Zero-mean Gaussian deviate with the configured sigma; exactly 0 when
// sigma is 0. Callers key the stream per (seed, tx, rx, packet).
double shadowing_sample(const ChannelModelConfig& cfg, rng::Stream& stream);

// Thermal noise floor: -174 dBm/Hz + 10*log10(BW) + NF.
double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db);

// Noise over one packet's occupied bandwidth (L subchannels).
double noise_power_dbm(const SimParams& p);
// Noise over a single subchannel.
double subchannel_noise_dbm(const SimParams& p);

double received_power_dbm(const ChannelModelConfig& cfg, double tx_power_dbm,
                          double distance_m, double shadow_db);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

}  // namespace cv2x
