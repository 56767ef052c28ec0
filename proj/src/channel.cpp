#include "cv2x/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cv2x {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
constexpr double kMinDistanceM = 1.0;

double fowlerville_pl(const FowlervilleParams& f, double d) {
  if (d <= f.breakpoint_m)
    return f.pl0_db + 10.0 * f.exponent_near * std::log10(d / f.d0_m);
  double at_bp =
      f.pl0_db + 10.0 * f.exponent_near * std::log10(f.breakpoint_m / f.d0_m);
  return at_bp + 10.0 * f.exponent_far * std::log10(d / f.breakpoint_m);
}

double winner_near_pl(const WinnerParams& w, double carrier_ghz, double d) {
  return w.a * std::log10(d) + w.b + w.c * std::log10(carrier_ghz / 5.0);
}

double winner_pl(const WinnerParams& w, double carrier_ghz, double d) {
  if (!w.use_breakpoint) return winner_near_pl(w, carrier_ghz, d);
  double h_eff = w.antenna_height_m - 1.0;
  double d_bp = 4.0 * h_eff * h_eff * (carrier_ghz * 1e9) / kSpeedOfLight;
  if (d <= d_bp) return winner_near_pl(w, carrier_ghz, d);
  return winner_near_pl(w, carrier_ghz, d_bp) + 40.0 * std::log10(d / d_bp);
}
}  // namespace

void validate(const ChannelModelConfig& cfg) {
  auto fail = [](const char* msg) {
    throw std::invalid_argument(std::string("channel config: ") + msg);
  };
  if (cfg.carrier_ghz <= 0) fail("carrier frequency must be positive");
  if (cfg.shadowing_sigma_db < 0) fail("shadowing sigma must be >= 0");
  const auto& f = cfg.fowlerville;
  if (f.exponent_near <= 0 || f.exponent_far <= 0)
    fail("path-loss exponents must be positive");
  if (f.breakpoint_m <= 0) fail("breakpoint distance must be positive");
  if (f.d0_m <= 0) fail("reference distance must be positive");
  if (cfg.winner.use_breakpoint && cfg.winner.antenna_height_m <= 1.0)
    fail("antenna height must exceed 1 m for the breakpoint formula");
}

double winner_breakpoint_m(const ChannelModelConfig& cfg) {
  double h_eff = cfg.winner.antenna_height_m - 1.0;
  return 4.0 * h_eff * h_eff * (cfg.carrier_ghz * 1e9) / kSpeedOfLight;
}

double path_loss_db(const ChannelModelConfig& cfg, double distance_m) {
  if (distance_m <= 0.0)
    throw std::domain_error("path loss: distance must be positive");
  double d = std::max(distance_m, kMinDistanceM);
  switch (cfg.model) {
    case ChannelModel::Fowlerville: return fowlerville_pl(cfg.fowlerville, d);
    case ChannelModel::WinnerB1: return winner_pl(cfg.winner, cfg.carrier_ghz, d);
  }
  throw std::logic_error("unknown channel model");
}

double shadowing_sample(const ChannelModelConfig& cfg, rng::Stream& stream) {
  if (cfg.shadowing_sigma_db <= 0.0) return 0.0;
  return cfg.shadowing_sigma_db * stream.gaussian();
}

double thermal_noise_dbm(double bandwidth_hz, double noise_figure_db) {
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double noise_power_dbm(const SimParams& p) {
  return thermal_noise_dbm(packet_bandwidth_hz(p), p.noise_figure_db);
}

double subchannel_noise_dbm(const SimParams& p) {
  return thermal_noise_dbm(subchannel_bandwidth_hz(p), p.noise_figure_db);
}

double received_power_dbm(const ChannelModelConfig& cfg, double tx_power_dbm,
                          double distance_m, double shadow_db) {
  return tx_power_dbm - path_loss_db(cfg, distance_m) + shadow_db;
}

}  // namespace cv2x
