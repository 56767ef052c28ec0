#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cv2x {

struct TraceRecord {
  int64_t time_ms = 0;
  int vehicle_id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  double heading_deg = 0.0;  // compass degrees in [0, 360)
  std::optional<double> accel_mps2;
  std::optional<double> lat;
  std::optional<double> lon;
};

// One vehicle's movement history. Generated tracks store unwrapped x and a
// wrap length so interpolation stays exactly linear; positions are folded
// into [0, wrap_length) on query.
struct Track {
  int vehicle_id = 0;
  std::vector<TraceRecord> records;  // sorted by time_ms
  std::optional<double> wrap_length_m;

  int64_t first_time_ms() const { return records.front().time_ms; }
  int64_t last_time_ms() const { return records.back().time_ms; }
};

struct ScenarioSpec {
  double road_length_m = 1200.0;
  int lanes = 6;
  double lane_width_m = 3.7;
  int n_vehicles = 100;
  double speed_mps = 30.0;
  int hv_id = 0;
  uint64_t placement_seed = 1;
};

void validate(const ScenarioSpec& spec);

// Uniform-random (x, lane) starts; constant speed along the road axis with
// wrap-around at the ends so density stays stationary. Lanes in the first
// half run +x (heading 90), the rest -x (heading 270). Tracks are defined
// a full reservation period past duration_ms so transmissions scheduled
// near the end of the run still have positions.
std::vector<Track> generate_linear_scenario(const ScenarioSpec& spec,
                                            int64_t duration_ms);

// CSV with header `time_ms,vehicle_id,x_m,y_m,speed_mps,heading_deg`
// optionally extended by `,accel_mps2,lat,lon`. Tracks come back sorted by
// vehicle id; rows may arrive in any order but must be time-monotone per
// vehicle. Malformed rows and per-vehicle time regressions are errors.
std::vector<Track> load_trace_csv(const std::string& path);

struct Position {
  double x_m = 0.0;
  double y_m = 0.0;
};

// Linear interpolation between bracketing records, exact at record
// timestamps. Queries outside the track extent throw std::out_of_range.
Position position_at(const Track& track, int64_t t_ms);

// Same, but clamps t to the track extent instead of throwing; used by the
// engine for transmissions that land just past the last record.
Position position_at_clamped(const Track& track, int64_t t_ms);

// Full snapshot for packet payloads: interpolated position plus the
// speed/heading of the latest record at or before t.
TraceRecord snapshot_at(const Track& track, int64_t t_ms);

double distance_m(const Position& a, const Position& b);

// Distance on a wrap-around road: the x separation is the shorter way round
// the ring. With no wrap length this is the plain euclidean distance.
double distance_m(const Position& a, const Position& b,
                  std::optional<double> wrap_x_m);

}  // namespace cv2x
