#include "cv2x/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "cv2x/rng.hpp"

namespace cv2x {

void validate(const ScenarioSpec& spec) {
  auto fail = [](const char* msg) {
    throw std::invalid_argument(std::string("scenario: ") + msg);
  };
  if (spec.n_vehicles < 1) fail("n_vehicles must be >= 1");
  if (spec.hv_id < 0 || spec.hv_id >= spec.n_vehicles)
    fail("hv_id must name one of the vehicles");
  if (spec.road_length_m <= 0) fail("road_length_m must be positive");
  if (spec.lanes < 1) fail("lanes must be >= 1");
  if (spec.lane_width_m <= 0) fail("lane_width_m must be positive");
  if (spec.speed_mps < 0) fail("speed_mps must be >= 0");
}

std::vector<Track> generate_linear_scenario(const ScenarioSpec& spec,
                                            int64_t duration_ms) {
  validate(spec);
  if (duration_ms < 0)
    throw std::invalid_argument("scenario: duration must be >= 0");
  int64_t extent_ms = duration_ms + 1000;  // headroom for in-flight grants
  std::vector<Track> tracks;
  tracks.reserve(spec.n_vehicles);
  int fwd_lanes = (spec.lanes + 1) / 2;
  for (int id = 0; id < spec.n_vehicles; ++id) {
    auto st = rng::Stream::keyed(spec.placement_seed, rng::Domain::Placement,
                                 static_cast<uint64_t>(id));
    double x0 = st.uniform() * spec.road_length_m;
    int lane = static_cast<int>(
        st.uniform_int(0, static_cast<uint64_t>(spec.lanes) - 1));
    double dir = lane < fwd_lanes ? 1.0 : -1.0;
    double y = spec.lane_width_m * (lane + 0.5);
    double heading = dir > 0 ? 90.0 : 270.0;

    TraceRecord start{0, id, x0, y, spec.speed_mps, heading, {}, {}, {}};
    TraceRecord end = start;
    end.time_ms = extent_ms;
    end.x_m = x0 + dir * spec.speed_mps * (extent_ms / 1000.0);

    Track t;
    t.vehicle_id = id;
    t.records = {start, end};
    t.wrap_length_m = spec.road_length_m;
    tracks.push_back(std::move(t));
  }
  return tracks;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& s, const char* what, int line_no) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("trace line " + std::to_string(line_no) +
                             ": bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw std::runtime_error("trace line " + std::to_string(line_no) +
                             ": trailing junk in " + what + " '" + s + "'");
  return v;
}

int64_t parse_int(const std::string& s, const char* what, int line_no) {
  size_t pos = 0;
  long long v;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("trace line " + std::to_string(line_no) +
                             ": bad " + what + " value '" + s + "'");
  }
  if (pos != s.size())
    throw std::runtime_error("trace line " + std::to_string(line_no) +
                             ": trailing junk in " + what + " '" + s + "'");
  return v;
}

}  // namespace

std::vector<Track> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("trace file is empty (missing header): " + path);
  auto header = split_csv_line(line);
  const std::vector<std::string> base = {"time_ms",    "vehicle_id",
                                         "x_m",        "y_m",
                                         "speed_mps",  "heading_deg"};
  const std::vector<std::string> ext = {"accel_mps2", "lat", "lon"};
  bool extended = header.size() == base.size() + ext.size();
  if (header.size() != base.size() && !extended)
    throw std::runtime_error("trace header must have 6 or 9 columns: " + path);
  for (size_t i = 0; i < base.size(); ++i)
    if (header[i] != base[i])
      throw std::runtime_error("trace header column " + std::to_string(i + 1) +
                               " must be '" + base[i] + "', got '" +
                               header[i] + "'");
  if (extended)
    for (size_t i = 0; i < ext.size(); ++i)
      if (header[base.size() + i] != ext[i])
        throw std::runtime_error("trace header column " +
                                 std::to_string(base.size() + i + 1) +
                                 " must be '" + ext[i] + "'");

  std::map<int, Track> by_id;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error("trace line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(f.size()));
    TraceRecord r;
    r.time_ms = parse_int(f[0], "time_ms", line_no);
    r.vehicle_id = static_cast<int>(parse_int(f[1], "vehicle_id", line_no));
    r.x_m = parse_real(f[2], "x_m", line_no);
    r.y_m = parse_real(f[3], "y_m", line_no);
    r.speed_mps = parse_real(f[4], "speed_mps", line_no);
    r.heading_deg = parse_real(f[5], "heading_deg", line_no);
    if (extended) {
      r.accel_mps2 = parse_real(f[6], "accel_mps2", line_no);
      r.lat = parse_real(f[7], "lat", line_no);
      r.lon = parse_real(f[8], "lon", line_no);
    }
    auto& track = by_id[r.vehicle_id];
    track.vehicle_id = r.vehicle_id;
    if (!track.records.empty() && r.time_ms < track.records.back().time_ms)
      throw std::runtime_error(
          "trace time regression for vehicle " +
          std::to_string(r.vehicle_id) + " at line " + std::to_string(line_no));
    track.records.push_back(r);
  }
  std::vector<Track> tracks;
  tracks.reserve(by_id.size());
  for (auto& [id, t] : by_id) tracks.push_back(std::move(t));
  return tracks;
}

namespace {

double wrap_fold(double x, double length) {
  double w = std::fmod(x, length);
  return w < 0 ? w + length : w;
}

// Index of the latest record with time <= t; requires t within extent.
size_t floor_index(const Track& track, int64_t t_ms) {
  const auto& rs = track.records;
  auto it = std::upper_bound(
      rs.begin(), rs.end(), t_ms,
      [](int64_t t, const TraceRecord& r) { return t < r.time_ms; });
  return static_cast<size_t>(it - rs.begin()) - 1;
}

Position interpolate(const Track& track, int64_t t_ms) {
  const auto& rs = track.records;
  size_t i = floor_index(track, t_ms);
  const TraceRecord& a = rs[i];
  double x, y;
  if (a.time_ms == t_ms || i + 1 == rs.size()) {
    x = a.x_m;
    y = a.y_m;
  } else {
    const TraceRecord& b = rs[i + 1];
    double u = static_cast<double>(t_ms - a.time_ms) /
               static_cast<double>(b.time_ms - a.time_ms);
    x = a.x_m + u * (b.x_m - a.x_m);
    y = a.y_m + u * (b.y_m - a.y_m);
  }
  if (track.wrap_length_m) x = wrap_fold(x, *track.wrap_length_m);
  return {x, y};
}

}  // namespace

Position position_at(const Track& track, int64_t t_ms) {
  if (track.records.empty())
    throw std::out_of_range("track has no records");
  if (t_ms < track.first_time_ms() || t_ms > track.last_time_ms())
    throw std::out_of_range(
        "query at " + std::to_string(t_ms) + " ms outside track extent [" +
        std::to_string(track.first_time_ms()) + ", " +
        std::to_string(track.last_time_ms()) + "] for vehicle " +
        std::to_string(track.vehicle_id));
  return interpolate(track, t_ms);
}

Position position_at_clamped(const Track& track, int64_t t_ms) {
  if (track.records.empty())
    throw std::out_of_range("track has no records");
  t_ms = std::clamp(t_ms, track.first_time_ms(), track.last_time_ms());
  return interpolate(track, t_ms);
}

TraceRecord snapshot_at(const Track& track, int64_t t_ms) {
  if (track.records.empty())
    throw std::out_of_range("track has no records");
  int64_t tq = std::clamp(t_ms, track.first_time_ms(), track.last_time_ms());
  Position p = interpolate(track, tq);
  const TraceRecord& base = track.records[floor_index(track, tq)];
  TraceRecord snap = base;
  snap.time_ms = t_ms;
  snap.x_m = p.x_m;
  snap.y_m = p.y_m;
  return snap;
}

double distance_m(const Position& a, const Position& b) {
  return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

double distance_m(const Position& a, const Position& b,
                  std::optional<double> wrap_x_m) {
  double dx = std::abs(a.x_m - b.x_m);
  if (wrap_x_m) dx = std::min(dx, *wrap_x_m - dx);
  return std::hypot(dx, a.y_m - b.y_m);
}

}  // namespace cv2x
