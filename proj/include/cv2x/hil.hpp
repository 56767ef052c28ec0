#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cv2x {

// One decoded packet handed to the outside world. Numeric payload fields
// are quantized to 3 decimals at construction so encoding is lossless.
struct EmittedBsm {
  int64_t rx_time_ms = 0;
  int tx_id = 0;
  int64_t seq = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  double heading_deg = 0.0;
  double rssi_dbm = 0.0;
  double sinr_db = 0.0;

  friend bool operator==(const EmittedBsm&, const EmittedBsm&) = default;
};

double quantize3(double v);
EmittedBsm make_emitted(int64_t rx_time_ms, int tx_id, int64_t seq, double x_m,
                        double y_m, double speed_mps, double heading_deg,
                        double rssi_dbm, double sinr_db);

// One JSON object per datagram, fixed key order, newline-terminated,
// floats with at most 3 decimals (at least one digit after the point).
std::string encode_record(const EmittedBsm& e);
// Parses one datagram; nullopt on malformed input.
std::optional<EmittedBsm> decode_record(std::string_view datagram);
// True iff the datagram is exactly what encode_record would produce.
bool is_canonical_record(std::string_view datagram);

struct PacingConfig {
  double real_time_factor = 1.0;  // 1.0 = wall clock; larger = faster
  std::string endpoint;           // "udp://host:port", empty = no socket
  int max_lag_ms = 100;
  // The engine may run at most this much simulated time ahead of emission.
  int max_buffer_sim_ms = 1000;
  // Consecutive over-lag emissions that count as a sustained violation.
  int lag_violation_streak = 100;
};

void validate(const PacingConfig& cfg);

struct PacingStats {
  size_t emitted = 0;
  double max_lag_ms = 0.0;
  double p99_lag_ms = 0.0;
};

class RealTimeViolation : public std::runtime_error {
 public:
  RealTimeViolation(const std::string& msg, int64_t subframe)
      : std::runtime_error(msg), subframe(subframe) {}
  int64_t subframe;
};

using EmitSink = std::function<void(std::string_view)>;

// Paces records to wall-clock time on a worker thread. push() applies
// backpressure once the buffered span exceeds max_buffer_sim_ms; finish()
// flushes, joins, and reports stats. A sustained lag beyond max_lag_ms
// aborts the stream and surfaces as RealTimeViolation.
class PacedEmitter {
 public:
  PacedEmitter(const PacingConfig& cfg, EmitSink sink);
  ~PacedEmitter();
  PacedEmitter(const PacedEmitter&) = delete;
  PacedEmitter& operator=(const PacedEmitter&) = delete;

  void push(const EmittedBsm& bsm);
  PacingStats finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct UdpEndpoint {
  std::string host;
  uint16_t port = 0;
};

// Accepts "udp://host:port"; throws std::invalid_argument otherwise.
UdpEndpoint parse_udp_endpoint(const std::string& url);

class UdpSender {
 public:
  UdpSender(const std::string& host, uint16_t port);
  ~UdpSender();
  UdpSender(const UdpSender&) = delete;
  UdpSender& operator=(const UdpSender&) = delete;

  void send(std::string_view datagram);

 private:
  int fd_ = -1;
};

struct StubOptions {
  uint16_t port = 0;
  int64_t max_count = 0;  // 0 = unlimited
  int idle_timeout_ms = 5000;
  bool quiet = false;  // suppress per-record echo
};

// Receives datagrams, validates them against the canonical encoding,
// echoes them, and prints a summary. Returns 0 when all were valid.
int run_receive_stub(const StubOptions& opts, std::ostream& out);

}  // namespace cv2x
