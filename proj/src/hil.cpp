#include "cv2x/hil.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace cv2x {

double quantize3(double v) { return std::round(v * 1000.0) / 1000.0; }

EmittedBsm make_emitted(int64_t rx_time_ms, int tx_id, int64_t seq, double x_m,
                        double y_m, double speed_mps, double heading_deg,
                        double rssi_dbm, double sinr_db) {
  EmittedBsm e;
  e.rx_time_ms = rx_time_ms;
  e.tx_id = tx_id;
  e.seq = seq;
  e.x_m = quantize3(x_m);
  e.y_m = quantize3(y_m);
  e.speed_mps = quantize3(speed_mps);
  e.heading_deg = quantize3(heading_deg);
  e.rssi_dbm = quantize3(rssi_dbm);
  e.sinr_db = quantize3(sinr_db);
  return e;
}

namespace {

// "%.3f" with trailing zeros trimmed, always keeping one decimal digit.
std::string format3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  size_t dot = s.find('.');
  size_t last = s.size();
  while (last - 1 > dot + 1 && s[last - 1] == '0') --last;
  s.resize(last);
  return s;
}

}  // namespace

std::string encode_record(const EmittedBsm& e) {
  std::string s;
  s.reserve(160);
  s += "{\"rx_time_ms\":";
  s += std::to_string(e.rx_time_ms);
  s += ",\"tx_id\":";
  s += std::to_string(e.tx_id);
  s += ",\"seq\":";
  s += std::to_string(e.seq);
  s += ",\"x_m\":";
  s += format3(e.x_m);
  s += ",\"y_m\":";
  s += format3(e.y_m);
  s += ",\"speed_mps\":";
  s += format3(e.speed_mps);
  s += ",\"heading_deg\":";
  s += format3(e.heading_deg);
  s += ",\"rssi_dbm\":";
  s += format3(e.rssi_dbm);
  s += ",\"sinr_db\":";
  s += format3(e.sinr_db);
  s += "}\n";
  return s;
}

std::optional<EmittedBsm> decode_record(std::string_view datagram) {
  nlohmann::json j = nlohmann::json::parse(datagram, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  const char* keys[] = {"rx_time_ms", "tx_id",       "seq",
                        "x_m",        "y_m",         "speed_mps",
                        "heading_deg", "rssi_dbm",   "sinr_db"};
  if (j.size() != std::size(keys)) return std::nullopt;
  for (const char* k : keys)
    if (!j.contains(k) || !j[k].is_number()) return std::nullopt;
  EmittedBsm e;
  e.rx_time_ms = j["rx_time_ms"].get<int64_t>();
  e.tx_id = j["tx_id"].get<int>();
  e.seq = j["seq"].get<int64_t>();
  e.x_m = j["x_m"].get<double>();
  e.y_m = j["y_m"].get<double>();
  e.speed_mps = j["speed_mps"].get<double>();
  e.heading_deg = j["heading_deg"].get<double>();
  e.rssi_dbm = j["rssi_dbm"].get<double>();
  e.sinr_db = j["sinr_db"].get<double>();
  return e;
}

bool is_canonical_record(std::string_view datagram) {
  auto decoded = decode_record(datagram);
  return decoded && encode_record(*decoded) == datagram;
}

void validate(const PacingConfig& cfg) {
  if (!(cfg.real_time_factor > 0.0))
    throw std::invalid_argument("pacing: real_time_factor must be > 0");
  if (cfg.max_lag_ms <= 0)
    throw std::invalid_argument("pacing: max_lag_ms must be > 0");
  if (cfg.max_buffer_sim_ms < 0)
    throw std::invalid_argument("pacing: max_buffer_sim_ms must be >= 0");
  if (cfg.lag_violation_streak < 1)
    throw std::invalid_argument("pacing: lag_violation_streak must be >= 1");
}

struct PacedEmitter::Impl {
  struct Item {
    int64_t rx_time_ms;
    std::string payload;
  };

  PacingConfig cfg;
  EmitSink sink;
  std::mutex mu;
  std::condition_variable cv_producer;
  std::condition_variable cv_consumer;
  std::deque<Item> queue;
  bool done = false;
  bool failed = false;
  std::string fail_msg;
  int64_t fail_subframe = -1;
  std::vector<double> lags_ms;  // worker-owned until join
  size_t emitted = 0;
  std::chrono::steady_clock::time_point start;
  std::thread worker;

  void run() {
    using clock = std::chrono::steady_clock;
    using fmilli = std::chrono::duration<double, std::milli>;
    int streak = 0;
    for (;;) {
      Item item;
      {
        std::unique_lock lk(mu);
        cv_consumer.wait(lk, [&] { return !queue.empty() || done; });
        if (queue.empty()) break;
        item = std::move(queue.front());
        queue.pop_front();
        cv_producer.notify_all();
      }
      auto due = start + std::chrono::duration_cast<clock::duration>(fmilli(
                             static_cast<double>(item.rx_time_ms) /
                             cfg.real_time_factor));
      std::this_thread::sleep_until(due);
      try {
        sink(item.payload);
      } catch (const std::exception& ex) {
        std::lock_guard lk(mu);
        failed = true;
        fail_msg = std::string("emit sink failed: ") + ex.what();
        fail_subframe = item.rx_time_ms;
        queue.clear();
        cv_producer.notify_all();
        return;
      }
      double lag = fmilli(clock::now() - due).count();
      lags_ms.push_back(lag);
      ++emitted;
      if (lag > static_cast<double>(cfg.max_lag_ms)) {
        if (++streak > cfg.lag_violation_streak) {
          std::lock_guard lk(mu);
          failed = true;
          fail_msg = "real-time pacing violated: lag " +
                     std::to_string(lag) + " ms persisted past " +
                     std::to_string(cfg.lag_violation_streak) +
                     " consecutive records";
          fail_subframe = item.rx_time_ms;
          queue.clear();
          cv_producer.notify_all();
          return;
        }
      } else {
        streak = 0;
      }
    }
  }
};

PacedEmitter::PacedEmitter(const PacingConfig& cfg, EmitSink sink)
    : impl_(std::make_unique<Impl>()) {
  validate(cfg);
  impl_->cfg = cfg;
  impl_->sink = std::move(sink);
  impl_->start = std::chrono::steady_clock::now();
  impl_->worker = std::thread([p = impl_.get()] { p->run(); });
}

PacedEmitter::~PacedEmitter() {
  if (!impl_) return;
  {
    std::lock_guard lk(impl_->mu);
    impl_->done = true;
  }
  impl_->cv_consumer.notify_all();
  if (impl_->worker.joinable()) impl_->worker.join();
}

void PacedEmitter::push(const EmittedBsm& bsm) {
  Impl::Item item{bsm.rx_time_ms, encode_record(bsm)};
  std::unique_lock lk(impl_->mu);
  impl_->cv_producer.wait(lk, [&] {
    return impl_->failed || impl_->queue.empty() ||
           bsm.rx_time_ms - impl_->queue.front().rx_time_ms <=
               impl_->cfg.max_buffer_sim_ms;
  });
  if (impl_->failed)
    throw RealTimeViolation(impl_->fail_msg + " (at subframe " +
                                std::to_string(impl_->fail_subframe) + ")",
                            impl_->fail_subframe);
  impl_->queue.push_back(std::move(item));
  impl_->cv_consumer.notify_all();
}

PacingStats PacedEmitter::finish() {
  {
    std::lock_guard lk(impl_->mu);
    impl_->done = true;
  }
  impl_->cv_consumer.notify_all();
  if (impl_->worker.joinable()) impl_->worker.join();
  if (impl_->failed)
    throw RealTimeViolation(impl_->fail_msg + " (at subframe " +
                                std::to_string(impl_->fail_subframe) + ")",
                            impl_->fail_subframe);
  PacingStats st;
  st.emitted = impl_->emitted;
  if (!impl_->lags_ms.empty()) {
    std::vector<double> sorted = impl_->lags_ms;
    std::sort(sorted.begin(), sorted.end());
    st.max_lag_ms = sorted.back();
    size_t idx = static_cast<size_t>(
        std::ceil(0.99 * static_cast<double>(sorted.size())));
    if (idx < 1) idx = 1;
    st.p99_lag_ms = sorted[idx - 1];
  }
  return st;
}

UdpEndpoint parse_udp_endpoint(const std::string& url) {
  const std::string scheme = "udp://";
  if (url.rfind(scheme, 0) != 0)
    throw std::invalid_argument("endpoint must look like udp://host:port: " +
                                url);
  std::string rest = url.substr(scheme.size());
  size_t colon = rest.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == rest.size())
    throw std::invalid_argument("endpoint must look like udp://host:port: " +
                                url);
  UdpEndpoint ep;
  ep.host = rest.substr(0, colon);
  std::string port_s = rest.substr(colon + 1);
  try {
    size_t pos = 0;
    int port = std::stoi(port_s, &pos);
    if (pos != port_s.size() || port < 1 || port > 65535)
      throw std::invalid_argument("bad port");
    ep.port = static_cast<uint16_t>(port);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad port in endpoint: " + url);
  }
  return ep;
}

UdpSender::UdpSender(const std::string& host, uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  int rc = getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints,
                       &res);
  if (rc != 0)
    throw std::runtime_error("cannot resolve " + host + ": " +
                             gai_strerror(rc));
  fd_ = socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd_ < 0) {
    freeaddrinfo(res);
    throw std::runtime_error("cannot create UDP socket: " +
                             std::string(std::strerror(errno)));
  }
  if (connect(fd_, res->ai_addr, res->ai_addrlen) != 0) {
    int err = errno;
    freeaddrinfo(res);
    close(fd_);
    fd_ = -1;
    throw std::runtime_error("cannot connect UDP socket: " +
                             std::string(std::strerror(err)));
  }
  freeaddrinfo(res);
}

UdpSender::~UdpSender() {
  if (fd_ >= 0) close(fd_);
}

void UdpSender::send(std::string_view datagram) {
  ssize_t n = ::send(fd_, datagram.data(), datagram.size(), 0);
  if (n < 0)
    throw std::runtime_error("UDP send failed: " +
                             std::string(std::strerror(errno)));
}

int run_receive_stub(const StubOptions& opts, std::ostream& out) {
  int fd = socket(AF_INET, SOCK_DGRAM, 0);
  if (fd < 0)
    throw std::runtime_error("cannot create UDP socket: " +
                             std::string(std::strerror(errno)));
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = INADDR_ANY;
  addr.sin_port = htons(opts.port);
  if (bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    int err = errno;
    close(fd);
    throw std::runtime_error("cannot bind UDP port " +
                             std::to_string(opts.port) + ": " +
                             std::strerror(err));
  }
  int64_t received = 0, valid = 0;
  std::vector<char> buf(65536);
  for (;;) {
    if (opts.max_count > 0 && received >= opts.max_count) break;
    pollfd pf{fd, POLLIN, 0};
    int rc = poll(&pf, 1, opts.idle_timeout_ms);
    if (rc == 0) break;  // idle
    if (rc < 0) {
      if (errno == EINTR) continue;
      close(fd);
      throw std::runtime_error("poll failed: " +
                               std::string(std::strerror(errno)));
    }
    ssize_t n = recv(fd, buf.data(), buf.size(), 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      close(fd);
      throw std::runtime_error("recv failed: " +
                               std::string(std::strerror(errno)));
    }
    ++received;
    std::string_view datagram(buf.data(), static_cast<size_t>(n));
    bool ok = is_canonical_record(datagram);
    valid += ok;
    if (!opts.quiet) {
      if (ok) {
        out << datagram;  // already newline-terminated
      } else {
        out << "INVALID ";
        out.write(datagram.data(),
                  static_cast<std::streamsize>(datagram.size()));
        if (datagram.empty() || datagram.back() != '\n') out << '\n';
      }
    }
  }
  close(fd);
  out << "received=" << received << " valid=" << valid
      << " invalid=" << (received - valid) << '\n';
  return received == valid ? 0 : 1;
}

}  // namespace cv2x
