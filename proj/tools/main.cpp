#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "cv2x/bench.hpp"
#include "cv2x/config.hpp"
#include "cv2x/engine.hpp"
#include "cv2x/hil.hpp"
#include "cv2x/metrics.hpp"

namespace {

struct RunFlags {
  std::string config_path;
  std::string out_dir;
  std::string emit_url;
  uint64_t seed = 0;
  bool seed_set = false;
  bool real_time = false;
  double rtf = 1.0;
  bool rtf_set = false;
};

void print_summary(const cv2x::MetricsReport& r) {
  std::printf("sent=%lld decoded=%lld half_duplex=%lld propagation=%lld "
              "collision=%lld\n",
              static_cast<long long>(r.total_sent),
              static_cast<long long>(r.total_decoded),
              static_cast<long long>(r.lost_half_duplex),
              static_cast<long long>(r.lost_propagation),
              static_cast<long long>(r.lost_collision));
  // "PER at d" reports the 25 m bin ending at d.
  std::printf("per@100m=%.4f per@300m=%.4f per@600m=%.4f\n",
              r.per_at(100.0 - 1e-9), r.per_at(300.0 - 1e-9),
              r.per_at(600.0 - 1e-9));
  for (int b = 0; b < cv2x::kIpgBinCount; ++b) {
    cv2x::IpgStats s = r.ipg_stats(b);
    std::printf("ipg[%s] n=%lld mean=%.1fms median=%.1fms p95=%.1fms\n",
                cv2x::kIpgBinLabels[b], static_cast<long long>(s.count),
                s.mean_ms, s.median_ms, s.p95_ms);
  }
  std::printf("wall=%lldms peak_rss=%.1fMB\n",
              static_cast<long long>(r.wall_ms),
              static_cast<double>(r.peak_rss_bytes) / (1024.0 * 1024.0));
}

int do_run(const RunFlags& fl) {
  cv2x::RunConfig cfg = cv2x::load_run_config(fl.config_path);
  if (fl.seed_set) {
    cfg.sim.rng_seed = fl.seed;
    if (cfg.scenario && !cfg.placement_seed_explicit)
      cfg.scenario->placement_seed = fl.seed;
  }
  if (!fl.out_dir.empty()) cfg.out_dir = fl.out_dir;
  if (!fl.emit_url.empty()) cfg.pacing.endpoint = fl.emit_url;
  if (fl.rtf_set) cfg.pacing.real_time_factor = fl.rtf;
  const bool paced = fl.real_time || fl.rtf_set;
  cv2x::validate(cfg.pacing);

  std::filesystem::create_directories(cfg.out_dir);
  const std::string jsonl_path = cfg.out_dir + "/emitted.jsonl";
  std::ofstream jsonl(jsonl_path, std::ios::binary);
  if (!jsonl) throw std::runtime_error("cannot write " + jsonl_path);

  std::unique_ptr<cv2x::UdpSender> udp;
  if (!cfg.pacing.endpoint.empty()) {
    cv2x::UdpEndpoint ep = cv2x::parse_udp_endpoint(cfg.pacing.endpoint);
    udp = std::make_unique<cv2x::UdpSender>(ep.host, ep.port);
  }
  auto sink = [&](std::string_view rec) {
    jsonl << rec;
    if (udp) udp->send(rec);
  };

  std::unique_ptr<cv2x::PacedEmitter> pacer;
  if (paced) pacer = std::make_unique<cv2x::PacedEmitter>(cfg.pacing, sink);

  cv2x::EngineInputs in = cv2x::make_engine_inputs(cfg);
  cv2x::EngineHooks hooks;
  hooks.on_decoded = [&](const cv2x::EmittedBsm& b) {
    if (pacer)
      pacer->push(b);
    else
      sink(cv2x::encode_record(b));
  };

  cv2x::reset_peak_rss();
  auto t0 = std::chrono::steady_clock::now();
  cv2x::MetricsReport report = cv2x::run_engine(in, hooks);
  cv2x::PacingStats pstats;
  if (pacer) pstats = pacer->finish();
  auto t1 = std::chrono::steady_clock::now();
  report.wall_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  report.peak_rss_bytes = cv2x::peak_rss_bytes();
  jsonl.close();

  cv2x::export_metrics(report, cfg.out_dir);
  cv2x::write_resolved_config(cfg, cfg.out_dir + "/config.json");

  print_summary(report);
  if (paced)
    std::printf("paced emitted=%zu max_lag=%.2fms p99_lag=%.2fms rtf=%.2f\n",
                pstats.emitted, pstats.max_lag_ms, pstats.p99_lag_ms,
                cfg.pacing.real_time_factor);
  return 0;
}

int do_bench(const std::string& config_path, const std::string& out_path) {
  cv2x::BenchMatrix m;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in)
      throw std::runtime_error("cannot open config file: " + config_path);
    nlohmann::json j;
    in >> j;
    m = cv2x::parse_bench_matrix(j.contains("bench") ? j.at("bench") : j);
  }
  std::vector<cv2x::BenchCell> cells = cv2x::run_bench(m);
  if (out_path.empty()) {
    cv2x::write_bench_csv(cells, std::cout);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    cv2x::write_bench_csv(cells, f);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-V2X mode 4 sidelink emulator"};
  app.require_subcommand(1);

  RunFlags fl;
  CLI::App* run = app.add_subcommand(
      "run", "Simulate one scenario and export metrics");
  run->add_option("--config", fl.config_path, "JSON run configuration")
      ->required();
  auto* seed_opt =
      run->add_option("--seed", fl.seed, "Override the configured RNG seed");
  run->add_option("--out", fl.out_dir, "Output directory (overrides config)");
  run->add_flag("--real-time", fl.real_time,
                "Pace decoded-packet emission against the wall clock");
  auto* rtf_opt = run->add_option(
      "--rtf", fl.rtf, "Real-time factor, e.g. 2 = twice wall-clock speed");
  run->add_option("--emit", fl.emit_url,
                  "Send decoded packets to udp://host:port");

  std::string bench_config, bench_out;
  CLI::App* bench =
      app.add_subcommand("bench", "Run the wall-clock benchmark matrix");
  bench->add_option("--config", bench_config, "JSON bench matrix");
  bench->add_option("--out", bench_out, "CSV output path (default: stdout)");

  cv2x::StubOptions stub;
  CLI::App* recv = app.add_subcommand(
      "receive-stub", "Validate and echo an incoming packet stream");
  recv->add_option("--port", stub.port, "UDP port to listen on")->required();
  recv->add_option("--count", stub.max_count,
                   "Stop after this many datagrams (0 = unlimited)");
  recv->add_option("--idle-timeout-ms", stub.idle_timeout_ms,
                   "Stop after this long without traffic");
  recv->add_flag("--quiet", stub.quiet, "Suppress per-record echo");

  CLI11_PARSE(app, argc, argv);
  fl.seed_set = seed_opt->count() > 0;
  fl.rtf_set = rtf_opt->count() > 0;

  try {
    if (run->parsed()) return do_run(fl);
    if (bench->parsed()) return do_bench(bench_config, bench_out);
    return cv2x::run_receive_stub(stub, std::cout);
  } catch (const cv2x::RealTimeViolation& e) {
    std::cerr << "real-time violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
