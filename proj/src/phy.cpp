#include "cv2x/phy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cv2x {

namespace {
double to_linear_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double to_dbm(double mw) { return 10.0 * std::log10(mw); }
}  // namespace

std::vector<SinrValue> batch_sinr(const std::vector<RxTransmission>& txs,
                                  const PhyParams& p) {
  if (txs.empty()) return {};
  int64_t subframe = txs.front().csr.subframe;
  for (const auto& t : txs) {
    if (t.csr.subframe != subframe)
      throw std::invalid_argument("batch spans more than one subframe");
    if (t.csr.subchannel_start < 0 ||
        t.csr.subchannel_start + t.csr.subchannel_len > p.n_subchannels)
      throw std::invalid_argument("transmission outside the channel");
  }

  const double noise_lin = to_linear_mw(p.subchannel_noise_dbm);
  std::vector<double> psd(txs.size());
  std::vector<double> total_per_subch(p.n_subchannels, 0.0);
  for (size_t i = 0; i < txs.size(); ++i) {
    psd[i] = to_linear_mw(txs[i].rx_power_dbm) / txs[i].csr.subchannel_len;
    for (int c = txs[i].csr.subchannel_start;
         c < txs[i].csr.subchannel_start + txs[i].csr.subchannel_len; ++c)
      total_per_subch[c] += psd[i];
  }

  std::vector<SinrValue> out(txs.size());
  for (size_t i = 0; i < txs.size(); ++i) {
    const Csr& c = txs[i].csr;
    double acc = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (int s = c.subchannel_start; s < c.subchannel_start + c.subchannel_len;
         ++s) {
      double interference = total_per_subch[s] - psd[i];
      if (interference < 0.0) interference = 0.0;  // FP cancellation guard
      double ratio = psd[i] / (interference + noise_lin);
      acc += ratio;
      worst = std::min(worst, ratio);
    }
    double combined = p.combiner == SinrCombiner::MinSubchannel
                          ? worst
                          : acc / c.subchannel_len;
    out[i].sinr_db = 10.0 * std::log10(combined);
    out[i].snr_db = 10.0 * std::log10(psd[i] / noise_lin);
  }
  return out;
}

double measured_rssi_dbm(const std::vector<RxTransmission>& txs,
                         size_t target, const PhyParams& p) {
  if (target >= txs.size())
    throw std::out_of_range("rssi target index out of range");
  const Csr& span = txs[target].csr;
  const double noise_lin = to_linear_mw(p.subchannel_noise_dbm);
  double total = noise_lin * span.subchannel_len;
  for (const auto& t : txs) {
    int ov = span_overlap(span.subchannel_start, span.subchannel_len,
                          t.csr.subchannel_start, t.csr.subchannel_len);
    if (ov > 0)
      total += to_linear_mw(t.rx_power_dbm) / t.csr.subchannel_len * ov;
  }
  return to_dbm(total);
}

double rsrp_dbm(double rx_power_dbm, int l_subchannels) {
  return rx_power_dbm - 10.0 * std::log10(static_cast<double>(l_subchannels));
}

double BlerTable::operator()(double sinr_db) const {
  if (points.empty()) throw std::logic_error("BLER table is empty");
  if (sinr_db < points.front().first) return 1.0;
  if (sinr_db > points.back().first) return 0.0;
  if (sinr_db == points.back().first) return points.back().second;
  auto hi = std::upper_bound(
      points.begin(), points.end(), sinr_db,
      [](double v, const std::pair<double, double>& pt) {
        return v < pt.first;
      });
  auto lo = hi - 1;
  double t = (sinr_db - lo->first) / (hi->first - lo->first);
  return lo->second + t * (hi->second - lo->second);
}

void validate(const BlerTable& table) {
  if (table.points.empty())
    throw std::invalid_argument("BLER table has no points");
  double prev_s = -std::numeric_limits<double>::infinity();
  double prev_b = std::numeric_limits<double>::infinity();
  for (const auto& [s, b] : table.points) {
    if (b < 0.0 || b > 1.0)
      throw std::invalid_argument("BLER values must lie in [0,1]");
    if (s <= prev_s)
      throw std::invalid_argument("BLER table SINR values must be ascending");
    if (b > prev_b)
      throw std::invalid_argument("BLER must be non-increasing in SINR");
    prev_s = s;
    prev_b = b;
  }
}

BlerTable default_bler_table_mcs5() {
  BlerTable t;
  t.points = {{-3.0, 1.0},  {-2.0, 0.99},  {-1.0, 0.92}, {-0.5, 0.77},
              {0.0, 0.52},  {0.5, 0.28},   {1.0, 0.12},  {1.5, 0.04},
              {2.0, 0.011}, {2.5, 0.003},  {3.0, 0.0}};
  return t;
}

BlerTable load_bler_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open BLER table: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      (line != "sinr_db,bler" && line != "sinr_db,bler\r"))
    throw std::runtime_error("BLER table must start with 'sinr_db,bler': " +
                             path);
  BlerTable t;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b))
      throw std::runtime_error("BLER table line " + std::to_string(line_no) +
                               ": expected 'sinr_db,bler'");
    try {
      t.points.emplace_back(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      throw std::runtime_error("BLER table line " + std::to_string(line_no) +
                               ": bad number");
    }
  }
  validate(t);
  return t;
}

bool decode(double bler, double u01) { return u01 >= bler; }

bool decode(double bler, rng::Stream& stream) {
  return decode(bler, stream.uniform());
}

LossCause classify_loss(double u01, double bler_with_interference,
                        double bler_interference_free) {
  if (u01 >= bler_with_interference) return LossCause::None;
  return u01 < bler_interference_free ? LossCause::Propagation
                                      : LossCause::Collision;
}

}  // namespace cv2x
