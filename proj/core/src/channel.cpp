#include "ofdmsim/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofdmsim {

VecXc ChannelSet::to_vec() const {
  VecXc v(static_cast<Eigen::Index>(tx) * rx * taps);
  for (int i = 0; i < tx; ++i)
    for (int j = 0; j < rx; ++j)
      v.segment(static_cast<Eigen::Index>(i * rx + j) * taps, taps) = at(i, j);
  return v;
}

ChannelSet ChannelSet::from_vec(const VecXc& v, int tx, int rx, int taps) {
  if (v.size() != static_cast<Eigen::Index>(tx) * rx * taps)
    throw std::invalid_argument("ChannelSet::from_vec: vector length mismatch");
  ChannelSet ch;
  ch.tx = tx;
  ch.rx = rx;
  ch.taps = taps;
  ch.h.resize(static_cast<size_t>(tx) * rx);
  for (int i = 0; i < tx; ++i)
    for (int j = 0; j < rx; ++j)
      ch.at(i, j) = v.segment(static_cast<Eigen::Index>(i * rx + j) * taps, taps);
  ch.pdp = VecXd::Constant(taps, 1.0 / taps);
  return ch;
}

VecXd uniform_pdp(int taps) {
  if (taps < 1) throw std::invalid_argument("pdp: taps must be >= 1");
  return VecXd::Constant(taps, 1.0 / taps);
}

VecXd exponential_pdp(int taps, double decay) {
  if (taps < 1) throw std::invalid_argument("pdp: taps must be >= 1");
  if (!(decay > 0.0)) throw std::invalid_argument("pdp: decay must be > 0");
  VecXd p(taps);
  for (int l = 0; l < taps; ++l) p[l] = std::exp(-static_cast<double>(l) / decay);
  p /= p.sum();
  return p;
}

VecXd make_pdp(const SystemConfig& cfg) {
  return cfg.pdp == PdpKind::Uniform ? uniform_pdp(cfg.chan_taps)
                                     : exponential_pdp(cfg.chan_taps, cfg.pdp_decay);
}

namespace {

void check_pdp(const VecXd& pdp, int taps) {
  if (pdp.size() != taps) throw std::invalid_argument("pdp length must equal chan_taps");
  if ((pdp.array() < 0.0).any()) throw std::invalid_argument("pdp entries must be >= 0");
  if (std::abs(pdp.sum() - 1.0) > 1e-9) throw std::invalid_argument("pdp must sum to 1");
}

}  // namespace

ChannelSet draw_channel(Rng& rng, const SystemConfig& cfg, const VecXd& pdp) {
  check_pdp(pdp, cfg.chan_taps);
  ChannelSet ch;
  ch.tx = cfg.tx_antennas;
  ch.rx = cfg.rx_antennas;
  ch.taps = cfg.chan_taps;
  ch.pdp = pdp;
  ch.h.resize(static_cast<size_t>(ch.tx) * ch.rx);
  std::normal_distribution<double> unit;
  for (int i = 0; i < ch.tx; ++i)
    for (int j = 0; j < ch.rx; ++j) {
      VecXc& taps = ch.at(i, j);
      taps.resize(ch.taps);
      for (int l = 0; l < ch.taps; ++l) taps[l] = draw_cn(rng, unit, pdp[l]);
    }
  return ch;
}

double doppler_rho(double fdT) {
  if (fdT < 0.0) throw std::invalid_argument("doppler_rho: fdT must be >= 0");
  return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fdT);
}

ChannelSet evolve_channel(const ChannelSet& ch, double rho, Rng& rng) {
  if (std::abs(rho) > 1.0)
    throw std::invalid_argument("evolve_channel: |rho| must be <= 1");
  const double fresh = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  ChannelSet out = ch;
  std::normal_distribution<double> unit;
  for (int i = 0; i < ch.tx; ++i)
    for (int j = 0; j < ch.rx; ++j) {
      VecXc& taps = out.at(i, j);
      for (int l = 0; l < ch.taps; ++l)
        taps[l] = rho * ch.at(i, j)[l] + fresh * draw_cn(rng, unit, ch.pdp[l]);
    }
  return out;
}

MatXc filtering_matrix(const ChannelSet& ch, const SystemConfig& cfg) {
  if (ch.tx != cfg.tx_antennas || ch.rx != cfg.rx_antennas)
    throw std::invalid_argument("filtering_matrix: channel grid does not match config");
  const int L = ch.taps;
  const int T = cfg.group_len();
  const int Wn = T - L;  // rows per rx antenna: outputs t in [L, T-1]
  if (Wn < 1) throw std::invalid_argument("filtering_matrix: window would be empty");
  MatXc H = MatXc::Zero(static_cast<Eigen::Index>(ch.rx) * Wn,
                        static_cast<Eigen::Index>(ch.tx) * T);
  for (int j = 0; j < ch.rx; ++j)
    for (int i = 0; i < ch.tx; ++i) {
      const VecXc& taps = ch.at(i, j);
      for (int a = 0; a < Wn; ++a)
        for (int l = 0; l < L; ++l)
          H(static_cast<Eigen::Index>(j) * Wn + a,
            static_cast<Eigen::Index>(i) * T + (L + a - l)) = taps[l];
    }
  return H;
}

RxStream transmit(const std::vector<VecXc>& tx_streams, const ChannelSet& ch,
                  const NoiseModel& noise, Rng& rng) {
  if (static_cast<int>(tx_streams.size()) != ch.tx)
    throw std::invalid_argument("transmit: stream count does not match tx antennas");
  const Eigen::Index len = tx_streams.empty() ? 0 : tx_streams[0].size();
  for (const VecXc& s : tx_streams)
    if (s.size() != len) throw std::invalid_argument("transmit: stream length mismatch");
  if (len < ch.taps) throw std::invalid_argument("transmit: streams shorter than channel");
  if (noise.variance < 0.0) throw std::invalid_argument("transmit: negative noise power");

  RxStream rx;
  rx.samples = MatXc::Zero(len, ch.rx);
  for (int j = 0; j < ch.rx; ++j)
    for (int i = 0; i < ch.tx; ++i) {
      const VecXc& taps = ch.at(i, j);
      const VecXc& s = tx_streams[i];
      for (Eigen::Index t = 0; t < len; ++t) {
        cxd acc{0.0, 0.0};
        const int lmax = static_cast<int>(std::min<Eigen::Index>(ch.taps - 1, t));
        for (int l = 0; l <= lmax; ++l) acc += taps[l] * s[t - l];
        rx.samples(t, j) += acc;
      }
    }
  if (noise.variance > 0.0) {
    std::normal_distribution<double> unit;
    for (int j = 0; j < ch.rx; ++j)
      for (Eigen::Index t = 0; t < len; ++t)
        rx.samples(t, j) += draw_cn(rng, unit, noise.variance);
  }
  return rx;
}

std::vector<MatXc> per_tone_channel(const ChannelSet& ch, int K) {
  std::vector<MatXc> tones(static_cast<size_t>(K), MatXc::Zero(ch.rx, ch.tx));
  for (int i = 0; i < ch.tx; ++i)
    for (int j = 0; j < ch.rx; ++j) {
      const VecXc H = freq_response(ch.at(i, j), K);
      for (int k = 0; k < K; ++k) tones[k](j, i) = H[k];
    }
  return tones;
}

}  // namespace ofdmsim
