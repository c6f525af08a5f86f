// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include "ofdmsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracles {

using ofdmsim::cxd;
using ofdmsim::MatXc;
using ofdmsim::VecXc;

// Direct evaluation of the unnormalized DFT of zero-padded taps, via polar
// phasors rather than the library's cos/sin accumulation.
inline VecXc direct_dft(const VecXc& taps, int K) {
  VecXc out(K);
  for (int k = 0; k < K; ++k) {
    cxd acc{0.0, 0.0};
    for (int l = 0; l < taps.size(); ++l)
      acc += taps[l] * std::polar(1.0, -2.0 * std::numbers::pi * k * l / K);
    out[k] = acc;
  }
  return out;
}

// Per-antenna linear convolution of tx streams with the channel grid,
// s(t) = 0 for t < 0. Independent loop structure from ofdmsim::transmit.
inline MatXc direct_convolution(const std::vector<VecXc>& streams,
                                const ofdmsim::ChannelSet& ch) {
  const Eigen::Index len = streams.at(0).size();
  MatXc out = MatXc::Zero(len, ch.rx);
  for (int i = 0; i < ch.tx; ++i)
    for (int j = 0; j < ch.rx; ++j)
      for (int l = 0; l < ch.taps; ++l)
        for (Eigen::Index t = l; t < len; ++t)
          out(t, j) += ch.at(i, j)[l] * streams[static_cast<size_t>(i)][t - l];
  return out;
}

// J0(x) by Simpson quadrature of Bessel's integral (1/pi) int_0^pi
// cos(x sin u) du; absolute error far below 1e-10 for the tested range.
inline double bessel_j0_quadrature(double x) {
  const int n = 20000;  // even
  const double h = std::numbers::pi / n;
  auto f = [x](double u) { return std::cos(x * std::sin(u)); };
  double acc = f(0.0) + f(std::numbers::pi);
  for (int k = 1; k < n; ++k) acc += f(k * h) * (k % 2 ? 4.0 : 2.0);
  return acc * h / 3.0 / std::numbers::pi;
}

// Exact bit error probability of Gray-mapped 16-QAM over AWGN at symbol SNR
// gamma = Es/N0 (levels {+-1,+-3}/sqrt(10) per axis, Gray 00,01,11,10).
inline double qam16_awgn_ber(double gamma) {
  auto Q = [](double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); };
  const double a = std::sqrt(gamma / 5.0);
  return 0.75 * Q(a) + 0.5 * Q(3.0 * a) - 0.25 * Q(5.0 * a);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// The full stacked model matrix A = H * (I_{M_t} (x) W_tilde), built directly
// from its definition.
inline MatXc stacked_model_matrix(const ofdmsim::ChannelSet& ch,
                                  const ofdmsim::SystemConfig& cfg,
                                  const ofdmsim::Precoder& pre) {
  const MatXc H = ofdmsim::filtering_matrix(ch, cfg);
  const int T = cfg.group_len();
  const int JK = cfg.smoothing * cfg.subcarriers;
  MatXc wbig = MatXc::Zero(static_cast<Eigen::Index>(cfg.tx_antennas) * T,
                           static_cast<Eigen::Index>(cfg.tx_antennas) * JK);
  for (int b = 0; b < cfg.tx_antennas; ++b)
    wbig.block(static_cast<Eigen::Index>(b) * T, static_cast<Eigen::Index>(b) * JK, T, JK) =
        pre.W_tilde;
  return H * wbig;
}

// Randomized but seed-stable small configs with M_t <= M_r <= 4, K <= 16,
// J <= 3, L <= P <= K.
inline ofdmsim::SystemConfig random_config(ofdmsim::Rng& rng) {
  ofdmsim::SystemConfig cfg;
  for (;;) {
    cfg.rx_antennas = 1 + static_cast<int>(rng() % 4);
    cfg.tx_antennas = 1 + static_cast<int>(rng() % cfg.rx_antennas);
    const int kchoices[] = {4, 8, 16};
    cfg.subcarriers = kchoices[rng() % 3];
    cfg.smoothing = 1 + static_cast<int>(rng() % 3);
    cfg.chan_taps = 1 + static_cast<int>(rng() % 4);
    cfg.cp_len = cfg.chan_taps + static_cast<int>(rng() % 3);
    cfg.est_taps = cfg.chan_taps;
    cfg.blocks_per_packet = 2 * cfg.smoothing;
    if (cfg.cp_len > cfg.subcarriers) continue;
    if (cfg.noise_dim() < 1) continue;
    cfg.validate();
    return cfg;
  }
}

}  // namespace oracles
