#pragma once

#include "ofdmsim/rng.hpp"
#include "ofdmsim/sysmodel.hpp"

namespace ofdmsim {

/// One realization of the M_t x M_r grid of L-tap impulse responses, together
/// with the power-delay profile it was drawn from.
struct ChannelSet {
  int tx = 0;
  int rx = 0;
  int taps = 0;
  std::vector<VecXc> h;  // index i_tx * rx + j_rx, each of length `taps`
  VecXd pdp;

  const VecXc& at(int i_tx, int j_rx) const { return h[static_cast<size_t>(i_tx) * rx + j_rx]; }
  VecXc& at(int i_tx, int j_rx) { return h[static_cast<size_t>(i_tx) * rx + j_rx]; }

  // Canonical vectorization: tap index fastest, then rx antenna, then tx.
  VecXc to_vec() const;
  static ChannelSet from_vec(const VecXc& v, int tx, int rx, int taps);
};

struct NoiseModel {
  double variance = 0.0;  // sigma_b^2 per complex sample
};

/// Received time-domain samples, one column per rx antenna.
struct RxStream {
  MatXc samples;  // length x M_r
  Eigen::Index length() const { return samples.rows(); }
};

VecXd uniform_pdp(int taps);
VecXd exponential_pdp(int taps, double decay);
VecXd make_pdp(const SystemConfig& cfg);

// Independent CN(0, pdp[l]) taps for every (tx, rx, tap) triple. The draw
// order is fixed (tx-major, then rx, then tap), so a given rng state yields a
// bit-identical ChannelSet.
ChannelSet draw_channel(Rng& rng, const SystemConfig& cfg, const VecXd& pdp);

// Packet-to-packet fading correlation for normalized Doppler fdT:
// rho = J0(2*pi*fdT), the Clarke/Jakes autocorrelation at one packet lag.
double doppler_rho(double fdT);

// First-order Gauss-Markov step h' = rho*h + sqrt(1-rho^2)*w with
// w ~ CN(0, pdp[l]); the per-tap marginal distribution is preserved.
ChannelSet evolve_channel(const ChannelSet& ch, double rho, Rng& rng);

// Block-Toeplitz filtering matrix of the whole antenna grid: row blocks by rx
// antenna, column blocks by tx antenna. The (j,i) block maps the J(K+P)
// transmitted samples of antenna i to the received window t in
// [L, J(K+P)-1], i.e. only outputs whose convolution support lies fully
// inside the window. Shape M_r*(J(K+P)-L) x M_t*J(K+P) with L = ch.taps.
MatXc filtering_matrix(const ChannelSet& ch, const SystemConfig& cfg);

// Linear convolution of every tx stream with the channel grid plus AWGN:
// r_j(t) = sum_i sum_l h_ij(l) s_i(t-l) + v_j(t), with s_i(t) = 0 for t < 0.
// All streams must have equal length >= ch.taps.
RxStream transmit(const std::vector<VecXc>& tx_streams, const ChannelSet& ch,
                  const NoiseModel& noise, Rng& rng);

// Per-subcarrier channel matrices: tone k holds the M_r x M_t matrix with
// entry (j,i) = freq_response(h_ij, K)[k].
std::vector<MatXc> per_tone_channel(const ChannelSet& ch, int K);

}  // namespace ofdmsim
