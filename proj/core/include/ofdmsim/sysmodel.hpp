#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace ofdmsim {

using cxd = std::complex<double>;
using MatXc = Eigen::MatrixXcd;
using VecXc = Eigen::VectorXcd;
using VecXd = Eigen::VectorXd;
using Bits = std::vector<std::uint8_t>;

enum class ConstellationKind { QPSK, QAM16 };
enum class CsiMode { Blind, BlindPilot, Perfect };
enum class EqualizerKind { ZF, MMSE };
enum class PdpKind { Uniform, Exponential };

std::string to_string(ConstellationKind k);
std::string to_string(CsiMode m);
std::string to_string(EqualizerKind e);

/// Full scenario description. All derived dimensions of the subspace method
/// are computed from here; validate() enforces every structural constraint
/// (CP covering the channel memory, noise-subspace dimension g >= 1, ...).
struct SystemConfig {
  int tx_antennas = 1;  // M_t
  int rx_antennas = 1;  // M_r
  int subcarriers = 8;  // K
  int cp_len = 1;       // P
  int chan_taps = 1;    // true channel length L
  int est_taps = 1;     // channel length assumed by the estimator
  int smoothing = 1;    // J, consecutive OFDM blocks stacked per observation
  ConstellationKind constellation = ConstellationKind::QAM16;
  double signal_power = 1.0;  // sigma_s^2 per symbol
  double noise_power = 0.0;   // sigma_b^2 per complex sample
  double doppler_fdT = 0.0;   // normalized Doppler spread per packet interval
  PdpKind pdp = PdpKind::Uniform;
  double pdp_decay = 1.0;  // time constant (in taps) for the exponential profile
  EqualizerKind equalizer = EqualizerKind::ZF;
  int blocks_per_packet = 1;
  int packets = 1;
  std::uint64_t seed = 1;

  int block_len() const { return subcarriers + cp_len; }       // K+P samples
  int group_len() const { return smoothing * block_len(); }    // J(K+P)
  int window_len() const { return rx_antennas * (group_len() - est_taps); }
  int signal_dim() const { return smoothing * subcarriers * tx_antennas; }
  // Noise-subspace dimension g = J*K*(M_r - M_t) + J*P*M_r - L*M_r, with L
  // the estimator's channel length.
  int noise_dim() const;
  int windows_per_packet() const { return blocks_per_packet / smoothing; }
  double snr_db() const;

  void validate() const;  // throws std::invalid_argument on the first violation
};

/// Unit-average-energy constellation with Gray bit labels. `points` is indexed
/// by label value; bit_labels[m] == m keeps the label table explicit.
struct Constellation {
  std::vector<cxd> points;
  std::vector<std::uint32_t> bit_labels;
  int bits_per_symbol = 0;

  static Constellation make(ConstellationKind kind);
};

/// The deterministic transmit-side matrices: unitary DFT F, the per-block
/// IFFT-plus-cyclic-prefix matrix W, and its J-fold block-diagonal copy.
struct Precoder {
  MatXc F;        // K x K
  MatXc W;        // (K+P) x K
  MatXc W_tilde;  // J(K+P) x JK, block diagonal with J copies of W
};

// Unitary K-point DFT matrix, entry (a,b) = exp(-2i*pi*a*b/K)/sqrt(K)
// (0-indexed). Rejects K < 1.
MatXc dft_matrix(int K);

// Map a bit sequence through the constellation, bits_per_symbol at a time,
// most significant bit first. Length must divide evenly.
std::vector<cxd> qam_modulate(const Bits& bits, const Constellation& c);

// Hard-decision demap: nearest constellation point in Euclidean distance,
// ties broken toward the lowest point index.
Bits qam_demodulate(const std::vector<cxd>& symbols, const Constellation& c);

// IFFT of one frequency-domain block plus cyclic prefix: output is
// [x(K-P..K-1); x] with x = F^H d. Requires 0 <= P <= K.
VecXc ofdm_modulate(const VecXc& d, const MatXc& F, int cp_len);

Precoder precoder_matrix(int K, int cp_len, int J);

// Unnormalized K-point DFT of the zero-padded taps:
// H(k) = sum_l h(l) exp(-2i*pi*k*l/K). This is the unique normalization under
// which F * circulant(h) * F^H == diag(H) with F unitary.
VecXc freq_response(const VecXc& taps, int K);

// K x K circulant matrix with entry (a,b) = h0((a-b) mod K), h0 the
// zero-padded taps.
MatXc circulant_matrix(const VecXc& taps, int K);

}  // namespace ofdmsim
