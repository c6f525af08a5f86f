#pragma once

#include "ofdmsim/estimator.hpp"

#include <optional>
#include <string>

namespace ofdmsim {

/// One Monte Carlo outcome.
struct TrialRecord {
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  int packets = 0;
  int windows_used = 0;
  int estimator_L = 0;
  int true_L = 0;
  double doppler_fdT = 0.0;
  CsiMode csi_mode = CsiMode::Perfect;
  double nmse = 0.0;      // channel-energy-normalized, oracle scalar aligned
  double ber = 0.0;
  double residual = 0.0;  // smallest eigenvalue of the estimator's quadratic form
};

// Drop the cyclic prefix and apply the unitary DFT. Block length must be K+P.
VecXc ofdm_demodulate_block(const VecXc& rx_block, const MatXc& F, int cp_len);

// Per-tone linear equalization. ZF solves the least-squares problem through a
// rank-revealing QR and reports the tone index on rank deficiency; MMSE is
// (H^H H + (noise/signal) I)^{-1} H^H y.
std::vector<VecXc> equalize(const std::vector<VecXc>& tones,
                            const std::vector<MatXc>& chan, EqualizerKind method,
                            double noise_power, double signal_power);

// ||est_aligned - truth||^2 / ||truth||^2. Alignment is the caller's step
// (align_oracle); on zero truth this throws.
double nmse(const VecXc& est_aligned, const VecXc& truth);

// Hamming distance over length. Lengths must match and be >= 1.
double ber(const Bits& tx_bits, const Bits& rx_bits);

// One full trial: per packet draw/evolve the channel, transmit the pilot and
// data blocks, fold all packets' windows into one covariance, run the blind
// subspace pipeline once, then equalize and demap every packet with the
// selected CSI. Deterministic given (cfg, cfg.seed).
TrialRecord run_trial(const SystemConfig& cfg, CsiMode mode);

/// Sweep grid: the Cartesian product snr_db x est_taps x doppler_fdT x seeds.
struct SweepAxes {
  std::vector<double> snr_db;
  std::vector<int> est_taps;
  std::vector<double> doppler_fdT;
  int seeds = 1;
  // When set, the true channel length follows the est_taps axis (matched
  // length sweep); otherwise the base config's chan_taps is used throughout.
  bool taps_follow = false;
};

struct SweepCell {
  std::size_t index = 0;
  SystemConfig cfg;  // fully derived per-cell config (seed, noise power, taps)
};

struct SweepResult {
  std::vector<TrialRecord> records;  // successful cells in sweep order
  std::vector<std::pair<std::size_t, std::string>> errors;  // cell index + what()
};

// Deterministic cell enumeration: snr-major, then est_taps, then doppler,
// then seed index. Cell seeds derive from (base.seed, cell index).
std::vector<SweepCell> enumerate_cells(const SystemConfig& base, const SweepAxes& axes);

// Runs every cell (optionally on `jobs` worker threads); the result ordering
// is fixed by cell index, independent of scheduling.
SweepResult run_sweep(const SystemConfig& base, const SweepAxes& axes, CsiMode mode,
                      int jobs = 1);

}  // namespace ofdmsim
