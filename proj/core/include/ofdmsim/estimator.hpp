#pragma once

#include "ofdmsim/channel.hpp"
#include "ofdmsim/sysmodel.hpp"

namespace ofdmsim {

/// Sample estimate of the received-window autocorrelation matrix.
struct SampleCovariance {
  MatXc matrix;    // Hermitian window_len x window_len
  long count = 0;  // number of windows averaged
};

/// Sequential fold of windows into a covariance estimate. Windows from
/// several packets of one trial are accumulated into the same instance.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(int dim);
  void add(const VecXc& window);
  void add_all(const std::vector<VecXc>& windows);
  long count() const { return count_; }
  SampleCovariance finalize() const;  // throws if no windows were added

 private:
  MatXc sum_;
  long count_ = 0;
};

// Non-overlapping observation windows: window w covers per-antenna samples
// [w*J*(K+P) + L, (w+1)*J*(K+P)) with L = cfg.est_taps, stacked rx-antenna
// major. Returns at most max_windows; empty when the stream is too short.
std::vector<VecXc> extract_windows(const RxStream& rx, const SystemConfig& cfg,
                                   int max_windows);

SampleCovariance sample_covariance(const std::vector<VecXc>& windows);

struct EigenSystem {
  VecXd values;  // real eigenvalues, sorted non-increasing
  MatXc vectors; // unitary, columns matching `values`
};

// Hermitian eigendecomposition with descending eigenvalue order. Rejects
// non-Hermitian input.
EigenSystem eigendecompose(const SampleCovariance& cov);

struct NoiseSubspace {
  MatXc basis;  // window_len x g, orthonormal columns
  int g = 0;
  // lambda_signal_min / lambda_noise_max at the subspace boundary (inf when
  // the largest noise eigenvalue is <= 0). A gap below 1.05 sets the warning
  // flag; an exact tie is an error since the split is then ill-defined.
  double boundary_gap = 0.0;
  bool gap_warning = false;
};

// Eigenvectors of the g smallest eigenvalues, g = cfg.noise_dim().
NoiseSubspace noise_subspace(const EigenSystem& es, const SystemConfig& cfg);

// The linear-in-channel rearrangement of a noise-subspace vector. Defining
// identity, certified by tests against filtering_matrix: for every channel
// set h with H = filtering_matrix(h),
//     H^H * g_vec == phi_operator(g_vec) * conj(h_vec)
// where h_vec uses the ChannelSet vectorization order. Shape
// M_t*J(K+P) x M_t*M_r*L with L = cfg.est_taps.
MatXc phi_operator(const VecXc& g_vec, const SystemConfig& cfg);

struct QuadraticForm {
  MatXc Q;  // Hermitian PSD, (M_t*M_r*L) x (M_t*M_r*L)
};

// Q = sum_i Phi_i^H (I_{M_t} (x) W_tilde W_tilde^H) Phi_i over the noise
// subspace columns, so that for every channel vector h
//     conj(h_vec)^H Q conj(h_vec) == sum_i || A(h)^H G_i ||^2
// with A(h) = filtering_matrix(h) * (I_{M_t} (x) W_tilde).
QuadraticForm build_quadratic_form(const NoiseSubspace& ns, const Precoder& pre,
                                   const SystemConfig& cfg);

struct ChannelEstimate {
  VecXc h_vec;          // unit norm, ChannelSet vectorization order
  double residual = 0;  // smallest eigenvalue of Q
  // Number of eigenvalues within relative tolerance 1e-6 of the smallest.
  // For M_t > 1 the smallest eigenvalue is structurally degenerate (the cost
  // decouples per tx antenna), so multiplicity > 1 is expected there.
  int multiplicity = 1;
  MatXc near_null;      // conjugated eigenvectors spanning the near-null space
};

// Minimizer of conj(h)^H Q conj(h) over unit-norm h: the conjugate of the
// eigenvector of Q's smallest eigenvalue. Phase convention: the first entry
// of largest magnitude is made real-positive.
ChannelEstimate estimate_channel(const QuadraticForm& qf);

struct Alignment {
  VecXc aligned;
  cxd scale{0.0, 0.0};
};

// Scalar least-squares fit alpha = <est, truth> / ||est||^2; aligned result
// minimizes ||alpha*est - truth||.
Alignment align_oracle(const VecXc& estimate, const VecXc& truth);

// Scalar fit from one known pilot block: predicts the pilot's received
// samples through the estimated channel and solves the one-parameter least
// squares problem. Never touches the true channel.
Alignment align_pilot(const ChannelEstimate& est, const SystemConfig& cfg,
                      const MatXc& pilot_tx,   // (K+P) x M_t transmitted samples
                      const MatXc& pilot_rx);  // (K+P) x M_r received samples

}  // namespace ofdmsim
