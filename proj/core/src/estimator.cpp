#include "ofdmsim/estimator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ofdmsim {

namespace {

void require_hermitian(const MatXc& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    throw std::invalid_argument(std::string(who) + ": input is not Hermitian");
}

// Ascending-order Hermitian eigendecomposition (Eigen's native order).
void solve_hermitian(const MatXc& m, VecXd& values, MatXc& vectors, const char* who) {
  require_hermitian(m, who);
  Eigen::SelfAdjointEigenSolver<MatXc> solver(m);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": eigendecomposition failed");
  values = solver.eigenvalues();
  vectors = solver.eigenvectors();
}

// The per-tx-antenna block of phi_operator: Psi(c, j*L + l) = g^{(j)}[c+l-L]
// where g^{(j)} is the window segment of rx antenna j. phi_operator is
// I_{M_t} (x) Psi because the filtering matrix has one independent Toeplitz
// block per (tx, rx) pair.
MatXc psi_operator(const VecXc& g_vec, const SystemConfig& cfg) {
  const int L = cfg.est_taps;
  const int T = cfg.group_len();
  const int Wn = T - L;
  const int Mr = cfg.rx_antennas;
  MatXc psi = MatXc::Zero(T, static_cast<Eigen::Index>(Mr) * L);
  for (int j = 0; j < Mr; ++j)
    for (int l = 0; l < L; ++l)
      for (int c = 0; c < T; ++c) {
        const int a = c + l - L;
        if (a >= 0 && a < Wn)
          psi(c, static_cast<Eigen::Index>(j) * L + l) = g_vec[static_cast<Eigen::Index>(j) * Wn + a];
      }
  return psi;
}

}  // namespace

CovarianceAccumulator::CovarianceAccumulator(int dim)
    : sum_(MatXc::Zero(dim, dim)) {}

void CovarianceAccumulator::add(const VecXc& window) {
  if (window.size() != sum_.rows())
    throw std::invalid_argument("CovarianceAccumulator: window length mismatch");
  sum_.noalias() += window * window.adjoint();
  ++count_;
}

void CovarianceAccumulator::add_all(const std::vector<VecXc>& windows) {
  for (const VecXc& w : windows) add(w);
}

SampleCovariance CovarianceAccumulator::finalize() const {
  if (count_ == 0) throw std::invalid_argument("sample covariance needs at least one window");
  SampleCovariance cov;
  cov.matrix = sum_ / static_cast<double>(count_);
  cov.matrix = ((cov.matrix + cov.matrix.adjoint()) / 2.0).eval();
  cov.count = count_;
  return cov;
}

std::vector<VecXc> extract_windows(const RxStream& rx, const SystemConfig& cfg,
                                   int max_windows) {
  const int T = cfg.group_len();
  const int L = cfg.est_taps;
  const int Wn = T - L;
  const int Mr = cfg.rx_antennas;
  if (rx.samples.cols() != Mr)
    throw std::invalid_argument("extract_windows: rx antenna count mismatch");
  const long avail = static_cast<long>(rx.length() / T);
  const long n = std::min<long>(avail, max_windows < 0 ? 0 : max_windows);
  std::vector<VecXc> windows;
  windows.reserve(static_cast<size_t>(n));
  for (long w = 0; w < n; ++w) {
    VecXc v(static_cast<Eigen::Index>(Mr) * Wn);
    for (int j = 0; j < Mr; ++j)
      v.segment(static_cast<Eigen::Index>(j) * Wn, Wn) =
          rx.samples.col(j).segment(w * T + L, Wn);
    windows.push_back(std::move(v));
  }
  return windows;
}

SampleCovariance sample_covariance(const std::vector<VecXc>& windows) {
  if (windows.empty())
    throw std::invalid_argument("sample covariance needs at least one window");
  CovarianceAccumulator acc(static_cast<int>(windows[0].size()));
  acc.add_all(windows);
  return acc.finalize();
}

EigenSystem eigendecompose(const SampleCovariance& cov) {
  VecXd values;
  MatXc vectors;
  solve_hermitian(cov.matrix, values, vectors, "eigendecompose");
  const Eigen::Index n = values.size();
  EigenSystem es;
  es.values.resize(n);
  es.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    es.values[k] = values[n - 1 - k];
    es.vectors.col(k) = vectors.col(n - 1 - k);
  }
  return es;
}

NoiseSubspace noise_subspace(const EigenSystem& es, const SystemConfig& cfg) {
  const int wlen = cfg.window_len();
  if (es.values.size() != wlen || es.vectors.rows() != wlen)
    throw std::invalid_argument("noise_subspace: eigensystem dimension mismatch");
  const int g = cfg.noise_dim();
  if (g < 1) throw std::invalid_argument("noise_subspace: g < 1 (invalid config)");
  const int sig = cfg.signal_dim();

  const double lam_sig = es.values[sig - 1];
  const double lam_noise = std::max(0.0, es.values[sig]);
  const double scale = std::max(std::abs(es.values[0]), 1e-300);
  if (std::abs(lam_sig - lam_noise) <= 1e-12 * std::max(scale, 1.0))
    throw std::runtime_error(
        "noise_subspace: degenerate eigenvalue tie at the signal/noise boundary "
        "(lambda_signal_min == lambda_noise_max); subspace split is ill-defined");

  NoiseSubspace ns;
  ns.g = g;
  ns.basis = es.vectors.rightCols(g);
  ns.boundary_gap = lam_noise > 0.0 ? lam_sig / lam_noise
                                    : std::numeric_limits<double>::infinity();
  ns.gap_warning = ns.boundary_gap < 1.05;
  return ns;
}

MatXc phi_operator(const VecXc& g_vec, const SystemConfig& cfg) {
  if (g_vec.size() != cfg.window_len())
    throw std::invalid_argument("phi_operator: vector length != window length");
  const MatXc psi = psi_operator(g_vec, cfg);
  const int Mt = cfg.tx_antennas;
  MatXc phi = MatXc::Zero(static_cast<Eigen::Index>(Mt) * psi.rows(),
                          static_cast<Eigen::Index>(Mt) * psi.cols());
  for (int b = 0; b < Mt; ++b)
    phi.block(static_cast<Eigen::Index>(b) * psi.rows(),
              static_cast<Eigen::Index>(b) * psi.cols(), psi.rows(), psi.cols()) = psi;
  return phi;
}

QuadraticForm build_quadratic_form(const NoiseSubspace& ns, const Precoder& pre,
                                   const SystemConfig& cfg) {
  const int T = cfg.group_len();
  if (ns.basis.rows() != cfg.window_len())
    throw std::invalid_argument("build_quadratic_form: subspace dimension mismatch");
  if (pre.W_tilde.rows() != T)
    throw std::invalid_argument("build_quadratic_form: precoder dimension mismatch");
  const int Mt = cfg.tx_antennas;
  const Eigen::Index blk = static_cast<Eigen::Index>(cfg.rx_antennas) * cfg.est_taps;

  // Phi(g) = I_{M_t} (x) Psi(g), so each term Phi^H (I (x) W W^H) Phi is
  // I_{M_t} (x) (W^H Psi)^H (W^H Psi); accumulating the Gram factors keeps Q
  // Hermitian PSD by construction.
  MatXc q1 = MatXc::Zero(blk, blk);
  for (int i = 0; i < ns.g; ++i) {
    const MatXc psi = psi_operator(ns.basis.col(i), cfg);
    const MatXc m = pre.W_tilde.adjoint() * psi;
    q1.noalias() += m.adjoint() * m;
  }
  QuadraticForm qf;
  qf.Q = MatXc::Zero(Mt * blk, Mt * blk);
  for (int b = 0; b < Mt; ++b) qf.Q.block(b * blk, b * blk, blk, blk) = q1;
  return qf;
}

ChannelEstimate estimate_channel(const QuadraticForm& qf) {
  VecXd values;
  MatXc vectors;
  solve_hermitian(qf.Q, values, vectors, "estimate_channel");
  const Eigen::Index n = values.size();

  ChannelEstimate est;
  est.residual = values[0];
  est.h_vec = vectors.col(0).conjugate();

  const double scale = std::max(std::abs(values[n - 1]), 1e-300);
  Eigen::Index mult = 1;
  while (mult < n && values[mult] - values[0] <= 1e-6 * scale) ++mult;
  est.multiplicity = static_cast<int>(mult);
  est.near_null = vectors.leftCols(mult).conjugate();

  // deterministic phase: first entry of largest magnitude made real-positive
  Eigen::Index idx = 0;
  double best = -1.0;
  for (Eigen::Index k = 0; k < est.h_vec.size(); ++k) {
    const double a = std::abs(est.h_vec[k]);
    if (a > best) {
      best = a;
      idx = k;
    }
  }
  if (best > 0.0) est.h_vec *= std::conj(est.h_vec[idx]) / best;
  return est;
}

Alignment align_oracle(const VecXc& estimate, const VecXc& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("align_oracle: length mismatch");
  const double denom = estimate.squaredNorm();
  if (denom <= 0.0) throw std::invalid_argument("align_oracle: zero estimate");
  Alignment a;
  a.scale = estimate.dot(truth) / denom;  // dot() conjugates the first factor
  a.aligned = a.scale * estimate;
  return a;
}

Alignment align_pilot(const ChannelEstimate& est, const SystemConfig& cfg,
                      const MatXc& pilot_tx, const MatXc& pilot_rx) {
  if (pilot_tx.size() == 0 || pilot_rx.size() == 0)
    throw std::invalid_argument("align_pilot: pilot data required");
  if (pilot_tx.cols() != cfg.tx_antennas || pilot_rx.cols() != cfg.rx_antennas ||
      pilot_tx.rows() != pilot_rx.rows())
    throw std::invalid_argument("align_pilot: pilot dimensions mismatch");

  const ChannelSet hat =
      ChannelSet::from_vec(est.h_vec, cfg.tx_antennas, cfg.rx_antennas, cfg.est_taps);
  const Eigen::Index len = pilot_tx.rows();
  cxd num{0.0, 0.0};
  double den = 0.0;
  for (int j = 0; j < cfg.rx_antennas; ++j)
    for (Eigen::Index t = 0; t < len; ++t) {
      cxd u{0.0, 0.0};
      for (int i = 0; i < cfg.tx_antennas; ++i) {
        const VecXc& taps = hat.at(i, j);
        const int lmax = static_cast<int>(std::min<Eigen::Index>(cfg.est_taps - 1, t));
        for (int l = 0; l <= lmax; ++l) u += taps[l] * pilot_tx(t - l, i);
      }
      num += std::conj(u) * pilot_rx(t, j);
      den += std::norm(u);
    }
  if (den <= 0.0)
    throw std::runtime_error("align_pilot: predicted pilot has zero energy");
  Alignment a;
  a.scale = num / den;
  a.aligned = a.scale * est.h_vec;
  return a;
}

}  // namespace ofdmsim
