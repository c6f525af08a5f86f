#include "ofdmsim/rxchain.hpp"

#include <atomic>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ofdmsim {

VecXc ofdm_demodulate_block(const VecXc& rx_block, const MatXc& F, int cp_len) {
  const int K = static_cast<int>(F.rows());
  if (rx_block.size() != K + cp_len)
    throw std::invalid_argument("ofdm_demodulate_block: block length != K+P");
  return F * rx_block.tail(K);
}

std::vector<VecXc> equalize(const std::vector<VecXc>& tones,
                            const std::vector<MatXc>& chan, EqualizerKind method,
                            double noise_power, double signal_power) {
  if (tones.size() != chan.size())
    throw std::invalid_argument("equalize: tone/channel count mismatch");
  std::vector<VecXc> out(tones.size());
  for (size_t k = 0; k < tones.size(); ++k) {
    const MatXc& H = chan[k];
    if (tones[k].size() != H.rows())
      throw std::invalid_argument("equalize: tone vector length != rx antennas");
    if (method == EqualizerKind::ZF) {
      Eigen::ColPivHouseholderQR<MatXc> qr(H);
      if (qr.rank() < H.cols())
        throw std::runtime_error("zero-forcing equalizer: rank-deficient channel at tone " +
                                 std::to_string(k));
      out[k] = qr.solve(tones[k]);
    } else {
      const double ratio = signal_power > 0.0 ? noise_power / signal_power : 0.0;
      const MatXc A =
          H.adjoint() * H + ratio * MatXc::Identity(H.cols(), H.cols());
      out[k] = A.ldlt().solve(H.adjoint() * tones[k]);
    }
  }
  return out;
}

double nmse(const VecXc& est_aligned, const VecXc& truth) {
  if (est_aligned.size() != truth.size())
    throw std::invalid_argument("nmse: length mismatch");
  const double ref = truth.squaredNorm();
  if (ref <= 0.0) throw std::invalid_argument("nmse: zero reference channel");
  return (est_aligned - truth).squaredNorm() / ref;
}

double ber(const Bits& tx_bits, const Bits& rx_bits) {
  if (tx_bits.size() != rx_bits.size() || tx_bits.empty())
    throw std::invalid_argument("ber: bit sequences must have equal nonzero length");
  long errors = 0;
  for (size_t n = 0; n < tx_bits.size(); ++n)
    if ((tx_bits[n] ^ rx_bits[n]) & 1u) ++errors;
  return static_cast<double>(errors) / static_cast<double>(tx_bits.size());
}

namespace {

// Zero-pad each (tx, rx) tap vector from taps0 to taps1 entries.
VecXc pad_channel_vec(const VecXc& v, int pairs, int taps0, int taps1) {
  if (taps0 == taps1) return v;
  VecXc out = VecXc::Zero(static_cast<Eigen::Index>(pairs) * taps1);
  for (int b = 0; b < pairs; ++b)
    out.segment(static_cast<Eigen::Index>(b) * taps1, taps0) =
        v.segment(static_cast<Eigen::Index>(b) * taps0, taps0);
  return out;
}

struct PacketData {
  ChannelSet ch;
  Bits bits;                  // all blocks, per block: antenna-major symbol bits
  std::vector<VecXc> tx;      // per tx antenna, B*(K+P) samples
  RxStream rx;
};

}  // namespace

namespace {
TrialRecord run_trial_impl(const SystemConfig& cfg, CsiMode mode);
}  // namespace

TrialRecord run_trial(const SystemConfig& cfg, CsiMode mode) {
  try {
    return run_trial_impl(cfg, mode);
  } catch (const std::invalid_argument&) {
    throw;  // precondition violations keep their type
  } catch (const std::exception& e) {
    throw std::runtime_error("trial seed=" + std::to_string(cfg.seed) + " snr_db=" +
                             std::to_string(cfg.snr_db()) + ": " + e.what());
  }
}

namespace {
TrialRecord run_trial_impl(const SystemConfig& cfg, CsiMode mode) {
  cfg.validate();
  const int K = cfg.subcarriers;
  const int P = cfg.cp_len;
  const int Mt = cfg.tx_antennas;
  const int Mr = cfg.rx_antennas;
  const int B = cfg.blocks_per_packet;
  const int blk_len = K + P;
  const bool blind = mode != CsiMode::Perfect;
  if (blind && cfg.windows_per_packet() < 1)
    throw std::invalid_argument(
        "run_trial: blind estimation needs blocks_per_packet >= smoothing");

  Rng rng = make_rng(cfg.seed);
  const Constellation con = Constellation::make(cfg.constellation);
  const Precoder pre = precoder_matrix(K, P, cfg.smoothing);
  const VecXd pdp = make_pdp(cfg);
  const double rho = doppler_rho(cfg.doppler_fdT);
  const double amp = std::sqrt(cfg.signal_power);
  const int bits_per_ant = K * con.bits_per_symbol;
  const int bits_per_block = Mt * bits_per_ant;

  // ---- simulate every packet; fold all windows into one covariance ----
  std::vector<PacketData> pkts;
  pkts.reserve(static_cast<size_t>(cfg.packets));
  CovarianceAccumulator acc(cfg.window_len());
  for (int p = 0; p < cfg.packets; ++p) {
    PacketData pkt;
    pkt.ch = (p == 0) ? draw_channel(rng, cfg, pdp)
                      : evolve_channel(pkts.back().ch, rho, rng);
    pkt.bits.resize(static_cast<size_t>(B) * bits_per_block);
    for (auto& bit : pkt.bits) bit = static_cast<std::uint8_t>(rng() & 1u);

    pkt.tx.assign(static_cast<size_t>(Mt), VecXc(static_cast<Eigen::Index>(B) * blk_len));
    Bits slice(static_cast<size_t>(bits_per_ant));
    for (int b = 0; b < B; ++b)
      for (int i = 0; i < Mt; ++i) {
        const size_t off = static_cast<size_t>(b) * bits_per_block +
                           static_cast<size_t>(i) * bits_per_ant;
        std::copy_n(pkt.bits.begin() + off, bits_per_ant, slice.begin());
        const std::vector<cxd> syms = qam_modulate(slice, con);
        VecXc d(K);
        for (int k = 0; k < K; ++k) d[k] = amp * syms[static_cast<size_t>(k)];
        pkt.tx[i].segment(static_cast<Eigen::Index>(b) * blk_len, blk_len) =
            ofdm_modulate(d, pre.F, P);
      }

    pkt.rx = transmit(pkt.tx, pkt.ch, NoiseModel{cfg.noise_power}, rng);
    if (blind) acc.add_all(extract_windows(pkt.rx, cfg, std::numeric_limits<int>::max()));
    pkts.push_back(std::move(pkt));
  }

  // ---- one blind estimate per trial ----
  ChannelEstimate est;
  if (blind) {
    const SampleCovariance cov = acc.finalize();
    const EigenSystem es = eigendecompose(cov);
    const NoiseSubspace ns = noise_subspace(es, cfg);
    const QuadraticForm qf = build_quadratic_form(ns, pre, cfg);
    est = estimate_channel(qf);
  }

  // ---- per packet: resolve scale, equalize, demap ----
  double nmse_sum = 0.0;
  long bit_errors = 0;
  long bit_total = 0;
  const int pad_taps = std::max(cfg.est_taps, cfg.chan_taps);
  for (const PacketData& pkt : pkts) {
    std::vector<MatXc> tones;
    if (!blind) {
      tones = per_tone_channel(pkt.ch, K);
    } else {
      const VecXc est_pad = pad_channel_vec(est.h_vec, Mt * Mr, cfg.est_taps, pad_taps);
      const VecXc tru_pad =
          pad_channel_vec(pkt.ch.to_vec(), Mt * Mr, cfg.chan_taps, pad_taps);
      const Alignment oracle = align_oracle(est_pad, tru_pad);
      nmse_sum += nmse(oracle.aligned, tru_pad);

      cxd alpha = oracle.scale;
      if (mode == CsiMode::BlindPilot) {
        MatXc ptx(blk_len, Mt), prx(blk_len, Mr);
        for (int i = 0; i < Mt; ++i) ptx.col(i) = pkt.tx[static_cast<size_t>(i)].head(blk_len);
        prx = pkt.rx.samples.topRows(blk_len);
        alpha = align_pilot(est, cfg, ptx, prx).scale;
      }
      const ChannelSet hat =
          ChannelSet::from_vec(alpha * est.h_vec, Mt, Mr, cfg.est_taps);
      tones = per_tone_channel(hat, K);
    }

    // block 0 of every packet is the pilot; data blocks start at 1
    std::vector<VecXc> y(static_cast<size_t>(K), VecXc(Mr));
    std::vector<cxd> syms(static_cast<size_t>(K));
    for (int b = 1; b < B; ++b) {
      for (int j = 0; j < Mr; ++j) {
        const VecXc f = ofdm_demodulate_block(
            pkt.rx.samples.col(j).segment(static_cast<Eigen::Index>(b) * blk_len, blk_len),
            pre.F, P);
        for (int k = 0; k < K; ++k) y[static_cast<size_t>(k)][j] = f[k];
      }
      const std::vector<VecXc> shat =
          equalize(y, tones, cfg.equalizer, cfg.noise_power, cfg.signal_power);
      for (int i = 0; i < Mt; ++i) {
        for (int k = 0; k < K; ++k) syms[static_cast<size_t>(k)] = shat[static_cast<size_t>(k)][i] / amp;
        const Bits demapped = qam_demodulate(syms, con);
        const size_t off = static_cast<size_t>(b) * bits_per_block +
                           static_cast<size_t>(i) * bits_per_ant;
        for (int n = 0; n < bits_per_ant; ++n)
          if ((demapped[static_cast<size_t>(n)] ^ pkt.bits[off + n]) & 1u) ++bit_errors;
        bit_total += bits_per_ant;
      }
    }
  }

  TrialRecord rec;
  rec.seed = cfg.seed;
  rec.snr_db = cfg.snr_db();
  rec.packets = cfg.packets;
  rec.windows_used = blind ? static_cast<int>(acc.count()) : 0;
  rec.estimator_L = cfg.est_taps;
  rec.true_L = cfg.chan_taps;
  rec.doppler_fdT = cfg.doppler_fdT;
  rec.csi_mode = mode;
  rec.nmse = blind ? nmse_sum / cfg.packets : 0.0;
  rec.ber = bit_total > 0 ? static_cast<double>(bit_errors) / bit_total : 0.0;
  rec.residual = blind ? est.residual : 0.0;
  return rec;
}
}  // namespace

std::vector<SweepCell> enumerate_cells(const SystemConfig& base, const SweepAxes& axes) {
  if (axes.snr_db.empty() || axes.est_taps.empty() || axes.doppler_fdT.empty() ||
      axes.seeds < 1)
    throw std::invalid_argument("run_sweep: empty grid");
  std::vector<SweepCell> cells;
  cells.reserve(axes.snr_db.size() * axes.est_taps.size() * axes.doppler_fdT.size() *
                static_cast<size_t>(axes.seeds));
  std::size_t idx = 0;
  for (double snr : axes.snr_db)
    for (int taps : axes.est_taps)
      for (double fd : axes.doppler_fdT)
        for (int s = 0; s < axes.seeds; ++s) {
          SweepCell cell;
          cell.index = idx;
          cell.cfg = base;
          cell.cfg.noise_power = base.signal_power * std::pow(10.0, -snr / 10.0);
          cell.cfg.est_taps = taps;
          if (axes.taps_follow) cell.cfg.chan_taps = taps;
          cell.cfg.doppler_fdT = fd;
          cell.cfg.seed = derive_seed(base.seed, idx);
          cells.push_back(std::move(cell));
          ++idx;
        }
  return cells;
}

SweepResult run_sweep(const SystemConfig& base, const SweepAxes& axes, CsiMode mode,
                      int jobs) {
  const std::vector<SweepCell> cells = enumerate_cells(base, axes);
  const std::size_t n = cells.size();
  std::vector<std::optional<TrialRecord>> slots(n);
  std::vector<std::pair<std::size_t, std::string>> errors;
  std::mutex err_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        slots[i] = run_trial(cells[i].cfg, mode);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.emplace_back(cells[i].index, e.what());
      }
    }
  };

  const int workers = std::clamp<int>(jobs, 1, static_cast<int>(n));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepResult res;
  res.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (slots[i]) res.records.push_back(*slots[i]);
  std::sort(errors.begin(), errors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  res.errors = std::move(errors);
  return res;
}

}  // namespace ofdmsim
