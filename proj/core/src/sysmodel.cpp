#include "ofdmsim/sysmodel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ofdmsim {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(ConstellationKind k) {
  return k == ConstellationKind::QPSK ? "qpsk" : "qam16";
}

std::string to_string(CsiMode m) {
  switch (m) {
    case CsiMode::Blind: return "blind";
    case CsiMode::BlindPilot: return "blind_pilot";
    case CsiMode::Perfect: return "perfect";
  }
  return "?";
}

std::string to_string(EqualizerKind e) {
  return e == EqualizerKind::ZF ? "zf" : "mmse";
}

int SystemConfig::noise_dim() const {
  return smoothing * subcarriers * (rx_antennas - tx_antennas) +
         smoothing * cp_len * rx_antennas - est_taps * rx_antennas;
}

double SystemConfig::snr_db() const {
  if (noise_power <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal_power / noise_power);
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (tx_antennas < 1) fail("tx_antennas must be >= 1");
  if (rx_antennas < 1) fail("rx_antennas must be >= 1");
  if (subcarriers < 2) fail("subcarriers must be >= 2");
  if (cp_len < 1) fail("cp_len must be >= 1");
  if (cp_len > subcarriers) fail("cp_len must be <= subcarriers");
  if (chan_taps < 1) fail("chan_taps must be >= 1");
  if (est_taps < 1) fail("est_taps must be >= 1");
  if (smoothing < 1) fail("smoothing must be >= 1");
  if (blocks_per_packet < 1) fail("blocks_per_packet must be >= 1");
  if (packets < 1) fail("packets must be >= 1");
  if (!(signal_power > 0.0)) fail("signal_power must be > 0");
  if (noise_power < 0.0) fail("noise_power must be >= 0");
  if (doppler_fdT < 0.0) fail("doppler_fdT must be >= 0");
  if (pdp == PdpKind::Exponential && !(pdp_decay > 0.0))
    fail("pdp decay constant must be > 0");
  if (cp_len < chan_taps) {
    std::ostringstream os;
    os << "cp_len (P=" << cp_len << ") must be >= chan_taps (L=" << chan_taps
       << "): the cyclic prefix must cover the channel memory";
    fail(os.str());
  }
  if (group_len() <= est_taps)
    fail("smoothing*(subcarriers+cp_len) must exceed est_taps");
  const int g = noise_dim();
  if (g < 1) {
    std::ostringstream os;
    os << "noise-subspace dimension g = J*K*(Mr-Mt) + J*P*Mr - L*Mr = " << smoothing
       << "*" << subcarriers << "*(" << rx_antennas << "-" << tx_antennas << ") + "
       << smoothing << "*" << cp_len << "*" << rx_antennas << " - " << est_taps << "*"
       << rx_antennas << " = " << g << "; need g >= 1";
    fail(os.str());
  }
}

Constellation Constellation::make(ConstellationKind kind) {
  Constellation c;
  if (kind == ConstellationKind::QPSK) {
    c.bits_per_symbol = 2;
    const double s = 1.0 / std::sqrt(2.0);
    // one bit per axis: 0 -> -1, 1 -> +1
    c.points.resize(4);
    for (std::uint32_t m = 0; m < 4; ++m) {
      const double i = ((m >> 1) & 1u) ? 1.0 : -1.0;
      const double q = (m & 1u) ? 1.0 : -1.0;
      c.points[m] = cxd{i * s, q * s};
    }
  } else {
    c.bits_per_symbol = 4;
    const double s = 1.0 / std::sqrt(10.0);
    // per-axis Gray rule on two bits: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    auto level = [](std::uint32_t b) -> double {
      switch (b) {
        case 0b00: return -3.0;
        case 0b01: return -1.0;
        case 0b11: return 1.0;
        default: return 3.0;  // 0b10
      }
    };
    c.points.resize(16);
    for (std::uint32_t m = 0; m < 16; ++m) {
      const double i = level((m >> 2) & 0b11u);
      const double q = level(m & 0b11u);
      c.points[m] = cxd{i * s, q * s};
    }
  }
  c.bit_labels.resize(c.points.size());
  for (std::uint32_t m = 0; m < c.bit_labels.size(); ++m) c.bit_labels[m] = m;
  return c;
}

MatXc dft_matrix(int K) {
  if (K < 1) throw std::invalid_argument("dft_matrix: K must be >= 1");
  MatXc F(K, K);
  const double scale = 1.0 / std::sqrt(static_cast<double>(K));
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      const double phase = -2.0 * kPi * a * b / K;
      F(a, b) = scale * cxd{std::cos(phase), std::sin(phase)};
    }
  return F;
}

std::vector<cxd> qam_modulate(const Bits& bits, const Constellation& c) {
  const int bps = c.bits_per_symbol;
  if (bits.size() % static_cast<size_t>(bps) != 0)
    throw std::invalid_argument("qam_modulate: bit count not divisible by bits_per_symbol");
  std::vector<cxd> out(bits.size() / bps);
  for (size_t s = 0; s < out.size(); ++s) {
    std::uint32_t label = 0;
    for (int b = 0; b < bps; ++b) label = (label << 1) | (bits[s * bps + b] & 1u);
    out[s] = c.points[label];
  }
  return out;
}

Bits qam_demodulate(const std::vector<cxd>& symbols, const Constellation& c) {
  const int bps = c.bits_per_symbol;
  Bits out(symbols.size() * bps);
  for (size_t s = 0; s < symbols.size(); ++s) {
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t m = 0; m < c.points.size(); ++m) {
      const double d = std::norm(symbols[s] - c.points[m]);
      if (d < best_d) {  // strict: ties keep the lowest index
        best_d = d;
        best = m;
      }
    }
    const std::uint32_t label = c.bit_labels[best];
    for (int b = 0; b < bps; ++b)
      out[s * bps + b] = static_cast<std::uint8_t>((label >> (bps - 1 - b)) & 1u);
  }
  return out;
}

VecXc ofdm_modulate(const VecXc& d, const MatXc& F, int cp_len) {
  const int K = static_cast<int>(F.rows());
  if (d.size() != K) throw std::invalid_argument("ofdm_modulate: block length != K");
  if (cp_len < 0 || cp_len > K)
    throw std::invalid_argument("ofdm_modulate: cp_len must be in [0, K]");
  const VecXc x = F.adjoint() * d;
  VecXc out(K + cp_len);
  if (cp_len > 0) out.head(cp_len) = x.tail(cp_len);
  out.tail(K) = x;
  return out;
}

Precoder precoder_matrix(int K, int cp_len, int J) {
  if (K < 1 || cp_len < 0 || cp_len > K || J < 1)
    throw std::invalid_argument("precoder_matrix: invalid dimensions");
  Precoder p;
  p.F = dft_matrix(K);
  const MatXc Fh = p.F.adjoint();
  p.W.resize(K + cp_len, K);
  if (cp_len > 0) p.W.topRows(cp_len) = Fh.bottomRows(cp_len);
  p.W.bottomRows(K) = Fh;
  p.W_tilde = MatXc::Zero(static_cast<Eigen::Index>(J) * (K + cp_len),
                          static_cast<Eigen::Index>(J) * K);
  for (int j = 0; j < J; ++j)
    p.W_tilde.block(static_cast<Eigen::Index>(j) * (K + cp_len),
                    static_cast<Eigen::Index>(j) * K, K + cp_len, K) = p.W;
  return p;
}

VecXc freq_response(const VecXc& taps, int K) {
  const int L = static_cast<int>(taps.size());
  if (L > K) throw std::invalid_argument("freq_response: more taps than subcarriers");
  VecXc H(K);
  for (int k = 0; k < K; ++k) {
    cxd acc{0.0, 0.0};
    for (int l = 0; l < L; ++l) {
      const double phase = -2.0 * kPi * k * l / K;
      acc += taps[l] * cxd{std::cos(phase), std::sin(phase)};
    }
    H[k] = acc;
  }
  return H;
}

MatXc circulant_matrix(const VecXc& taps, int K) {
  const int L = static_cast<int>(taps.size());
  if (L > K) throw std::invalid_argument("circulant_matrix: more taps than subcarriers");
  MatXc C = MatXc::Zero(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) {
      const int idx = ((a - b) % K + K) % K;
      if (idx < L) C(a, b) = taps[idx];
    }
  return C;
}

}  // namespace ofdmsim
