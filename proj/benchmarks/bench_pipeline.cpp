#include "ofdmsim/rxchain.hpp"

#include <benchmark/benchmark.h>

using namespace ofdmsim;

namespace {

SystemConfig paper_cfg() {
  SystemConfig cfg;
  cfg.tx_antennas = 4;
  cfg.rx_antennas = 4;
  cfg.subcarriers = 16;
  cfg.cp_len = 8;
  cfg.chan_taps = 8;
  cfg.est_taps = 8;
  cfg.smoothing = 2;
  cfg.blocks_per_packet = 400;  // 200 covariance windows (window length is 160)
  cfg.packets = 1;
  cfg.noise_power = 1e-2;
  cfg.equalizer = EqualizerKind::MMSE;
  cfg.seed = 1;
  return cfg;
}

struct Fixture {
  SystemConfig cfg = paper_cfg();
  Precoder pre = precoder_matrix(cfg.subcarriers, cfg.cp_len, cfg.smoothing);
  ChannelSet ch;
  std::vector<VecXc> windows;
  SampleCovariance cov;
  NoiseSubspace ns;

  Fixture() {
    Rng rng = make_rng(1);
    ch = draw_channel(rng, cfg, make_pdp(cfg));
    const Constellation con = Constellation::make(cfg.constellation);
    const int K = cfg.subcarriers, blk = cfg.block_len(), B = cfg.blocks_per_packet;
    std::vector<VecXc> s(4, VecXc(static_cast<Eigen::Index>(B) * blk));
    Bits bits(static_cast<size_t>(K) * con.bits_per_symbol);
    for (int b = 0; b < B; ++b)
      for (int i = 0; i < 4; ++i) {
        for (auto& bit : bits) bit = static_cast<std::uint8_t>(rng() & 1u);
        const auto syms = qam_modulate(bits, con);
        VecXc d(K);
        for (int k = 0; k < K; ++k) d[k] = syms[static_cast<size_t>(k)];
        s[static_cast<size_t>(i)].segment(static_cast<Eigen::Index>(b) * blk, blk) =
            ofdm_modulate(d, pre.F, cfg.cp_len);
      }
    const RxStream rx = transmit(s, ch, NoiseModel{cfg.noise_power}, rng);
    windows = extract_windows(rx, cfg, 1 << 20);
    cov = sample_covariance(windows);
    ns = noise_subspace(eigendecompose(cov), cfg);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

static void BM_SampleCovariance(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    SampleCovariance cov = sample_covariance(f.windows);
    benchmark::DoNotOptimize(cov.matrix.data());
  }
}
BENCHMARK(BM_SampleCovariance)->Unit(benchmark::kMillisecond);

static void BM_Eigendecompose(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    EigenSystem es = eigendecompose(f.cov);
    benchmark::DoNotOptimize(es.vectors.data());
  }
}
BENCHMARK(BM_Eigendecompose)->Unit(benchmark::kMillisecond);

static void BM_QuadraticForm(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    QuadraticForm qf = build_quadratic_form(f.ns, f.pre, f.cfg);
    benchmark::DoNotOptimize(qf.Q.data());
  }
}
BENCHMARK(BM_QuadraticForm)->Unit(benchmark::kMillisecond);

static void BM_EstimateChannel(benchmark::State& state) {
  Fixture& f = fixture();
  const QuadraticForm qf = build_quadratic_form(f.ns, f.pre, f.cfg);
  for (auto _ : state) {
    ChannelEstimate est = estimate_channel(qf);
    benchmark::DoNotOptimize(est.h_vec.data());
  }
}
BENCHMARK(BM_EstimateChannel)->Unit(benchmark::kMillisecond);

static void BM_BlindTrial(benchmark::State& state) {
  SystemConfig cfg = paper_cfg();
  for (auto _ : state) {
    TrialRecord rec = run_trial(cfg, CsiMode::BlindPilot);
    benchmark::DoNotOptimize(rec.nmse);
  }
}
BENCHMARK(BM_BlindTrial)->Unit(benchmark::kMillisecond);

static void BM_OfdmModulate(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const MatXc F = dft_matrix(K);
  Rng rng = make_rng(2);
  std::normal_distribution<double> unit;
  VecXc d(K);
  for (int k = 0; k < K; ++k) d[k] = draw_cn(rng, unit, 1.0);
  for (auto _ : state) {
    VecXc x = ofdm_modulate(d, F, K / 4);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(K);
}
BENCHMARK(BM_OfdmModulate)->RangeMultiplier(2)->Range(16, 256)->Complexity();

BENCHMARK_MAIN();
