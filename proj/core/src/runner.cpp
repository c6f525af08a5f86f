#include "ofdmsim/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace ofdmsim {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  if (n == 0) return 0.0;
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

std::string render_csv(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  std::string out =
      "seed,snr_db,packets,windows_used,estimator_L,true_L,doppler_fdT,csi_mode,"
      "nmse,ber,residual\n";
  for (const TrialRecord& r : records) {
    out += std::to_string(r.seed);
    out += ',';
    out += fmt_real(r.snr_db);
    out += ',';
    out += std::to_string(r.packets);
    out += ',';
    out += std::to_string(r.windows_used);
    out += ',';
    out += std::to_string(r.estimator_L);
    out += ',';
    out += std::to_string(r.true_L);
    out += ',';
    out += fmt_real(r.doppler_fdT);
    out += ',';
    out += to_string(r.csi_mode);
    out += ',';
    out += fmt_real(r.nmse);
    out += ',';
    out += fmt_real(r.ber);
    out += ',';
    out += fmt_real(r.residual);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  write_file(path, render_csv(records));
}

std::string summary_table(const std::vector<TrialRecord>& records) {
  // group by (snr_db, estimator_L), preserving sweep order
  std::vector<std::pair<double, int>> keys;
  std::map<std::pair<double, int>, std::pair<std::vector<double>, std::vector<double>>> cells;
  for (const TrialRecord& r : records) {
    const std::pair<double, int> key{r.snr_db, r.estimator_L};
    if (!cells.count(key)) keys.push_back(key);
    cells[key].first.push_back(r.nmse);
    cells[key].second.push_back(r.ber);
  }
  std::ostringstream os;
  os << "  snr_db  est_L  trials   median_nmse    median_ber\n";
  for (const auto& key : keys) {
    const auto& [nmses, bers] = cells[key];
    char line[160];
    std::snprintf(line, sizeof line, "%8.6g  %5d  %6zu  %12.6g  %12.6g\n", key.first,
                  key.second, nmses.size(), median(nmses), median(bers));
    os << line;
  }
  return os.str();
}

int run_command(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  try {
    spec = parse_config_file(opt.config_path);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
  if (opt.seed_override) spec.base.seed = *opt.seed_override;

  // fail before computing if the output location is not writable
  const bool existed = std::filesystem::exists(opt.out_csv);
  {
    std::ofstream probe(opt.out_csv, std::ios::binary | std::ios::app);
    if (!probe) {
      err << "output error: cannot open '" << opt.out_csv << "' for writing\n";
      return 1;
    }
  }

  SweepResult result;
  try {
    result = run_sweep(spec.base, spec.axes, spec.csi, opt.jobs);
  } catch (const std::exception& e) {
    err << "sweep error: " << e.what() << "\n";
    return 1;
  }

  try {
    write_file(opt.out_csv + ".manifest", format_manifest(spec, utc_timestamp()));
    if (!result.records.empty()) {
      emit_csv(result.records, opt.out_csv);
    } else if (!existed) {
      std::filesystem::remove(opt.out_csv);  // drop the writability probe
    }
    if (!result.errors.empty()) {
      std::string report;
      for (const auto& [idx, what] : result.errors) {
        report += "cell " + std::to_string(idx) + ": " + what + "\n";
        err << "trial error in cell " << idx << ": " << what << "\n";
      }
      write_file(opt.out_csv + ".errors.txt", report);
    }
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return 1;
  }

  out << summary_table(result.records);
  out << result.records.size() << " records -> " << opt.out_csv << "\n";
  if (!result.errors.empty()) {
    err << result.errors.size() << " cell(s) failed, see " << opt.out_csv
        << ".errors.txt\n";
    return 2;
  }
  return 0;
}

int validate_command(const std::string& config_path, std::ostream& out,
                     std::ostream& err) {
  try {
    const RunSpec spec = parse_config_file(config_path);
    const auto cells = enumerate_cells(spec.base, spec.axes);
    const SystemConfig& cfg = spec.base;
    out << "OK: " << config_path << "\n";
    out << "  antennas        " << cfg.tx_antennas << "x" << cfg.rx_antennas << "\n";
    out << "  window length   " << cfg.window_len() << "\n";
    out << "  signal subspace " << cfg.signal_dim() << "\n";
    out << "  noise subspace  " << cfg.noise_dim() << " (base est_taps)\n";
    out << "  windows/packet  " << cfg.windows_per_packet() << "\n";
    out << "  grid cells      " << cells.size() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ofdmsim
