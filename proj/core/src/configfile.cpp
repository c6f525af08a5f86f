#include "ofdmsim/configfile.hpp"
#include "ofdmsim/runner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ofdmsim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
  std::map<std::string, Section> sections;
};

RawConfig tokenize(const std::string& text) {
  static const std::set<std::string> known_sections = {"system", "channel", "estimator",
                                                       "sweep", "manifest"};
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (!known_sections.count(section))
        throw ConfigError("unknown section [" + section + "] at line " +
                          std::to_string(lineno));
      raw.sections[section];  // a section may legitimately be empty
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    if (section.empty())
      throw ConfigError("key outside of any section at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    auto [it, inserted] = raw.sections[section].emplace(key, Entry{value, lineno});
    if (!inserted)
      throw ConfigError("duplicate key '" + key + "' in [" + section + "] at line " +
                        std::to_string(lineno) + " (first defined at line " +
                        std::to_string(it->second.line) + ")");
  }
  return raw;
}

// Typed access to one section; consumed keys are tracked so that leftovers
// can be reported as unknown.
class SectionView {
 public:
  SectionView(const RawConfig& raw, std::string name) : name_(std::move(name)) {
    if (auto it = raw.sections.find(name_); it != raw.sections.end()) sec_ = &it->second;
  }

  bool has(const std::string& key) const { return sec_ && sec_->count(key); }

  std::string required(const std::string& key) {
    if (!has(key))
      throw ConfigError("missing required key '" + key + "' in [" + name_ + "]");
    return consume(key);
  }

  std::string optional(const std::string& key, const std::string& fallback) {
    return has(key) ? consume(key) : fallback;
  }

  void finish() const {
    if (!sec_) return;
    for (const auto& [key, entry] : *sec_)
      if (!consumed_.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "] (line " +
                          std::to_string(entry.line) + ")");
  }

 private:
  std::string consume(const std::string& key) {
    consumed_.insert(key);
    return sec_->at(key).value;
  }

  std::string name_;
  const Section* sec_ = nullptr;
  std::set<std::string> consumed_;
};

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected unsigned integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected real number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& key, const std::string& v) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) items.push_back(cur);
  }
  if (items.empty()) throw ConfigError("key '" + key + "': empty list");
  return items;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& item : split_list(key, v)) out.push_back(parse_real(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& item : split_list(key, v))
    out.push_back(static_cast<int>(parse_int(key, item)));
  return out;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunSpec parse_config_text(const std::string& text) {
  const RawConfig raw = tokenize(text);
  RunSpec spec;
  SystemConfig& cfg = spec.base;

  SectionView system(raw, "system");
  cfg.tx_antennas = static_cast<int>(parse_int("tx_antennas", system.required("tx_antennas")));
  cfg.rx_antennas = static_cast<int>(parse_int("rx_antennas", system.required("rx_antennas")));
  cfg.subcarriers = static_cast<int>(parse_int("subcarriers", system.required("subcarriers")));
  cfg.cp_len = static_cast<int>(parse_int("cp_len", system.required("cp_len")));
  const std::string con = system.required("constellation");
  if (con == "qpsk") cfg.constellation = ConstellationKind::QPSK;
  else if (con == "qam16") cfg.constellation = ConstellationKind::QAM16;
  else throw ConfigError("key 'constellation': expected qpsk or qam16, got '" + con + "'");
  cfg.blocks_per_packet =
      static_cast<int>(parse_int("blocks_per_packet", system.required("blocks_per_packet")));
  cfg.signal_power = parse_real("signal_power", system.optional("signal_power", "1.0"));
  cfg.packets = static_cast<int>(parse_int("packets", system.optional("packets", "1")));
  cfg.seed = parse_u64("seed", system.optional("seed", "1"));
  system.finish();

  SectionView channel(raw, "channel");
  cfg.chan_taps = static_cast<int>(parse_int("taps", channel.required("taps")));
  const std::string pdp = channel.optional("pdp", "uniform");
  if (pdp == "uniform") {
    cfg.pdp = PdpKind::Uniform;
  } else if (pdp.rfind("exp:", 0) == 0) {
    cfg.pdp = PdpKind::Exponential;
    cfg.pdp_decay = parse_real("pdp", pdp.substr(4));
  } else {
    throw ConfigError("key 'pdp': expected uniform or exp:<decay>, got '" + pdp + "'");
  }
  cfg.doppler_fdT = parse_real("doppler_fdT", channel.optional("doppler_fdT", "0"));
  spec.axes.taps_follow =
      parse_bool("taps_follow_sweep", channel.optional("taps_follow_sweep", "false"));
  channel.finish();

  SectionView estimator(raw, "estimator");
  cfg.smoothing = static_cast<int>(parse_int("smoothing", estimator.required("smoothing")));
  cfg.est_taps = static_cast<int>(
      parse_int("taps", estimator.optional("taps", std::to_string(cfg.chan_taps))));
  const std::string csi = estimator.optional("csi_mode", "blind_pilot");
  if (csi == "blind") spec.csi = CsiMode::Blind;
  else if (csi == "blind_pilot") spec.csi = CsiMode::BlindPilot;
  else if (csi == "perfect") spec.csi = CsiMode::Perfect;
  else throw ConfigError("key 'csi_mode': expected blind, blind_pilot or perfect, got '" +
                         csi + "'");
  const std::string eq = estimator.optional("equalizer", "zf");
  if (eq == "zf") cfg.equalizer = EqualizerKind::ZF;
  else if (eq == "mmse") cfg.equalizer = EqualizerKind::MMSE;
  else throw ConfigError("key 'equalizer': expected zf or mmse, got '" + eq + "'");
  estimator.finish();

  SectionView sweep(raw, "sweep");
  spec.axes.snr_db = parse_real_list("snr_db", sweep.required("snr_db"));
  spec.axes.est_taps = sweep.has("estimator_taps")
                           ? parse_int_list("estimator_taps", sweep.optional("estimator_taps", ""))
                           : std::vector<int>{cfg.est_taps};
  spec.axes.doppler_fdT =
      sweep.has("doppler_fdT")
          ? parse_real_list("doppler_fdT", sweep.optional("doppler_fdT", ""))
          : std::vector<double>{cfg.doppler_fdT};
  spec.axes.seeds = static_cast<int>(parse_int("seeds", sweep.optional("seeds", "1")));
  if (spec.axes.seeds < 1) throw ConfigError("key 'seeds': must be >= 1");
  sweep.finish();

  SectionView manifest(raw, "manifest");
  manifest.optional("tool", "");
  manifest.optional("version", "");
  manifest.optional("created", "");
  manifest.optional("cells", "");
  manifest.finish();

  // validate every grid cell, so that g >= 1 and P >= L hold for each
  // (snr, taps, doppler, seed) combination the sweep will visit
  try {
    for (const SweepCell& cell : enumerate_cells(spec.base, spec.axes)) cell.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

RunSpec parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_manifest(const RunSpec& spec, const std::string& created_utc) {
  const SystemConfig& cfg = spec.base;
  std::ostringstream os;
  os << "[manifest]\n";
  os << "tool = " << kToolName << "\n";
  os << "version = " << kToolVersion << "\n";
  os << "created = " << created_utc << "\n";
  os << "cells = " << enumerate_cells(cfg, spec.axes).size() << "\n";
  os << "\n[system]\n";
  os << "tx_antennas = " << cfg.tx_antennas << "\n";
  os << "rx_antennas = " << cfg.rx_antennas << "\n";
  os << "subcarriers = " << cfg.subcarriers << "\n";
  os << "cp_len = " << cfg.cp_len << "\n";
  os << "constellation = " << to_string(cfg.constellation) << "\n";
  os << "blocks_per_packet = " << cfg.blocks_per_packet << "\n";
  os << "signal_power = " << fmt_real(cfg.signal_power) << "\n";
  os << "packets = " << cfg.packets << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "\n[channel]\n";
  os << "taps = " << cfg.chan_taps << "\n";
  if (cfg.pdp == PdpKind::Uniform)
    os << "pdp = uniform\n";
  else
    os << "pdp = exp:" << fmt_real(cfg.pdp_decay) << "\n";
  os << "doppler_fdT = " << fmt_real(cfg.doppler_fdT) << "\n";
  os << "taps_follow_sweep = " << (spec.axes.taps_follow ? "true" : "false") << "\n";
  os << "\n[estimator]\n";
  os << "smoothing = " << cfg.smoothing << "\n";
  os << "taps = " << cfg.est_taps << "\n";
  os << "csi_mode = " << to_string(spec.csi) << "\n";
  os << "equalizer = " << to_string(cfg.equalizer) << "\n";
  os << "\n[sweep]\n";
  os << "snr_db = ";
  for (size_t i = 0; i < spec.axes.snr_db.size(); ++i)
    os << (i ? "," : "") << fmt_real(spec.axes.snr_db[i]);
  os << "\nestimator_taps = ";
  for (size_t i = 0; i < spec.axes.est_taps.size(); ++i)
    os << (i ? "," : "") << spec.axes.est_taps[i];
  os << "\ndoppler_fdT = ";
  for (size_t i = 0; i < spec.axes.doppler_fdT.size(); ++i)
    os << (i ? "," : "") << fmt_real(spec.axes.doppler_fdT[i]);
  os << "\nseeds = " << spec.axes.seeds << "\n";
  return os.str();
}

}  // namespace ofdmsim
