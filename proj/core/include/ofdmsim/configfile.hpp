#pragma once

#include "ofdmsim/rxchain.hpp"

#include <stdexcept>
#include <string>

namespace ofdmsim {

/// Parse/validation failure with the offending key or line in the message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs: the base scenario, the sweep axes and the CSI mode.
struct RunSpec {
  SystemConfig base;
  SweepAxes axes;
  CsiMode csi = CsiMode::BlindPilot;
};

// Sectioned key=value text ([system], [channel], [estimator], [sweep] and the
// informational [manifest]); '#' starts a comment, keys may appear once per
// section. Unknown keys/sections, duplicates, missing required keys and every
// SystemConfig invariant (including g >= 1 and P >= L for every grid cell)
// are reported as ConfigError.
RunSpec parse_config_text(const std::string& text);
RunSpec parse_config_file(const std::string& path);

// Normalized manifest: all keys explicit, plus a [manifest] section carrying
// tool name, version, creation timestamp and the cell count. A manifest is
// itself a valid config, so re-running it reproduces the sweep bit-for-bit.
std::string format_manifest(const RunSpec& spec, const std::string& created_utc);

}  // namespace ofdmsim
