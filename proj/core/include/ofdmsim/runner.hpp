#pragma once

#include "ofdmsim/configfile.hpp"

#include <iosfwd>
#include <optional>

namespace ofdmsim {

inline constexpr const char* kToolName = "ofdmsim";
inline constexpr const char* kToolVersion = "0.1.0";

/// CSV schema, fixed:
/// seed,snr_db,packets,windows_used,estimator_L,true_L,doppler_fdT,csi_mode,nmse,ber,residual
/// Reals carry 17 significant digits; rows are in sweep order; LF endings.
std::string render_csv(const std::vector<TrialRecord>& records);

// Renders and writes in one shot (no partial files). Rejects empty input;
// I/O failures surface the path and cause.
void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);

// Median NMSE and BER per (snr_db, estimator_L) cell.
std::string summary_table(const std::vector<TrialRecord>& records);

struct RunOptions {
  std::string config_path;
  std::string out_csv;
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
};

// The `run` subcommand: parse + validate, execute the sweep, write
// `<out>` (CSV) and `<out>.manifest`, print the summary table. Returns 0 on
// success, 1 on config/I-O errors, 2 when any trial failed (failed cells are
// listed on stderr and in `<out>.errors.txt`; the run continues).
int run_command(const RunOptions& opt, std::ostream& out, std::ostream& err);

// The `validate` subcommand: parse + validate only, print derived dimensions.
int validate_command(const std::string& config_path, std::ostream& out,
                     std::ostream& err);

}  // namespace ofdmsim
