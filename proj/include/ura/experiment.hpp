// End-to-end experiment orchestration: encode -> per-section channel ->
// inner decode -> tree decode -> PUPE, over a trial x Eb/N0 grid, with
// deterministic derived random streams and CSV persistence.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ura/codebook.hpp"
#include "ura/decoders.hpp"

namespace ura {

inline constexpr int kConfigSchemaVersion = 1;

// Decoder names accepted by the harness.
bool is_known_decoder(const std::string& name);

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;

  CodebookKind kind = CodebookKind::SubsampledFourier;
  arma::uword rows = 0;  // D, channel uses per section

  int total_info_bits = 0;  // B
  int sections = 0;         // L
  int section_bits = 0;     // J, N = 2^J
  std::vector<int> parity_alloc;

  int active_users = 0;  // K
  int list_margin = 0;   // K_delta, candidate list size T = K + K_delta
  arma::uword antennas = 0;  // M

  std::vector<double> ebn0_grid_db;
  std::string decoder = "accml";
  DecoderConfig decoder_cfg;  // k_hat == 0 means "use K"
  int trials = 1;
  std::uint64_t master_seed = 0;
  double lsfc = 1.0;

  // Writes the timing column as 0 so repeated runs are byte-identical.
  bool redact_timing = false;

  arma::uword codebook_cols() const {
    return arma::uword{1} << section_bits;
  }
  int list_size() const { return active_users + list_margin; }
};

// Throws std::invalid_argument with a descriptive message; called by
// run_experiment before any trial starts.
void validate_config(const ExperimentConfig& cfg);

struct ResultRow {
  std::string decoder;
  std::string codebook_kind;
  arma::uword D = 0;
  int J = 0;
  arma::uword N = 0;
  int B = 0;
  int L = 0;
  std::string parity;  // pipe-separated p_1|..|p_L
  int K = 0;
  int K_delta = 0;
  int T = 0;
  arma::uword M = 0;
  int trials = 0;
  std::uint64_t master_seed = 0;
  double ebn0_db = 0.0;
  double sigma2 = 0.0;
  int trial = 0;
  double p_md = 0.0;
  double p_fa = 0.0;
  double p_e = 0.0;
  double decode_seconds_per_section = 0.0;
  double screen_size_mean = 0.0;
  double sweeps_mean = 0.0;
};

// One row per (ebn0 grid point, trial), ordered by (grid index, trial).
// Worker count is capped by the URA_WORKERS environment variable.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// JSON round trip. A config file holds either one config object or an array
// of them (rows from an array run are concatenated in order).
ExperimentConfig experiment_config_from_json(const std::string& text);
std::vector<ExperimentConfig> load_experiment_configs(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

void write_result_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::string result_csv_string(const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_result_csv(std::istream& in);
std::vector<ResultRow> load_result_csv(const std::string& path);

struct SummaryRow {
  std::string decoder;
  int K = 0;
  bool achieved = false;
  double min_ebn0_db = 0.0;  // meaningful only when achieved
};

// Smallest grid Eb/N0 whose mean p_e meets the target, per (decoder, K).
std::vector<SummaryRow> min_ebn0_for_target(const std::vector<ResultRow>& rows,
                                            double target_pe = 0.05);

// The uplink setup of the paper-scale URA figure: K in {50,...,150}, M = 64,
// D = 120, L = 12, B = 50, J = 12, parity 0,7,8,...,8,11,12, T = K + 50,
// rho = 1.05. Grid and trial count are the caller's.
std::vector<ExperimentConfig> fig3b_preset(const std::string& decoder,
                                           std::vector<double> ebn0_grid_db,
                                           int trials,
                                           std::uint64_t master_seed);

}  // namespace ura
