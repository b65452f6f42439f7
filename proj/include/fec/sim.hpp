#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fec/analysis.hpp"
#include "fec/block_recovery.hpp"
#include "fec/bwpc.hpp"
#include "fec/raptor.hpp"

namespace fec {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flip each bit independently with probability p_e; deterministic in
// (bits, p_e, trial_seed). Bit-per-entry buffers.
void bsc_corrupt_inplace(std::vector<uint8_t>& bits, double p_e, uint64_t trial_seed);
std::vector<uint8_t> bsc_corrupt(const std::vector<uint8_t>& bits, double p_e,
                                 uint64_t trial_seed);

struct ChannelModel {
    double p_e = 0.0;
    uint64_t master_seed = 1;
    uint64_t trial_seed(uint64_t point, uint64_t trial) const;
};

enum class Scheme { BlockRecovery, BwPcRaptor, LongBchBaseline, RaptorOnly };

const char* scheme_name(Scheme s);

struct BchSpec {
    unsigned m = 0;  // 0 means absent
    unsigned n = 0;
    unsigned t = 0;
};

// Grid semantics: for channel-driven schemes the grid holds raw BER values;
// with inject_erasures (RaptorOnly, BlockRecovery drills) it holds integer
// erasure counts.
struct ExperimentConfig {
    Scheme scheme = Scheme::RaptorOnly;
    std::vector<double> grid;
    uint64_t master_seed = 1;
    size_t max_trials = 1'000'000;
    size_t min_failures = 100;
    size_t workers = 1;
    std::string output;  // CSV path; empty means caller-supplied stream only
    LtMode lt_mode = LtMode::DenseRandom;
    bool analytic = true;
    bool inject_erasures = false;

    // RaptorOnly
    size_t raptor_k = 0, raptor_n = 0, symbol_bytes = 1;

    // BlockRecovery
    size_t pages = 0, words_per_page = 0, symbols_per_word = 1, parity_symbols = 0;
    BchSpec inner;

    // BwPcRaptor
    size_t n_b = 0, n_i = 1, parity_blocks = 0;
    BchSpec row_code, col_code;
    bool retry_half_detected = false;

    // LongBchBaseline (reuses words_per_page)
    BchSpec page_code;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

struct PointReport {
    double p_e = 0.0;  // grid value (raw BER, or erasure count when injecting)
    size_t trials = 0;
    size_t inner_failures = 0;
    size_t e2e_failures = 0;
    size_t miss_corrections = 0;
    double wilson_lo = 0.0, wilson_hi = 0.0;  // on the e2e frequency
    // Negative analytic values mean "not defined for this scheme".
    double analytic_p11 = -1.0;
    double analytic_pf_inner = -1.0;
    double analytic_p_raptor = -1.0;
    double seconds = 0.0;

    double inner_fail_freq() const { return trials ? double(inner_failures) / trials : 0.0; }
    double e2e_fail_freq() const { return trials ? double(e2e_failures) / trials : 0.0; }
    double miss_corr_freq() const { return trials ? double(miss_corrections) / trials : 0.0; }
};

struct SimReport {
    Scheme scheme = Scheme::RaptorOnly;
    std::vector<PointReport> points;
};

std::pair<double, double> wilson_interval(size_t failures, size_t trials);

std::string csv_header();
std::string csv_row(Scheme scheme, const PointReport& pt);

// Runs every grid point to its stop rule: min(max_trials, first trial count
// reaching min_failures). Per-trial seeds depend only on (master_seed, point,
// trial), so the report is identical for any worker count. Rows are appended
// to csv (when given) as each point completes.
SimReport run_experiment(const ExperimentConfig& config, std::ostream* csv = nullptr);

}  // namespace fec
