#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fec/analysis.hpp"
#include "fec/block_recovery.hpp"
#include "fec/bwpc.hpp"
#include "fec/rng.hpp"
#include "fec/sim.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConstruction = 3;
constexpr int kExitIo = 4;

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return &std::cout;
    file.open(path);
    if (!file) throw std::ios_base::failure("cannot open output file: " + path);
    return &file;
}

int cmd_simulate(const std::string& config_path, const std::string& output_override) {
    fec::ExperimentConfig cfg = fec::load_config_file(config_path);
    std::string out_path = output_override.empty() ? cfg.output : output_override;
    std::ofstream file;
    std::ostream* os = open_output(out_path, file);
    fec::run_experiment(cfg, os);
    return 0;
}

// Analytic curves only: same CSV schema with zero trial counts.
int cmd_analyze(const std::string& config_path, const std::string& output_override) {
    fec::ExperimentConfig cfg = fec::load_config_file(config_path);
    std::string out_path = output_override.empty() ? cfg.output : output_override;
    std::ofstream file;
    std::ostream* os = open_output(out_path, file);
    *os << fec::csv_header() << '\n';
    cfg.analytic = true;
    cfg.max_trials = 1;  // values come from the analysis module, not trials
    fec::ExperimentConfig probe = cfg;
    probe.min_failures = 1;
    fec::SimReport rep = fec::run_experiment(probe, nullptr);
    for (auto& pt : rep.points) {
        pt.trials = 0;
        pt.inner_failures = pt.e2e_failures = pt.miss_corrections = 0;
        pt.wilson_lo = 0.0;
        pt.wilson_hi = 1.0;
        pt.seconds = 0.0;
        *os << fec::csv_row(rep.scheme, pt) << '\n';
    }
    return 0;
}

int cmd_recover(const std::string& store_path, std::vector<size_t> fail_indices,
                size_t random_failures, uint64_t seed) {
    std::ifstream in(store_path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open block store: " + store_path);
    fec::BlockStore bs = fec::BlockStore::load(in);

    fec::RaptorCode code(fec::raptor_params_for(bs.geom, bs.lt_mode, bs.seed));
    const size_t source_words = bs.geom.word_count();
    const size_t parity_words = bs.geom.parity_symbols / bs.geom.symbols_per_word;
    const size_t total_words = source_words + parity_words;

    if (random_failures > 0) {
        fec::Rng rng(seed);
        std::vector<size_t> all(total_words);
        for (size_t i = 0; i < total_words; ++i) all[i] = i;
        for (size_t i = 0; i < random_failures && i < total_words; ++i) {
            size_t j = i + size_t(rng.below(total_words - i));
            std::swap(all[i], all[j]);
            fail_indices.push_back(all[i]);
        }
    }

    std::vector<fec::StoredWord> stored(total_words);
    for (size_t i = 0; i < source_words; ++i) stored[i].bytes = bs.words[i];
    for (size_t w = 0; w < parity_words; ++w) {
        auto& bytes = stored[source_words + w].bytes;
        for (size_t s = 0; s < bs.geom.symbols_per_word; ++s) {
            const auto& sym = bs.parities[w * bs.geom.symbols_per_word + s];
            bytes.insert(bytes.end(), sym.begin(), sym.end());
        }
    }
    for (size_t i : fail_indices) {
        if (i >= total_words) throw fec::ConfigError("fail: word index out of range");
        stored[i].failed = true;
    }

    size_t reads = 0;
    auto recovered = fec::recover_block(bs.geom, code, stored, &reads);
    std::cout << "failed_words:";
    for (size_t i : fail_indices) std::cout << ' ' << i;
    std::cout << "\nreads_performed: " << reads << '\n';
    if (!recovered) {
        std::cout << "result: FAILED (not enough parity surplus)\n";
        return 0;
    }
    std::cout << "result: recovered " << recovered->size() << " source words\n";
    for (const auto& r : *recovered) {
        std::cout << "word " << r.index << ":";
        for (uint8_t b : r.bytes) {
            char buf[4];
            std::snprintf(buf, sizeof(buf), " %02x", b);
            std::cout << buf;
        }
        bool match = r.bytes == bs.words[r.index];
        std::cout << (match ? "  (matches stored copy)" : "  (differs from stored copy)") << '\n';
    }
    return 0;
}

int cmd_roundtrip(const std::string& config_path, uint64_t trial) {
    fec::ExperimentConfig cfg = fec::load_config_file(config_path);
    if (cfg.scheme != fec::Scheme::BwPcRaptor)
        throw fec::ConfigError("scheme: roundtrip currently traces BwPcRaptor configs");
    auto gf_of = [](const fec::BchSpec& s) {
        auto gf = std::make_shared<fec::GaloisField>(
            s.m, fec::GaloisField::default_primitive_poly(s.m));
        return std::make_shared<fec::BchCode>(gf, s.n, s.t);
    };
    fec::BwPcLayout layout = fec::make_layout(cfg.n_b, cfg.n_i, gf_of(cfg.row_code),
                                              gf_of(cfg.col_code), cfg.parity_blocks);
    fec::RaptorCode code(fec::raptor_params_for(layout, cfg.lt_mode, cfg.master_seed));

    fec::Rng data_rng(cfg.master_seed, 0xb17, 0);
    std::vector<uint8_t> user(layout.user_bits());
    for (auto& b : user) b = uint8_t(data_rng.next() & 1);
    fec::PageBits page = fec::encode_page(layout, code, user);

    const double p_e = cfg.grid.front();
    fec::Rng rng(cfg.master_seed, 0, trial);
    fec::PageBits rx = page;
    fec::bsc_corrupt_inplace(rx, p_e, rng.next());
    size_t flipped = 0;
    for (size_t i = 0; i < rx.size(); ++i) flipped += rx[i] != page[i];

    std::cout << "layout: " << layout.grid_rows() << "x" << layout.grid_cols()
              << " grid, n_b=" << layout.n_b << ", n_i=" << layout.n_i
              << ", parity_blocks=" << layout.parity_blocks << '\n';
    std::cout << "page_bits: " << layout.page_bits() << ", p_e=" << p_e
              << ", channel flips: " << flipped << '\n';

    fec::PageDecodeResult res =
        fec::decode_page_pipeline(layout, code, rx, cfg.retry_half_detected);
    std::cout << "inner: iterations=" << res.inner.iterations
              << (res.inner.all_clean ? ", all clean" : ", residual failures") << '\n';
    if (!res.inner.all_clean) {
        std::cout << "failed_rows:";
        for (size_t r : res.inner.failed_rows) std::cout << ' ' << r;
        std::cout << "\nfailed_cols:";
        for (size_t c : res.inner.failed_cols) std::cout << ' ' << c;
        std::cout << "\nerased_symbols: "
                  << res.inner.failed_rows.size() * res.inner.failed_cols.size() * layout.n_i
                  << '\n';
    }
    if (res.retried_reduced_sphere) std::cout << "half-detected: retried with reduced sphere\n";
    if (!res.ok) {
        std::cout << "outcome: PAGE FAILURE (outer decoder could not recover)\n";
    } else if (res.user_bits == user) {
        std::cout << "outcome: user data recovered exactly\n";
    } else {
        std::cout << "outcome: MISS-CORRECTION (valid-looking but wrong data)\n";
    }
    return 0;
}

// The 4-source worked example: one LT parity over a 4x4 precode, s4 erased,
// recovery XORs received symbols 2 and 5.
int cmd_vectors() {
    const char* rows[5] = {"0101", "1010", "0100", "0011", "1001"};
    fec::BitMatrix a(5, 4);
    for (size_t r = 0; r < 5; ++r)
        for (size_t c = 0; c < 4; ++c)
            if (rows[r][c] == '1') a.set(r, c);
    fec::RaptorCode code(a, 0, 4, 5, 1);

    std::cout << "# worked example: K=4, N=5, one LT parity\n";
    std::cout << "A matrix rows:";
    for (auto* r : rows) std::cout << ' ' << r;
    std::cout << '\n';

    std::cout << "parity LUT b^p (source symbols XORed into r1):";
    for (size_t i = 0; i < 4; ++i) std::cout << ' ' << int(code.parity_luts()[0].get(i));
    std::cout << '\n';

    fec::ErasurePattern pat;
    pat.erased = {3};  // s4
    auto luts = code.build_erasure_luts(pat);
    std::cout << "erasure LUT b^e for s4:";
    for (size_t i = 0; i < 5; ++i) std::cout << ' ' << int((*luts)[0].get(i));
    std::cout << '\n';

    std::vector<fec::Symbol> source = {{0x0a}, {0x0b}, {0x0c}, {0x0d}};
    auto coded = code.encode(source);
    std::cout << "encode [0a 0b 0c 0d] ->";
    for (const auto& s : coded) {
        char buf[4];
        std::snprintf(buf, sizeof(buf), " %02x", s[0]);
        std::cout << buf;
    }
    std::cout << '\n';

    uint8_t rec = 0;
    for (size_t i = 0; i < 5; ++i)
        if ((*luts)[0].get(i)) rec ^= coded[i][0];
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02x", rec);
    std::cout << "XOR of flagged received symbols = " << buf
              << (rec == 0x0d ? "  (recovers s4)" : "  (MISMATCH)") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FEC codec toolkit: Raptor block recovery, BW-PC pages, analysis, simulation"};
    app.require_subcommand(1);

    std::string config_path, output_override;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo sweep per config");
    simulate->add_option("-c,--config", config_path, "JSON experiment config")->required();
    simulate->add_option("-o,--output", output_override, "CSV output path (default: config/stdout)");

    std::string an_config, an_output;
    auto* analyze = app.add_subcommand("analyze", "emit analytic curves for a config");
    analyze->add_option("-c,--config", an_config, "JSON experiment config")->required();
    analyze->add_option("-o,--output", an_output, "CSV output path (default: config/stdout)");

    std::string store_path;
    std::vector<size_t> fail_indices;
    size_t random_failures = 0;
    uint64_t recover_seed = 1;
    auto* recover = app.add_subcommand("recover", "block-recovery drill on a block store file");
    recover->add_option("store", store_path, "FBLK block store file")->required();
    recover->add_option("--fail", fail_indices, "word indices to mark failed");
    recover->add_option("--random", random_failures, "mark this many random words failed");
    recover->add_option("--seed", recover_seed, "seed for --random");

    std::string rt_config;
    uint64_t rt_trial = 0;
    auto* roundtrip = app.add_subcommand("roundtrip", "single encode/corrupt/decode trace");
    roundtrip->add_option("-c,--config", rt_config, "JSON experiment config")->required();
    roundtrip->add_option("--trial", rt_trial, "trial index (selects the noise seed)");

    app.add_subcommand("vectors", "emit golden vectors incl. the worked LUT example");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, output_override);
        if (analyze->parsed()) return cmd_analyze(an_config, an_output);
        if (recover->parsed()) return cmd_recover(store_path, fail_indices, random_failures,
                                                  recover_seed);
        if (roundtrip->parsed()) return cmd_roundtrip(rt_config, rt_trial);
        return cmd_vectors();
    } catch (const fec::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "construction error: " << e.what() << '\n';
        return kExitConstruction;
    }
    return 0;
}
