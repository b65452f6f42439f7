#include "fec/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fec/rng.hpp"

namespace fec {

using nlohmann::json;

void bsc_corrupt_inplace(std::vector<uint8_t>& bits, double p_e, uint64_t trial_seed) {
    if (p_e <= 0.0 || bits.empty()) return;
    Rng rng(trial_seed);
    if (p_e >= 1.0) {
        for (auto& b : bits) b ^= 1;
        return;
    }
    // geometric gaps between flips
    const double denom = std::log1p(-p_e);
    size_t i = 0;
    for (;;) {
        const double u = rng.uniform();
        const double skip = std::floor(std::log1p(-u) / denom);
        if (skip >= double(bits.size())) break;
        i += size_t(skip);
        if (i >= bits.size()) break;
        bits[i] ^= 1;
        ++i;
    }
}

std::vector<uint8_t> bsc_corrupt(const std::vector<uint8_t>& bits, double p_e,
                                 uint64_t trial_seed) {
    std::vector<uint8_t> out = bits;
    bsc_corrupt_inplace(out, p_e, trial_seed);
    return out;
}

uint64_t ChannelModel::trial_seed(uint64_t point, uint64_t trial) const {
    return Rng(master_seed, point, trial).next();
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::BlockRecovery: return "BlockRecovery";
        case Scheme::BwPcRaptor: return "BwPcRaptor";
        case Scheme::LongBchBaseline: return "LongBchBaseline";
        case Scheme::RaptorOnly: return "RaptorOnly";
    }
    return "?";
}

namespace {

Scheme scheme_from_name(const std::string& name) {
    if (name == "BlockRecovery") return Scheme::BlockRecovery;
    if (name == "BwPcRaptor") return Scheme::BwPcRaptor;
    if (name == "LongBchBaseline") return Scheme::LongBchBaseline;
    if (name == "RaptorOnly") return Scheme::RaptorOnly;
    throw ConfigError("scheme: unknown value '" + name + "'");
}

template <typename T>
T require_field(const json& j, const char* name) {
    if (!j.contains(name)) throw ConfigError(std::string(name) + ": missing required field");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(name) + ": wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const char* name, T fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(name) + ": wrong type");
    }
}

BchSpec bch_spec_field(const json& j, const char* name, bool required) {
    if (!j.contains(name)) {
        if (required) throw ConfigError(std::string(name) + ": missing required field");
        return {};
    }
    const json& b = j.at(name);
    BchSpec spec;
    spec.m = require_field<unsigned>(b, "m");
    spec.n = require_field<unsigned>(b, "n");
    spec.t = require_field<unsigned>(b, "t");
    if (spec.m == 0) throw ConfigError(std::string(name) + ".m: must be positive");
    return spec;
}

std::shared_ptr<const BchCode> make_bch(const BchSpec& spec) {
    auto gf = std::make_shared<GaloisField>(spec.m, GaloisField::default_primitive_poly(spec.m));
    return std::make_shared<BchCode>(gf, spec.n, spec.t);
}

LtMode lt_mode_field(const json& j) {
    std::string mode = optional_field<std::string>(j, "lt_mode", "dense");
    if (mode == "dense") return LtMode::DenseRandom;
    if (mode == "r10") return LtMode::R10Style;
    throw ConfigError("lt_mode: expected 'dense' or 'r10'");
}

struct TrialOutcome {
    bool inner_fail = false;
    bool e2e_fail = false;
    bool miss = false;
};

using TrialFn = std::function<TrialOutcome(size_t trial)>;

PointReport run_point(const ExperimentConfig& cfg, double value, const TrialFn& trial) {
    PointReport pt;
    pt.p_e = value;
    const auto start = std::chrono::steady_clock::now();
    const size_t chunk = 256;
    std::vector<TrialOutcome> out(chunk);
    size_t done = 0;
    bool stop = false;
    while (!stop && done < cfg.max_trials) {
        const size_t n = std::min(chunk, cfg.max_trials - done);
        if (cfg.workers > 1) {
#pragma omp parallel for num_threads(int(cfg.workers)) schedule(static)
            for (long i = 0; i < long(n); ++i) out[size_t(i)] = trial(done + size_t(i));
        } else {
            // serial reference path, kept bit-compatible with the parallel one
            for (size_t i = 0; i < n; ++i) out[i] = trial(done + i);
        }
        // the stop rule is applied in trial order, so the outcome is
        // independent of the worker count
        for (size_t i = 0; i < n; ++i) {
            pt.inner_failures += out[i].inner_fail;
            pt.e2e_failures += out[i].e2e_fail;
            pt.miss_corrections += out[i].miss;
            if (pt.e2e_failures >= cfg.min_failures) {
                pt.trials = done + i + 1;
                stop = true;
                break;
            }
        }
        done += n;
        if (!stop) pt.trials = done;
    }
    auto [lo, hi] = wilson_interval(pt.e2e_failures, pt.trials);
    pt.wilson_lo = lo;
    pt.wilson_hi = hi;
    pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return pt;
}

std::vector<size_t> pick_distinct(Rng& rng, size_t count, size_t universe) {
    std::vector<size_t> idx(universe);
    std::iota(idx.begin(), idx.end(), size_t(0));
    for (size_t i = 0; i < count; ++i) {
        size_t j = i + size_t(rng.below(universe - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

// ---- scheme drivers ----

SimReport run_raptor_only(const ExperimentConfig& cfg, std::ostream* csv);
SimReport run_block_recovery(const ExperimentConfig& cfg, std::ostream* csv);
SimReport run_bwpc(const ExperimentConfig& cfg, std::ostream* csv);
SimReport run_long_bch(const ExperimentConfig& cfg, std::ostream* csv);

void emit(std::ostream* csv, Scheme s, const PointReport& pt) {
    if (csv) {
        *csv << csv_row(s, pt) << '\n';
        csv->flush();
    }
}

SimReport run_raptor_only(const ExperimentConfig& cfg, std::ostream* csv) {
    if (!cfg.inject_erasures)
        throw ConfigError("inject_erasures: RaptorOnly requires erasure injection");
    RaptorParams params = RaptorParams::with_defaults(cfg.raptor_k, cfg.raptor_n,
                                                      cfg.symbol_bytes, cfg.lt_mode,
                                                      cfg.master_seed);
    RaptorCode code(params);
    const size_t N = code.params().N, K = code.params().K;
    std::vector<Symbol> received(N, Symbol(cfg.symbol_bytes, 0));

    SimReport report;
    report.scheme = cfg.scheme;
    for (size_t p = 0; p < cfg.grid.size(); ++p) {
        const size_t erasures = size_t(std::llround(cfg.grid[p]));
        if (erasures > N) throw ConfigError("grid: erasure count exceeds N");
        auto trial = [&, p, erasures](size_t t) {
            Rng rng(cfg.master_seed, p, t);
            ErasurePattern pat;
            pat.erased = pick_distinct(rng, erasures, N);
            TrialOutcome out;
            out.e2e_fail = !code.decode(received, pat).has_value();
            out.inner_fail = out.e2e_fail;
            return out;
        };
        PointReport pt = run_point(cfg, double(erasures), trial);
        if (cfg.analytic)
            pt.analytic_p_raptor = conditional_raptor_failure(1, N, K, erasures);
        emit(csv, cfg.scheme, pt);
        report.points.push_back(pt);
    }
    return report;
}

SimReport run_block_recovery(const ExperimentConfig& cfg, std::ostream* csv) {
    BlockGeometry geom;
    geom.pages = cfg.pages;
    geom.words_per_page = cfg.words_per_page;
    geom.symbols_per_word = cfg.symbols_per_word;
    geom.parity_symbols = cfg.parity_symbols;
    geom.symbol_bytes = cfg.symbol_bytes;
    if (cfg.inner.m != 0) geom.inner = make_bch(cfg.inner);
    if (geom.parity_symbols % geom.symbols_per_word != 0)
        throw ConfigError("parity_symbols: must be a multiple of symbols_per_word");
    if (!cfg.inject_erasures && !geom.inner)
        throw ConfigError("inner: required unless inject_erasures is set");

    auto code = std::make_shared<RaptorCode>(raptor_params_for(geom, cfg.lt_mode, cfg.master_seed));
    const size_t source_words = geom.word_count();
    const size_t parity_words = geom.parity_symbols / geom.symbols_per_word;
    const size_t total_words = source_words + parity_words;

    // One fixed random block per experiment.
    Rng data_rng(cfg.master_seed, 0xb10c, 0);
    std::vector<std::vector<uint8_t>> words(source_words,
                                            std::vector<uint8_t>(geom.word_bytes()));
    for (auto& w : words)
        for (auto& b : w) b = uint8_t(data_rng.next());
    WriteState ws = stream_write(geom, code, words);
    std::vector<std::vector<uint8_t>> stored_clean(total_words);
    for (size_t i = 0; i < source_words; ++i) stored_clean[i] = words[i];
    for (size_t w = 0; w < parity_words; ++w) {
        std::vector<uint8_t> bytes;
        for (size_t s = 0; s < geom.symbols_per_word; ++s) {
            const Symbol& sym = ws.parities()[w * geom.symbols_per_word + s];
            bytes.insert(bytes.end(), sym.begin(), sym.end());
        }
        stored_clean[source_words + w] = std::move(bytes);
    }

    const size_t word_bits = geom.word_bytes() * 8;
    if (geom.inner && geom.inner->k() < word_bits)
        throw ConfigError("inner: k smaller than the word payload");

    SimReport report;
    report.scheme = cfg.scheme;
    for (size_t p = 0; p < cfg.grid.size(); ++p) {
        TrialFn trial;
        if (cfg.inject_erasures) {
            const size_t erased = size_t(std::llround(cfg.grid[p]));
            if (erased > total_words) throw ConfigError("grid: erased word count exceeds block");
            trial = [&, p, erased](size_t t) {
                Rng rng(cfg.master_seed, p, t);
                std::vector<StoredWord> stored(total_words);
                for (size_t i = 0; i < total_words; ++i) stored[i].bytes = stored_clean[i];
                for (size_t i : pick_distinct(rng, erased, total_words))
                    stored[i].failed = true;
                TrialOutcome out;
                out.inner_fail = erased > 0;
                auto rec = recover_block(geom, *code, stored);
                if (!rec) {
                    out.e2e_fail = true;
                    return out;
                }
                for (const auto& r : *rec)
                    if (r.bytes != stored_clean[r.index]) out.e2e_fail = true;
                return out;
            };
        } else {
            const double p_e = cfg.grid[p];
            trial = [&, p, p_e](size_t t) {
                Rng rng(cfg.master_seed, p, t);
                TrialOutcome out;
                std::vector<StoredWord> stored(total_words);
                for (size_t wi = 0; wi < total_words; ++wi) {
                    // inner-encode, corrupt, inner-decode each word
                    std::vector<uint8_t> msg(geom.inner->k(), 0);
                    const auto& bytes = stored_clean[wi];
                    for (size_t b = 0; b < word_bits; ++b)
                        msg[b] = (bytes[b >> 3] >> (7 - (b & 7))) & 1;
                    auto cw = geom.inner->encode(msg);
                    bsc_corrupt_inplace(cw, p_e, rng.next());
                    auto dec = geom.inner->decode(cw);
                    stored[wi].bytes.assign(geom.word_bytes(), 0);
                    if (!dec.corrected) {
                        stored[wi].failed = true;
                        out.inner_fail = true;
                        continue;
                    }
                    for (size_t b = 0; b < word_bits; ++b)
                        if (dec.codeword[b]) stored[wi].bytes[b >> 3] |= uint8_t(0x80u >> (b & 7));
                    if (stored[wi].bytes != stored_clean[wi]) out.miss = true;
                }
                auto rec = recover_block(geom, *code, stored);
                if (!rec) {
                    out.e2e_fail = true;
                    return out;
                }
                for (const auto& r : *rec) stored[r.index].bytes = r.bytes;
                for (size_t wi = 0; wi < source_words; ++wi)
                    if (stored[wi].bytes != stored_clean[wi]) out.e2e_fail = true;
                return out;
            };
        }
        PointReport pt = run_point(cfg, cfg.grid[p], trial);
        if (cfg.analytic) {
            if (cfg.inject_erasures) {
                pt.analytic_p_raptor = conditional_raptor_failure(
                    geom.symbols_per_word, total_words, source_words,
                    size_t(std::llround(cfg.grid[p])));
            } else {
                pt.analytic_p_raptor = block_failure_bound(geom, cfg.grid[p], 0.0);
            }
        }
        emit(csv, cfg.scheme, pt);
        report.points.push_back(pt);
    }
    return report;
}

SimReport run_bwpc(const ExperimentConfig& cfg, std::ostream* csv) {
    BwPcLayout layout = make_layout(cfg.n_b, cfg.n_i, make_bch(cfg.row_code),
                                    make_bch(cfg.col_code), cfg.parity_blocks);
    RaptorCode code(raptor_params_for(layout, cfg.lt_mode, cfg.master_seed));

    Rng data_rng(cfg.master_seed, 0xb17, 0);
    std::vector<uint8_t> user(layout.user_bits());
    for (auto& b : user) b = uint8_t(data_rng.next() & 1);
    const PageBits page = encode_page(layout, code, user);

    SimReport report;
    report.scheme = cfg.scheme;
    for (size_t p = 0; p < cfg.grid.size(); ++p) {
        const double p_e = cfg.grid[p];
        auto trial = [&, p, p_e](size_t t) {
            Rng rng(cfg.master_seed, p, t);
            PageBits rx = page;
            bsc_corrupt_inplace(rx, p_e, rng.next());
            PageDecodeResult res =
                decode_page_pipeline(layout, code, rx, cfg.retry_half_detected);
            TrialOutcome out;
            out.inner_fail = !res.inner.all_clean;
            if (!res.ok) out.e2e_fail = true;
            else if (res.user_bits != user) out.miss = true;
            return out;
        };
        PointReport pt = run_point(cfg, p_e, trial);
        if (cfg.analytic) {
            AnalysisPoint ap = analyze_bwpc_point(layout, code.params(), p_e);
            pt.analytic_p11 = ap.p11;
            pt.analytic_pf_inner = ap.pf_inner;
            pt.analytic_p_raptor = ap.p_raptor;
        }
        emit(csv, cfg.scheme, pt);
        report.points.push_back(pt);
    }
    return report;
}

SimReport run_long_bch(const ExperimentConfig& cfg, std::ostream* csv) {
    auto code = make_bch(cfg.page_code);
    const size_t words = std::max<size_t>(1, cfg.words_per_page);
    SimReport report;
    report.scheme = cfg.scheme;
    for (size_t p = 0; p < cfg.grid.size(); ++p) {
        const double p_e = cfg.grid[p];
        auto trial = [&, p, p_e](size_t t) {
            Rng rng(cfg.master_seed, p, t);
            TrialOutcome out;
            std::vector<uint8_t> zero(code->n(), 0);
            for (size_t w = 0; w < words; ++w) {
                std::vector<uint8_t> rx = zero;
                bsc_corrupt_inplace(rx, p_e, rng.next());
                auto dec = code->decode(rx);
                if (!dec.corrected) {
                    out.inner_fail = true;
                    out.e2e_fail = true;
                } else if (std::find(dec.codeword.begin(), dec.codeword.end(), 1) !=
                           dec.codeword.end()) {
                    out.miss = true;  // valid but nonzero codeword
                }
            }
            return out;
        };
        PointReport pt = run_point(cfg, p_e, trial);
        if (cfg.analytic) pt.analytic_pf_inner = long_bch_page_error(*code, p_e, words);
        emit(csv, cfg.scheme, pt);
        report.points.push_back(pt);
    }
    return report;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("(root): invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.scheme = scheme_from_name(require_field<std::string>(j, "scheme"));
    cfg.grid = require_field<std::vector<double>>(j, "grid");
    if (cfg.grid.empty()) throw ConfigError("grid: must be nonempty");
    cfg.master_seed = optional_field<uint64_t>(j, "master_seed", 1);
    cfg.max_trials = optional_field<size_t>(j, "max_trials", 1'000'000);
    cfg.min_failures = optional_field<size_t>(j, "min_failures", 100);
    if (cfg.max_trials == 0) throw ConfigError("max_trials: must be >= 1");
    if (cfg.min_failures == 0) throw ConfigError("min_failures: must be >= 1");
    cfg.workers = optional_field<size_t>(j, "workers", 1);
    if (cfg.workers == 0) throw ConfigError("workers: must be >= 1");
    cfg.output = optional_field<std::string>(j, "output", "");
    cfg.lt_mode = lt_mode_field(j);
    cfg.analytic = optional_field<bool>(j, "analytic", true);
    cfg.inject_erasures = optional_field<bool>(j, "inject_erasures", false);
    cfg.symbol_bytes = optional_field<size_t>(j, "symbol_bytes", 1);

    switch (cfg.scheme) {
        case Scheme::RaptorOnly:
            cfg.raptor_k = require_field<size_t>(j, "raptor_k");
            cfg.raptor_n = require_field<size_t>(j, "raptor_n");
            if (cfg.raptor_k == 0 || cfg.raptor_n < cfg.raptor_k)
                throw ConfigError("raptor_n: need raptor_n >= raptor_k >= 1");
            cfg.inject_erasures = true;
            break;
        case Scheme::BlockRecovery:
            cfg.pages = require_field<size_t>(j, "pages");
            cfg.words_per_page = require_field<size_t>(j, "words_per_page");
            cfg.symbols_per_word = optional_field<size_t>(j, "symbols_per_word", 1);
            cfg.parity_symbols = require_field<size_t>(j, "parity_symbols");
            cfg.inner = bch_spec_field(j, "inner", !cfg.inject_erasures);
            break;
        case Scheme::BwPcRaptor:
            cfg.n_b = require_field<size_t>(j, "n_b");
            cfg.n_i = optional_field<size_t>(j, "n_i", 1);
            cfg.parity_blocks = require_field<size_t>(j, "parity_blocks");
            cfg.row_code = bch_spec_field(j, "row_code", true);
            cfg.col_code = bch_spec_field(j, "col_code", true);
            cfg.retry_half_detected = optional_field<bool>(j, "retry_half_detected", false);
            break;
        case Scheme::LongBchBaseline:
            cfg.page_code = bch_spec_field(j, "page_code", true);
            cfg.words_per_page = optional_field<size_t>(j, "words_per_page", 1);
            break;
    }
    if (!cfg.inject_erasures) {
        for (double v : cfg.grid)
            if (v < 0.0 || v > 1.0) throw ConfigError("grid: raw BER outside [0,1]");
    } else {
        for (double v : cfg.grid)
            if (v < 0.0 || v != std::floor(v))
                throw ConfigError("grid: erasure counts must be whole numbers >= 0");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::pair<double, double> wilson_interval(size_t failures, size_t trials) {
    if (trials == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double n = double(trials), f = double(failures);
    const double phat = f / n;
    const double denom = n + z * z;
    const double center = (f + z * z / 2) / denom;
    const double half = z / denom * std::sqrt(phat * (n - f) + z * z / 4);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::string csv_header() {
    return "scheme,p_e,trials,inner_fail_freq,e2e_fail_freq,miss_corr_freq,"
           "wilson_lo,wilson_hi,analytic_P11,analytic_PF_inner,analytic_PRaptor,seconds";
}

std::string csv_row(Scheme scheme, const PointReport& pt) {
    std::ostringstream ss;
    auto opt = [](double v) { return v < 0.0 ? std::string() : fmt_double(v); };
    ss << scheme_name(scheme) << ',' << fmt_double(pt.p_e) << ',' << pt.trials << ','
       << fmt_double(pt.inner_fail_freq()) << ',' << fmt_double(pt.e2e_fail_freq()) << ','
       << fmt_double(pt.miss_corr_freq()) << ',' << fmt_double(pt.wilson_lo) << ','
       << fmt_double(pt.wilson_hi) << ',' << opt(pt.analytic_p11) << ','
       << opt(pt.analytic_pf_inner) << ',' << opt(pt.analytic_p_raptor) << ','
       << fmt_double(pt.seconds);
    return ss.str();
}

SimReport run_experiment(const ExperimentConfig& config, std::ostream* csv) {
    if (config.grid.empty()) throw ConfigError("grid: must be nonempty");
    if (config.max_trials == 0) throw ConfigError("max_trials: must be >= 1");
    if (config.min_failures == 0) throw ConfigError("min_failures: must be >= 1");
    if (config.workers == 0) throw ConfigError("workers: must be >= 1");
    if (csv) *csv << csv_header() << '\n';
    switch (config.scheme) {
        case Scheme::RaptorOnly: return run_raptor_only(config, csv);
        case Scheme::BlockRecovery: return run_block_recovery(config, csv);
        case Scheme::BwPcRaptor: return run_bwpc(config, csv);
        case Scheme::LongBchBaseline: return run_long_bch(config, csv);
    }
    throw ConfigError("scheme: unknown value");
}

}  // namespace fec
