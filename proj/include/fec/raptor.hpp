#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fec/gf2.hpp"

namespace fec {

struct SingularPrecode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LtMode : uint8_t {
    DenseRandom,  // each intermediate included independently with probability 1/2
    R10Style,     // degree sampled from a table, neighbors uniform without replacement
};

// Degree CDF over 2^20 buckets; default is the R10 table.
struct DegreeTable {
    std::vector<uint32_t> cum;     // ascending thresholds out of 2^20
    std::vector<uint32_t> degree;  // degree for v < cum[i]
    static DegreeTable r10();
};

// Systematic fixed-rate Raptor code description.
struct RaptorParams {
    size_t K = 0;       // source symbols
    size_t S = 0;       // sparse precode constraint rows
    size_t H = 0;       // dense precode constraint rows
    size_t N = 0;       // total coded symbols, N >= K
    size_t T = 1;       // symbol size in bytes
    LtMode lt_mode = LtMode::DenseRandom;
    uint64_t seed = 0;
    DegreeTable degrees;  // used by R10Style only

    size_t L() const { return K + S + H; }

    // S = smallest prime >= 0.01K + sqrt(2K); H = smallest h with
    // C(h, ceil(h/2)) >= K + S.
    static RaptorParams with_defaults(size_t K, size_t N, size_t T, LtMode mode, uint64_t seed);
};

struct ErasurePattern {
    std::vector<size_t> erased;  // distinct coded-symbol indices, all < N
};

// Builds A = [A_pre; G_LT]: S sparse rows, H dense rows, K source rows, then
// N-K LT rows; (L + N - K) x L. Deterministic for fixed (params, seed).
// Throws SingularPrecode if the L x L A_pre block is not invertible.
BitMatrix build_constraint_matrix(const RaptorParams& params);

// Constructed once per parameter set; immutable and shareable afterwards.
class RaptorCode {
public:
    // Builds A from params, reseeding up to 16 times on a singular precode.
    explicit RaptorCode(RaptorParams params);
    // Explicit-matrix construction (golden vectors, tests). `a` must be
    // (constraints + N) x L with the first `constraints` rows the precode
    // constraint block and the next K rows the source rows.
    RaptorCode(BitMatrix a, size_t constraints, size_t K, size_t N, size_t T);

    const RaptorParams& params() const { return params_; }
    const BitMatrix& constraint_matrix() const { return a_; }
    size_t constraints() const { return sh_; }  // S + H

    // Matrix-path encode: m = A_pre^{-1} t, parity = G_LT m.
    // Returns the N transmitted symbols [source | parity].
    std::vector<Symbol> encode(const std::vector<Symbol>& source) const;

    // Erasure decode via inactivation solving. `received[i]` is ignored for
    // erased i. Returns all K source symbols, or nullopt on rank deficiency.
    std::optional<std::vector<Symbol>> decode(const std::vector<Symbol>& received,
                                              const ErasurePattern& pattern) const;

    // Parity lookup tables: one BitVec of length K per parity symbol; bit l
    // set iff source symbol l participates.
    const std::vector<BitVec>& parity_luts() const { return parity_luts_; }

    // Erasure lookup tables: one BitVec of length N per erased *source*
    // symbol, aligned with the source indices in `pattern` (ascending). Bit i
    // set iff received symbol i enters the recovery XOR. nullopt on rank
    // deficiency.
    std::optional<std::vector<BitVec>> build_erasure_luts(const ErasurePattern& pattern) const;

private:
    void derive_luts();
    BitMatrix reduced_matrix(const std::vector<char>& erased_mask,
                             std::vector<size_t>& row_to_coded) const;

    RaptorParams params_;
    size_t sh_;  // constraint row count (S + H)
    BitMatrix a_;
    BitMatrix a_pre_inv_;
    std::vector<BitVec> parity_luts_;
};

std::vector<BitVec> build_parity_luts(const RaptorCode& code);

}  // namespace fec
