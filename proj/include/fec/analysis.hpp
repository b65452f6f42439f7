#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fec/bch.hpp"
#include "fec/block_recovery.hpp"
#include "fec/bwpc.hpp"

namespace fec {

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// min{1, 2^{-(N_s(N-K) - N_s*i)}} for i failed inner words; N, K counted in
// words.
double conditional_raptor_failure(size_t n_s, size_t n, size_t k, size_t i);

// Upper bound on block recovery failure: binomial mixture of the conditional
// law over the count of inner-failed words, plus K*P_ue for miss-corrections.
// Evaluated in log domain.
double block_failure_bound(const BlockGeometry& geom, double p_e, double p_ue);

struct PijOptions {
    size_t enum_budget = 10'000'000;  // max count-matrix terms for exact path
    size_t mc_samples = 1'000'000;    // antithetic pairs count two samples
    uint64_t seed = 1;
    bool force_mc = false;  // testing hook
};

struct PijResult {
    double value = 0.0;
    bool exact = true;
    double std_error = 0.0;  // 0 on the exact path
};

// Probability of the error event where i particular-count row codes and j
// column codes all fail, with errors confined to their shared intersections
// and parity blocks (the dominant-term approximation). Exact enumeration over
// intersection error-count matrices when it fits the budget, otherwise
// conditional Monte Carlo with antithetic pairing; parity-block error counts
// are always integrated out in closed form.
PijResult p_ij(const BwPcLayout& layout, double p_e, size_t i, size_t j,
               const PijOptions& opts = {});

const std::vector<std::pair<size_t, size_t>>& default_pairs();

// Sum of P_{i,j} over the evaluated pairs, clamped to [0,1]. A union bound on
// inner decoding failure.
double p_f_inner(const BwPcLayout& layout, double p_e,
                 const std::vector<std::pair<size_t, size_t>>& pairs = default_pairs(),
                 const PijOptions& opts = {});

// Outer Raptor failure rate: sum over pairs of
// min{1, 2^{-N_i(N-K-i*j)}} * P_{i,j}, with N, K in grid cells.
double p_raptor(const BwPcLayout& layout, const RaptorParams& params, double p_e,
                const std::vector<std::pair<size_t, size_t>>& pairs = default_pairs(),
                const PijOptions& opts = {});

// Baseline: page fails if any of its long-BCH words draws more than t errors.
double long_bch_page_error(const BchCode& code, double p_e, size_t words_per_page);

struct AnalysisPoint {
    double p_e = 0.0;
    double p11 = 0.0;
    double pf_inner = 0.0;
    double p_raptor = 0.0;
};

AnalysisPoint analyze_bwpc_point(const BwPcLayout& layout, const RaptorParams& params, double p_e,
                                 const PijOptions& opts = {});

}  // namespace fec
