#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fec/bch.hpp"
#include "fec/raptor.hpp"

namespace fec {

struct InvalidLayout : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SizeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Block-wise product code geometry. The grid has grid_rows() x grid_cols()
// intersections of n_b bits; each grid row forms a row codeword (message
// k_r = grid_cols * n_b) and each grid column a column codeword (message
// k_c = grid_rows * n_b). Parity blocks are not cross-protected.
struct BwPcLayout {
    size_t n_b = 0;  // intersection bits
    size_t n_i = 1;  // Raptor symbols per intersection
    std::shared_ptr<const BchCode> row;
    std::shared_ptr<const BchCode> col;
    size_t parity_blocks = 0;  // N_r: grid cells reserved for Raptor parity

    size_t krb() const { return row->k() / n_b; }  // k_r^B
    size_t kcb() const { return col->k() / n_b; }  // k_c^B
    size_t grid_cols() const { return krb(); }
    size_t grid_rows() const { return kcb(); }
    size_t m_r() const { return row->n() - row->k(); }
    size_t m_c() const { return col->n() - col->k(); }
    size_t cells() const { return grid_rows() * grid_cols(); }           // N (blocks)
    size_t total_symbols() const { return cells() * n_i; }               // N_i * N
    size_t source_symbols() const { return (cells() - parity_blocks) * n_i; }
    size_t symbol_bits() const { return n_b / n_i; }
    size_t symbol_bytes() const { return (symbol_bits() + 7) / 8; }
    size_t message_bits() const { return cells() * n_b; }
    size_t user_bits() const { return source_symbols() * symbol_bits(); }
    size_t page_bits() const { return message_bits() + grid_rows() * m_r() + grid_cols() * m_c(); }
};

BwPcLayout make_layout(size_t n_b, size_t n_i, std::shared_ptr<const BchCode> row,
                       std::shared_ptr<const BchCode> col, size_t parity_blocks);

RaptorParams raptor_params_for(const BwPcLayout& layout, LtMode mode, uint64_t seed);

// Page image: bit-per-entry, grid cells row-major, then row parities, then
// column parities. pack_page_bits/unpack_page_bits give the MSB-first byte
// dump used for golden vectors.
using PageBits = std::vector<uint8_t>;

std::vector<uint8_t> pack_page_bits(const PageBits& bits);
PageBits unpack_page_bits(const std::vector<uint8_t>& bytes, size_t nbits);

struct InnerDecodeState {
    std::vector<size_t> failed_rows;
    std::vector<size_t> failed_cols;
    size_t iterations = 0;
    bool all_clean = false;  // otherwise halted on no progress
};

struct PageDecodeResult {
    bool ok = false;
    std::vector<uint8_t> user_bits;
    InnerDecodeState inner;
    bool raptor_failed = false;
    bool retried_reduced_sphere = false;
};

// Raptor-encode the user bits, lay source+parity symbols row-major into the
// grid, then compute row and column BCH parities.
PageBits encode_page(const BwPcLayout& layout, const RaptorCode& code,
                     const std::vector<uint8_t>& user_bits);

// Iterative hard-decision row/column decoding over the shared grid; residual
// failures erase every symbol in the failed-row x failed-col intersections
// and invoke the outer Raptor decoder.
PageDecodeResult decode_page(const BwPcLayout& layout, const RaptorCode& code,
                             const PageBits& received, size_t max_rounds = 8);

// Iterative inner decoding only (exposed for analysis-style experiments).
InnerDecodeState inner_decode(const BwPcLayout& layout, PageBits& bits, unsigned effective_t_row,
                              unsigned effective_t_col, size_t max_rounds);

// Half-detected-error retry: when exactly one dimension reports failures,
// rerun the full iterative decode from the raw received page with the
// decoding sphere reduced by one on both component codes.
PageDecodeResult detect_and_retry(const BwPcLayout& layout, const RaptorCode& code,
                                  const InnerDecodeState& state, const PageBits& received,
                                  size_t max_rounds = 8);

// Full pipeline used by the simulator: decode, then retry on half-detected
// errors when enabled.
PageDecodeResult decode_page_pipeline(const BwPcLayout& layout, const RaptorCode& code,
                                      const PageBits& received, bool retry_half_detected,
                                      size_t max_rounds = 8);

}  // namespace fec
