#include "fec/bwpc.hpp"

#include <algorithm>

namespace fec {

BwPcLayout make_layout(size_t n_b, size_t n_i, std::shared_ptr<const BchCode> row,
                       std::shared_ptr<const BchCode> col, size_t parity_blocks) {
    if (n_b == 0 || n_i == 0) throw InvalidLayout("layout: n_b and n_i must be positive");
    if (row->k() % n_b != 0) throw InvalidLayout("layout: n_b does not divide k_r");
    if (col->k() % n_b != 0) throw InvalidLayout("layout: n_b does not divide k_c");
    if (n_b % n_i != 0) throw InvalidLayout("layout: n_i does not divide n_b");
    BwPcLayout l{n_b, n_i, std::move(row), std::move(col), parity_blocks};
    if (parity_blocks >= l.cells()) throw InvalidLayout("layout: parity blocks exceed grid");
    return l;
}

RaptorParams raptor_params_for(const BwPcLayout& layout, LtMode mode, uint64_t seed) {
    return RaptorParams::with_defaults(layout.source_symbols(), layout.total_symbols(),
                                       layout.symbol_bytes(), mode, seed);
}

std::vector<uint8_t> pack_page_bits(const PageBits& bits) {
    std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i >> 3] |= uint8_t(0x80u >> (i & 7));
    return out;
}

PageBits unpack_page_bits(const std::vector<uint8_t>& bytes, size_t nbits) {
    PageBits out(nbits, 0);
    for (size_t i = 0; i < nbits; ++i)
        out[i] = (bytes[i >> 3] >> (7 - (i & 7))) & 1;
    return out;
}

namespace {

// Bit offsets within a page image.
size_t cell_offset(const BwPcLayout& l, size_t cell) { return cell * l.n_b; }
size_t row_parity_offset(const BwPcLayout& l, size_t r) { return l.message_bits() + r * l.m_r(); }
size_t col_parity_offset(const BwPcLayout& l, size_t c) {
    return l.message_bits() + l.grid_rows() * l.m_r() + c * l.m_c();
}

Symbol symbol_from_bits(const BwPcLayout& l, const PageBits& bits, size_t sym) {
    const size_t cell = sym / l.n_i, sub = sym % l.n_i;
    const size_t base = cell_offset(l, cell) + sub * l.symbol_bits();
    Symbol s(l.symbol_bytes(), 0);
    for (size_t b = 0; b < l.symbol_bits(); ++b)
        if (bits[base + b]) s[b >> 3] |= uint8_t(0x80u >> (b & 7));
    return s;
}

void symbol_to_bits(const BwPcLayout& l, const Symbol& s, size_t sym, PageBits& bits) {
    const size_t cell = sym / l.n_i, sub = sym % l.n_i;
    const size_t base = cell_offset(l, cell) + sub * l.symbol_bits();
    for (size_t b = 0; b < l.symbol_bits(); ++b)
        bits[base + b] = (s[b >> 3] >> (7 - (b & 7))) & 1;
}

std::vector<uint8_t> gather_row_word(const BwPcLayout& l, const PageBits& bits, size_t r) {
    std::vector<uint8_t> w(l.row->n());
    const size_t C = l.grid_cols();
    size_t out = 0;
    for (size_t c = 0; c < C; ++c) {
        const size_t base = cell_offset(l, r * C + c);
        for (size_t b = 0; b < l.n_b; ++b) w[out++] = bits[base + b];
    }
    const size_t pbase = row_parity_offset(l, r);
    for (size_t b = 0; b < l.m_r(); ++b) w[out++] = bits[pbase + b];
    return w;
}

std::vector<uint8_t> gather_col_word(const BwPcLayout& l, const PageBits& bits, size_t c) {
    std::vector<uint8_t> w(l.col->n());
    const size_t C = l.grid_cols();
    size_t out = 0;
    for (size_t r = 0; r < l.grid_rows(); ++r) {
        const size_t base = cell_offset(l, r * C + c);
        for (size_t b = 0; b < l.n_b; ++b) w[out++] = bits[base + b];
    }
    const size_t pbase = col_parity_offset(l, c);
    for (size_t b = 0; b < l.m_c(); ++b) w[out++] = bits[pbase + b];
    return w;
}

// Returns true if any bit changed.
bool scatter_row_word(const BwPcLayout& l, const std::vector<uint8_t>& w, size_t r,
                      PageBits& bits) {
    bool changed = false;
    const size_t C = l.grid_cols();
    size_t in = 0;
    for (size_t c = 0; c < C; ++c) {
        const size_t base = cell_offset(l, r * C + c);
        for (size_t b = 0; b < l.n_b; ++b, ++in) {
            if (bits[base + b] != w[in]) {
                bits[base + b] = w[in];
                changed = true;
            }
        }
    }
    const size_t pbase = row_parity_offset(l, r);
    for (size_t b = 0; b < l.m_r(); ++b, ++in) {
        if (bits[pbase + b] != w[in]) {
            bits[pbase + b] = w[in];
            changed = true;
        }
    }
    return changed;
}

bool scatter_col_word(const BwPcLayout& l, const std::vector<uint8_t>& w, size_t c,
                      PageBits& bits) {
    bool changed = false;
    const size_t C = l.grid_cols();
    size_t in = 0;
    for (size_t r = 0; r < l.grid_rows(); ++r) {
        const size_t base = cell_offset(l, r * C + c);
        for (size_t b = 0; b < l.n_b; ++b, ++in) {
            if (bits[base + b] != w[in]) {
                bits[base + b] = w[in];
                changed = true;
            }
        }
    }
    const size_t pbase = col_parity_offset(l, c);
    for (size_t b = 0; b < l.m_c(); ++b, ++in) {
        if (bits[pbase + b] != w[in]) {
            bits[pbase + b] = w[in];
            changed = true;
        }
    }
    return changed;
}

PageDecodeResult decode_with_sphere(const BwPcLayout& layout, const RaptorCode& code,
                                    const PageBits& received, unsigned t_reduce,
                                    size_t max_rounds) {
    PageBits bits = received;
    unsigned tr = std::max(1u, layout.row->t() - t_reduce);
    unsigned tc = std::max(1u, layout.col->t() - t_reduce);
    PageDecodeResult res;
    res.inner = inner_decode(layout, bits, tr, tc, max_rounds);

    // Erase every symbol in the failed-row x failed-col intersections.
    ErasurePattern pattern;
    const size_t C = layout.grid_cols();
    for (size_t r : res.inner.failed_rows)
        for (size_t c : res.inner.failed_cols) {
            const size_t cell = r * C + c;
            for (size_t s = 0; s < layout.n_i; ++s) pattern.erased.push_back(cell * layout.n_i + s);
        }

    std::vector<Symbol> symbols(layout.total_symbols());
    for (size_t i = 0; i < symbols.size(); ++i) symbols[i] = symbol_from_bits(layout, bits, i);
    auto decoded = code.decode(symbols, pattern);
    if (!decoded) {
        res.raptor_failed = true;
        return res;
    }
    res.ok = true;
    res.user_bits.assign(layout.user_bits(), 0);
    PageBits scratch = bits;
    for (size_t i = 0; i < code.params().K; ++i) symbol_to_bits(layout, (*decoded)[i], i, scratch);
    for (size_t i = 0; i < layout.source_symbols(); ++i) {
        const size_t cell = i / layout.n_i, sub = i % layout.n_i;
        const size_t base = cell_offset(layout, cell) + sub * layout.symbol_bits();
        for (size_t b = 0; b < layout.symbol_bits(); ++b)
            res.user_bits[i * layout.symbol_bits() + b] = scratch[base + b];
    }
    return res;
}

}  // namespace

PageBits encode_page(const BwPcLayout& layout, const RaptorCode& code,
                     const std::vector<uint8_t>& user_bits) {
    if (user_bits.size() != layout.user_bits())
        throw SizeMismatch("encode_page: wrong user bit count");
    if (code.params().K != layout.source_symbols() || code.params().N != layout.total_symbols() ||
        code.params().T != layout.symbol_bytes())
        throw SizeMismatch("encode_page: code does not match layout");

    std::vector<Symbol> source(layout.source_symbols());
    for (size_t i = 0; i < source.size(); ++i) {
        Symbol s(layout.symbol_bytes(), 0);
        for (size_t b = 0; b < layout.symbol_bits(); ++b)
            if (user_bits[i * layout.symbol_bits() + b]) s[b >> 3] |= uint8_t(0x80u >> (b & 7));
        source[i] = std::move(s);
    }
    std::vector<Symbol> coded = code.encode(source);

    PageBits bits(layout.page_bits(), 0);
    for (size_t i = 0; i < coded.size(); ++i) symbol_to_bits(layout, coded[i], i, bits);

    for (size_t r = 0; r < layout.grid_rows(); ++r) {
        std::vector<uint8_t> msg(layout.row->k());
        const size_t C = layout.grid_cols();
        size_t out = 0;
        for (size_t c = 0; c < C; ++c) {
            const size_t base = cell_offset(layout, r * C + c);
            for (size_t b = 0; b < layout.n_b; ++b) msg[out++] = bits[base + b];
        }
        auto cw = layout.row->encode(msg);
        const size_t pbase = row_parity_offset(layout, r);
        for (size_t b = 0; b < layout.m_r(); ++b) bits[pbase + b] = cw[layout.row->k() + b];
    }
    for (size_t c = 0; c < layout.grid_cols(); ++c) {
        std::vector<uint8_t> msg(layout.col->k());
        size_t out = 0;
        for (size_t r = 0; r < layout.grid_rows(); ++r) {
            const size_t base = cell_offset(layout, r * layout.grid_cols() + c);
            for (size_t b = 0; b < layout.n_b; ++b) msg[out++] = bits[base + b];
        }
        auto cw = layout.col->encode(msg);
        const size_t pbase = col_parity_offset(layout, c);
        for (size_t b = 0; b < layout.m_c(); ++b) bits[pbase + b] = cw[layout.col->k() + b];
    }
    return bits;
}

InnerDecodeState inner_decode(const BwPcLayout& layout, PageBits& bits, unsigned effective_t_row,
                              unsigned effective_t_col, size_t max_rounds) {
    InnerDecodeState st;
    const size_t R = layout.grid_rows(), C = layout.grid_cols();
    std::vector<char> row_fail(R, 0), col_fail(C, 0);
    for (size_t round = 0; round < max_rounds; ++round) {
        bool changed = false;
        size_t fails = 0;
        // Every component is re-checked each round: the crossing dimension
        // may have altered its bits.
        for (size_t r = 0; r < R; ++r) {
            auto w = gather_row_word(layout, bits, r);
            auto out = layout.row->decode(w, effective_t_row);
            row_fail[r] = !out.corrected;
            if (out.corrected) changed |= scatter_row_word(layout, out.codeword, r, bits);
            else ++fails;
        }
        for (size_t c = 0; c < C; ++c) {
            auto w = gather_col_word(layout, bits, c);
            auto out = layout.col->decode(w, effective_t_col);
            col_fail[c] = !out.corrected;
            if (out.corrected) changed |= scatter_col_word(layout, out.codeword, c, bits);
            else ++fails;
        }
        ++st.iterations;
        // A round that changed bits cannot certify cleanliness: a later pass
        // may have invalidated a word counted as corrected earlier in the
        // round. Only a steady-state round settles the outcome.
        if (!changed) {
            st.all_clean = fails == 0;
            break;
        }
    }
    if (!st.all_clean) {
        for (size_t r = 0; r < R; ++r) if (row_fail[r]) st.failed_rows.push_back(r);
        for (size_t c = 0; c < C; ++c) if (col_fail[c]) st.failed_cols.push_back(c);
    }
    return st;
}

PageDecodeResult decode_page(const BwPcLayout& layout, const RaptorCode& code,
                             const PageBits& received, size_t max_rounds) {
    if (received.size() != layout.page_bits()) throw SizeMismatch("decode_page: wrong page size");
    return decode_with_sphere(layout, code, received, 0, max_rounds);
}

PageDecodeResult detect_and_retry(const BwPcLayout& layout, const RaptorCode& code,
                                  const InnerDecodeState& state, const PageBits& received,
                                  size_t max_rounds) {
    const bool half_detected = !state.all_clean &&
                               (state.failed_rows.empty() != state.failed_cols.empty());
    if (!half_detected) return decode_with_sphere(layout, code, received, 0, max_rounds);
    PageDecodeResult res = decode_with_sphere(layout, code, received, 1, max_rounds);
    res.retried_reduced_sphere = true;
    return res;
}

PageDecodeResult decode_page_pipeline(const BwPcLayout& layout, const RaptorCode& code,
                                      const PageBits& received, bool retry_half_detected,
                                      size_t max_rounds) {
    PageDecodeResult res = decode_page(layout, code, received, max_rounds);
    if (!retry_half_detected) return res;
    const bool half_detected = !res.inner.all_clean &&
                               (res.inner.failed_rows.empty() != res.inner.failed_cols.empty());
    if (!half_detected) return res;
    PageDecodeResult retried = decode_with_sphere(layout, code, received, 1, max_rounds);
    retried.retried_reduced_sphere = true;
    return retried;
}

}  // namespace fec
