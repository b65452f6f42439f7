#include "fec/gf2.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>
#include <stdexcept>

namespace fec {

size_t BitVec::popcount() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

void BitMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) return;
    uint64_t* ra = row(a);
    uint64_t* rb = row(b);
    for (size_t w = 0; w < wpr_; ++w) std::swap(ra[w], rb[w]);
}

BitVec BitMatrix::row_vec(size_t r) const {
    BitVec v(cols_);
    for (size_t c = 0; c < cols_; ++c) if (get(r, c)) v.set(c);
    return v;
}

void BitMatrix::set_row(size_t r, const BitVec& v) {
    for (size_t c = 0; c < cols_; ++c) set(r, c, v.get(c));
}

BitMatrix BitMatrix::multiply(const BitMatrix& m) const {
    if (cols_ != m.rows()) throw std::invalid_argument("BitMatrix::multiply: shape mismatch");
    BitMatrix out(rows_, m.cols());
    for (size_t r = 0; r < rows_; ++r) {
        const uint64_t* src = row(r);
        uint64_t* dst = out.row(r);
        for (size_t w = 0; w < wpr_; ++w) {
            uint64_t bits = src[w];
            while (bits) {
                size_t c = (w << 6) + std::countr_zero(bits);
                bits &= bits - 1;
                const uint64_t* mr = m.row(c);
                for (size_t k = 0; k < m.words_per_row(); ++k) dst[k] ^= mr[k];
            }
        }
    }
    return out;
}

BitVec BitMatrix::multiply(const BitVec& v) const {
    BitVec out(rows_);
    for (size_t r = 0; r < rows_; ++r) {
        const uint64_t* rw = row(r);
        uint64_t acc = 0;
        for (size_t w = 0; w < wpr_; ++w) acc ^= rw[w] & v.words()[w];
        if (std::popcount(acc) & 1) out.set(r);
    }
    return out;
}

Symbol BitMatrix::fold_row(size_t r, const std::vector<Symbol>& syms) const {
    Symbol acc;
    const uint64_t* rw = row(r);
    for (size_t w = 0; w < wpr_; ++w) {
        uint64_t bits = rw[w];
        while (bits) {
            size_t c = (w << 6) + std::countr_zero(bits);
            bits &= bits - 1;
            if (acc.empty()) acc = syms[c];
            else xor_into(acc, syms[c]);
        }
    }
    return acc;
}

size_t BitMatrix::row_popcount(size_t r) const {
    const uint64_t* rw = row(r);
    size_t n = 0;
    for (size_t w = 0; w < wpr_; ++w) n += std::popcount(rw[w]);
    return n;
}

namespace {

// Core elimination. Rows stay in place; pivot_rows / pivot_cols record the
// pivot order. On exit work = p * a (p over the original row order) and
// pivot rows of work are reduced to unit vectors in their pivot columns.
struct Elim {
    BitMatrix work;
    BitMatrix p;  // accumulated row operations, original row order
    std::vector<size_t> pivot_rows;
    std::vector<size_t> pivot_cols;
};

Elim eliminate(const BitMatrix& a) {
    const size_t rows = a.rows(), cols = a.cols(), wpr = a.words_per_row();
    Elim e{a, BitMatrix::identity(rows), {}, {}};
    std::vector<uint64_t> mask(wpr, ~uint64_t(0));
    if (cols & 63) mask[wpr - 1] = (uint64_t(1) << (cols & 63)) - 1;
    std::vector<char> used(rows, 0);

    while (e.pivot_cols.size() < cols) {
        // First eligible row: lowest-index unused row nonzero in a free column.
        size_t pr = rows, pc = cols;
        for (size_t r = 0; r < rows; ++r) {
            if (used[r]) continue;
            const uint64_t* rw = e.work.row(r);
            for (size_t w = 0; w < wpr; ++w) {
                uint64_t bits = rw[w] & mask[w];
                if (bits) {
                    pr = r;
                    pc = (w << 6) + std::countr_zero(bits);
                    break;
                }
            }
            if (pr != rows) break;
        }
        if (pr == rows) break;  // rank deficient
        used[pr] = 1;
        e.pivot_rows.push_back(pr);
        e.pivot_cols.push_back(pc);
        mask[pc >> 6] &= ~(uint64_t(1) << (pc & 63));
        const uint64_t* piv = e.work.row(pr);
        const size_t pw = pc >> 6;
        const uint64_t pb = uint64_t(1) << (pc & 63);
        for (size_t r = 0; r < rows; ++r) {
            uint64_t* wr = e.work.row(r);
            if (r == pr || !(wr[pw] & pb)) continue;
            for (size_t w = 0; w < wpr; ++w) wr[w] ^= piv[w];
            e.p.xor_rows(r, pr);
        }
    }
    return e;
}

}  // namespace

GeTrace gaussian_eliminate(const BitMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("gaussian_eliminate: empty matrix");
    Elim e = eliminate(a);

    GeTrace t;
    t.rank = e.pivot_cols.size();
    t.row_perm = e.pivot_rows;
    {
        std::vector<char> taken(a.rows(), 0);
        for (size_t r : e.pivot_rows) taken[r] = 1;
        for (size_t r = 0; r < a.rows(); ++r) if (!taken[r]) t.row_perm.push_back(r);
    }
    t.col_perm = e.pivot_cols;
    {
        std::vector<char> taken(a.cols(), 0);
        for (size_t c : e.pivot_cols) taken[c] = 1;
        for (size_t c = 0; c < a.cols(); ++c) if (!taken[c]) t.col_perm.push_back(c);
    }
    // Re-express p relative to the permuted row order.
    t.transform = BitMatrix(a.rows(), a.rows());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.rows(); ++j)
            if (e.p.get(t.row_perm[i], t.row_perm[j])) t.transform.set(i, j);
    return t;
}

std::optional<std::vector<Symbol>> solve(const BitMatrix& a, const std::vector<Symbol>& rhs) {
    if (a.rows() != rhs.size()) throw std::invalid_argument("solve: rhs length mismatch");
    if (a.cols() == 0) return std::vector<Symbol>{};
    const size_t rows = a.rows(), cols = a.cols(), wpr = a.words_per_row();
    size_t rhs_len = 0;
    for (const auto& s : rhs) rhs_len = std::max(rhs_len, s.size());
    std::vector<uint8_t> flat(rows * rhs_len, 0);
    for (size_t r = 0; r < rows; ++r)
        std::copy(rhs[r].begin(), rhs[r].end(), flat.begin() + r * rhs_len);
    uint8_t* fl = flat.data();

    // Forward elimination over the rows not yet chosen as pivots, followed by
    // back-substitution on the rhs. The row updates are branchless (masked
    // XOR): the pivot-bit test is a coin flip on dense systems and the
    // mispredicted branch costs more than the unconditional work.
    BitMatrix work = a;
    std::vector<uint64_t> mask(wpr, ~uint64_t(0));
    if (cols & 63) mask[wpr - 1] = (uint64_t(1) << (cols & 63)) - 1;
    std::vector<uint32_t> active(rows);
    for (size_t r = 0; r < rows; ++r) active[r] = uint32_t(r);
    std::vector<size_t> pivot_rows, pivot_cols;
    pivot_rows.reserve(cols);
    pivot_cols.reserve(cols);

    while (pivot_cols.size() < cols) {
        size_t ai = active.size(), pc = cols;
        for (size_t i = 0; i < active.size() && ai == active.size(); ++i) {
            const uint64_t* rw = work.row(active[i]);
            for (size_t w = 0; w < wpr; ++w) {
                uint64_t bits = rw[w] & mask[w];
                if (bits) {
                    ai = i;
                    pc = (w << 6) + std::countr_zero(bits);
                    break;
                }
            }
        }
        if (ai == active.size()) break;  // rank deficient
        const size_t pr = active[ai];
        pivot_rows.push_back(pr);
        pivot_cols.push_back(pc);
        mask[pc >> 6] &= ~(uint64_t(1) << (pc & 63));
        active[ai] = active.back();
        active.pop_back();
        const uint64_t* piv = work.row(pr);
        const size_t pw = pc >> 6;
        const size_t pbit = pc & 63;
        const uint8_t* src = fl + pr * rhs_len;
        for (uint32_t r : active) {
            uint64_t* wr = work.row(r);
            const uint64_t m = uint64_t(0) - ((wr[pw] >> pbit) & 1);
            for (size_t w = 0; w < wpr; ++w) wr[w] ^= piv[w] & m;
            uint8_t* dst = fl + size_t(r) * rhs_len;
            const uint8_t mb = uint8_t(m);
            for (size_t b = 0; b < rhs_len; ++b) dst[b] ^= src[b] & mb;
        }
    }
    if (pivot_cols.size() < cols) return std::nullopt;

    for (size_t k = cols; k-- > 0;) {
        const uint64_t* rw = work.row(pivot_rows[k]);
        uint8_t* dst = fl + pivot_rows[k] * rhs_len;
        for (size_t j = k + 1; j < cols; ++j) {
            const size_t pcj = pivot_cols[j];
            const uint8_t mb = uint8_t(0) - uint8_t((rw[pcj >> 6] >> (pcj & 63)) & 1);
            const uint8_t* src = fl + pivot_rows[j] * rhs_len;
            for (size_t b = 0; b < rhs_len; ++b) dst[b] ^= src[b] & mb;
        }
    }

    std::vector<Symbol> m(cols);
    for (size_t k = 0; k < cols; ++k) {
        const uint8_t* src = fl + pivot_rows[k] * rhs_len;
        m[pivot_cols[k]].assign(src, src + rhs_len);
    }
    return m;
}

std::optional<BitMatrix> gf2_invert(const BitMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("gf2_invert: not square");
    const size_t n = a.rows();
    Elim e = eliminate(a);
    if (e.pivot_cols.size() < n) return std::nullopt;
    // p * a maps pivot row r_k to unit vector e_{c_k}; rearrange rows of p so
    // that row c_k of the inverse is row r_k of p.
    BitMatrix inv(n, n);
    for (size_t k = 0; k < n; ++k) {
        const uint64_t* src = e.p.row(e.pivot_rows[k]);
        uint64_t* dst = inv.row(e.pivot_cols[k]);
        std::memcpy(dst, src, inv.words_per_row() * sizeof(uint64_t));
    }
    return inv;
}

std::optional<std::vector<Symbol>> inactivation_solve(const BitMatrix& a,
                                                      const std::vector<Symbol>& rhs) {
    if (a.rows() != rhs.size()) throw std::invalid_argument("inactivation_solve: rhs length mismatch");
    const size_t rows = a.rows(), cols = a.cols();

    // Peeling only pays off on sparse systems; dense ones would inactivate
    // nearly every column and then solve the same dense residual anyway.
    size_t nnz = 0;
    for (size_t r = 0; r < rows; ++r) {
        const uint64_t* rw = a.row(r);
        for (size_t w = 0; w < a.words_per_row(); ++w) nnz += size_t(std::popcount(rw[w]));
    }
    if (nnz * 4 > rows * cols) return solve(a, rhs);

    // Column adjacency for peeling.
    std::vector<std::vector<uint32_t>> col_rows(cols);
    std::vector<uint32_t> deg(rows, 0);
    for (size_t r = 0; r < rows; ++r) {
        const uint64_t* rw = a.row(r);
        for (size_t w = 0; w < a.words_per_row(); ++w) {
            uint64_t bits = rw[w];
            while (bits) {
                size_t c = (w << 6) + std::countr_zero(bits);
                bits &= bits - 1;
                if (c < cols) {
                    col_rows[c].push_back(uint32_t(r));
                    ++deg[r];
                }
            }
        }
    }

    enum : uint8_t { kActive, kPeeled, kInactive };
    std::vector<uint8_t> cstate(cols, kActive);
    std::vector<char> used(rows, 0);
    std::vector<std::pair<uint32_t, uint32_t>> peel_order;  // (row, col)
    std::vector<uint32_t> inactive;
    std::vector<uint32_t> ready;
    for (size_t r = 0; r < rows; ++r) if (deg[r] == 1) ready.push_back(uint32_t(r));

    auto retire_column = [&](uint32_t c) {
        for (uint32_t r : col_rows[c]) {
            if (used[r]) continue;
            if (--deg[r] == 1) ready.push_back(r);
        }
    };

    size_t active_left = cols;
    size_t scan = 0;  // next column to consider for inactivation
    while (active_left > 0) {
        bool peeled = false;
        while (!ready.empty()) {
            uint32_t r = ready.back();
            ready.pop_back();
            if (used[r] || deg[r] != 1) continue;
            // Locate the single active column of row r.
            uint32_t c = 0;
            bool found = false;
            const uint64_t* rw = a.row(r);
            for (size_t w = 0; w < a.words_per_row() && !found; ++w) {
                uint64_t bits = rw[w];
                while (bits) {
                    size_t cc = (w << 6) + std::countr_zero(bits);
                    bits &= bits - 1;
                    if (cc < cols && cstate[cc] == kActive) {
                        c = uint32_t(cc);
                        found = true;
                        break;
                    }
                }
            }
            if (!found) continue;
            used[r] = 1;
            cstate[c] = kPeeled;
            peel_order.emplace_back(r, c);
            --active_left;
            retire_column(c);
            peeled = true;
            if (active_left == 0) break;
        }
        if (active_left == 0) break;
        if (!peeled || ready.empty()) {
            // No degree-1 row: inactivate the lowest-index active column.
            while (scan < cols && cstate[scan] != kActive) ++scan;
            if (scan == cols) break;
            cstate[scan] = kInactive;
            inactive.push_back(uint32_t(scan));
            --active_left;
            retire_column(uint32_t(scan));
        }
    }

    const size_t q = inactive.size();
    std::vector<size_t> inactive_pos(cols, size_t(-1));
    for (size_t i = 0; i < q; ++i) inactive_pos[inactive[i]] = i;

    // Peeled column values: a symbol accumulator plus a GF(2) combination of
    // the inactivated unknowns.
    const size_t tbytes = rhs.empty() ? 0 : rhs[0].size();
    std::vector<Symbol> val(cols, Symbol(tbytes, 0));
    BitMatrix ivec(cols, q ? q : 1);
    std::vector<size_t> peel_rank(cols, size_t(-1));
    for (size_t k = 0; k < peel_order.size(); ++k) peel_rank[peel_order[k].second] = k;

    auto expand_row = [&](size_t r, Symbol& sym, uint64_t* dense_row, size_t exclude_col) {
        sym = rhs[r];
        const uint64_t* rw = a.row(r);
        for (size_t w = 0; w < a.words_per_row(); ++w) {
            uint64_t bits = rw[w];
            while (bits) {
                size_t c = (w << 6) + std::countr_zero(bits);
                bits &= bits - 1;
                if (c >= cols || c == exclude_col) continue;
                if (cstate[c] == kInactive) {
                    dense_row[inactive_pos[c] >> 6] ^= uint64_t(1) << (inactive_pos[c] & 63);
                } else {
                    // peeled earlier by construction
                    xor_into(sym, val[c]);
                    const uint64_t* iv = ivec.row(c);
                    for (size_t k = 0; k < ivec.words_per_row(); ++k) dense_row[k] ^= iv[k];
                }
            }
        }
    };

    for (auto [r, c] : peel_order) {
        Symbol sym;
        expand_row(r, sym, ivec.row(c), c);
        val[c] = std::move(sym);
    }

    // Dense residual over the inactivated columns, from the unused rows.
    std::vector<uint32_t> residual_rows;
    for (size_t r = 0; r < rows; ++r) if (!used[r]) residual_rows.push_back(uint32_t(r));
    if (q > 0) {
        BitMatrix dense(residual_rows.size() ? residual_rows.size() : 1, q);
        std::vector<Symbol> drhs(residual_rows.size());
        for (size_t i = 0; i < residual_rows.size(); ++i)
            expand_row(residual_rows[i], drhs[i], dense.row(i), cols);
        if (residual_rows.empty()) return std::nullopt;
        auto x = solve(dense, drhs);
        if (!x) return std::nullopt;
        for (size_t i = 0; i < q; ++i) val[inactive[i]] = std::move((*x)[i]);
        // Fold the inactive solution back into the peeled values.
        for (auto [r, c] : peel_order) {
            (void)r;
            const uint64_t* iv = ivec.row(c);
            for (size_t w = 0; w < ivec.words_per_row(); ++w) {
                uint64_t bits = iv[w];
                while (bits) {
                    size_t k = (w << 6) + std::countr_zero(bits);
                    bits &= bits - 1;
                    xor_into(val[c], val[inactive[k]]);
                }
            }
        }
    } else if (peel_order.size() < cols) {
        return std::nullopt;
    }
    if (peel_order.size() + q < cols) return std::nullopt;
    return val;
}

}  // namespace fec
