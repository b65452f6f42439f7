#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fec {

// Opaque equal-length byte block; the GF(2) solvers only XOR and permute these.
using Symbol = std::vector<uint8_t>;

inline void xor_into(Symbol& dst, const Symbol& src) {
    for (size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

// Fixed-length bit vector over GF(2), word-packed.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t len) : len_(len), words_((len + 63) / 64, 0) {}

    size_t size() const { return len_; }
    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v = true) {
        uint64_t m = uint64_t(1) << (i & 63);
        if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t(1) << (i & 63); }

    void operator^=(const BitVec& o) {
        for (size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    }
    bool operator==(const BitVec& o) const { return len_ == o.len_ && words_ == o.words_; }

    bool any() const {
        for (uint64_t w : words_) if (w) return true;
        return false;
    }
    size_t popcount() const;

    const std::vector<uint64_t>& words() const { return words_; }

private:
    size_t len_ = 0;
    std::vector<uint64_t> words_;
};

// Dense GF(2) matrix, row-major, word-packed rows.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), data_(rows * wpr_, 0) {}

    static BitMatrix identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t words_per_row() const { return wpr_; }

    bool get(size_t r, size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1; }
    void set(size_t r, size_t c, bool v = true) {
        uint64_t m = uint64_t(1) << (c & 63);
        if (v) row(r)[c >> 6] |= m; else row(r)[c >> 6] &= ~m;
    }
    void flip(size_t r, size_t c) { row(r)[c >> 6] ^= uint64_t(1) << (c & 63); }

    uint64_t* row(size_t r) { return data_.data() + r * wpr_; }
    const uint64_t* row(size_t r) const { return data_.data() + r * wpr_; }

    void xor_rows(size_t dst, size_t src) {
        uint64_t* d = row(dst);
        const uint64_t* s = row(src);
        for (size_t w = 0; w < wpr_; ++w) d[w] ^= s[w];
    }
    void swap_rows(size_t a, size_t b);

    BitVec row_vec(size_t r) const;
    void set_row(size_t r, const BitVec& v);

    // this * m over GF(2).
    BitMatrix multiply(const BitMatrix& m) const;
    // this * v, v indexed by column.
    BitVec multiply(const BitVec& v) const;
    // XOR-fold of syms selected by the given row.
    Symbol fold_row(size_t r, const std::vector<Symbol>& syms) const;

    size_t row_popcount(size_t r) const;
    bool operator==(const BitMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<uint64_t> data_;
};

// Result of traced Gaussian elimination.
//
// transform * (rows of the input re-selected per row_perm), with columns
// re-selected per col_perm, equals [I_rank | *] in the first `rank` rows.
// transform is invertible.
struct GeTrace {
    size_t rank = 0;
    std::vector<size_t> row_perm;  // position -> original row index
    std::vector<size_t> col_perm;  // position -> original column index
    BitMatrix transform;
};

// Full Gauss-Jordan reduction with operation tracing. Pivots are chosen
// deterministically: lowest-index eligible row, then lowest-index nonzero
// column within it. Rank deficiency is reported via the rank field.
GeTrace gaussian_eliminate(const BitMatrix& a);

// Solve a*m = rhs for m (one Symbol per column). Returns nullopt iff
// rank(a) < a.cols(). When the system is consistent the returned m satisfies
// a*m == rhs; for an inconsistent rhs (possible only when rows exceed rank)
// the value solves the pivot-row subsystem only.
std::optional<std::vector<Symbol>> solve(const BitMatrix& a, const std::vector<Symbol>& rhs);

// Same contract as solve(); peels degree-1 rows first and defers a dense
// residual system over the inactivated columns.
std::optional<std::vector<Symbol>> inactivation_solve(const BitMatrix& a,
                                                      const std::vector<Symbol>& rhs);

// Inverse of a square full-rank matrix; nullopt when singular.
std::optional<BitMatrix> gf2_invert(const BitMatrix& a);

}  // namespace fec
