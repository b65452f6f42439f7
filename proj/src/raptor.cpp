#include "fec/raptor.hpp"

#include <algorithm>
#include <cmath>

#include "fec/rng.hpp"

namespace fec {

namespace {

bool is_prime(size_t n) {
    if (n < 2) return false;
    for (size_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

double log_choose(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Row-generation tags keep per-row streams independent of build order.
enum : uint64_t { kTagDense = 0x48, kTagSource = 0x53, kTagLt = 0x4c };

void fill_dense_row(BitMatrix& a, size_t row, size_t ncols, uint64_t seed, uint64_t tag,
                    uint64_t idx) {
    Rng rng(seed, tag, idx);
    for (size_t c = 0; c < ncols; ++c)
        if (rng.next() & 1) a.set(row, c);
}

void fill_lt_row(BitMatrix& a, size_t row, const RaptorParams& p, uint64_t tag, uint64_t idx) {
    const size_t L = p.L();
    if (p.lt_mode == LtMode::DenseRandom) {
        fill_dense_row(a, row, L, p.seed, tag, idx);
        return;
    }
    Rng rng(p.seed, tag, idx);
    uint64_t v = rng.below(1u << 20);
    size_t d = p.degrees.degree.back();
    for (size_t i = 0; i < p.degrees.cum.size(); ++i) {
        if (v < p.degrees.cum[i]) {
            d = p.degrees.degree[i];
            break;
        }
    }
    d = std::min(d, L);
    size_t placed = 0;
    while (placed < d) {
        size_t c = size_t(rng.below(L));
        if (!a.get(row, c)) {
            a.set(row, c);
            ++placed;
        }
    }
}

}  // namespace

DegreeTable DegreeTable::r10() {
    // Cumulative degree distribution of the R10 LT generator.
    return DegreeTable{{10241, 491582, 712794, 831695, 948446, 1032189, 1048576},
                       {1, 2, 3, 4, 10, 11, 40}};
}

RaptorParams RaptorParams::with_defaults(size_t K, size_t N, size_t T, LtMode mode,
                                         uint64_t seed) {
    RaptorParams p;
    p.K = K;
    p.N = N;
    p.T = T;
    p.lt_mode = mode;
    p.seed = seed;
    p.degrees = DegreeTable::r10();
    size_t s = size_t(std::ceil(0.01 * double(K) + std::sqrt(2.0 * double(K))));
    while (!is_prime(s)) ++s;
    p.S = s;
    size_t h = 1;
    while (std::exp(log_choose(double(h), std::ceil(double(h) / 2))) < double(K + p.S)) ++h;
    p.H = h;
    return p;
}

BitMatrix build_constraint_matrix(const RaptorParams& p) {
    if (p.K == 0 || p.N < p.K || p.T == 0)
        throw std::invalid_argument("build_constraint_matrix: invalid params");
    const size_t L = p.L();
    BitMatrix a(L + (p.N - p.K), L);

    // S sparse parity rows: identity on columns K..K+S-1, three ones per
    // source-intermediate column spread circulant-style over the S rows.
    for (size_t i = 0; i < p.S; ++i) a.set(i, p.K + i);
    if (p.S > 0) {
        for (size_t c = 0; c < p.K; ++c) {
            size_t shift = p.S > 1 ? 1 + (c / p.S) % (p.S - 1) : 0;
            size_t b = c % p.S;
            a.set(b, c);
            a.set((b + shift) % p.S, c);
            a.set((b + 2 * shift) % p.S, c);
        }
    }
    // H dense rows: identity on columns K+S..L-1, dense over the rest.
    for (size_t j = 0; j < p.H; ++j) {
        Rng rng(p.seed, kTagDense, j);
        for (size_t c = 0; c < p.K + p.S; ++c)
            if (rng.next() & 1) a.set(p.S + j, c);
        a.set(p.S + j, p.K + p.S + j);
    }
    // K source rows, then N-K LT parity rows.
    for (size_t i = 0; i < p.K; ++i) fill_lt_row(a, p.S + p.H + i, p, kTagSource, i);
    for (size_t i = 0; i < p.N - p.K; ++i) fill_lt_row(a, L + i, p, kTagLt, i);

    // A_pre must be invertible.
    BitMatrix pre(L, L);
    for (size_t r = 0; r < L; ++r)
        std::copy(a.row(r), a.row(r) + a.words_per_row(), pre.row(r));
    GeTrace t = gaussian_eliminate(pre);
    if (t.rank < L) throw SingularPrecode("build_constraint_matrix: A_pre block is singular");
    return a;
}

RaptorCode::RaptorCode(RaptorParams params) : params_(std::move(params)), sh_(params_.S + params_.H) {
    for (int attempt = 0;; ++attempt) {
        try {
            a_ = build_constraint_matrix(params_);
            break;
        } catch (const SingularPrecode&) {
            if (attempt >= 16) throw;
            ++params_.seed;
        }
    }
    derive_luts();
}

RaptorCode::RaptorCode(BitMatrix a, size_t constraints, size_t K, size_t N, size_t T) {
    params_.K = K;
    params_.N = N;
    params_.T = T;
    params_.S = constraints;
    params_.H = 0;
    sh_ = constraints;
    if (a.rows() != constraints + N || a.cols() != constraints + K)
        throw std::invalid_argument("RaptorCode: explicit matrix has wrong shape");
    a_ = std::move(a);
    derive_luts();
}

void RaptorCode::derive_luts() {
    const size_t L = params_.L();
    BitMatrix pre(L, L);
    for (size_t r = 0; r < L; ++r)
        std::copy(a_.row(r), a_.row(r) + a_.words_per_row(), pre.row(r));
    auto inv = gf2_invert(pre);
    if (!inv) throw SingularPrecode("RaptorCode: A_pre block is singular");
    a_pre_inv_ = std::move(*inv);

    // Parity LUT k = row k of (G_LT * A_pre^{-1}) restricted to the source
    // block of t (positions S+H..L-1).
    const size_t npar = params_.N - params_.K;
    parity_luts_.assign(npar, BitVec(params_.K));
    BitVec acc(L);
    for (size_t k = 0; k < npar; ++k) {
        acc = BitVec(L);
        const size_t row = L + k;
        for (size_t c = 0; c < L; ++c)
            if (a_.get(row, c)) acc ^= a_pre_inv_.row_vec(c);
        for (size_t l = 0; l < params_.K; ++l)
            if (acc.get(sh_ + l)) parity_luts_[k].set(l);
    }
}

std::vector<Symbol> RaptorCode::encode(const std::vector<Symbol>& source) const {
    if (source.size() != params_.K) throw std::invalid_argument("RaptorCode::encode: need K symbols");
    const size_t L = params_.L();
    std::vector<Symbol> t(L, Symbol(params_.T, 0));
    for (size_t i = 0; i < params_.K; ++i) {
        if (source[i].size() != params_.T)
            throw std::invalid_argument("RaptorCode::encode: symbol size != T");
        t[sh_ + i] = source[i];
    }
    std::vector<Symbol> m(L);
    for (size_t c = 0; c < L; ++c) {
        Symbol s = a_pre_inv_.fold_row(c, t);
        m[c] = s.empty() ? Symbol(params_.T, 0) : std::move(s);
    }
    std::vector<Symbol> out = source;
    out.reserve(params_.N);
    for (size_t k = 0; k < params_.N - params_.K; ++k) {
        Symbol r = a_.fold_row(L + k, m);
        out.push_back(r.empty() ? Symbol(params_.T, 0) : std::move(r));
    }
    return out;
}

BitMatrix RaptorCode::reduced_matrix(const std::vector<char>& erased_mask,
                                     std::vector<size_t>& row_to_coded) const {
    const size_t L = params_.L();
    size_t kept = 0;
    for (size_t i = 0; i < params_.N; ++i) kept += !erased_mask[i];
    BitMatrix ap(sh_ + kept, L);
    row_to_coded.assign(sh_ + kept, size_t(-1));
    for (size_t r = 0; r < sh_; ++r)
        std::copy(a_.row(r), a_.row(r) + a_.words_per_row(), ap.row(r));
    size_t out = sh_;
    for (size_t i = 0; i < params_.N; ++i) {
        if (erased_mask[i]) continue;
        std::copy(a_.row(sh_ + i), a_.row(sh_ + i) + a_.words_per_row(), ap.row(out));
        row_to_coded[out] = i;
        ++out;
    }
    return ap;
}

std::optional<std::vector<Symbol>> RaptorCode::decode(const std::vector<Symbol>& received,
                                                      const ErasurePattern& pattern) const {
    if (received.size() != params_.N) throw std::invalid_argument("RaptorCode::decode: need N symbols");
    std::vector<char> erased(params_.N, 0);
    bool source_erased = false;
    for (size_t i : pattern.erased) {
        if (i >= params_.N) throw std::invalid_argument("RaptorCode::decode: erasure index out of range");
        erased[i] = 1;
        source_erased |= (i < params_.K);
    }
    if (!source_erased)  // systematic shortcut
        return std::vector<Symbol>(received.begin(), received.begin() + params_.K);

    std::vector<size_t> row_to_coded;
    BitMatrix ap = reduced_matrix(erased, row_to_coded);
    std::vector<Symbol> rhs(ap.rows(), Symbol(params_.T, 0));
    for (size_t r = sh_; r < ap.rows(); ++r) rhs[r] = received[row_to_coded[r]];
    auto m = inactivation_solve(ap, rhs);
    if (!m) return std::nullopt;

    std::vector<Symbol> out(received.begin(), received.begin() + params_.K);
    for (size_t j = 0; j < params_.K; ++j) {
        if (!erased[j]) continue;
        Symbol s = a_.fold_row(sh_ + j, *m);
        out[j] = s.empty() ? Symbol(params_.T, 0) : std::move(s);
    }
    return out;
}

std::optional<std::vector<BitVec>> RaptorCode::build_erasure_luts(
    const ErasurePattern& pattern) const {
    const size_t L = params_.L();
    std::vector<char> erased(params_.N, 0);
    std::vector<size_t> erased_source;
    for (size_t i : pattern.erased) {
        if (i >= params_.N)
            throw std::invalid_argument("RaptorCode::build_erasure_luts: index out of range");
        erased[i] = 1;
        if (i < params_.K) erased_source.push_back(i);
    }
    std::sort(erased_source.begin(), erased_source.end());
    if (erased_source.empty()) return std::vector<BitVec>{};

    std::vector<size_t> row_to_coded;
    BitMatrix ap = reduced_matrix(erased, row_to_coded);
    GeTrace tr = gaussian_eliminate(ap);
    if (tr.rank < L) return std::nullopt;

    // pivot_of[l]: elimination step whose pivot column is intermediate l.
    std::vector<size_t> pivot_of(L);
    for (size_t k = 0; k < L; ++k) pivot_of[tr.col_perm[k]] = k;

    std::vector<BitVec> luts;
    luts.reserve(erased_source.size());
    for (size_t j : erased_source) {
        // m_l = p_l . c'; the erased symbol is the XOR of m_l over the
        // intermediates in its A row. Accumulate in the permuted row space,
        // map back once.
        std::vector<uint64_t> comb(tr.transform.words_per_row(), 0);
        for (size_t l = 0; l < L; ++l) {
            if (!a_.get(sh_ + j, l)) continue;
            const uint64_t* pr = tr.transform.row(pivot_of[l]);
            for (size_t w = 0; w < comb.size(); ++w) comb[w] ^= pr[w];
        }
        BitVec lut(params_.N);
        for (size_t pos = 0; pos < ap.rows(); ++pos) {
            if (!((comb[pos >> 6] >> (pos & 63)) & 1)) continue;
            size_t r = tr.row_perm[pos];
            if (row_to_coded[r] != size_t(-1)) lut.set(row_to_coded[r]);
            // constraint rows carry zero symbols and drop out of the XOR
        }
        luts.push_back(std::move(lut));
    }
    return luts;
}

std::vector<BitVec> build_parity_luts(const RaptorCode& code) { return code.parity_luts(); }

}  // namespace fec
