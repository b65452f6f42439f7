#include "fec/bch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace fec {

namespace {

// Polynomial over GF(2^m), coeff[i] = coefficient of x^i.
using GfPoly = std::vector<uint32_t>;

GfPoly poly_mul(const GaloisField& f, const GfPoly& a, const GfPoly& b) {
    GfPoly out(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            if (b[j]) out[i + j] ^= f.mul(a[i], b[j]);
    }
    return out;
}

// Minimal polynomial of alpha^e: product of (x - alpha^(e*2^i)) over the
// cyclotomic coset of e.
GfPoly minimal_poly(const GaloisField& f, uint32_t e) {
    std::vector<uint32_t> coset;
    uint32_t c = e % f.order();
    do {
        coset.push_back(c);
        c = (c * 2) % f.order();
    } while (c != e % f.order());
    GfPoly p{1};
    for (uint32_t x : coset) p = poly_mul(f, p, GfPoly{f.pow_alpha(x), 1});
    return p;
}

}  // namespace

BchCode::BchCode(std::shared_ptr<const GaloisField> field, unsigned n, unsigned t)
    : field_(std::move(field)), n_(n), t_(t) {
    const GaloisField& f = *field_;
    if (t == 0) throw InvalidParams("BchCode: t must be positive");
    if (n > f.order()) throw InvalidParams("BchCode: n exceeds 2^m - 1");
    shortened_by_ = f.order() - n;

    // Generator = LCM of minimal polynomials of alpha, alpha^3, ..., alpha^(2t-1).
    // Cosets of odd exponents are distinct or equal; dedupe by coset leader.
    std::vector<uint32_t> leaders;
    GfPoly g{1};
    for (unsigned e = 1; e <= 2 * t - 1; e += 2) {
        uint32_t leader = e;
        uint32_t c = e;
        do {
            c = uint32_t((uint64_t(c) * 2) % f.order());
            leader = std::min(leader, c);
        } while (c != e);
        if (std::find(leaders.begin(), leaders.end(), leader) != leaders.end()) continue;
        leaders.push_back(leader);
        g = poly_mul(f, g, minimal_poly(f, e));
    }
    for (uint32_t coeff : g)
        if (coeff > 1) throw InvalidParams("BchCode: generator not binary");
    unsigned deg = unsigned(g.size() - 1);
    if (deg >= n) throw InvalidParams("BchCode: k <= 0 for these parameters");
    k_ = n - deg;
    generator_ = BitVec(deg + 1);
    for (size_t i = 0; i < g.size(); ++i) if (g[i]) generator_.set(i);
}

BchCode bch_generate(std::shared_ptr<const GaloisField> field, unsigned n, unsigned t) {
    return BchCode(std::move(field), n, t);
}

std::vector<uint8_t> BchCode::encode(const std::vector<uint8_t>& message) const {
    if (message.size() != k_) throw LengthMismatch("BchCode::encode: message length != k");
    const unsigned r = n_ - k_;
    // Remainder of m(x) * x^r mod g(x); word[0] is the highest-degree coefficient.
    const size_t words = (r + 63) / 64;
    std::vector<uint64_t> rem(words, 0);
    const unsigned top_word = (r - 1) >> 6;
    const unsigned top_bit = (r - 1) & 63;
    // g with the leading x^r term dropped, packed.
    std::vector<uint64_t> glow(words, 0);
    for (unsigned i = 0; i < r; ++i)
        if (generator_.get(i)) glow[i >> 6] |= uint64_t(1) << (i & 63);

    for (unsigned i = 0; i < k_; ++i) {
        unsigned fb = (message[i] & 1) ^ unsigned((rem[top_word] >> top_bit) & 1);
        // rem <<= 1
        for (size_t w = words; w-- > 1;) rem[w] = (rem[w] << 1) | (rem[w - 1] >> 63);
        rem[0] <<= 1;
        rem[top_word] &= (top_bit == 63) ? ~uint64_t(0) : ((uint64_t(1) << (top_bit + 1)) - 1);
        if (fb)
            for (size_t w = 0; w < words; ++w) rem[w] ^= glow[w];
    }
    std::vector<uint8_t> cw(n_);
    std::copy(message.begin(), message.end(), cw.begin());
    for (unsigned i = 0; i < r; ++i) {
        // parity bit i corresponds to coefficient x^(r-1-i)
        unsigned b = r - 1 - i;
        cw[k_ + i] = uint8_t((rem[b >> 6] >> (b & 63)) & 1);
    }
    return cw;
}

std::vector<uint32_t> BchCode::compute_syndromes(const std::vector<uint8_t>& word) const {
    const GaloisField& f = *field_;
    const uint32_t q = f.order();
    std::vector<uint32_t> synd(2 * t_ + 1, 0);  // synd[j] = S_j, index 0 unused
    // Odd syndromes by Horner over the word; bit i has exponent n-1-i.
    for (unsigned j = 1; j <= 2 * t_ - 1; j += 2) {
        uint32_t s = 0;
        for (unsigned i = 0; i < n_; ++i) {
            if (s) {
                uint32_t e = f.log(s) + j;
                s = f.pow_alpha(e >= q ? e - q : e);
            }
            s ^= word[i];
        }
        synd[j] = s;
    }
    for (unsigned j = 2; j <= 2 * t_; j += 2) synd[j] = f.mul(synd[j / 2], synd[j / 2]);
    return synd;
}

bool BchCode::syndromes_zero(const std::vector<uint8_t>& word) const {
    auto s = compute_syndromes(word);
    for (unsigned j = 1; j <= 2 * t_; ++j) if (s[j]) return false;
    return true;
}

DecodeOutcome BchCode::decode(const std::vector<uint8_t>& received, unsigned effective_t) const {
    if (received.size() != n_) throw LengthMismatch("BchCode::decode: word length != n");
    if (effective_t < 1 || effective_t > t_)
        throw InvalidParams("BchCode::decode: effective_t out of [1, t]");
    const GaloisField& f = *field_;
    auto synd = compute_syndromes(received);

    bool all_zero = true;
    for (unsigned j = 1; j <= 2 * t_; ++j) all_zero &= (synd[j] == 0);
    if (all_zero) return DecodeOutcome{true, 0, received};

    // Berlekamp-Massey.
    GfPoly sigma{1}, prev{1};
    unsigned L = 0, shift = 1;
    uint32_t b = 1;
    for (unsigned step = 0; step < 2 * t_; ++step) {
        uint32_t d = synd[step + 1];
        for (unsigned i = 1; i <= L && i < sigma.size(); ++i)
            if (sigma[i] && step + 1 > i) d ^= f.mul(sigma[i], synd[step + 1 - i]);
        if (d == 0) {
            ++shift;
        } else if (2 * L <= step) {
            GfPoly tmp = sigma;
            uint32_t coef = f.mul(d, f.inv(b));
            if (sigma.size() < prev.size() + shift) sigma.resize(prev.size() + shift, 0);
            for (size_t i = 0; i < prev.size(); ++i)
                if (prev[i]) sigma[i + shift] ^= f.mul(coef, prev[i]);
            L = step + 1 - L;
            prev = std::move(tmp);
            b = d;
            shift = 1;
        } else {
            uint32_t coef = f.mul(d, f.inv(b));
            if (sigma.size() < prev.size() + shift) sigma.resize(prev.size() + shift, 0);
            for (size_t i = 0; i < prev.size(); ++i)
                if (prev[i]) sigma[i + shift] ^= f.mul(coef, prev[i]);
            ++shift;
        }
    }
    while (!sigma.empty() && sigma.back() == 0) sigma.pop_back();
    unsigned deg = sigma.empty() ? 0 : unsigned(sigma.size() - 1);
    if (deg != L || L == 0 || L > effective_t) return DecodeOutcome{};

    // Chien search: sigma(alpha^{-p}) == 0 places an error at exponent p.
    // All field positions are scanned; a root at a shortened position (p >= n)
    // or a root count below deg means failure.
    const uint32_t q = f.order();
    std::vector<uint32_t> term(deg + 1);
    for (unsigned i = 0; i <= deg; ++i) term[i] = sigma[i];
    unsigned roots = 0;
    std::vector<uint32_t> error_pos;
    for (uint32_t p = 0; p < q; ++p) {
        uint32_t v = 0;
        for (unsigned i = 0; i <= deg; ++i) v ^= term[i];
        if (v == 0) {
            ++roots;
            if (p < n_) error_pos.push_back(p);
        }
        // advance: term_i *= alpha^{-i}
        for (unsigned i = 1; i <= deg; ++i) {
            if (!term[i]) continue;
            uint32_t e = f.log(term[i]) + (q - i % q);
            term[i] = f.pow_alpha(e >= q ? e - q : e);
        }
    }
    if (roots != deg || error_pos.size() != deg) return DecodeOutcome{};

    std::vector<uint8_t> cw = received;
    for (uint32_t p : error_pos) cw[n_ - 1 - p] ^= 1;
    if (!syndromes_zero(cw)) return DecodeOutcome{};
    return DecodeOutcome{true, deg, std::move(cw)};
}

double erasure_probability(unsigned n, unsigned effective_t, double p_e) {
    if (p_e <= 0.0) return 0.0;
    if (p_e >= 1.0) return effective_t >= n ? 0.0 : 1.0;
    const double lp = std::log(p_e), lq = std::log1p(-p_e);
    const double lg_n = std::lgamma(double(n) + 1);
    double sum = 0.0;
    for (unsigned i = effective_t + 1; i <= n; ++i) {
        double lterm = lg_n - std::lgamma(double(i) + 1) - std::lgamma(double(n - i) + 1) +
                       i * lp + (n - i) * lq;
        double term = std::exp(lterm);
        sum += term;
        if (i > p_e * n && term < sum * 1e-17) break;
    }
    return std::min(1.0, sum);
}

double erasure_probability(const BchCode& code, double p_e, unsigned effective_t) {
    return erasure_probability(code.n(), effective_t, p_e);
}

}  // namespace fec
