#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "fec/galois.hpp"
#include "fec/gf2.hpp"

namespace fec {

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecodeOutcome {
    bool corrected = false;
    unsigned error_count = 0;       // valid when corrected
    std::vector<uint8_t> codeword;  // zero-syndrome word, bit-per-entry, when corrected
};

// Binary BCH code over GF(2^m), systematic, bounded-distance decoded.
// Shortening fixes leading message bits to zero and omits them from the
// stored word; syndrome computation accounts for the offset.
class BchCode {
public:
    BchCode(std::shared_ptr<const GaloisField> field, unsigned n, unsigned t);

    unsigned n() const { return n_; }
    unsigned k() const { return k_; }
    unsigned t() const { return t_; }
    unsigned shortened_by() const { return shortened_by_; }
    const GaloisField& field() const { return *field_; }
    // Generator polynomial, bit i = coefficient of x^i.
    const BitVec& generator_poly() const { return generator_; }

    // Systematic encode: codeword = [message | parity], bit-per-entry.
    std::vector<uint8_t> encode(const std::vector<uint8_t>& message) const;

    // Berlekamp-Massey + Chien search, accepting corrections of weight up to
    // effective_t <= t (the decoding sphere). Miss-correction to a wrong
    // codeword is possible and is the caller's concern.
    DecodeOutcome decode(const std::vector<uint8_t>& received, unsigned effective_t) const;
    DecodeOutcome decode(const std::vector<uint8_t>& received) const { return decode(received, t_); }

    bool syndromes_zero(const std::vector<uint8_t>& word) const;

private:
    std::vector<uint32_t> compute_syndromes(const std::vector<uint8_t>& word) const;

    std::shared_ptr<const GaloisField> field_;
    unsigned n_, k_, t_, shortened_by_;
    BitVec generator_;
};

BchCode bch_generate(std::shared_ptr<const GaloisField> field, unsigned n, unsigned t);

// Analytic word-erasure probability: probability that more than effective_t
// channel errors land in one n-bit word. Evaluated in log-domain.
double erasure_probability(const BchCode& code, double p_e, unsigned effective_t);
double erasure_probability(unsigned n, unsigned effective_t, double p_e);

}  // namespace fec
