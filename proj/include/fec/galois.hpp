#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fec {

struct NotPrimitive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// GF(2^m) with log/antilog tables. Immutable after construction.
class GaloisField {
public:
    GaloisField(unsigned m, uint32_t primitive_poly);

    unsigned m() const { return m_; }
    uint32_t primitive_poly() const { return poly_; }
    uint32_t order() const { return order_; }  // 2^m - 1

    uint32_t mul(uint32_t a, uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        return antilog_[mod(log_[a] + log_[b])];
    }
    uint32_t inv(uint32_t a) const {
        if (a == 0) throw std::domain_error("GaloisField::inv(0)");
        return antilog_[(order_ - log_[a]) % order_];
    }
    uint32_t pow_alpha(uint32_t e) const { return antilog_[e % order_]; }
    uint32_t log(uint32_t a) const { return log_[a]; }

    // Conventional minimal-weight primitive polynomial for m in [3, 16].
    static uint32_t default_primitive_poly(unsigned m);

private:
    uint32_t mod(uint32_t e) const { return e >= order_ ? e - order_ : e; }
    unsigned m_;
    uint32_t poly_;
    uint32_t order_;
    std::vector<uint32_t> log_;
    std::vector<uint32_t> antilog_;
};

// gf_build of the module contract: verifies primitivity by checking the
// generated multiplicative group has full order.
GaloisField gf_build(unsigned m, uint32_t primitive_poly);

}  // namespace fec
