#include "fec/galois.hpp"

namespace fec {

GaloisField::GaloisField(unsigned m, uint32_t primitive_poly)
    : m_(m), poly_(primitive_poly), order_((uint32_t(1) << m) - 1) {
    if (m < 3 || m > 16) throw std::invalid_argument("GaloisField: m must be in [3,16]");
    antilog_.assign(order_, 0);
    log_.assign(order_ + 1, 0);
    uint32_t x = 1;
    for (uint32_t i = 0; i < order_; ++i) {
        if (x == 1 && i != 0) {
            // alpha has order i < 2^m - 1: poly is not primitive.
            throw NotPrimitive("GaloisField: polynomial is not primitive");
        }
        antilog_[i] = x;
        log_[x] = i;
        x <<= 1;
        if (x > order_) x ^= poly_;
        if (x > order_) throw NotPrimitive("GaloisField: polynomial has wrong degree");
    }
    if (x != 1) throw NotPrimitive("GaloisField: multiplicative group has wrong order");
}

GaloisField gf_build(unsigned m, uint32_t primitive_poly) {
    return GaloisField(m, primitive_poly);
}

uint32_t GaloisField::default_primitive_poly(unsigned m) {
    switch (m) {
        case 3: return 0xB;
        case 4: return 0x13;
        case 5: return 0x25;
        case 6: return 0x43;
        case 7: return 0x89;
        case 8: return 0x11D;
        case 9: return 0x211;
        case 10: return 0x409;
        case 11: return 0x805;
        case 12: return 0x1053;
        case 13: return 0x201B;
        case 14: return 0x4443;
        case 15: return 0x8003;
        case 16: return 0x1100B;
        default: throw std::invalid_argument("default_primitive_poly: m must be in [3,16]");
    }
}

}  // namespace fec
