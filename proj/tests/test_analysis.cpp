#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "fec/analysis.hpp"
#include "fec/rng.hpp"

using namespace fec;

namespace {

std::shared_ptr<const BchCode> make_code(unsigned m, unsigned n, unsigned t) {
    auto gf = std::make_shared<GaloisField>(m, GaloisField::default_primitive_poly(m));
    return std::make_shared<BchCode>(gf, n, t);
}

// 2x2 grid of 4-bit intersections, component code (12,8,1) with 4 parity bits
BwPcLayout tiny_layout(size_t parity_blocks = 1) {
    auto code = make_code(4, 12, 1);
    return make_layout(4, 1, code, code, parity_blocks);
}

// 5x5 grid of 9-bit intersections over (63,45,3)
BwPcLayout small_layout(size_t parity_blocks = 7) {
    auto code = make_code(6, 63, 3);
    return make_layout(9, 1, code, code, parity_blocks);
}

double pmf(unsigned n, unsigned k, double p) {
    double c = 1.0;
    for (unsigned j = 0; j < k; ++j) c = c * double(n - j) / double(j + 1);
    return c * std::pow(p, k) * std::pow(1.0 - p, double(n - k));
}

}  // namespace

TEST_CASE("conditional_raptor_failure: clamp and direct substitution") {
    CHECK(conditional_raptor_failure(1, 148, 100, 48) == 1.0);
    CHECK(conditional_raptor_failure(1, 148, 100, 60) == 1.0);  // beyond surplus stays clamped
    CHECK(conditional_raptor_failure(4, 148, 100, 5) ==
          doctest::Approx(std::exp2(-172.0)).epsilon(1e-12));
    CHECK(conditional_raptor_failure(2, 110, 100, 7) == doctest::Approx(std::exp2(-6.0)));
    CHECK(conditional_raptor_failure(1, 148, 100, 0) == doctest::Approx(std::exp2(-48.0)));
}

TEST_CASE("block_failure_bound equals a direct-summation reference") {
    BlockGeometry g;
    g.pages = 4;
    g.words_per_page = 8;
    g.symbols_per_word = 1;
    g.parity_symbols = 8;
    g.symbol_bytes = 6;
    g.inner = make_code(6, 63, 3);

    CHECK(block_failure_bound(g, 0.0, 0.0) == 0.0);

    const size_t K = g.word_count();
    for (double p : {1e-3, 1e-2, 0.05}) {
        double pe = erasure_probability(*g.inner, p, 3);
        double ref = 0.0;
        for (size_t i = 1; i <= K; ++i) {
            double w = std::min(1.0, std::exp2(-double(g.parity_symbols) + double(i)));
            ref += pmf(unsigned(K), unsigned(i), pe) * w;
        }
        CHECK(block_failure_bound(g, p, 0.0) == doctest::Approx(ref).epsilon(1e-9));
        // miss-corrections enter as K * P_ue exactly
        CHECK(block_failure_bound(g, p, 1e-6) ==
              doctest::Approx(ref + double(K) * 1e-6).epsilon(1e-9));
    }
    // clamp: i at or past the surplus contributes with weight exactly one
    CHECK(conditional_raptor_failure(1, g.total_symbols(), g.source_symbols(), 8) == 1.0);
}

TEST_CASE("p_ij exact path matches an exhaustive profile oracle") {
    BwPcLayout l = tiny_layout();
    REQUIRE(l.grid_rows() == 2);
    REQUIRE(l.grid_cols() == 2);
    REQUIRE(l.m_r() == 4);

    for (double p : {0.02, 0.05, 0.15}) {
        // (1,1): one intersection of 4 bits plus one 4-bit row parity and one
        // 4-bit column parity; failure needs n1+na > 1 and n1+nb > 1
        double oracle11 = 0.0;
        for (unsigned n1 = 0; n1 <= 4; ++n1)
            for (unsigned na = 0; na <= 4; ++na)
                for (unsigned nb = 0; nb <= 4; ++nb)
                    if (n1 + na > 1 && n1 + nb > 1)
                        oracle11 += pmf(4, n1, p) * pmf(4, na, p) * pmf(4, nb, p);
        oracle11 *= 4.0;  // C(2,1) * C(2,1) row/column selections

        PijResult r11 = p_ij(l, p, 1, 1);
        CHECK(r11.exact);
        CHECK(r11.std_error == 0.0);
        CHECK(r11.value == doctest::Approx(oracle11).epsilon(1e-10));

        // (1,2): one row crossing two columns
        double oracle12 = 0.0;
        for (unsigned n1 = 0; n1 <= 4; ++n1)
            for (unsigned n2 = 0; n2 <= 4; ++n2)
                for (unsigned na = 0; na <= 4; ++na)
                    for (unsigned nb1 = 0; nb1 <= 4; ++nb1)
                        for (unsigned nb2 = 0; nb2 <= 4; ++nb2)
                            if (na + n1 + n2 > 1 && nb1 + n1 > 1 && nb2 + n2 > 1)
                                oracle12 += pmf(4, n1, p) * pmf(4, n2, p) * pmf(4, na, p) *
                                            pmf(4, nb1, p) * pmf(4, nb2, p);
        oracle12 *= 2.0;  // C(2,1) * C(2,2)

        PijResult r12 = p_ij(l, p, 1, 2);
        CHECK(r12.exact);
        CHECK(r12.value == doctest::Approx(oracle12).epsilon(1e-10));
    }

    CHECK(p_ij(l, 0.0, 1, 1).value == 0.0);
    CHECK(p_ij(l, 0.0, 2, 2).value == 0.0);
}

TEST_CASE("p_ij Monte Carlo agrees with the exact path within 3 sigma") {
    BwPcLayout l = tiny_layout();
    PijOptions mc;
    mc.force_mc = true;
    mc.mc_samples = 400'000;
    mc.seed = 5;

    for (double p : {0.05, 0.15}) {
        for (auto [i, j] : {std::pair<size_t, size_t>{1, 1}, {1, 2}, {2, 2}}) {
            PijResult exact = p_ij(l, p, i, j);
            PijResult est = p_ij(l, p, i, j, mc);
            REQUIRE(exact.exact);
            REQUIRE_FALSE(est.exact);
            CHECK(est.std_error > 0.0);
            CHECK(std::abs(est.value - exact.value) <= 3.0 * est.std_error + 1e-12);
        }
    }
}

TEST_CASE("p_ij raises TooLarge when both strategies are ruled out") {
    BwPcLayout l = tiny_layout();
    PijOptions opts;
    opts.enum_budget = 1;
    opts.mc_samples = 0;
    CHECK_THROWS_AS(p_ij(l, 0.01, 1, 1, opts), TooLarge);
}

TEST_CASE("p_f_inner is the sum of the evaluated pair probabilities") {
    BwPcLayout l = tiny_layout();
    // the 2x2 grid only supports pairs up to (2,2)
    std::vector<std::pair<size_t, size_t>> pairs = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
    double total = 0.0;
    for (auto [i, j] : pairs) total += p_ij(l, 0.05, i, j).value;
    CHECK(p_f_inner(l, 0.05, pairs) == doctest::Approx(std::min(1.0, total)).epsilon(1e-12));

    CHECK(default_pairs().size() == 6);
}

TEST_CASE("p_raptor: surplus weighting, zero point, monotonicity") {
    BwPcLayout l = small_layout(7);
    RaptorParams params = raptor_params_for(l, LtMode::DenseRandom, 1);
    std::vector<std::pair<size_t, size_t>> pair22 = {{2, 2}};

    CHECK(p_raptor(l, params, 0.0) == 0.0);

    // pair (2,2) at N_i=1, parity blocks 7: surplus exponent 1*(7-4) = 3
    double expected = p_ij(l, 0.01, 2, 2).value * std::exp2(-3.0);
    CHECK(p_raptor(l, params, 0.01, pair22) == doctest::Approx(expected).epsilon(1e-12));

    double prev = 0.0;
    for (double p : {1e-4, 1e-3, 3e-3, 1e-2, 3e-2}) {
        double cur = p_raptor(l, params, p);
        CHECK(cur >= prev);
        CHECK(cur <= 1.0);
        prev = cur;
    }
}

TEST_CASE("analyze_bwpc_point bundles the three curves consistently") {
    BwPcLayout l = small_layout(7);
    RaptorParams params = raptor_params_for(l, LtMode::DenseRandom, 1);
    AnalysisPoint pt = analyze_bwpc_point(l, params, 0.01);
    CHECK(pt.p_e == 0.01);
    CHECK(pt.p11 == doctest::Approx(p_ij(l, 0.01, 1, 1).value).epsilon(1e-12));
    CHECK(pt.pf_inner == doctest::Approx(p_f_inner(l, 0.01)).epsilon(1e-12));
    CHECK(pt.p_raptor == doctest::Approx(p_raptor(l, params, 0.01)).epsilon(1e-12));
    CHECK(pt.p11 <= pt.pf_inner);
}

TEST_CASE("long_bch_page_error: single word equals Eq.-style word error") {
    auto code = make_code(6, 63, 3);
    for (double p : {1e-3, 1e-2, 0.05})
        CHECK(long_bch_page_error(*code, p, 1) ==
              doctest::Approx(erasure_probability(*code, p, 3)).epsilon(1e-12));

    double prev = 1.0;
    for (double p : {5e-2, 1e-2, 1e-3, 1e-4}) {
        double cur = long_bch_page_error(*code, p, 4);
        CHECK(cur < prev);  // monotone decreasing with decreasing raw BER
        prev = cur;
    }
}

TEST_CASE("long_bch_page_error matches a decode-based Monte Carlo") {
    auto code = make_code(6, 63, 3);
    Rng data_rng(3);
    std::vector<uint8_t> msg(45);
    for (auto& b : msg) b = uint8_t(data_rng.next() & 1);
    auto cw = code->encode(msg);

    const double p = 0.01;
    const size_t words = 4, trials = 100'000;
    Rng rng(17);
    size_t page_failures = 0;
    for (size_t t = 0; t < trials; ++t) {
        bool fail = false;
        for (size_t w = 0; w < words && !fail; ++w) {
            auto r = cw;
            for (auto& b : r)
                if (rng.chance(p)) b ^= 1;
            auto out = code->decode(r);
            if (!out.corrected || out.codeword != cw) fail = true;
        }
        if (fail) ++page_failures;
    }
    double analytic = long_bch_page_error(*code, p, words);
    double freq = double(page_failures) / double(trials);
    CHECK(freq == doctest::Approx(analytic).epsilon(0.10));
}
