#include "fec/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "fec/rng.hpp"

namespace fec {

namespace {

double log_choose(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// Binomial(n, p) pmf, exact-ish via log domain.
std::vector<double> binom_pmf(size_t n, double p) {
    std::vector<double> pmf(n + 1, 0.0);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[n] = 1.0;
        return pmf;
    }
    const double lp = std::log(p), lq = std::log1p(-p);
    for (size_t i = 0; i <= n; ++i)
        pmf[i] = std::exp(log_choose(double(n), double(i)) + double(i) * lp +
                          double(n - i) * lq);
    return pmf;
}

// tail[s] = P(X > thr - s) for X ~ Binomial(m, p), s = 0..max_s. Summed from
// the upper end so small tails keep full relative precision.
std::vector<double> shifted_tails(size_t m, double p, long thr, size_t max_s) {
    std::vector<double> pmf = binom_pmf(m, p);
    std::vector<double> tail_ge(m + 2, 0.0);  // tail_ge[v] = P(X >= v)
    for (size_t v = m + 1; v-- > 0;)
        tail_ge[v] = pmf[v] + (v + 1 <= m ? tail_ge[v + 1] : 0.0);
    std::vector<double> out(max_s + 1, 0.0);
    for (size_t s = 0; s <= max_s; ++s) {
        long need = thr - long(s) + 1;  // smallest count that still fails
        if (need <= 0) out[s] = 1.0;
        else if (size_t(need) > m) out[s] = 0.0;
        else out[s] = tail_ge[size_t(need)];
    }
    return out;
}

double pow_int(double x, size_t e) {
    double r = 1.0;
    while (e) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

struct PijContext {
    size_t cells;  // i*j
    size_t i, j;
    std::vector<double> cell_pmf;   // Binomial(n_B, p)
    std::vector<double> row_tail;   // indexed by row intersection sum
    std::vector<double> col_tail;
    double prefactor;
};

PijContext make_context(const BwPcLayout& l, double p_e, size_t i, size_t j) {
    PijContext ctx;
    ctx.cells = i * j;
    ctx.i = i;
    ctx.j = j;
    ctx.cell_pmf = binom_pmf(l.n_b, p_e);
    ctx.row_tail = shifted_tails(l.m_r(), p_e, long(l.row->t()), j * l.n_b);
    ctx.col_tail = shifted_tails(l.m_c(), p_e, long(l.col->t()), i * l.n_b);
    ctx.prefactor = std::exp(log_choose(double(l.grid_rows()), double(i)) +
                             log_choose(double(l.grid_cols()), double(j)));
    return ctx;
}

// Weight of one intersection count matrix: probability of the counts times
// the closed-form probability that every selected row and column parity
// block pushes its code past its decoding sphere.
double matrix_weight(const PijContext& ctx, const std::vector<size_t>& n) {
    double w = 1.0;
    for (size_t c = 0; c < ctx.cells; ++c) w *= ctx.cell_pmf[n[c]];
    if (w == 0.0) return 0.0;
    for (size_t r = 0; r < ctx.i; ++r) {
        size_t s = 0;
        for (size_t c = 0; c < ctx.j; ++c) s += n[r * ctx.j + c];
        w *= ctx.row_tail[s];
        if (w == 0.0) return 0.0;
    }
    for (size_t c = 0; c < ctx.j; ++c) {
        size_t s = 0;
        for (size_t r = 0; r < ctx.i; ++r) s += n[r * ctx.j + c];
        w *= ctx.col_tail[s];
        if (w == 0.0) return 0.0;
    }
    return w;
}

PijResult p_ij_exact(const BwPcLayout& l, const PijContext& ctx) {
    std::vector<size_t> n(ctx.cells, 0);
    double sum = 0.0;
    for (;;) {  // odometer over (n_B+1)^{cells} count matrices
        sum += matrix_weight(ctx, n);
        size_t d = 0;
        while (d < ctx.cells && n[d] == l.n_b) n[d++] = 0;
        if (d == ctx.cells) break;
        ++n[d];
    }
    PijResult res;
    res.value = std::min(1.0, ctx.prefactor * sum);
    return res;
}

// Inversion sampling keeps antithetic pairs (u, 1-u) negatively correlated.
size_t binom_inverse(const std::vector<double>& pmf, double u) {
    double acc = 0.0;
    for (size_t v = 0; v + 1 < pmf.size(); ++v) {
        acc += pmf[v];
        if (u < acc) return v;
    }
    return pmf.size() - 1;
}

PijResult p_ij_mc(const BwPcLayout& l, const PijContext& ctx, const PijOptions& opts) {
    (void)l;
    Rng rng(opts.seed, 0x70696a, ctx.i * 64 + ctx.j);
    const size_t pairs = std::max<size_t>(1, opts.mc_samples / 2);
    double sum = 0.0, sum_sq = 0.0;
    std::vector<size_t> n(ctx.cells), na(ctx.cells);
    for (size_t s = 0; s < pairs; ++s) {
        for (size_t c = 0; c < ctx.cells; ++c) {
            double u = rng.uniform();
            n[c] = binom_inverse(ctx.cell_pmf, u);
            na[c] = binom_inverse(ctx.cell_pmf, 1.0 - u);
        }
        // conditional estimator: parity tails already integrated out
        double h = 1.0, ha = 1.0;
        for (size_t r = 0; r < ctx.i; ++r) {
            size_t a = 0, b = 0;
            for (size_t c = 0; c < ctx.j; ++c) a += n[r * ctx.j + c], b += na[r * ctx.j + c];
            h *= ctx.row_tail[a];
            ha *= ctx.row_tail[b];
        }
        for (size_t c = 0; c < ctx.j; ++c) {
            size_t a = 0, b = 0;
            for (size_t r = 0; r < ctx.i; ++r) a += n[r * ctx.j + c], b += na[r * ctx.j + c];
            h *= ctx.col_tail[a];
            ha *= ctx.col_tail[b];
        }
        double v = 0.5 * (h + ha);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / double(pairs);
    const double var = std::max(0.0, sum_sq / double(pairs) - mean * mean);
    PijResult res;
    res.exact = false;
    res.value = std::min(1.0, ctx.prefactor * mean);
    res.std_error = ctx.prefactor * std::sqrt(var / double(pairs));
    return res;
}

}  // namespace

double conditional_raptor_failure(size_t n_s, size_t n, size_t k, size_t i) {
    if (n < k || i > k) throw std::invalid_argument("conditional_raptor_failure: bad arguments");
    const double surplus = double(n_s) * double(n - k) - double(n_s) * double(i);
    if (surplus <= 0.0) return 1.0;
    return std::exp2(-surplus);
}

double block_failure_bound(const BlockGeometry& geom, double p_e, double p_ue) {
    if (!geom.inner) throw std::invalid_argument("block_failure_bound: geometry has no inner code");
    if (geom.parity_symbols % geom.symbols_per_word != 0)
        throw std::invalid_argument("block_failure_bound: parity symbols not word-aligned");
    const size_t k = geom.word_count();
    const size_t parity_words = geom.parity_symbols / geom.symbols_per_word;
    const double pe_word = erasure_probability(*geom.inner, p_e, geom.inner->t());
    double sum = 0.0;
    if (pe_word > 0.0 && pe_word < 1.0) {
        const double lp = std::log(pe_word), lq = std::log1p(-pe_word);
        for (size_t i = 1; i <= k; ++i) {
            double logw = log_choose(double(k), double(i)) + double(i) * lp +
                          double(k - i) * lq;
            double cond = conditional_raptor_failure(geom.symbols_per_word, k + parity_words, k, i);
            sum += std::exp(logw) * cond;
            if (logw < std::log(1e-30) && double(i) > pe_word * double(k)) break;
        }
    } else if (pe_word >= 1.0) {
        sum = conditional_raptor_failure(geom.symbols_per_word, k + parity_words, k, k);
    }
    return std::min(1.0, sum + double(k) * p_ue);
}

PijResult p_ij(const BwPcLayout& layout, double p_e, size_t i, size_t j, const PijOptions& opts) {
    if (i == 0 || j == 0 || i > layout.grid_rows() || j > layout.grid_cols())
        throw std::invalid_argument("p_ij: pair out of range");
    if (p_e <= 0.0) return PijResult{};
    PijContext ctx = make_context(layout, p_e, i, j);
    double terms = pow_int(double(layout.n_b + 1), ctx.cells);
    if (!opts.force_mc && terms <= double(opts.enum_budget)) return p_ij_exact(layout, ctx);
    if (opts.mc_samples == 0) throw TooLarge("p_ij: enumeration over budget and Monte Carlo disabled");
    return p_ij_mc(layout, ctx, opts);
}

const std::vector<std::pair<size_t, size_t>>& default_pairs() {
    static const std::vector<std::pair<size_t, size_t>> pairs = {
        {1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 1}, {1, 3}};
    return pairs;
}

double p_f_inner(const BwPcLayout& layout, double p_e,
                 const std::vector<std::pair<size_t, size_t>>& pairs, const PijOptions& opts) {
    double sum = 0.0;
    for (auto [i, j] : pairs) sum += p_ij(layout, p_e, i, j, opts).value;
    return std::min(1.0, sum);
}

double p_raptor(const BwPcLayout& layout, const RaptorParams& params, double p_e,
                const std::vector<std::pair<size_t, size_t>>& pairs, const PijOptions& opts) {
    if (params.N != layout.total_symbols() || params.K != layout.source_symbols())
        throw std::invalid_argument("p_raptor: params do not match layout");
    double sum = 0.0;
    for (auto [i, j] : pairs) {
        // N-K in grid cells is the parity block count
        const double surplus =
            double(layout.n_i) * (double(layout.parity_blocks) - double(i) * double(j));
        const double cond = surplus <= 0.0 ? 1.0 : std::exp2(-surplus);
        sum += cond * p_ij(layout, p_e, i, j, opts).value;
    }
    return std::min(1.0, sum);
}

double long_bch_page_error(const BchCode& code, double p_e, size_t words_per_page) {
    if (words_per_page < 1) throw std::invalid_argument("long_bch_page_error: need >= 1 word");
    const double p_word = erasure_probability(code, p_e, code.t());
    if (p_word >= 1.0) return 1.0;
    return -std::expm1(double(words_per_page) * std::log1p(-p_word));
}

AnalysisPoint analyze_bwpc_point(const BwPcLayout& layout, const RaptorParams& params, double p_e,
                                 const PijOptions& opts) {
    AnalysisPoint pt;
    pt.p_e = p_e;
    pt.p11 = p_ij(layout, p_e, 1, 1, opts).value;
    pt.pf_inner = p_f_inner(layout, p_e, default_pairs(), opts);
    pt.p_raptor = p_raptor(layout, params, p_e, default_pairs(), opts);
    return pt;
}

}  // namespace fec
