#include "fec/block_recovery.hpp"

#include <cstring>
#include <istream>
#include <ostream>

namespace fec {

RaptorParams raptor_params_for(const BlockGeometry& geom, LtMode mode, uint64_t seed) {
    return RaptorParams::with_defaults(geom.source_symbols(), geom.total_symbols(),
                                       geom.symbol_bytes, mode, seed);
}

WriteState::WriteState(const BlockGeometry& geom, std::shared_ptr<const RaptorCode> code)
    : geom_(geom), code_(std::move(code)),
      parities_(geom.parity_symbols, Symbol(geom.symbol_bytes, 0)) {
    if (code_->params().K != geom_.source_symbols() || code_->params().N != geom_.total_symbols())
        throw std::invalid_argument("WriteState: code does not match geometry");
}

void WriteState::apply_word(size_t index, const std::vector<uint8_t>& a,
                            const std::vector<uint8_t>* b) {
    const size_t ns = geom_.symbols_per_word, tb = geom_.symbol_bytes;
    const auto& luts = code_->parity_luts();
    for (size_t s = 0; s < ns; ++s) {
        size_t sym_index = index * ns + s;
        for (size_t k = 0; k < parities_.size(); ++k) {
            if (!luts[k].get(sym_index)) continue;
            uint8_t* dst = parities_[k].data();
            const uint8_t* pa = a.data() + s * tb;
            if (b) {
                const uint8_t* pb = b->data() + s * tb;
                for (size_t i = 0; i < tb; ++i) dst[i] ^= uint8_t(pa[i] ^ pb[i]);
            } else {
                for (size_t i = 0; i < tb; ++i) dst[i] ^= pa[i];
            }
        }
    }
}

void WriteState::push_word(const std::vector<uint8_t>& word) {
    if (word.size() != geom_.word_bytes()) throw WordSizeMismatch("push_word: wrong word size");
    if (words_seen_ >= geom_.word_count()) throw IndexOutOfRange("push_word: block already full");
    apply_word(words_seen_, word, nullptr);
    ++words_seen_;
}

void WriteState::update_word(size_t index, const std::vector<uint8_t>& old_word,
                             const std::vector<uint8_t>& new_word) {
    if (old_word.size() != geom_.word_bytes() || new_word.size() != geom_.word_bytes())
        throw WordSizeMismatch("update_word: wrong word size");
    if (index >= words_seen_) throw IndexOutOfRange("update_word: word not written yet");
    apply_word(index, old_word, &new_word);
}

WriteState stream_write(const BlockGeometry& geom, std::shared_ptr<const RaptorCode> code,
                        const std::vector<std::vector<uint8_t>>& words) {
    if (words.size() > geom.word_count()) throw IndexOutOfRange("stream_write: too many words");
    WriteState st(geom, std::move(code));
    for (const auto& w : words) st.push_word(w);
    return st;
}

std::optional<std::vector<RecoveredWord>> recover_block(const BlockGeometry& geom,
                                                        const RaptorCode& code,
                                                        const std::vector<StoredWord>& stored,
                                                        size_t* reads_performed) {
    const size_t ns = geom.symbols_per_word, tb = geom.symbol_bytes;
    const size_t source_words = geom.word_count();
    if (geom.parity_symbols % ns != 0)
        throw std::invalid_argument("recover_block: parity symbols not word-aligned");
    const size_t parity_words = geom.parity_symbols / ns;
    if (stored.size() != source_words + parity_words)
        throw std::invalid_argument("recover_block: wrong stored word count");

    ErasurePattern pattern;
    std::vector<size_t> failed_source_words;
    for (size_t wi = 0; wi < stored.size(); ++wi) {
        if (!stored[wi].failed) continue;
        if (wi < source_words) failed_source_words.push_back(wi);
        for (size_t s = 0; s < ns; ++s) pattern.erased.push_back(wi * ns + s);
    }
    if (pattern.erased.empty()) {
        if (reads_performed) *reads_performed = 0;
        return std::vector<RecoveredWord>{};
    }

    auto luts = code.build_erasure_luts(pattern);
    if (!luts) return std::nullopt;

    // Only words whose LUT bit is set are read back.
    std::vector<char> word_read(stored.size(), 0);
    std::vector<RecoveredWord> out;
    size_t lut_idx = 0;
    for (size_t wi : failed_source_words) {
        RecoveredWord rec{wi, std::vector<uint8_t>(geom.word_bytes(), 0)};
        for (size_t s = 0; s < ns; ++s) {
            const BitVec& lut = (*luts)[lut_idx++];
            uint8_t* dst = rec.bytes.data() + s * tb;
            for (size_t i = 0; i < code.params().N; ++i) {
                if (!lut.get(i)) continue;
                size_t src_word = i / ns;
                word_read[src_word] = 1;
                const uint8_t* src = stored[src_word].bytes.data() + (i % ns) * tb;
                for (size_t b = 0; b < tb; ++b) dst[b] ^= src[b];
            }
        }
        out.push_back(std::move(rec));
    }
    if (reads_performed) {
        size_t n = 0;
        for (char c : word_read) n += c;
        *reads_performed = n;
    }
    return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) os.put(char((uint64_t(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& is) {
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        int c = is.get();
        if (c < 0) throw std::runtime_error("BlockStore: truncated file");
        v |= uint64_t(uint8_t(c)) << (8 * i);
    }
    return T(v);
}

}  // namespace

void BlockStore::save(std::ostream& os) const {
    os.write("FBLK", 4);
    put_le<uint16_t>(os, 1);  // version
    put_le<uint32_t>(os, uint32_t(geom.pages));
    put_le<uint32_t>(os, uint32_t(geom.words_per_page));
    put_le<uint32_t>(os, uint32_t(geom.symbols_per_word));
    put_le<uint32_t>(os, uint32_t(geom.symbol_bytes));
    put_le<uint32_t>(os, uint32_t(geom.parity_symbols));
    // inner code id: (m, n, t); all zero when absent
    if (geom.inner) {
        put_le<uint32_t>(os, geom.inner->field().m());
        put_le<uint32_t>(os, geom.inner->n());
        put_le<uint32_t>(os, geom.inner->t());
    } else {
        put_le<uint32_t>(os, 0);
        put_le<uint32_t>(os, 0);
        put_le<uint32_t>(os, 0);
    }
    put_le<uint8_t>(os, uint8_t(lt_mode));
    put_le<uint64_t>(os, seed);
    for (const auto& w : words) os.write(reinterpret_cast<const char*>(w.data()), w.size());
    for (const auto& p : parities) os.write(reinterpret_cast<const char*>(p.data()), p.size());
}

BlockStore BlockStore::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, "FBLK", 4) != 0)
        throw std::runtime_error("BlockStore: bad magic");
    uint16_t version = get_le<uint16_t>(is);
    if (version != 1) throw std::runtime_error("BlockStore: unsupported version");
    BlockStore bs;
    bs.geom.pages = get_le<uint32_t>(is);
    bs.geom.words_per_page = get_le<uint32_t>(is);
    bs.geom.symbols_per_word = get_le<uint32_t>(is);
    bs.geom.symbol_bytes = get_le<uint32_t>(is);
    bs.geom.parity_symbols = get_le<uint32_t>(is);
    uint32_t m = get_le<uint32_t>(is);
    uint32_t n = get_le<uint32_t>(is);
    uint32_t t = get_le<uint32_t>(is);
    if (m != 0) {
        auto gf = std::make_shared<GaloisField>(m, GaloisField::default_primitive_poly(m));
        bs.geom.inner = std::make_shared<BchCode>(gf, n, t);
    }
    bs.lt_mode = LtMode(get_le<uint8_t>(is));
    bs.seed = get_le<uint64_t>(is);
    bs.words.assign(bs.geom.word_count(), std::vector<uint8_t>(bs.geom.word_bytes()));
    for (auto& w : bs.words) {
        is.read(reinterpret_cast<char*>(w.data()), w.size());
        if (size_t(is.gcount()) != w.size()) throw std::runtime_error("BlockStore: truncated words");
    }
    bs.parities.assign(bs.geom.parity_symbols, Symbol(bs.geom.symbol_bytes));
    for (auto& p : bs.parities) {
        is.read(reinterpret_cast<char*>(p.data()), p.size());
        if (size_t(is.gcount()) != p.size()) throw std::runtime_error("BlockStore: truncated parities");
    }
    return bs;
}

}  // namespace fec
