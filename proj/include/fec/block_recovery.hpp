#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fec/bch.hpp"
#include "fec/raptor.hpp"

namespace fec {

struct WordSizeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Geometry of one logical NAND block: p pages of w inner codewords, each
// inner codeword carrying symbols_per_word Raptor symbols of T bytes.
struct BlockGeometry {
    size_t pages = 0;
    size_t words_per_page = 0;
    size_t symbols_per_word = 1;  // N_s
    size_t parity_symbols = 0;    // N - K
    size_t symbol_bytes = 1;      // T
    std::shared_ptr<const BchCode> inner;  // may be null for injection-style drills

    size_t word_count() const { return pages * words_per_page; }
    size_t source_symbols() const { return word_count() * symbols_per_word; }  // K
    size_t total_symbols() const { return source_symbols() + parity_symbols; }  // N
    size_t word_bytes() const { return symbols_per_word * symbol_bytes; }
};

RaptorParams raptor_params_for(const BlockGeometry& geom, LtMode mode, uint64_t seed);

// Streaming parity maintenance: holds only the N-K parity buffers, never the
// whole block.
class WriteState {
public:
    WriteState(const BlockGeometry& geom, std::shared_ptr<const RaptorCode> code);

    // Append the next word of the stream (word_bytes() bytes).
    void push_word(const std::vector<uint8_t>& word);
    // Replace an already-written word; parities are XORed with old ^ new.
    void update_word(size_t index, const std::vector<uint8_t>& old_word,
                     const std::vector<uint8_t>& new_word);

    size_t words_seen() const { return words_seen_; }
    const std::vector<Symbol>& parities() const { return parities_; }

private:
    void apply_word(size_t index, const std::vector<uint8_t>& a,
                    const std::vector<uint8_t>* b);

    BlockGeometry geom_;
    std::shared_ptr<const RaptorCode> code_;
    std::vector<Symbol> parities_;
    size_t words_seen_ = 0;
};

// One-pass encode of an ordered word stream (at most word_count() words; a
// short stream is implicitly zero-padded).
WriteState stream_write(const BlockGeometry& geom, std::shared_ptr<const RaptorCode> code,
                        const std::vector<std::vector<uint8_t>>& words);

struct StoredWord {
    std::vector<uint8_t> bytes;
    bool failed = false;  // inner-decoder erasure tag
};

struct RecoveredWord {
    size_t index = 0;  // word position within the block (source words only)
    std::vector<uint8_t> bytes;
};

// Off-line recovery drill: stored covers word_count() source words followed
// by parity_symbols/symbols_per_word parity words, each tagged by the inner
// decoder. Reads only words flagged in the erasure LUTs; *reads_performed
// (optional) counts them. Returns nullopt when Raptor decoding fails.
std::optional<std::vector<RecoveredWord>> recover_block(
    const BlockGeometry& geom, const RaptorCode& code, const std::vector<StoredWord>& stored,
    size_t* reads_performed = nullptr);

// Block store file format: "FBLK" magic, version, geometry, inner code id,
// Raptor seed/mode, then words in page order, then parity symbols.
// Little-endian integers throughout.
struct BlockStore {
    BlockGeometry geom;
    LtMode lt_mode = LtMode::DenseRandom;
    uint64_t seed = 0;
    std::vector<std::vector<uint8_t>> words;  // word_count() entries
    std::vector<Symbol> parities;             // parity_symbols entries

    void save(std::ostream& os) const;
    static BlockStore load(std::istream& is);
};

}  // namespace fec
