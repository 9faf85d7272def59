#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace convsearch {

// Ordered lowercase terms. Invariant: no empty tokens.
using TokenSequence = std::vector<std::string>;

// Lowercases and splits on any non-alphanumeric run. "Alphanumeric" means
// ASCII [0-9A-Za-z] plus any byte >= 0x80, so UTF-8 sequences survive as
// token bytes while ASCII punctuation and whitespace separate. Pure and
// locale-independent.
TokenSequence tokenize(std::string_view text);

// FNV-1a 64-bit over the token's UTF-8 bytes. This is a bit-exact contract:
// hashed feature indexes must be portable across implementations.
std::uint64_t fnv1a64(std::string_view bytes);

// Hashed bag-of-words vector. Entries are sorted by feature index and never
// hold zero weights.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::uint32_t dim = 0;

    double l2_norm() const;
};

// Feature index = fnv1a64(token) mod dim. Raw weight per index is
// log(1 + tf) summed over colliding tokens, then the vector is
// L2-normalized. Empty input yields the zero vector. dim must be >= 1.
SparseVector hash_features(const TokenSequence& tokens, std::uint32_t dim);

}  // namespace convsearch
