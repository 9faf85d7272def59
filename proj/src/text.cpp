#include "convsearch/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "convsearch/error.hpp"

namespace convsearch {
namespace {

bool is_token_byte(unsigned char c) {
    if (c >= 0x80) return true;
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z');
}

char lower_ascii(unsigned char c) {
    if (c >= 'A' && c <= 'Z') return static_cast<char>(c + 32);
    return static_cast<char>(c);
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::string current;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_token_byte(c)) {
            current.push_back(lower_ascii(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    return h;
}

double SparseVector::l2_norm() const {
    double sum = 0.0;
    for (const auto& [idx, w] : entries) sum += w * w;
    return std::sqrt(sum);
}

SparseVector hash_features(const TokenSequence& tokens, std::uint32_t dim) {
    if (dim < 1) throw ConfigError("hash_features: dimension must be >= 1");

    // Term frequencies in sorted term order, so colliding tokens always
    // accumulate in the same order.
    std::map<std::string_view, std::uint64_t> tf;
    for (const auto& tok : tokens) ++tf[tok];

    std::map<std::uint32_t, double> raw;
    for (const auto& [tok, count] : tf) {
        const auto idx = static_cast<std::uint32_t>(fnv1a64(tok) % dim);
        raw[idx] += std::log1p(static_cast<double>(count));
    }

    SparseVector out;
    out.dim = dim;
    out.entries.reserve(raw.size());
    double sq = 0.0;
    for (const auto& [idx, w] : raw) {
        if (w != 0.0) {
            out.entries.emplace_back(idx, w);
            sq += w * w;
        }
    }
    if (!out.entries.empty()) {
        const double norm = std::sqrt(sq);
        for (auto& [idx, w] : out.entries) w /= norm;
    }
    return out;
}

}  // namespace convsearch
