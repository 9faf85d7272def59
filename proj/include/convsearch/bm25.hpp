#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "convsearch/corpus.hpp"
#include "convsearch/retriever.hpp"
#include "convsearch/text.hpp"

namespace convsearch {

// Okapi parameters. Defaults follow the common Lucene/Pyserini setting.
struct BM25Params {
    double k1 = 0.9;
    double b = 0.4;  // in [0, 1]
};

// Immutable inverted index. Scores use the smoothed non-negative idf
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
// and the Okapi term contribution
//   idf(t) * tf*(k1+1) / (tf + k1*(1 - b + b*dl/avgdl)).
class BM25Index {
public:
    struct Posting {
        std::uint32_t doc = 0;  // position in doc_ids()
        std::uint32_t tf = 0;
    };

    static BM25Index build(const Collection& collection, const BM25Params& params);

    // Sum of per-occurrence contributions over the query sequence. Duplicate
    // query terms contribute once per occurrence. Throws on unknown ids.
    double score(const TokenSequence& query, std::string_view passage_id) const;

    // Top-k by (score desc, id asc). Passages with zero score never appear.
    RankedList search(const TokenSequence& query, int k) const;

    // Per-term self-score vector of a passage: term -> the passage's own
    // Okapi contribution for that term. Sorted by term.
    std::vector<std::pair<std::string, double>> passage_term_vector(
        std::string_view passage_id) const;

    // Dot product of the two passages' term vectors. Symmetric.
    double passage_similarity(std::string_view id_a, std::string_view id_b) const;

    const BM25Params& params() const { return params_; }
    std::uint64_t doc_count() const { return doc_ids_.size(); }
    double avgdl() const { return avgdl_; }
    std::uint64_t doc_frequency(std::string_view term) const;
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::uint64_t doc_length(std::string_view passage_id) const;

    // Versioned little-endian binary format (see save/load implementation
    // for the exact layout). Round-trips bit-exactly.
    void save(const std::string& path) const;
    static BM25Index load(const std::string& path);

    bool operator==(const BM25Index&) const = default;

private:
    std::uint32_t doc_index(std::string_view passage_id) const;
    double idf(std::uint64_t df) const;
    double term_doc_weight(std::uint64_t df, std::uint32_t tf, std::uint32_t doc) const;

    BM25Params params_;
    double avgdl_ = 0.0;
    std::vector<std::string> doc_ids_;        // sorted ascending
    std::vector<std::uint32_t> doc_lengths_;  // aligned with doc_ids_
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
};

// Retriever handle: tokenize then search the index.
class Bm25Retriever final : public Retriever {
public:
    explicit Bm25Retriever(const BM25Index& index, std::string name = "bm25")
        : index_(&index), name_(std::move(name)) {}

    RankedList search(std::string_view query_text, int k) const override {
        return index_->search(tokenize(query_text), k);
    }
    std::string name() const override { return name_; }

private:
    const BM25Index* index_;
    std::string name_;
};

}  // namespace convsearch
