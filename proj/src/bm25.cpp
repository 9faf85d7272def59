#include "convsearch/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "convsearch/error.hpp"
#include "convsearch/io.hpp"

namespace convsearch {
namespace {

constexpr std::uint32_t kMagic = 0x42324353;  // "SC2B" little-endian
constexpr std::uint32_t kVersion = 1;

}  // namespace

BM25Index BM25Index::build(const Collection& collection, const BM25Params& params) {
    if (collection.empty()) throw ConfigError("cannot build BM25 index over an empty collection");
    if (params.k1 < 0.0) throw ConfigError("BM25 k1 must be >= 0");
    if (params.b < 0.0 || params.b > 1.0) throw ConfigError("BM25 b must be in [0, 1]");

    BM25Index index;
    index.params_ = params;

    index.doc_ids_.reserve(collection.size());
    for (const Passage& p : collection.passages()) index.doc_ids_.push_back(p.id);
    std::sort(index.doc_ids_.begin(), index.doc_ids_.end());

    index.doc_lengths_.resize(index.doc_ids_.size());
    std::uint64_t total_len = 0;
    for (std::uint32_t doc = 0; doc < index.doc_ids_.size(); ++doc) {
        const Passage& p = collection.at(index.doc_ids_[doc]);
        const TokenSequence tokens = tokenize(p.text);
        index.doc_lengths_[doc] = static_cast<std::uint32_t>(tokens.size());
        total_len += tokens.size();

        std::map<std::string_view, std::uint32_t> tf;
        for (const auto& tok : tokens) ++tf[tok];
        for (const auto& [term, count] : tf) {
            auto it = index.postings_.find(term);
            if (it == index.postings_.end())
                it = index.postings_.emplace(std::string(term), std::vector<Posting>{}).first;
            it->second.push_back({doc, count});
        }
    }
    index.avgdl_ = static_cast<double>(total_len) / static_cast<double>(index.doc_ids_.size());
    return index;
}

std::uint32_t BM25Index::doc_index(std::string_view passage_id) const {
    const auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), passage_id);
    if (it == doc_ids_.end() || *it != passage_id)
        throw ValidationError("unknown passage id \"" + std::string(passage_id) + "\"");
    return static_cast<std::uint32_t>(it - doc_ids_.begin());
}

double BM25Index::idf(std::uint64_t df) const {
    const double n = static_cast<double>(doc_count());
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double BM25Index::term_doc_weight(std::uint64_t df, std::uint32_t tf, std::uint32_t doc) const {
    const double dl = static_cast<double>(doc_lengths_[doc]);
    const double norm = 1.0 - params_.b + params_.b * dl / avgdl_;
    const double tfd = static_cast<double>(tf);
    return idf(df) * tfd * (params_.k1 + 1.0) / (tfd + params_.k1 * norm);
}

std::uint64_t BM25Index::doc_frequency(std::string_view term) const {
    const auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

std::uint64_t BM25Index::doc_length(std::string_view passage_id) const {
    return doc_lengths_[doc_index(passage_id)];
}

double BM25Index::score(const TokenSequence& query, std::string_view passage_id) const {
    const std::uint32_t doc = doc_index(passage_id);
    double total = 0.0;
    for (const auto& term : query) {
        const auto it = postings_.find(std::string_view(term));
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        const auto pit = std::lower_bound(
            plist.begin(), plist.end(), doc,
            [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != doc) continue;
        total += term_doc_weight(plist.size(), pit->tf, doc);
    }
    return total;
}

RankedList BM25Index::search(const TokenSequence& query, int k) const {
    if (k < 1) throw ConfigError("search depth k must be >= 1");

    // Candidates are exactly the docs sharing at least one query term; the
    // final per-candidate score reuses score() so that search and scoring
    // agree bit for bit with exhaustive evaluation.
    std::set<std::uint32_t> candidates;
    for (const auto& term : query) {
        const auto it = postings_.find(std::string_view(term));
        if (it == postings_.end()) continue;
        for (const Posting& p : it->second) candidates.insert(p.doc);
    }

    std::vector<ScoredPassage> scored;
    scored.reserve(candidates.size());
    for (const std::uint32_t doc : candidates) {
        const double s = score(query, doc_ids_[doc]);
        if (s > 0.0) scored.push_back({doc_ids_[doc], s});
    }
    return make_ranked_list(std::move(scored), static_cast<std::size_t>(k));
}

std::vector<std::pair<std::string, double>> BM25Index::passage_term_vector(
    std::string_view passage_id) const {
    const std::uint32_t doc = doc_index(passage_id);
    std::vector<std::pair<std::string, double>> vec;
    for (const auto& [term, plist] : postings_) {
        const auto pit = std::lower_bound(
            plist.begin(), plist.end(), doc,
            [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != doc) continue;
        vec.emplace_back(term, term_doc_weight(plist.size(), pit->tf, doc));
    }
    return vec;  // postings_ is term-sorted, so vec is too
}

double BM25Index::passage_similarity(std::string_view id_a, std::string_view id_b) const {
    const auto va = passage_term_vector(id_a);
    const auto vb = passage_term_vector(id_b);
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < va.size() && j < vb.size()) {
        const int cmp = va[i].first.compare(vb[j].first);
        if (cmp < 0) {
            ++i;
        } else if (cmp > 0) {
            ++j;
        } else {
            sum += va[i].second * vb[j].second;
            ++i;
            ++j;
        }
    }
    return sum;
}

void BM25Index::save(const std::string& path) const {
    BinaryWriter w(path);
    w.u32(kMagic);
    w.u32(kVersion);
    w.f64(params_.k1);
    w.f64(params_.b);
    w.f64(avgdl_);
    w.u64(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
        w.str(doc_ids_[i]);
        w.u32(doc_lengths_[i]);
    }
    w.u64(postings_.size());
    for (const auto& [term, plist] : postings_) {
        w.str(term);
        w.u64(plist.size());
        for (const Posting& p : plist) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    w.close();
}

BM25Index BM25Index::load(const std::string& path) {
    BinaryReader r(path);
    if (r.u32() != kMagic) throw ParseError(path + ": not a BM25 index file");
    if (r.u32() != kVersion) throw ParseError(path + ": unsupported index version");

    BM25Index index;
    index.params_.k1 = r.f64();
    index.params_.b = r.f64();
    index.avgdl_ = r.f64();
    const std::uint64_t n_docs = r.u64();
    index.doc_ids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        index.doc_ids_.push_back(r.str());
        index.doc_lengths_.push_back(r.u32());
    }
    const std::uint64_t n_terms = r.u64();
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::string term = r.str();
        const std::uint64_t n_postings = r.u64();
        std::vector<Posting> plist;
        plist.reserve(n_postings);
        for (std::uint64_t j = 0; j < n_postings; ++j) {
            Posting p;
            p.doc = r.u32();
            p.tf = r.u32();
            plist.push_back(p);
        }
        index.postings_.emplace(std::move(term), std::move(plist));
    }
    return index;
}

}  // namespace convsearch
