#include "convsearch/dense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "convsearch/error.hpp"
#include "convsearch/io.hpp"
#include "convsearch/kernels.hpp"
#include "convsearch/text.hpp"

namespace convsearch {
namespace {

constexpr std::uint32_t kParamsMagic = 0x50453243;  // "C2EP"
constexpr std::uint32_t kIndexMagic = 0x49443243;   // "C2DI"
constexpr std::uint32_t kVersion = 1;

}  // namespace

namespace detail {

void scatter_features(std::span<const double> weights, const SparseVector& features,
                      std::uint32_t dim, double* out) {
    for (const auto& [idx, w] : features.entries) {
        kern::axpy(w, weights.data() + static_cast<std::size_t>(idx) * dim, out, dim);
    }
}

std::vector<double> encode_features(const EncoderParams& params, EncoderSide side,
                                    const SparseVector& features) {
    std::vector<double> out(params.dim, 0.0);
    const auto& w = side == EncoderSide::query ? params.w_query : params.w_passage;
    scatter_features(w, features, params.dim, out.data());
    return out;
}

}  // namespace detail

EncoderParams init_encoder_params(std::uint32_t dim, std::uint32_t features,
                                  std::uint64_t seed) {
    if (dim < 1 || features < 1)
        throw ConfigError("encoder dimensions must be >= 1");
    EncoderParams p;
    p.dim = dim;
    p.features = features;
    const std::size_t n = static_cast<std::size_t>(dim) * features;
    p.w_query.resize(n);
    p.w_passage.resize(n);
    Rng rng(seed);
    for (auto& w : p.w_query) w = (rng.unit() * 2.0 - 1.0) * 0.01;
    for (auto& w : p.w_passage) w = (rng.unit() * 2.0 - 1.0) * 0.01;
    return p;
}

std::vector<double> encode(const EncoderParams& params, EncoderSide side,
                           std::string_view text) {
    return detail::encode_features(params, side,
                                   hash_features(tokenize(text), params.features));
}

double similarity(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size())
        throw ConfigError("similarity: vector lengths differ (" +
                          std::to_string(q.size()) + " vs " +
                          std::to_string(p.size()) + ")");
    return kern::dot(q.data(), p.data(), q.size());
}

DenseIndex build_dense_index(const EncoderParams& params, const Collection& collection) {
    if (collection.empty())
        throw ConfigError("cannot build a dense index over an empty collection");
    DenseIndex index;
    index.dim = params.dim;
    index.ids.reserve(collection.size());
    for (const Passage& p : collection.passages()) index.ids.push_back(p.id);
    std::sort(index.ids.begin(), index.ids.end());

    index.embeddings.resize(index.ids.size() * static_cast<std::size_t>(params.dim));
    for (std::size_t i = 0; i < index.ids.size(); ++i) {
        const std::vector<double> e =
            encode(params, EncoderSide::passage, collection.at(index.ids[i]).text);
        std::copy(e.begin(), e.end(),
                  index.embeddings.begin() + i * static_cast<std::size_t>(params.dim));
    }
    return index;
}

RankedList dense_search(const DenseIndex& index, std::span<const double> query_vec, int k) {
    if (k < 1) throw ConfigError("search depth k must be >= 1");
    if (query_vec.size() != index.dim)
        throw ConfigError("dense_search: query vector length mismatch");

    std::vector<ScoredPassage> scored;
    scored.reserve(index.ids.size());
    for (std::size_t i = 0; i < index.ids.size(); ++i) {
        scored.push_back({index.ids[i],
                          kern::dot(query_vec.data(), index.row(i).data(), index.dim)});
    }
    return make_ranked_list(std::move(scored), static_cast<std::size_t>(k));
}

std::string sample_hard_negative(const std::vector<std::string>& pool, Rng& rng) {
    if (pool.empty()) throw ConfigError("cannot sample from an empty hard pool");
    return pool[static_cast<std::size_t>(rng.below(pool.size()))];
}

void EncoderParams::save(const std::string& path) const {
    BinaryWriter w(path);
    w.u32(kParamsMagic);
    w.u32(kVersion);
    w.u32(dim);
    w.u32(features);
    for (const double v : w_query) w.f64(v);
    for (const double v : w_passage) w.f64(v);
    w.close();
}

EncoderParams EncoderParams::load(const std::string& path) {
    BinaryReader r(path);
    if (r.u32() != kParamsMagic) throw ParseError(path + ": not an encoder checkpoint");
    if (r.u32() != kVersion) throw ParseError(path + ": unsupported checkpoint version");
    EncoderParams p;
    p.dim = r.u32();
    p.features = r.u32();
    const std::size_t n = static_cast<std::size_t>(p.dim) * p.features;
    p.w_query.resize(n);
    p.w_passage.resize(n);
    for (auto& v : p.w_query) v = r.f64();
    for (auto& v : p.w_passage) v = r.f64();
    return p;
}

void DenseIndex::save(const std::string& path) const {
    BinaryWriter w(path);
    w.u32(kIndexMagic);
    w.u32(kVersion);
    w.u32(dim);
    w.u64(ids.size());
    for (const auto& id : ids) w.str(id);
    for (const double v : embeddings) w.f64(v);
    w.close();
}

DenseIndex DenseIndex::load(const std::string& path) {
    BinaryReader r(path);
    if (r.u32() != kIndexMagic) throw ParseError(path + ": not a dense index");
    if (r.u32() != kVersion) throw ParseError(path + ": unsupported index version");
    DenseIndex index;
    index.dim = r.u32();
    const std::uint64_t n = r.u64();
    index.ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) index.ids.push_back(r.str());
    index.embeddings.resize(n * index.dim);
    for (auto& v : index.embeddings) v = r.f64();
    return index;
}

}  // namespace convsearch
