#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convsearch/corpus.hpp"
#include "convsearch/retriever.hpp"
#include "convsearch/rng.hpp"

namespace convsearch {

enum class EncoderSide { query, passage };

// Dual linear encoders over hashed bag-of-words features: a d x H matrix
// per side, applied to the L2-normalized feature vector. Embeddings are
// deliberately NOT normalized; similarity is a plain dot product.
//
// Storage is feature-major: column j of the mathematical d x H matrix (the
// embedding contribution of feature j) lives contiguously at
// weights[j*dim .. j*dim+dim), which makes encoding and gradient scatter
// pure axpy streams.
struct EncoderParams {
    std::uint32_t dim = 64;         // d
    std::uint32_t features = 32768; // H
    std::vector<double> w_query;    // features * dim
    std::vector<double> w_passage;  // features * dim

    bool operator==(const EncoderParams&) const = default;

    // Versioned little-endian checkpoint file.
    void save(const std::string& path) const;
    static EncoderParams load(const std::string& path);
};

// Seeded uniform(-0.01, 0.01) initialization.
EncoderParams init_encoder_params(std::uint32_t dim, std::uint32_t features,
                                  std::uint64_t seed);

std::vector<double> encode(const EncoderParams& params, EncoderSide side,
                           std::string_view text);

// Unnormalized inner product. Throws ConfigError on length mismatch.
double similarity(std::span<const double> q, std::span<const double> p);

// Exact inner-product index: one embedding row per passage.
struct DenseIndex {
    std::uint32_t dim = 0;
    std::vector<std::string> ids;      // sorted ascending
    std::vector<double> embeddings;    // ids.size() * dim, row-major

    std::span<const double> row(std::size_t i) const {
        return {embeddings.data() + i * dim, dim};
    }

    void save(const std::string& path) const;
    static DenseIndex load(const std::string& path);

    bool operator==(const DenseIndex&) const = default;
};

DenseIndex build_dense_index(const EncoderParams& params, const Collection& collection);

// Exhaustive top-k by inner product, ties broken by ascending id.
RankedList dense_search(const DenseIndex& index, std::span<const double> query_vec, int k);

class DenseRetriever final : public Retriever {
public:
    DenseRetriever(const EncoderParams& params, const DenseIndex& index,
                   std::string name = "dense")
        : params_(&params), index_(&index), name_(std::move(name)) {}

    RankedList search(std::string_view query_text, int k) const override {
        return dense_search(*index_, encode(*params_, EncoderSide::query, query_text), k);
    }
    std::string name() const override { return name_; }

private:
    const EncoderParams* params_;
    const DenseIndex* index_;
    std::string name_;
};

// One training example: a rendered full-view query, its positive passage,
// and an ordered pool of mined hard-negative candidates (possibly empty).
// positive_id never appears in hard_pool.
struct TrainingInstance {
    std::string query_text;
    std::string positive_id;
    std::vector<std::string> hard_pool;
};

struct TrainConfig {
    int batch_size = 32;
    int epochs = 10;
    double learning_rate = 3e-5;
    double warmup_ratio = 0.1;
    std::uint64_t seed = 0;
    bool use_hard_negatives = false;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 0.01;
};

// One batch row as fed to the loss: the query, its positive, and the hard
// negative sampled for this step (if any).
struct BatchItem {
    std::string query_text;
    std::string positive_id;
    std::optional<std::string> hard_negative_id;
};

struct LossAndGrads {
    double loss = 0.0;
    std::vector<double> grad_query;    // same shape as EncoderParams::w_query
    std::vector<double> grad_passage;
};

// Contrastive softmax cross-entropy over the shared candidate pool (all
// positives in batch order, then all sampled hard negatives in batch
// order; no masking, no deduplication). Each query's target is its own
// positive. Loss is the mean over queries; gradients are the analytic
// gradients of that mean. Log-sum-exp is max-subtracted. Throws
// ValidationError when two batch rows share a positive id.
LossAndGrads batch_loss_and_grads(const EncoderParams& params,
                                  const std::vector<BatchItem>& batch,
                                  const Collection& collection);

// Uniform draw from a non-empty pool, consuming rng deterministically.
std::string sample_hard_negative(const std::vector<std::string>& pool, Rng& rng);

struct TrainResult {
    EncoderParams params;
    std::vector<double> epoch_mean_loss;
};

// AdamW with linear warmup over the first warmup_ratio of total steps and
// linear decay to zero afterwards. Per epoch the instance order is
// reshuffled with the seeded rng; batches are then formed greedily so that
// no batch carries two instances with the same positive id (instances that
// would collide are deferred to a later batch of the same epoch). A pure
// function of (instances, collection, config, init): two identical calls
// return bit-identical parameters.
TrainResult train_encoder(const std::vector<TrainingInstance>& instances,
                          const Collection& collection, const TrainConfig& config,
                          EncoderParams init);

// Writes "epoch<TAB>mean_loss" lines.
void save_loss_trace(const std::string& path, const std::vector<double>& epoch_mean_loss);

}  // namespace convsearch
