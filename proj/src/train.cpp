#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "convsearch/dense.hpp"
#include "convsearch/error.hpp"
#include "convsearch/io.hpp"
#include "convsearch/kernels.hpp"
#include "convsearch/text.hpp"
#include "dense_internal.hpp"

namespace convsearch {
namespace detail {

double batch_loss_and_grads_into(const EncoderParams& params,
                                 const std::vector<BatchItem>& batch,
                                 const Collection& collection,
                                 double* grad_query, double* grad_passage) {
    if (batch.empty()) throw ConfigError("batch must contain at least one query");

    {
        std::set<std::string_view> seen;
        for (const BatchItem& item : batch) {
            if (!seen.insert(item.positive_id).second) {
                throw ValidationError("duplicate positive \"" + item.positive_id +
                                      "\" in one batch");
            }
        }
    }

    const std::uint32_t d = params.dim;
    const std::size_t n_queries = batch.size();

    // Shared candidate pool: all positives in batch order, then all sampled
    // hard negatives in batch order. Duplicates between hard negatives and
    // other queries' positives are kept as separate slots (no masking).
    std::vector<std::string_view> pool_ids;
    pool_ids.reserve(2 * n_queries);
    for (const BatchItem& item : batch) pool_ids.push_back(item.positive_id);
    for (const BatchItem& item : batch) {
        if (item.hard_negative_id) pool_ids.push_back(*item.hard_negative_id);
    }
    const std::size_t pool_size = pool_ids.size();

    std::vector<SparseVector> query_feats(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i) {
        query_feats[i] = hash_features(tokenize(batch[i].query_text), params.features);
    }
    std::unordered_map<std::string_view, SparseVector> passage_feats;
    for (const auto id : pool_ids) {
        if (passage_feats.find(id) == passage_feats.end()) {
            passage_feats.emplace(
                id, hash_features(tokenize(collection.at(id).text), params.features));
        }
    }

    std::vector<double> q_emb(n_queries * d, 0.0);
    std::vector<double> p_emb(pool_size * d, 0.0);
    for (std::size_t i = 0; i < n_queries; ++i) {
        scatter_features(params.w_query, query_feats[i], d, q_emb.data() + i * d);
    }
    for (std::size_t m = 0; m < pool_size; ++m) {
        scatter_features(params.w_passage, passage_feats.at(pool_ids[m]), d,
                         p_emb.data() + m * d);
    }

    // Softmax cross-entropy per query; query i's positive sits at pool slot i.
    std::vector<double> coef(n_queries * pool_size);
    std::vector<double> logits(pool_size);
    double loss_sum = 0.0;
    const double inv_b = 1.0 / static_cast<double>(n_queries);
    for (std::size_t i = 0; i < n_queries; ++i) {
        const double* qi = q_emb.data() + i * d;
        double max_logit = -std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < pool_size; ++m) {
            logits[m] = kern::dot(qi, p_emb.data() + m * d, d);
            max_logit = std::max(max_logit, logits[m]);
        }
        double exp_sum = 0.0;
        for (std::size_t m = 0; m < pool_size; ++m) exp_sum += std::exp(logits[m] - max_logit);
        const double lse = max_logit + std::log(exp_sum);
        loss_sum += lse - logits[i];

        double* ci = coef.data() + i * pool_size;
        for (std::size_t m = 0; m < pool_size; ++m) ci[m] = std::exp(logits[m] - lse) * inv_b;
        ci[i] -= inv_b;
    }

    // d(loss)/d(embedding), then scatter through the feature maps.
    std::vector<double> gq_emb(n_queries * d, 0.0);
    std::vector<double> gp_emb(pool_size * d, 0.0);
    for (std::size_t i = 0; i < n_queries; ++i) {
        const double* ci = coef.data() + i * pool_size;
        for (std::size_t m = 0; m < pool_size; ++m) {
            kern::axpy(ci[m], p_emb.data() + m * d, gq_emb.data() + i * d, d);
            kern::axpy(ci[m], q_emb.data() + i * d, gp_emb.data() + m * d, d);
        }
    }
    for (std::size_t i = 0; i < n_queries; ++i) {
        for (const auto& [idx, w] : query_feats[i].entries) {
            kern::axpy(w, gq_emb.data() + i * d,
                       grad_query + static_cast<std::size_t>(idx) * d, d);
        }
    }
    for (std::size_t m = 0; m < pool_size; ++m) {
        for (const auto& [idx, w] : passage_feats.at(pool_ids[m]).entries) {
            kern::axpy(w, gp_emb.data() + m * d,
                       grad_passage + static_cast<std::size_t>(idx) * d, d);
        }
    }
    return loss_sum * inv_b;
}

}  // namespace detail

namespace {

// Greedy batch planner: walks the shuffled order taking the first
// batch_size instances whose positives are pairwise distinct; skipped
// instances stay pending, in order, for later batches.
std::vector<std::vector<std::size_t>> plan_batches(
    const std::vector<std::size_t>& order,
    const std::vector<TrainingInstance>& instances, std::size_t batch_size) {
    std::deque<std::size_t> pending(order.begin(), order.end());
    std::vector<std::vector<std::size_t>> batches;
    while (!pending.empty()) {
        std::vector<std::size_t> batch;
        std::set<std::string_view> positives;
        for (auto it = pending.begin(); it != pending.end() && batch.size() < batch_size;) {
            if (positives.insert(instances[*it].positive_id).second) {
                batch.push_back(*it);
                it = pending.erase(it);
            } else {
                ++it;
            }
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace

LossAndGrads batch_loss_and_grads(const EncoderParams& params,
                                  const std::vector<BatchItem>& batch,
                                  const Collection& collection) {
    LossAndGrads out;
    out.grad_query.assign(params.w_query.size(), 0.0);
    out.grad_passage.assign(params.w_passage.size(), 0.0);
    out.loss = detail::batch_loss_and_grads_into(
        params, batch, collection, out.grad_query.data(), out.grad_passage.data());
    return out;
}

TrainResult train_encoder(const std::vector<TrainingInstance>& instances,
                          const Collection& collection, const TrainConfig& config,
                          EncoderParams init) {
    if (instances.empty()) throw ConfigError("no training instances");
    if (config.batch_size < 2)
        throw ConfigError("batch_size must be >= 2 for in-batch negatives");
    if (config.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (config.warmup_ratio < 0.0 || config.warmup_ratio > 1.0)
        throw ConfigError("warmup_ratio must lie in [0, 1]");
    if (config.learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
    const std::size_t weights = static_cast<std::size_t>(init.dim) * init.features;
    if (init.w_query.size() != weights || init.w_passage.size() != weights)
        throw ConfigError("initial parameters have inconsistent shapes");

    for (const TrainingInstance& inst : instances) {
        if (!collection.contains(inst.positive_id))
            throw ValidationError("unknown positive id \"" + inst.positive_id + "\"");
        for (const auto& id : inst.hard_pool) {
            if (!collection.contains(id))
                throw ValidationError("unknown hard-negative id \"" + id + "\"");
            if (id == inst.positive_id)
                throw ValidationError("hard pool contains its own positive \"" + id + "\"");
        }
    }

    Rng rng(config.seed);

    // All epoch orders are drawn before any hard-negative sampling so the
    // rng consumption layout is fixed and the step count is known up front.
    std::vector<std::vector<std::vector<std::size_t>>> epochs;
    epochs.reserve(static_cast<std::size_t>(config.epochs));
    std::size_t total_steps = 0;
    for (int e = 0; e < config.epochs; ++e) {
        std::vector<std::size_t> order(instances.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        epochs.push_back(plan_batches(order, instances,
                                      static_cast<std::size_t>(config.batch_size)));
        total_steps += epochs.back().size();
    }
    const std::size_t warmup_steps =
        static_cast<std::size_t>(config.warmup_ratio * static_cast<double>(total_steps));

    TrainResult result;
    result.params = std::move(init);
    EncoderParams& params = result.params;

    std::vector<double> grad_q(weights, 0.0), grad_p(weights, 0.0);
    std::vector<double> m_q(weights, 0.0), v_q(weights, 0.0);
    std::vector<double> m_p(weights, 0.0), v_p(weights, 0.0);

    std::size_t step = 0;
    for (int e = 0; e < config.epochs; ++e) {
        double epoch_loss_sum = 0.0;
        for (const std::vector<std::size_t>& batch_indices : epochs[static_cast<std::size_t>(e)]) {
            std::vector<BatchItem> batch;
            batch.reserve(batch_indices.size());
            for (const std::size_t idx : batch_indices) {
                const TrainingInstance& inst = instances[idx];
                BatchItem item{inst.query_text, inst.positive_id, std::nullopt};
                if (config.use_hard_negatives && !inst.hard_pool.empty()) {
                    item.hard_negative_id = sample_hard_negative(inst.hard_pool, rng);
                }
                batch.push_back(std::move(item));
            }

            std::fill(grad_q.begin(), grad_q.end(), 0.0);
            std::fill(grad_p.begin(), grad_p.end(), 0.0);
            const double loss = detail::batch_loss_and_grads_into(
                params, batch, collection, grad_q.data(), grad_p.data());
            epoch_loss_sum += loss * static_cast<double>(batch.size());

            ++step;
            double lr = config.learning_rate;
            if (step <= warmup_steps) {
                lr *= static_cast<double>(step) / static_cast<double>(warmup_steps);
            } else if (total_steps > warmup_steps) {
                lr *= static_cast<double>(total_steps - step) /
                      static_cast<double>(total_steps - warmup_steps);
            }

            kern::AdamWStep c;
            c.lr = lr;
            c.beta1 = config.adam_beta1;
            c.beta2 = config.adam_beta2;
            c.eps = config.adam_eps;
            c.weight_decay = config.weight_decay;
            c.bias1 = 1.0 / (1.0 - std::pow(config.adam_beta1, static_cast<double>(step)));
            c.bias2 = 1.0 / (1.0 - std::pow(config.adam_beta2, static_cast<double>(step)));
            kern::adamw_update(params.w_query.data(), m_q.data(), v_q.data(),
                               grad_q.data(), weights, c);
            kern::adamw_update(params.w_passage.data(), m_p.data(), v_p.data(),
                               grad_p.data(), weights, c);
        }
        result.epoch_mean_loss.push_back(epoch_loss_sum /
                                         static_cast<double>(instances.size()));
    }
    return result;
}

void save_loss_trace(const std::string& path, const std::vector<double>& epoch_mean_loss) {
    std::string content;
    char buf[64];
    for (std::size_t i = 0; i < epoch_mean_loss.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.17g\n", i + 1, epoch_mean_loss[i]);
        content += buf;
    }
    write_text_file(path, content);
}

}  // namespace convsearch
