#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "convsearch/dense.hpp"
#include "convsearch/error.hpp"
#include "convsearch/io.hpp"
#include "convsearch/pipeline.hpp"
#include "convsearch/rng.hpp"
#include "convsearch/synth.hpp"
#include "convsearch/text.hpp"
#include "reference.hpp"

using namespace convsearch;

namespace {

Collection word_corpus(int n_passages, int words_per_passage, Rng& rng) {
    const std::vector<std::string> vocab = {
        "amber", "birch", "cedar", "dune", "ember", "frost", "grove", "heath",
        "iris",  "jade",  "kelp",  "loam", "moss",  "nectar", "ochre", "pine"};
    std::vector<Passage> ps;
    for (int i = 0; i < n_passages; ++i) {
        std::string text;
        for (int w = 0; w < words_per_passage; ++w) {
            if (!text.empty()) text.push_back(' ');
            text += vocab[rng.below(vocab.size())];
        }
        ps.push_back({"p" + std::to_string(i), text, std::nullopt});
    }
    return Collection::from_passages(std::move(ps));
}

// Central finite differences of the batch loss w.r.t. one weight tensor.
std::vector<double> fd_gradient(EncoderParams params, bool query_side,
                                const std::vector<BatchItem>& batch,
                                const Collection& col, double step) {
    auto& w = query_side ? params.w_query : params.w_passage;
    std::vector<double> grad(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double orig = w[i];
        w[i] = orig + step;
        const double up = batch_loss_and_grads(params, batch, col).loss;
        w[i] = orig - step;
        const double down = batch_loss_and_grads(params, batch, col).loss;
        w[i] = orig;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

double max_relative_error(const std::vector<double>& got,
                          const std::vector<double>& want) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double scale = std::max({std::abs(got[i]), std::abs(want[i]), 1e-8});
        worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    }
    return worst;
}

}  // namespace

TEST_CASE("encode: zero on empty text, linear in the weights") {
    const EncoderParams params = init_encoder_params(8, 128, 3);

    const std::vector<double> zero = encode(params, EncoderSide::query, "");
    for (const double v : zero) CHECK(v == 0.0);

    const std::vector<double> base = encode(params, EncoderSide::query, "amber birch");
    EncoderParams scaled = params;
    for (auto& w : scaled.w_query) w *= 3.0;
    const std::vector<double> tripled = encode(scaled, EncoderSide::query, "amber birch");
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(tripled[i] == doctest::Approx(3.0 * base[i]).epsilon(1e-12));
}

TEST_CASE("encode matches an independent matrix-vector recomputation") {
    Rng rng(17);
    const EncoderParams params = init_encoder_params(16, 256, 9);
    const std::string text = "amber birch cedar amber dune dune frost";
    const std::vector<double> got = encode(params, EncoderSide::passage, text);

    const auto feats = refimpl::ref_hashed_weights(tokenize(text), params.features);
    for (std::uint32_t row = 0; row < params.dim; ++row) {
        long double acc = 0.0L;
        for (const auto& [idx, w] : feats) {
            acc += static_cast<long double>(
                       params.w_passage[static_cast<std::size_t>(idx) * params.dim + row]) *
                   w;
        }
        CHECK(got[row] == doctest::Approx(static_cast<double>(acc)).epsilon(1e-9));
    }
}

TEST_CASE("similarity is an exact inner product") {
    const std::vector<double> e1 = {1.0, 0.0, 0.0};
    const std::vector<double> e2 = {0.0, 1.0, 0.0};
    CHECK(similarity(e1, e2) == 0.0);

    const std::vector<double> v = {0.5, -2.0, 3.25};
    CHECK(similarity(v, v) == doctest::Approx(0.25 + 4.0 + 10.5625).epsilon(1e-15));

    Rng rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> a(33), b(33);
        for (auto& x : a) x = rng.unit() * 2.0 - 1.0;
        for (auto& x : b) x = rng.unit() * 2.0 - 1.0;
        const double want = static_cast<double>(refimpl::ref_dot(a, b));
        CHECK(similarity(a, b) == doctest::Approx(want).epsilon(1e-9));
    }

    CHECK_THROWS_AS(similarity(e1, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("build_dense_index rows are passage encodings") {
    Rng rng(31);
    const Collection col = word_corpus(3, 6, rng);
    const EncoderParams params = init_encoder_params(8, 128, 5);
    const DenseIndex index = build_dense_index(params, col);
    REQUIRE(index.ids.size() == 3);

    for (std::size_t i = 0; i < index.ids.size(); ++i) {
        const auto want = encode(params, EncoderSide::passage, col.at(index.ids[i]).text);
        const auto row = index.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) CHECK(row[j] == want[j]);
    }

    const DenseIndex again = build_dense_index(params, col);
    CHECK(again == index);

    CHECK_THROWS_AS(build_dense_index(params, Collection{}), ConfigError);
}

TEST_CASE("dense_search equals exhaustive inner-product ranking") {
    Rng rng(41);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 1 + static_cast<int>(rng.below(60));
        const Collection col = word_corpus(n, 5, rng);
        const EncoderParams params = init_encoder_params(8, 64, rep);
        const DenseIndex index = build_dense_index(params, col);

        std::vector<double> q(8);
        for (auto& x : q) x = rng.unit() * 2.0 - 1.0;
        const int k = 1 + static_cast<int>(rng.below(10));

        const RankedList got = dense_search(index, q, k);

        std::vector<ScoredPassage> all;
        for (std::size_t i = 0; i < index.ids.size(); ++i) {
            long double s = 0.0L;
            for (std::size_t j = 0; j < 8; ++j)
                s += static_cast<long double>(q[j]) * index.row(i)[j];
            all.push_back({index.ids[i], static_cast<double>(s)});
        }
        std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.id < b.id;
        });
        const std::size_t depth = std::min<std::size_t>(k, all.size());
        REQUIRE(got.size() == depth);
        for (std::size_t i = 0; i < depth; ++i) CHECK(got[i].id == all[i].id);
    }
}

TEST_CASE("dense_search edge cases") {
    Rng rng(43);
    const Collection col = word_corpus(4, 5, rng);
    const EncoderParams params = init_encoder_params(8, 64, 1);
    const DenseIndex index = build_dense_index(params, col);
    const std::vector<double> q(8, 0.1);

    CHECK(dense_search(index, q, 100).size() == 4);  // k >= |C|: everything
    CHECK_THROWS_AS(dense_search(index, q, 0), ConfigError);

    const Collection one = word_corpus(1, 5, rng);
    const DenseIndex single = build_dense_index(params, one);
    const RankedList r = dense_search(single, q, 3);
    REQUIRE(r.size() == 1);
    CHECK(r[0].id == "p0");
}

TEST_CASE("uniform-logit loss is ln(pool size) with all-zero parameters") {
    Rng rng(47);
    const Collection col = word_corpus(40, 6, rng);
    EncoderParams params = init_encoder_params(8, 64, 2);
    std::fill(params.w_query.begin(), params.w_query.end(), 0.0);
    std::fill(params.w_passage.begin(), params.w_passage.end(), 0.0);

    // B positives plus optional hard negatives -> pool sizes 2 and 8
    for (const int b : {2, 4}) {
        std::vector<BatchItem> batch;
        for (int i = 0; i < b; ++i) {
            BatchItem item{"some query " + std::to_string(i),
                           "p" + std::to_string(i), std::nullopt};
            item.hard_negative_id = "p" + std::to_string(20 + i);
            batch.push_back(item);
        }
        const double loss = batch_loss_and_grads(params, batch, col).loss;
        CHECK(loss == doctest::Approx(std::log(2.0 * b)).epsilon(1e-12));
    }
}

TEST_CASE("singleton pool gives zero loss") {
    Rng rng(53);
    const Collection col = word_corpus(4, 5, rng);
    const EncoderParams params = init_encoder_params(8, 64, 3);
    const std::vector<BatchItem> batch = {{"query text", "p0", std::nullopt}};
    const LossAndGrads lg = batch_loss_and_grads(params, batch, col);
    CHECK(lg.loss == doctest::Approx(0.0).epsilon(1e-15));
    for (const double g : lg.grad_query) CHECK(g == 0.0);
}

TEST_CASE("duplicate positives in one batch are rejected") {
    Rng rng(59);
    const Collection col = word_corpus(4, 5, rng);
    const EncoderParams params = init_encoder_params(8, 64, 4);
    const std::vector<BatchItem> batch = {{"one", "p0", std::nullopt},
                                          {"two", "p0", std::nullopt}};
    CHECK_THROWS_AS(batch_loss_and_grads(params, batch, col), ValidationError);
}

TEST_CASE("loss is invariant under hard-negative reordering across the batch") {
    Rng rng(61);
    const Collection col = word_corpus(20, 6, rng);
    const EncoderParams params = init_encoder_params(8, 64, 5);

    std::vector<BatchItem> batch = {{"alpha query", "p0", "p10"},
                                    {"beta query", "p1", "p11"},
                                    {"gamma query", "p2", "p12"}};
    const double base = batch_loss_and_grads(params, batch, col).loss;

    // permuting which hard negative travels with which query permutes the
    // shared pool only
    batch[0].hard_negative_id = "p12";
    batch[1].hard_negative_id = "p10";
    batch[2].hard_negative_id = "p11";
    const double permuted = batch_loss_and_grads(params, batch, col).loss;
    CHECK(base == doctest::Approx(permuted).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(67);
    const Collection col = word_corpus(30, 6, rng);

    for (int rep = 0; rep < 5; ++rep) {
        const EncoderParams params = init_encoder_params(8, 32, 100 + rep);
        std::vector<BatchItem> batch;
        for (int i = 0; i < 4; ++i) {
            BatchItem item{"query " + std::to_string(rng.below(1000)) + " amber birch",
                           "p" + std::to_string(4 * rep + i), std::nullopt};
            if (i % 2 == 0)
                item.hard_negative_id = "p" + std::to_string(20 + i);
            batch.push_back(item);
        }
        const LossAndGrads lg = batch_loss_and_grads(params, batch, col);
        const auto fd_q = fd_gradient(params, true, batch, col, 1e-5);
        const auto fd_p = fd_gradient(params, false, batch, col, 1e-5);
        CHECK(max_relative_error(lg.grad_query, fd_q) < 1e-4);
        CHECK(max_relative_error(lg.grad_passage, fd_p) < 1e-4);
    }
}

TEST_CASE("sample_hard_negative") {
    SUBCASE("single-element pool") {
        Rng rng(1);
        CHECK(sample_hard_negative({"only"}, rng) == "only");
    }
    SUBCASE("empty pool is an error") {
        Rng rng(1);
        CHECK_THROWS_AS(sample_hard_negative({}, rng), ConfigError);
    }
    SUBCASE("fixed seed reproduces the sequence") {
        const std::vector<std::string> pool = {"a", "b", "c", "d"};
        Rng r1(77), r2(77);
        for (int i = 0; i < 50; ++i)
            CHECK(sample_hard_negative(pool, r1) == sample_hard_negative(pool, r2));
    }
    SUBCASE("draws are uniform within 5 sigma") {
        std::vector<std::string> pool;
        for (int i = 0; i < 10; ++i) pool.push_back("id" + std::to_string(i));
        Rng rng(404);
        std::map<std::string, int> counts;
        const int draws = 10000;
        for (int i = 0; i < draws; ++i) ++counts[sample_hard_negative(pool, rng)];
        const double expect = draws / 10.0;
        const double sigma = std::sqrt(draws * 0.1 * 0.9);
        for (const auto& [id, n] : counts)
            CHECK(std::abs(n - expect) < 5.0 * sigma);
    }
}

TEST_CASE("training is deterministic, and lr = 0 leaves parameters unchanged") {
    Rng rng(71);
    const Collection col = word_corpus(24, 6, rng);
    std::vector<TrainingInstance> instances;
    for (int i = 0; i < 12; ++i) {
        instances.push_back({"query about " + col.passages()[i].text,
                             col.passages()[i].id,
                             {col.passages()[(i + 12) % 24].id}});
    }

    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.epochs = 2;
    cfg.learning_rate = 1e-3;
    cfg.seed = 9;
    cfg.use_hard_negatives = true;

    const EncoderParams init = init_encoder_params(8, 64, 13);
    const TrainResult a = train_encoder(instances, col, cfg, init);
    const TrainResult b = train_encoder(instances, col, cfg, init);
    CHECK(a.params == b.params);
    CHECK(a.epoch_mean_loss == b.epoch_mean_loss);

    TrainConfig frozen = cfg;
    frozen.learning_rate = 0.0;
    const TrainResult c = train_encoder(instances, col, frozen, init);
    CHECK(c.params == init);
}

TEST_CASE("training on a separable synthetic set improves loss and recall") {
    SynthConfig scfg;
    scfg.topics = 6;
    scfg.terms_per_topic = 30;
    scfg.passages_per_topic = 6;
    scfg.passage_tokens = 12;
    scfg.conversations = 30;
    scfg.turns_per_conversation = 3;
    scfg.p_switch = 0.5;
    scfg.anaphora_rate = 0.0;
    const auto [col, convs] = generate_synthetic(scfg, 19);

    const auto instances = build_training_instances(convs, col, RenderLimits{});
    REQUIRE(instances.size() == 90);

    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.epochs = 6;
    cfg.learning_rate = 5e-3;
    cfg.seed = 3;

    const EncoderParams init = init_encoder_params(16, 2048, 23);
    const TrainResult result = train_encoder(instances, col, cfg, init);

    CHECK(result.epoch_mean_loss.front() > result.epoch_mean_loss.back());

    const auto r_at_1 = [&](const EncoderParams& params) {
        const DenseIndex index = build_dense_index(params, col);
        int hits = 0;
        for (const auto& inst : instances) {
            const auto ranked =
                dense_search(index, encode(params, EncoderSide::query, inst.query_text), 1);
            if (!ranked.empty() && ranked[0].id == inst.positive_id) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(instances.size());
    };
    CHECK(r_at_1(result.params) > r_at_1(init));
}

TEST_CASE("train_encoder validates inputs") {
    Rng rng(73);
    const Collection col = word_corpus(6, 5, rng);
    const EncoderParams init = init_encoder_params(4, 32, 1);
    TrainConfig cfg;
    cfg.batch_size = 2;

    CHECK_THROWS_AS(train_encoder({}, col, cfg, init), ConfigError);

    std::vector<TrainingInstance> bad = {{"q", "missing", {}}};
    CHECK_THROWS_AS(train_encoder(bad, col, cfg, init), ValidationError);

    std::vector<TrainingInstance> self = {{"q", "p0", {"p0"}}};
    CHECK_THROWS_AS(train_encoder(self, col, cfg, init), ValidationError);

    std::vector<TrainingInstance> ok = {{"q", "p0", {}}, {"r", "p1", {}}};
    TrainConfig tiny = cfg;
    tiny.batch_size = 1;
    CHECK_THROWS_AS(train_encoder(ok, col, tiny, init), ConfigError);
}

TEST_CASE("shared positives are spread across batches, not rejected") {
    Rng rng(79);
    const Collection col = word_corpus(4, 5, rng);
    // five instances over two distinct positives: any batch of size 2 would
    // collide under a naive batcher
    std::vector<TrainingInstance> instances;
    for (int i = 0; i < 5; ++i)
        instances.push_back({"query " + std::to_string(i), i % 2 == 0 ? "p0" : "p1", {}});

    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.epochs = 2;
    cfg.learning_rate = 1e-3;
    cfg.seed = 5;
    const EncoderParams init = init_encoder_params(4, 32, 2);
    CHECK_NOTHROW(train_encoder(instances, col, cfg, init));
}

TEST_CASE("encoder checkpoints round-trip bit-exactly") {
    const EncoderParams params = init_encoder_params(8, 128, 77);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "enc_rt.bin").string();
    params.save(path);
    CHECK(EncoderParams::load(path) == params);
    std::filesystem::remove(path);
}

TEST_CASE("dense index serialization round-trips") {
    Rng rng(83);
    const Collection col = word_corpus(7, 5, rng);
    const EncoderParams params = init_encoder_params(8, 64, 6);
    const DenseIndex index = build_dense_index(params, col);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "didx_rt.bin").string();
    index.save(path);
    CHECK(DenseIndex::load(path) == index);
    std::filesystem::remove(path);
}
