#include "convsearch/mining.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "convsearch/error.hpp"

namespace convsearch {
namespace {

using nlohmann::json;

const Retriever& require_retriever(const Retriever* r, const char* what) {
    if (!r) throw ConfigError(std::string("mining strategy requires ") + what);
    return *r;
}

}  // namespace

std::string_view mining_strategy_name(MiningStrategyKind k) {
    switch (k) {
        case MiningStrategyKind::bm25: return "bm25";
        case MiningStrategyKind::cqr: return "cqr";
        case MiningStrategyKind::model: return "model";
    }
    return "unknown";
}

MiningStrategyKind parse_mining_strategy(std::string_view name) {
    for (MiningStrategyKind k : {MiningStrategyKind::bm25, MiningStrategyKind::cqr,
                                 MiningStrategyKind::model}) {
        if (mining_strategy_name(k) == name) return k;
    }
    throw ConfigError("unknown mining strategy \"" + std::string(name) + "\"");
}

std::vector<std::string> mine_negatives(const MiningStrategy& strategy,
                                        const MiningContext& ctx,
                                        const Conversation& conversation, int t,
                                        const std::vector<std::string>& gold_ids) {
    if (strategy.k < 1) throw ConfigError("mining pool depth k must be >= 1");

    std::string query;
    const Retriever* retriever = nullptr;
    switch (strategy.kind) {
        case MiningStrategyKind::bm25:
            retriever = &require_retriever(ctx.bm25, "a BM25 index");
            query = render_query(conversation, t, QueryView::full, ctx.limits);
            break;
        case MiningStrategyKind::cqr: {
            const Turn& turn = conversation.turns.at(static_cast<std::size_t>(t - 1));
            if (!turn.rewrite) {
                throw ValidationError("cqr mining: conversation \"" + conversation.id +
                                      "\" turn " + std::to_string(t) +
                                      " carries no rewrite");
            }
            retriever = ctx.cqr_retriever
                            ? ctx.cqr_retriever
                            : &require_retriever(ctx.bm25, "a retriever for rewrites");
            query = render_query(conversation, t, QueryView::rewrite, ctx.limits);
            break;
        }
        case MiningStrategyKind::model:
            retriever = &require_retriever(ctx.stage1_model, "a stage-1 dense index");
            query = render_query(conversation, t, QueryView::full, ctx.limits);
            break;
    }

    const RankedList ranked = retriever->search(query, strategy.k);
    std::vector<std::string> pool;
    pool.reserve(ranked.size());
    for (const ScoredPassage& sp : ranked) {
        if (std::find(gold_ids.begin(), gold_ids.end(), sp.id) == gold_ids.end())
            pool.push_back(sp.id);
    }
    return pool;
}

MinedPools mine_dataset(const MiningStrategy& strategy, const MiningContext& ctx,
                        const std::vector<Conversation>& conversations) {
    MinedPools pools;
    for (const Conversation& conv : conversations) {
        for (const Turn& turn : conv.turns) {
            if (turn.gold_ids.empty()) continue;
            pools.emplace(TurnKey{conv.id, turn.index},
                          mine_negatives(strategy, ctx, conv, turn.index, turn.gold_ids));
        }
    }
    return pools;
}

void save_pools(const std::string& path, const MiningStrategy& strategy,
                std::string_view retriever_name, const MinedPools& pools) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);

    json meta;
    meta["meta"]["strategy"] = std::string(mining_strategy_name(strategy.kind));
    meta["meta"]["k"] = strategy.k;
    meta["meta"]["retriever"] = std::string(retriever_name);
    out << meta.dump() << '\n';

    for (const auto& [key, pool] : pools) {
        json j;
        j["conv_id"] = key.first;
        j["turn"] = key.second;
        j["strategy"] = std::string(mining_strategy_name(strategy.kind));
        j["k"] = strategy.k;
        j["pool"] = pool;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

MinedPools load_pools(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    MinedPools pools;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed record");
        if (j.contains("meta")) continue;
        if (!j.contains("conv_id") || !j.contains("turn") || !j.contains("pool"))
            throw ParseError(path + ":" + std::to_string(line_no) + ": incomplete record");
        std::vector<std::string> pool;
        for (const auto& id : j.at("pool")) pool.push_back(id.get<std::string>());
        pools[TurnKey{j.at("conv_id").get<std::string>(), j.at("turn").get<int>()}] =
            std::move(pool);
    }
    return pools;
}

}  // namespace convsearch
