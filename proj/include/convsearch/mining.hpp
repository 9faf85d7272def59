#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "convsearch/corpus.hpp"
#include "convsearch/retriever.hpp"
#include "convsearch/views.hpp"

namespace convsearch {

// The three hard-negative mining strategies. bm25 and model query with the
// rendered full conversational view; cqr queries with the turn's standalone
// rewrite.
enum class MiningStrategyKind { bm25, cqr, model };

std::string_view mining_strategy_name(MiningStrategyKind k);
MiningStrategyKind parse_mining_strategy(std::string_view name);

struct MiningStrategy {
    MiningStrategyKind kind = MiningStrategyKind::bm25;
    int k = 100;  // pool depth
};

// Retriever handles a strategy may need. cqr falls back to the BM25 handle
// when no dedicated off-the-shelf retriever is supplied.
struct MiningContext {
    const Retriever* bm25 = nullptr;
    const Retriever* cqr_retriever = nullptr;  // optional F for cqr
    const Retriever* stage1_model = nullptr;   // in-batch-trained dense retriever
    RenderLimits limits;
};

// Top-k retrieval with the strategy's query, with every gold id of the turn
// removed; the retriever's ranking order is preserved. Throws when the
// strategy's precondition is unmet (missing rewrite, missing retriever).
std::vector<std::string> mine_negatives(const MiningStrategy& strategy,
                                        const MiningContext& ctx,
                                        const Conversation& conversation, int t,
                                        const std::vector<std::string>& gold_ids);

using TurnKey = std::pair<std::string, int>;  // (conversation id, turn)
using MinedPools = std::map<TurnKey, std::vector<std::string>>;

// Pools for exactly the turns with non-empty gold, in canonical
// (conversation id, turn) order.
MinedPools mine_dataset(const MiningStrategy& strategy, const MiningContext& ctx,
                        const std::vector<Conversation>& conversations);

// Mined-pool file: a meta line describing the strategy, then one JSON line
// per turn: {"conv_id", "turn", "strategy", "k", "pool": [ids]}.
void save_pools(const std::string& path, const MiningStrategy& strategy,
                std::string_view retriever_name, const MinedPools& pools);
MinedPools load_pools(const std::string& path);

}  // namespace convsearch
