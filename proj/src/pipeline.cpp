#include "convsearch/pipeline.hpp"

#include <algorithm>

#include "convsearch/error.hpp"

namespace convsearch {

std::vector<TrainingInstance> build_training_instances(
    const std::vector<Conversation>& conversations, const Collection& collection,
    const RenderLimits& limits, const MinedPools* pools) {
    std::vector<TrainingInstance> instances;
    for (const Conversation& conv : conversations) {
        for (const Turn& turn : conv.turns) {
            if (turn.gold_ids.empty()) continue;  // unanswerable: history only
            TrainingInstance inst;
            inst.query_text = render_query(conv, turn.index, QueryView::full, limits);
            inst.positive_id = turn.gold_ids.front();
            if (!collection.contains(inst.positive_id))
                throw ValidationError("unknown gold id \"" + inst.positive_id + "\"");
            if (pools) {
                const auto it = pools->find(TurnKey{conv.id, turn.index});
                if (it != pools->end()) {
                    inst.hard_pool = it->second;
                    // gold filtering upstream should make this a no-op
                    std::erase(inst.hard_pool, inst.positive_id);
                }
            }
            instances.push_back(std::move(inst));
        }
    }
    return instances;
}

}  // namespace convsearch
