#pragma once

#include <vector>

#include "convsearch/corpus.hpp"
#include "convsearch/dense.hpp"
#include "convsearch/mining.hpp"
#include "convsearch/views.hpp"

namespace convsearch {

// One instance per turn with non-empty gold: the rendered full view, the
// first (sorted) gold id as positive, and the turn's mined pool when one is
// supplied. Order is canonical: conversation file order, then turn.
std::vector<TrainingInstance> build_training_instances(
    const std::vector<Conversation>& conversations, const Collection& collection,
    const RenderLimits& limits, const MinedPools* pools = nullptr);

}  // namespace convsearch
