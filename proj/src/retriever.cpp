#include "convsearch/retriever.hpp"

#include <algorithm>

namespace convsearch {

RankedList make_ranked_list(std::vector<ScoredPassage> scored, std::size_t k) {
    std::sort(scored.begin(), scored.end(),
              [](const ScoredPassage& a, const ScoredPassage& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.id < b.id;
              });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

}  // namespace convsearch
