#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace convsearch {

struct ScoredPassage {
    std::string id;
    double score = 0.0;

    bool operator==(const ScoredPassage&) const = default;
};

// Ranked retrieval output: strictly sorted by (score desc, id asc), no
// duplicate ids.
using RankedList = std::vector<ScoredPassage>;

// Sorts and enforces the RankedList invariant on raw scored candidates.
RankedList make_ranked_list(std::vector<ScoredPassage> scored, std::size_t k);

// Text-in, ranking-out handle used by mining strategies and the
// diagnostics battery.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual RankedList search(std::string_view query_text, int k) const = 0;
    virtual std::string name() const = 0;
};

}  // namespace convsearch
