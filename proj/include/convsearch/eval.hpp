#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "convsearch/bm25.hpp"
#include "convsearch/corpus.hpp"
#include "convsearch/retriever.hpp"
#include "convsearch/views.hpp"

namespace convsearch {

struct QueryKey {
    std::string conv_id;
    int turn = 0;

    auto operator<=>(const QueryKey&) const = default;
};

// Relevance judgments. Sets may be empty (unanswerable turns); such queries
// are excluded from every metric.
using Qrels = std::map<QueryKey, std::set<std::string>>;

// Ranked results per query.
using RunFile = std::map<QueryKey, RankedList>;

enum class TurnType { First, Switch, NoSwitch };
std::string_view turn_type_name(TurnType t);

using TurnTypeLabels = std::map<QueryKey, TurnType>;

struct MetricValue {
    double value = 0.0;
    std::size_t evaluable = 0;  // queries contributing to the mean
    std::size_t excluded = 0;   // run queries with empty/absent gold
};

// Mean reciprocal rank of the first retrieved gold id, 0 when none is
// retrieved. Queries without ground truth are excluded from numerator and
// denominator.
MetricValue compute_mrr(const RunFile& run, const Qrels& qrels);

// Mean over evaluable queries of |gold in top-k| / |gold|.
MetricValue compute_recall_at_k(const RunFile& run, const Qrels& qrels, int k);

// Turn-type classification: turn 1 -> First; a later turn is NoSwitch when
// the max pairwise BM25 passage similarity between its gold set and the
// previous turn's gold set exceeds tau, Switch otherwise. Turns whose own
// or previous gold set is empty stay unlabeled.
TurnTypeLabels classify_turn_types(const std::vector<Conversation>& conversations,
                                   const BM25Index& index, double tau);

Qrels qrels_from_conversations(const std::vector<Conversation>& conversations);

struct SplitMetrics {
    std::size_t count = 0;
    std::optional<double> mrr;
    std::map<int, std::optional<double>> recall;  // per requested K
};

// Per-type metric table. The three sub-split counts need not sum to "all":
// unlabeled queries count toward "all" only.
struct BreakdownReport {
    std::vector<int> ks;
    SplitMetrics all;
    SplitMetrics first;
    SplitMetrics switched;
    SplitMetrics no_switch;

    const SplitMetrics& split(std::string_view name) const;
};

BreakdownReport evaluate_breakdown(const RunFile& run, const Qrels& qrels,
                                   const TurnTypeLabels& labels,
                                   const std::vector<int>& ks);

// One output row of the diagnostics battery.
struct DiagnosticsRow {
    std::string retriever;
    std::string view;
    std::string split;   // all | first | switch | no-switch
    std::string metric;  // mrr | r@K
    std::optional<double> value;
    std::size_t count = 0;
    std::optional<double> retention;  // value / same retriever's full-view value
};

struct DiagnosticsOptions {
    std::vector<int> ks = {5, 10, 100};
    double tau = 0.0;
    int run_depth = 100;
    RenderLimits limits;
};

// The query-view ablation battery: for every (retriever, view) pair, builds
// a run over the turns where the view is defined and non-empty, computes
// the per-type breakdown, and reports each metric next to its retention
// ratio against the same retriever's full view. The full view is always
// evaluated even when absent from `views`.
std::vector<DiagnosticsRow> run_shortcut_diagnostics(
    const std::vector<Conversation>& conversations, const Qrels& qrels,
    const std::vector<std::pair<std::string, const Retriever*>>& retrievers,
    const std::vector<QueryView>& views, const BM25Index& label_index,
    const DiagnosticsOptions& options);

std::string diagnostics_to_tsv(const std::vector<DiagnosticsRow>& rows);

// Builds the ranked run for one view over every turn with non-empty gold
// where the view renders to non-empty text (rewrites must be present for
// the rewrite view; last_answer_only skips first turns).
RunFile run_view_over_dataset(const Retriever& retriever,
                              const std::vector<Conversation>& conversations,
                              QueryView view, int depth, const RenderLimits& limits);

// TREC interchange formats.
//   run:   "<conv_id>_<turn> Q0 <passage_id> <rank> <score> <tag>"
//   qrels: "<conv_id>_<turn> 0 <passage_id> 1"
void save_run(const std::string& path, const RunFile& run, std::string_view tag);
RunFile load_run(const std::string& path);
void save_qrels(const std::string& path, const Qrels& qrels);
Qrels load_qrels(const std::string& path);

}  // namespace convsearch
