#include "convsearch/eval.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "convsearch/error.hpp"

namespace convsearch {
namespace {

std::string format_query_id(const QueryKey& key) {
    return key.conv_id + "_" + std::to_string(key.turn);
}

QueryKey parse_query_id(const std::string& qid, const std::string& where) {
    const auto pos = qid.rfind('_');
    if (pos == std::string::npos || pos + 1 == qid.size())
        throw ParseError(where + ": query id \"" + qid + "\" is not <conv_id>_<turn>");
    QueryKey key;
    key.conv_id = qid.substr(0, pos);
    try {
        key.turn = std::stoi(qid.substr(pos + 1));
    } catch (const std::exception&) {
        throw ParseError(where + ": non-integer turn in query id \"" + qid + "\"");
    }
    return key;
}

// Shared evaluable-query walk: calls fn(gold, ranked) for every run query
// with non-empty gold.
template <typename Fn>
MetricValue mean_over_evaluable(const RunFile& run, const Qrels& qrels, Fn&& fn) {
    MetricValue out;
    double sum = 0.0;
    for (const auto& [key, ranked] : run) {
        const auto it = qrels.find(key);
        if (it == qrels.end() || it->second.empty()) {
            ++out.excluded;
            continue;
        }
        sum += fn(it->second, ranked);
        ++out.evaluable;
    }
    out.value = out.evaluable == 0 ? 0.0 : sum / static_cast<double>(out.evaluable);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string_view turn_type_name(TurnType t) {
    switch (t) {
        case TurnType::First: return "first";
        case TurnType::Switch: return "switch";
        case TurnType::NoSwitch: return "no-switch";
    }
    return "unknown";
}

MetricValue compute_mrr(const RunFile& run, const Qrels& qrels) {
    return mean_over_evaluable(
        run, qrels, [](const std::set<std::string>& gold, const RankedList& ranked) {
            for (std::size_t r = 0; r < ranked.size(); ++r) {
                if (gold.count(ranked[r].id))
                    return 1.0 / static_cast<double>(r + 1);
            }
            return 0.0;
        });
}

MetricValue compute_recall_at_k(const RunFile& run, const Qrels& qrels, int k) {
    if (k < 1) throw ConfigError("recall cutoff k must be >= 1");
    return mean_over_evaluable(
        run, qrels, [k](const std::set<std::string>& gold, const RankedList& ranked) {
            const std::size_t depth =
                std::min(ranked.size(), static_cast<std::size_t>(k));
            std::size_t hit = 0;
            for (std::size_t r = 0; r < depth; ++r) {
                if (gold.count(ranked[r].id)) ++hit;
            }
            return static_cast<double>(hit) / static_cast<double>(gold.size());
        });
}

TurnTypeLabels classify_turn_types(const std::vector<Conversation>& conversations,
                                   const BM25Index& index, double tau) {
    TurnTypeLabels labels;
    for (const Conversation& conv : conversations) {
        for (std::size_t i = 0; i < conv.turns.size(); ++i) {
            const Turn& turn = conv.turns[i];
            if (turn.gold_ids.empty()) continue;
            if (i == 0) {
                labels[{conv.id, turn.index}] = TurnType::First;
                continue;
            }
            const Turn& prev = conv.turns[i - 1];
            if (prev.gold_ids.empty()) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& g_prev : prev.gold_ids) {
                for (const auto& g : turn.gold_ids) {
                    best = std::max(best, index.passage_similarity(g_prev, g));
                }
            }
            labels[{conv.id, turn.index}] =
                best > tau ? TurnType::NoSwitch : TurnType::Switch;
        }
    }
    return labels;
}

Qrels qrels_from_conversations(const std::vector<Conversation>& conversations) {
    Qrels qrels;
    for (const Conversation& conv : conversations) {
        for (const Turn& turn : conv.turns) {
            qrels[{conv.id, turn.index}] =
                std::set<std::string>(turn.gold_ids.begin(), turn.gold_ids.end());
        }
    }
    return qrels;
}

const SplitMetrics& BreakdownReport::split(std::string_view name) const {
    if (name == "all") return all;
    if (name == "first") return first;
    if (name == "switch") return switched;
    if (name == "no-switch") return no_switch;
    throw ConfigError("unknown split \"" + std::string(name) + "\"");
}

BreakdownReport evaluate_breakdown(const RunFile& run, const Qrels& qrels,
                                   const TurnTypeLabels& labels,
                                   const std::vector<int>& ks) {
    BreakdownReport report;
    report.ks = ks;

    const auto fill = [&](SplitMetrics& split, const RunFile& subset) {
        const MetricValue mrr = compute_mrr(subset, qrels);
        split.count = mrr.evaluable;
        if (mrr.evaluable > 0) split.mrr = mrr.value;
        for (const int k : ks) {
            const MetricValue r = compute_recall_at_k(subset, qrels, k);
            split.recall[k] = r.evaluable > 0 ? std::optional<double>(r.value)
                                              : std::nullopt;
        }
    };

    fill(report.all, run);

    RunFile first, switched, no_switch;
    for (const auto& [key, ranked] : run) {
        const auto it = labels.find(key);
        if (it == labels.end()) continue;
        switch (it->second) {
            case TurnType::First: first[key] = ranked; break;
            case TurnType::Switch: switched[key] = ranked; break;
            case TurnType::NoSwitch: no_switch[key] = ranked; break;
        }
    }
    fill(report.first, first);
    fill(report.switched, switched);
    fill(report.no_switch, no_switch);
    return report;
}

RunFile run_view_over_dataset(const Retriever& retriever,
                              const std::vector<Conversation>& conversations,
                              QueryView view, int depth, const RenderLimits& limits) {
    RunFile run;
    for (const Conversation& conv : conversations) {
        for (const Turn& turn : conv.turns) {
            if (turn.gold_ids.empty()) continue;
            if (view == QueryView::last_answer_only && turn.index < 2) continue;
            if (view == QueryView::rewrite && !turn.rewrite) continue;
            const std::string query = render_query(conv, turn.index, view, limits);
            if (query.empty()) continue;  // e.g. history_only at turn 1
            run[{conv.id, turn.index}] = retriever.search(query, depth);
        }
    }
    return run;
}

std::vector<DiagnosticsRow> run_shortcut_diagnostics(
    const std::vector<Conversation>& conversations, const Qrels& qrels,
    const std::vector<std::pair<std::string, const Retriever*>>& retrievers,
    const std::vector<QueryView>& views, const BM25Index& label_index,
    const DiagnosticsOptions& options) {
    const TurnTypeLabels labels =
        classify_turn_types(conversations, label_index, options.tau);

    std::vector<QueryView> all_views = views;
    if (std::find(all_views.begin(), all_views.end(), QueryView::full) ==
        all_views.end()) {
        all_views.insert(all_views.begin(), QueryView::full);
    }

    static constexpr std::array<std::string_view, 4> kSplits = {
        "all", "first", "switch", "no-switch"};

    std::vector<DiagnosticsRow> rows;
    for (const auto& [name, retriever] : retrievers) {
        std::map<QueryView, BreakdownReport> reports;
        for (const QueryView view : all_views) {
            const RunFile run = run_view_over_dataset(
                *retriever, conversations, view, options.run_depth, options.limits);
            reports[view] = evaluate_breakdown(run, qrels, labels, options.ks);
        }
        const BreakdownReport& base = reports.at(QueryView::full);

        for (const QueryView view : all_views) {
            const BreakdownReport& report = reports.at(view);
            for (const std::string_view split : kSplits) {
                const SplitMetrics& sm = report.split(split);
                const SplitMetrics& base_sm = base.split(split);

                const auto emit = [&](const std::string& metric,
                                      std::optional<double> value,
                                      std::optional<double> base_value) {
                    DiagnosticsRow row;
                    row.retriever = name;
                    row.view = std::string(view_name(view));
                    row.split = std::string(split);
                    row.metric = metric;
                    row.value = value;
                    row.count = sm.count;
                    if (value && base_value && *base_value != 0.0)
                        row.retention = *value / *base_value;
                    rows.push_back(std::move(row));
                };

                emit("mrr", sm.mrr, base_sm.mrr);
                for (const int k : options.ks) {
                    emit("r@" + std::to_string(k), sm.recall.at(k),
                         base_sm.recall.at(k));
                }
            }
        }
    }
    return rows;
}

std::string diagnostics_to_tsv(const std::vector<DiagnosticsRow>& rows) {
    std::string out = "retriever\tview\tsplit\tmetric\tvalue\tcount\tretention\n";
    for (const DiagnosticsRow& row : rows) {
        out += row.retriever;
        out += '\t';
        out += row.view;
        out += '\t';
        out += row.split;
        out += '\t';
        out += row.metric;
        out += '\t';
        out += row.value ? format_double(*row.value) : std::string("-");
        out += '\t';
        out += std::to_string(row.count);
        out += '\t';
        out += row.retention ? format_double(*row.retention) : std::string("-");
        out += '\n';
    }
    return out;
}

void save_run(const std::string& path, const RunFile& run, std::string_view tag) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [key, ranked] : run) {
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", ranked[r].score);
            out << format_query_id(key) << " Q0 " << ranked[r].id << ' ' << (r + 1)
                << ' ' << buf << ' ' << tag << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

RunFile load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    RunFile run;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, q0, pid, tag;
        std::size_t rank = 0;
        double score = 0.0;
        if (!(ss >> qid >> q0 >> pid >> rank >> score)) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": malformed run line");
        }
        ss >> tag;
        const QueryKey key =
            parse_query_id(qid, path + ":" + std::to_string(line_no));
        RankedList& ranked = run[key];
        if (rank != ranked.size() + 1) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": ranks must be contiguous from 1 per query");
        }
        ranked.push_back({pid, score});
    }
    return run;
}

void save_qrels(const std::string& path, const Qrels& qrels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (const auto& [key, gold] : qrels) {
        for (const auto& id : gold)
            out << format_query_id(key) << " 0 " << id << " 1\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

Qrels load_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string qid, zero, pid;
        int rel = 0;
        if (!(ss >> qid >> zero >> pid >> rel)) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": malformed qrels line");
        }
        const QueryKey key =
            parse_query_id(qid, path + ":" + std::to_string(line_no));
        if (rel > 0) qrels[key].insert(pid);
        else qrels.try_emplace(key);
    }
    return qrels;
}

}  // namespace convsearch
