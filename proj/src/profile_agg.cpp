#include "latprof/profile_agg.hpp"

#include "latprof/error.hpp"

#include <algorithm>
#include <set>

namespace latprof {

bool SampleFilter::operator()(const TraceEvent& e) const {
    if (event) return e.event == *event;
    return e.event_class == EventClass::cpu_clock;
}

namespace {

ProfileKey key_of(const TraceEvent& e, GroupBy g) {
    ProfileKey k;
    if (g.comm) k.comm = e.comm;
    const Frame* leaf = e.leaf();
    if (g.dso && leaf && leaf->dso) k.dso = leaf->dso;
    if (g.symbol) k.symbol = leaf ? leaf->symbol_or_unknown() : std::string("[unknown]");
    return k;
}

std::vector<FlatProfileRow> finalize(std::map<ProfileKey, FlatProfileRow> acc) {
    std::uint64_t total = 0;
    for (const auto& [k, r] : acc) total += r.weight;
    std::vector<FlatProfileRow> rows;
    rows.reserve(acc.size());
    for (auto& [k, r] : acc) {
        r.key = k;
        r.percent = total == 0 ? 0.0 : 100.0 * static_cast<double>(r.weight) / static_cast<double>(total);
        rows.push_back(std::move(r));
    }
    // weight order is percent order without float ties
    std::stable_sort(rows.begin(), rows.end(), [](const FlatProfileRow& a, const FlatProfileRow& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.key < b.key;
    });
    return rows;
}

} // namespace

std::vector<FlatProfileRow> flat_profile(const std::vector<TraceEvent>& events, GroupBy group_by,
                                         const SampleFilter& filter) {
    std::map<ProfileKey, FlatProfileRow> acc;
    for (const auto& e : events) {
        if (!filter(e)) continue;
        auto& row = acc[key_of(e, group_by)];
        row.samples += 1;
        row.weight += e.period;
    }
    if (acc.empty()) throw AnalysisError(AnalysisErrorKind::no_samples, "no sample events matched the filter");
    return finalize(std::move(acc));
}

std::vector<FlatProfileRow> merge_profiles(const std::vector<FlatProfileRow>& a, const std::vector<FlatProfileRow>& b) {
    std::map<ProfileKey, FlatProfileRow> acc;
    for (const auto* rows : {&a, &b}) {
        for (const auto& r : *rows) {
            auto& dst = acc[r.key];
            dst.samples += r.samples;
            dst.weight += r.weight;
        }
    }
    return finalize(std::move(acc));
}

std::vector<FlatProfileRow> top_n(const std::vector<FlatProfileRow>& rows, std::size_t n) {
    return {rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(std::min(n, rows.size()))};
}

std::string SymbolKey::display() const { return dso ? symbol + " (" + *dso + ")" : symbol; }

CallGraph build_call_graph(const std::vector<TraceEvent>& events, const SampleFilter& filter) {
    CallGraph g;
    for (const auto& e : events) {
        if (!filter(e) || e.stack.empty()) continue;
        g.total_weight += e.period;
        std::set<SymbolKey> seen;
        for (std::size_t i = 0; i < e.stack.size(); ++i) {
            auto key = SymbolKey::of(e.stack[i]);
            auto& node = g.nodes[key];
            if (i == 0) node.exclusive += e.period;
            if (seen.insert(key).second) node.inclusive += e.period;
            if (i + 1 < e.stack.size()) g.edges[{SymbolKey::of(e.stack[i + 1]), key}] += e.period;
        }
    }
    return g;
}

const DynamicCallTree::Node* DynamicCallTree::Node::child(const SymbolKey& k) const {
    for (const auto& c : children) {
        if (c->key == k) return c.get();
    }
    return nullptr;
}

void DynamicCallTree::insert(const std::vector<SymbolKey>& root_first, std::uint64_t weight) {
    Node* node = &root_;
    node->weight += weight;
    for (const auto& k : root_first) {
        auto it = std::find_if(node->children.begin(), node->children.end(),
                               [&](const std::unique_ptr<Node>& c) { return c->key == k; });
        if (it == node->children.end()) {
            node->children.push_back(std::make_unique<Node>());
            node->children.back()->key = k;
            it = std::prev(node->children.end());
        }
        node = it->get();
        node->weight += weight;
    }
}

DynamicCallTree build_dynamic_call_tree(const std::vector<TraceEvent>& events, std::int64_t tid,
                                        const SampleFilter& filter) {
    DynamicCallTree tree(tid);
    bool any = false;
    for (const auto& e : events) {
        if (e.tid != tid || !filter(e)) continue;
        any = true;
        std::vector<SymbolKey> path;
        path.reserve(e.stack.size());
        for (auto it = e.stack.rbegin(); it != e.stack.rend(); ++it) path.push_back(SymbolKey::of(*it));
        tree.insert(path, e.period);
    }
    if (!any) throw AnalysisError(AnalysisErrorKind::no_samples, "no samples for tid " + std::to_string(tid));
    return tree;
}

} // namespace latprof
