#include "latprof/graph_core.hpp"

#include "latprof/error.hpp"
#include "latprof/parsers.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>

namespace latprof {

void Graph::add_node(const std::string& id) { nodes_.insert(id); }

void Graph::add_edge(const std::string& src, const std::string& dst, Decimal weight) {
    if (weight < Decimal{}) {
        throw AnalysisError(AnalysisErrorKind::negative_weight,
                            "negative weight on edge " + src + " -> " + dst + ": " + weight.to_string());
    }
    std::pair<std::string, std::string> key = directed_ || src <= dst ? std::make_pair(src, dst) : std::make_pair(dst, src);
    if (index_.count(key)) {
        throw AnalysisError(AnalysisErrorKind::duplicate_edge, "duplicate edge " + src + " -> " + dst);
    }
    index_.emplace(key, edges_.size());
    edges_.push_back({src, dst, weight});
    nodes_.insert(src);
    nodes_.insert(dst);
}

std::vector<std::pair<std::string, Decimal>> Graph::successors(const std::string& id) const {
    std::vector<std::pair<std::string, Decimal>> out;
    for (const auto& e : edges_) {
        if (e.src == id) out.emplace_back(e.dst, e.weight);
        else if (!directed_ && e.dst == id) out.emplace_back(e.src, e.weight);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

Graph parse_edge_list(std::string_view text, bool undirected) {
    Graph g(!undirected);
    detail::LineReader reader(text);
    std::string_view line;
    while (reader.next(line)) {
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        auto toks = detail::split_ws(t);
        auto fail = [&](const std::string& why) {
            throw ParseError(LineError{ParseErrorKind::malformed_row, reader.line_number(), why});
        };
        if (toks.size() == 1) {
            g.add_node(std::string(toks[0]));
            continue;
        }
        if (toks.size() > 3) fail("expected `src dst [weight]`");
        Decimal w = Decimal::from_int(1);
        if (toks.size() == 3) {
            auto parsed = Decimal::parse(toks[2]);
            if (!parsed) fail("bad weight `" + std::string(toks[2]) + "`");
            w = *parsed;
        }
        g.add_edge(std::string(toks[0]), std::string(toks[1]), w);
    }
    return g;
}

namespace {

struct Indexed {
    std::vector<std::string> names;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::pair<std::size_t, Decimal>>> adj; // sorted by target index
    std::vector<std::vector<std::size_t>> preds;

    explicit Indexed(const Graph& g) : names(g.nodes().begin(), g.nodes().end()) {
        for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
        adj.resize(names.size());
        preds.resize(names.size());
        for (const auto& e : g.edges()) {
            auto s = index.at(e.src), d = index.at(e.dst);
            adj[s].emplace_back(d, e.weight);
            preds[d].push_back(s);
            if (!g.directed() && s != d) {
                adj[d].emplace_back(s, e.weight);
                preds[s].push_back(d);
            }
        }
        for (auto& a : adj) std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (auto& p : preds) std::sort(p.begin(), p.end());
    }

    std::size_t at(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end()) throw AnalysisError(AnalysisErrorKind::unknown_node, "unknown node `" + id + "`");
        return it->second;
    }

    std::vector<std::string> to_names(const std::vector<std::size_t>& path) const {
        std::vector<std::string> out;
        out.reserve(path.size());
        for (auto i : path) out.push_back(names[i]);
        return out;
    }
};

void require_directed(const Graph& g, const char* op) {
    if (!g.directed()) throw AnalysisError(AnalysisErrorKind::not_directed, std::string(op) + " needs a directed graph");
}

std::vector<std::size_t> rotate_smallest_first(std::vector<std::size_t> cycle) {
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
    return cycle;
}

std::vector<std::size_t> topo_order(const Indexed& ix) {
    const std::size_t n = ix.names.size();
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        for (const auto& [v, w] : ix.adj[u]) ++indeg[v];
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t u = 0; u < n; ++u) {
        if (indeg[u] == 0) ready.push(u);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto u = ready.top();
        ready.pop();
        order.push_back(u);
        for (const auto& [v, w] : ix.adj[u]) {
            if (--indeg[v] == 0) ready.push(v);
        }
    }
    if (order.size() == n) return order;

    // every leftover node keeps a leftover predecessor; walk those back
    std::vector<bool> left(n, false);
    for (std::size_t u = 0; u < n; ++u) left[u] = indeg[u] > 0;
    std::size_t cur = static_cast<std::size_t>(std::find(left.begin(), left.end(), true) - left.begin());
    std::vector<std::size_t> walk;
    std::vector<std::size_t> pos(n, n);
    while (pos[cur] == n) {
        pos[cur] = walk.size();
        walk.push_back(cur);
        for (auto p : ix.preds[cur]) {
            if (left[p]) {
                cur = p;
                break;
            }
        }
    }
    std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(pos[cur]), walk.end());
    std::reverse(cycle.begin(), cycle.end());
    throw CycleError(ix.to_names(rotate_smallest_first(std::move(cycle))));
}

std::vector<std::optional<Decimal>> dijkstra(const Indexed& ix, std::size_t source, bool reverse) {
    const std::size_t n = ix.names.size();
    std::vector<std::vector<std::pair<std::size_t, Decimal>>> radj;
    if (reverse) {
        radj.resize(n);
        for (std::size_t u = 0; u < n; ++u) {
            for (const auto& [v, w] : ix.adj[u]) radj[v].emplace_back(u, w);
        }
    }
    const auto& adj = reverse ? radj : ix.adj;
    std::vector<std::optional<Decimal>> dist(n);
    using Item = std::pair<Decimal, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = Decimal{};
    pq.emplace(Decimal{}, source);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != *dist[u]) continue;
        for (const auto& [v, w] : adj[u]) {
            Decimal nd = d + w;
            if (!dist[v] || nd < *dist[v]) {
                dist[v] = nd;
                pq.emplace(nd, v);
            }
        }
    }
    return dist;
}

} // namespace

std::vector<std::string> topo_sort(const Graph& g) {
    require_directed(g, "topo_sort");
    Indexed ix(g);
    return ix.to_names(topo_order(ix));
}

WeightedPath critical_path(const Graph& g, const std::string& source) {
    require_directed(g, "critical_path");
    Indexed ix(g);
    const std::size_t src = ix.at(source);
    auto order = topo_order(ix);

    struct Best {
        Decimal weight;
        std::vector<std::size_t> path;
    };
    auto better = [](const Best& a, const Best& b) {
        return a.weight > b.weight || (a.weight == b.weight && a.path < b.path);
    };
    std::vector<std::optional<Best>> best(ix.names.size());
    best[src] = Best{Decimal{}, {src}};
    for (auto u : order) {
        if (!best[u]) continue;
        for (const auto& [v, w] : ix.adj[u]) {
            Best cand{best[u]->weight + w, best[u]->path};
            cand.path.push_back(v);
            if (!best[v] || better(cand, *best[v])) best[v] = std::move(cand);
        }
    }
    const Best* winner = nullptr;
    for (const auto& b : best) {
        if (b && (!winner || better(*b, *winner))) winner = &*b;
    }
    return {ix.to_names(winner->path), winner->weight};
}

WeightedPath shortest_path(const Graph& g, const std::string& source, const std::string& target) {
    Indexed ix(g);
    const std::size_t s = ix.at(source), t = ix.at(target);
    auto dist = dijkstra(ix, s, false);
    if (!dist[t]) {
        throw AnalysisError(AnalysisErrorKind::unreachable, "`" + target + "` is unreachable from `" + source + "`");
    }
    auto rdist = dijkstra(ix, t, g.directed());
    const Decimal total = *dist[t];
    const std::size_t n = ix.names.size();
    auto on_shortest = [&](std::size_t x) { return dist[x] && rdist[x] && *dist[x] + *rdist[x] == total; };
    auto tight = [&](std::size_t u, std::size_t v, Decimal w) { return on_shortest(v) && *dist[u] + w == *dist[v]; };

    // Greedy smallest next hop, keeping only hops that can still finish on
    // tight edges without revisiting a node.
    std::vector<bool> visited(n, false);
    auto can_finish = [&](std::size_t from) {
        std::vector<bool> seen = visited;
        std::vector<std::size_t> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            if (u == t) return true;
            for (const auto& [v, w] : ix.adj[u]) {
                if (!seen[v] && tight(u, v, w)) {
                    seen[v] = true;
                    stack.push_back(v);
                }
            }
        }
        return false;
    };
    std::vector<std::size_t> path{s};
    visited[s] = true;
    std::size_t cur = s;
    while (cur != t) {
        std::optional<std::size_t> pick;
        for (const auto& [v, w] : ix.adj[cur]) {
            if (visited[v] || !tight(cur, v, w)) continue;
            if (can_finish(v)) {
                pick = v;
                break;
            }
        }
        cur = *pick; // a tight simple completion always exists from the previous hop
        visited[cur] = true;
        path.push_back(cur);
    }
    return {ix.to_names(path), total};
}

SpanningTree minimum_spanning_tree(const Graph& g) {
    if (g.directed()) throw AnalysisError(AnalysisErrorKind::not_undirected, "minimum_spanning_tree needs an undirected graph");
    Indexed ix(g);
    std::vector<Graph::Edge> edges;
    for (const auto& e : g.edges()) {
        if (e.src == e.dst) continue;
        auto [a, b] = std::minmax(e.src, e.dst);
        edges.push_back({a, b, e.weight});
    }
    std::sort(edges.begin(), edges.end(), [](const Graph::Edge& x, const Graph::Edge& y) {
        return std::tie(x.weight, x.src, x.dst) < std::tie(y.weight, y.src, y.dst);
    });
    std::vector<std::size_t> parent(ix.names.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    SpanningTree tree;
    for (auto& e : edges) {
        auto a = find(ix.at(e.src)), b = find(ix.at(e.dst));
        if (a == b) continue;
        parent[a] = b;
        tree.total += e.weight;
        tree.edges.push_back(std::move(e));
    }
    if (!ix.names.empty() && tree.edges.size() != ix.names.size() - 1) {
        throw AnalysisError(AnalysisErrorKind::disconnected, "graph is not connected; no spanning tree");
    }
    return tree;
}

std::vector<std::vector<std::size_t>> elementary_cycles(const std::vector<std::vector<std::size_t>>& adjacency,
                                                        std::size_t max_len) {
    const std::size_t n = adjacency.size();
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> path;
    std::vector<bool> on_path(n, false);
    // Roots each cycle at its smallest node, so every cycle is found exactly once.
    std::function<void(std::size_t, std::size_t)> extend = [&](std::size_t start, std::size_t u) {
        for (auto v : adjacency[u]) {
            if (v == start) {
                out.push_back(path);
            } else if (v > start && !on_path[v] && path.size() < max_len) {
                on_path[v] = true;
                path.push_back(v);
                extend(start, v);
                path.pop_back();
                on_path[v] = false;
            }
        }
    };
    if (max_len == 0) return out;
    for (std::size_t s = 0; s < n; ++s) {
        path = {s};
        on_path[s] = true;
        extend(s, s);
        on_path[s] = false;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<std::string>> detect_cycles(const Graph& g, std::size_t max_len) {
    require_directed(g, "detect_cycles");
    Indexed ix(g);
    std::vector<std::vector<std::size_t>> adjacency(ix.names.size());
    for (std::size_t u = 0; u < adjacency.size(); ++u) {
        for (const auto& [v, w] : ix.adj[u]) adjacency[u].push_back(v);
    }
    std::vector<std::vector<std::string>> out;
    for (const auto& c : elementary_cycles(adjacency, max_len)) out.push_back(ix.to_names(c));
    return out;
}

} // namespace latprof
