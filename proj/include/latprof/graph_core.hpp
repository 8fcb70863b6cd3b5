#pragma once

#include "latprof/decimal.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace latprof {

/// Weighted graph over opaque text node ids. Weights are exact and never
/// negative; at most one edge per ordered pair (per unordered pair when
/// undirected).
class Graph {
  public:
    struct Edge {
        std::string src;
        std::string dst;
        Decimal weight;
    };

    explicit Graph(bool directed = true) : directed_(directed) {}

    void add_node(const std::string& id);
    /// Adds both endpoints as needed. Throws AnalysisError on a negative
    /// weight or a repeated edge.
    void add_edge(const std::string& src, const std::string& dst, Decimal weight);

    bool directed() const { return directed_; }
    const std::set<std::string>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_node(const std::string& id) const { return nodes_.count(id) > 0; }

    /// Out-neighbours (all neighbours when undirected), sorted by id.
    std::vector<std::pair<std::string, Decimal>> successors(const std::string& id) const;

  private:
    bool directed_;
    std::set<std::string> nodes_;
    std::vector<Edge> edges_;
    std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

/// `src dst [weight]` per line (weight defaults to 1); a lone `node` declares
/// an isolated node; blank lines and lines starting with '#' are skipped.
/// Throws ParseError on malformed lines.
Graph parse_edge_list(std::string_view text, bool undirected = false);

/// Kahn's algorithm, smallest ready id first. Throws CycleError.
std::vector<std::string> topo_sort(const Graph& g);

struct WeightedPath {
    std::vector<std::string> nodes;
    Decimal weight;
};

/// Heaviest path starting at `source` in a DAG; ties go to the
/// lexicographically smallest node sequence.
WeightedPath critical_path(const Graph& g, const std::string& source);

/// Lightest path; ties go to the lexicographically smallest node sequence.
/// Throws AnalysisError(unreachable).
WeightedPath shortest_path(const Graph& g, const std::string& source, const std::string& target);

struct SpanningTree {
    std::vector<Graph::Edge> edges; // src < dst
    Decimal total;
};

/// Kruskal with (weight, src, dst) ordering. Throws AnalysisError(disconnected).
SpanningTree minimum_spanning_tree(const Graph& g);

/// All elementary cycles of at most `max_len` nodes, each once, rotated to
/// start at its smallest id, sorted.
std::vector<std::vector<std::string>> detect_cycles(const Graph& g, std::size_t max_len = 8);

/// Bounded elementary-cycle enumeration over an index graph. Each cycle starts
/// at its smallest index; result sorted lexicographically. Self-loops are
/// reported as one-node cycles.
std::vector<std::vector<std::size_t>> elementary_cycles(const std::vector<std::vector<std::size_t>>& adjacency,
                                                        std::size_t max_len);

} // namespace latprof
