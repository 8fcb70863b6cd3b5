#pragma once

#include "latprof/trace_model.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace latprof {

/// Which events count as samples. Default: every cpu-clock event; with
/// `event` set, only events with exactly that qualified name.
struct SampleFilter {
    std::optional<std::string> event;
    bool operator()(const TraceEvent& e) const;
};

struct GroupBy {
    bool comm = true;
    bool dso = false;
    bool symbol = false;
};

struct ProfileKey {
    std::optional<std::string> comm;
    std::optional<std::string> dso;
    std::optional<std::string> symbol;

    friend auto operator<=>(const ProfileKey&, const ProfileKey&) = default;
    friend bool operator==(const ProfileKey&, const ProfileKey&) = default;
};

struct FlatProfileRow {
    ProfileKey key;
    std::uint64_t samples = 0;
    std::uint64_t weight = 0;
    double percent = 0.0;
};

/// Sorted by percent descending, ties by key ascending. Throws
/// AnalysisError(no_samples) when the filter matches nothing.
std::vector<FlatProfileRow> flat_profile(const std::vector<TraceEvent>& events, GroupBy group_by = {},
                                         const SampleFilter& filter = {});

/// Sums weights per key and recomputes percentages.
std::vector<FlatProfileRow> merge_profiles(const std::vector<FlatProfileRow>& a, const std::vector<FlatProfileRow>& b);

std::vector<FlatProfileRow> top_n(const std::vector<FlatProfileRow>& rows, std::size_t n);

struct SymbolKey {
    std::string symbol;
    std::optional<std::string> dso;

    static SymbolKey of(const Frame& f) { return {f.symbol_or_unknown(), f.dso}; }
    std::string display() const;

    friend auto operator<=>(const SymbolKey&, const SymbolKey&) = default;
    friend bool operator==(const SymbolKey&, const SymbolKey&) = default;
};

struct CallGraph {
    struct NodeWeights {
        std::uint64_t inclusive = 0;
        std::uint64_t exclusive = 0;
    };
    std::map<SymbolKey, NodeWeights> nodes;
    std::map<std::pair<SymbolKey, SymbolKey>, std::uint64_t> edges; // (caller, callee)
    std::uint64_t total_weight = 0;
};

/// Samples without a stack are skipped.
CallGraph build_call_graph(const std::vector<TraceEvent>& events, const SampleFilter& filter = {});

class DynamicCallTree {
  public:
    struct Node {
        SymbolKey key;
        std::uint64_t weight = 0;
        std::vector<std::unique_ptr<Node>> children; // in order of first appearance

        const Node* child(const SymbolKey& k) const;
    };

    DynamicCallTree(std::int64_t tid) : tid_(tid) { root_.key.symbol = "[root]"; }

    /// `root_first` runs from the outermost caller to the leaf.
    void insert(const std::vector<SymbolKey>& root_first, std::uint64_t weight);

    std::int64_t tid() const { return tid_; }
    /// Synthetic root; its weight is the thread's total sample weight.
    const Node& root() const { return root_; }

  private:
    std::int64_t tid_;
    Node root_;
};

/// Throws AnalysisError(no_samples) if `tid` has no matching samples.
DynamicCallTree build_dynamic_call_tree(const std::vector<TraceEvent>& events, std::int64_t tid,
                                        const SampleFilter& filter = {});

} // namespace latprof
