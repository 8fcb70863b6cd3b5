#include "latprof/lock_analysis.hpp"

#include "latprof/graph_core.hpp"
#include "parsers/sink.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace latprof {

namespace {

// Acquisition indices sorted by (grant, stream position).
std::vector<std::size_t> grant_order(const std::vector<LockAcquisition>& acqs) {
    std::vector<std::size_t> idx(acqs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return acqs[a].grant_ts < acqs[b].grant_ts; });
    return idx;
}

Decimal ns_to_ms(std::int64_t ns) { return Decimal::from_units(ns * 1000); }

} // namespace

std::vector<MutexStats> contention_stats(const std::vector<LockAcquisition>& acquisitions, StatBasis basis) {
    struct Acc {
        MutexStats stats;
        std::optional<std::int64_t> last_tid;
        std::int64_t total_ns = 0;
        std::int64_t max_ns = 0;
    };
    std::map<std::uint64_t, Acc> per_lock;
    for (auto i : grant_order(acquisitions)) {
        const auto& a = acquisitions[i];
        auto& acc = per_lock[a.lock_id];
        acc.stats.mutex_id = a.lock_id;
        ++acc.stats.locked;
        if (a.grant_ts > a.request_ts) ++acc.stats.contended;
        if (acc.last_tid && *acc.last_tid != a.tid) ++acc.stats.changed;
        acc.last_tid = a.tid;
        const std::int64_t span =
            basis == StatBasis::wait ? (a.grant_ts - a.request_ts).count() : (a.release_ts - a.grant_ts).count();
        acc.total_ns += span;
        acc.max_ns = std::max(acc.max_ns, span);
    }
    std::vector<MutexStats> out;
    for (auto& [id, acc] : per_lock) {
        acc.stats.total_ms = ns_to_ms(acc.total_ns);
        acc.stats.max_ms = ns_to_ms(acc.max_ns);
        acc.stats.avg_ms = acc.stats.total_ms.divided_by(static_cast<std::int64_t>(acc.stats.locked));
        out.push_back(std::move(acc.stats));
    }
    return out;
}

LockOrderGraph build_lock_order_graph(const std::vector<LockAcquisition>& acquisitions) {
    LockOrderGraph g;
    std::map<std::int64_t, std::vector<std::size_t>> by_tid;
    for (auto i : grant_order(acquisitions)) by_tid[acquisitions[i].tid].push_back(i);
    std::set<std::uint64_t> nodes;
    for (const auto& a : acquisitions) nodes.insert(a.lock_id);
    for (const auto& [tid, order] : by_tid) {
        std::vector<std::size_t> held;
        for (auto i : order) {
            const auto& b = acquisitions[i];
            std::erase_if(held, [&](std::size_t h) { return acquisitions[h].release_ts <= b.grant_ts; });
            for (auto h : held) {
                const auto a = acquisitions[h].lock_id;
                if (a == b.lock_id) ++g.reentrant[a];
                else ++g.edges[{a, b.lock_id}];
            }
            held.push_back(i);
        }
    }
    g.nodes.assign(nodes.begin(), nodes.end());
    return g;
}

std::vector<std::vector<std::uint64_t>> detect_deadlock_risk(const LockOrderGraph& graph, std::size_t max_len) {
    std::set<std::uint64_t> ids(graph.nodes.begin(), graph.nodes.end());
    for (const auto& [e, n] : graph.edges) {
        ids.insert(e.first);
        ids.insert(e.second);
    }
    std::vector<std::uint64_t> names(ids.begin(), ids.end());
    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = i;
    std::vector<std::vector<std::size_t>> adjacency(names.size());
    for (const auto& [e, n] : graph.edges) adjacency[index[e.first]].push_back(index[e.second]);
    for (auto& a : adjacency) std::sort(a.begin(), a.end());
    std::vector<std::vector<std::uint64_t>> out;
    for (const auto& c : elementary_cycles(adjacency, max_len)) {
        std::vector<std::uint64_t> ids_cycle;
        for (auto i : c) ids_cycle.push_back(names[i]);
        out.push_back(std::move(ids_cycle));
    }
    return out;
}

ParseOutcome<LockAcquisition> parse_acquisitions_csv(std::string_view text, ParseMode mode) {
    detail::Sink<LockAcquisition> sink(mode);
    detail::LineReader reader(text);
    std::string_view line;
    while (reader.next(line)) {
        auto t = detail::trim(line);
        if (t.empty() || t.starts_with("tid")) continue;
        std::vector<std::string_view> cells;
        std::size_t pos = 0;
        while (true) {
            auto comma = t.find(',', pos);
            cells.push_back(detail::trim(t.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (cells.size() != 5) {
            sink.fail(ParseErrorKind::malformed_row, reader.line_number(), "expected 5 comma-separated columns");
            continue;
        }
        auto tid = detail::parse_int(cells[0]);
        auto lock = detail::parse_uint(cells[1]);
        auto req = Timestamp::parse(cells[2]);
        auto grant = Timestamp::parse(cells[3]);
        auto rel = Timestamp::parse(cells[4]);
        if (!tid || !lock || !req || !grant || !rel) {
            sink.fail(ParseErrorKind::malformed_row, reader.line_number(), "non-numeric column");
            continue;
        }
        if (!(*req <= *grant && *grant <= *rel)) {
            sink.fail(ParseErrorKind::malformed_row, reader.line_number(), "expected request <= grant <= release");
            continue;
        }
        sink.add(LockAcquisition{*tid, *lock, *req, *grant, *rel});
    }
    return sink.finish();
}

std::string write_acquisitions_csv(const std::vector<LockAcquisition>& acquisitions) {
    std::string out = "tid,lock_id,request_ts,grant_ts,release_ts\n";
    for (const auto& a : acquisitions) {
        out += std::to_string(a.tid) + ',' + std::to_string(a.lock_id) + ',' + a.request_ts.format() + ',' +
               a.grant_ts.format() + ',' + a.release_ts.format() + '\n';
    }
    return out;
}

} // namespace latprof
