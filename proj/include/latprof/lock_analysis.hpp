#pragma once

#include "latprof/parsers.hpp"
#include "latprof/trace_model.hpp"

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace latprof {

struct LockAcquisition {
    std::int64_t tid = 0;
    std::uint64_t lock_id = 0;
    Timestamp request_ts;
    Timestamp grant_ts;
    Timestamp release_ts;

    friend bool operator==(const LockAcquisition&, const LockAcquisition&) = default;
};

/// Which span the time columns measure. `wait` (grant - request) is the
/// default; `hold` (release - grant) matches mutrace's own tot/avg/max
/// columns, which report how long the mutex was held.
enum class StatBasis { wait, hold };

/// One row per lock id, ascending. Grants are ordered by grant time (input
/// order on ties) when counting owner changes.
std::vector<MutexStats> contention_stats(const std::vector<LockAcquisition>& acquisitions,
                                         StatBasis basis = StatBasis::wait);

struct LockOrderGraph {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> edges; // (held, acquired) -> count
    std::map<std::uint64_t, std::uint64_t> reentrant;                      // lock -> self-acquisitions
    std::vector<std::uint64_t> nodes;                                       // ascending

    friend bool operator==(const LockOrderGraph&, const LockOrderGraph&) = default;
};

/// Edge A->B for each grant of B to a thread that holds A at that moment:
/// A granted earlier (or at the same instant but earlier in the stream) and
/// released strictly after B's grant.
LockOrderGraph build_lock_order_graph(const std::vector<LockAcquisition>& acquisitions);

/// Elementary cycles up to `max_len` locks, smallest id first, each once.
std::vector<std::vector<std::uint64_t>> detect_deadlock_risk(const LockOrderGraph& graph, std::size_t max_len = 8);

/// `tid,lock_id,request_ts,grant_ts,release_ts` with times in seconds; an
/// optional header line starting with "tid" is skipped.
ParseOutcome<LockAcquisition> parse_acquisitions_csv(std::string_view text, ParseMode mode = ParseMode::lenient);
std::string write_acquisitions_csv(const std::vector<LockAcquisition>& acquisitions);

} // namespace latprof
