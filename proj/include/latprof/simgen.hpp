#pragma once

#include "latprof/lock_analysis.hpp"
#include "latprof/sched_analysis.hpp"
#include "latprof/trace_model.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latprof::sim {

using namespace std::chrono_literals;

struct SimConfig {
    unsigned producers = 1;
    unsigned consumers = 1;
    unsigned queues = 1;
    unsigned capacity = 1;
    unsigned items_per_producer = 1;
    Duration produce_time = 1ms;
    Duration consume_time = 1ms;
    Duration critical_section_time = 100us;
    std::uint64_t seed = 0;
    /// Each duration is scaled by (1 + jitter * u), u uniform in [-1, 1].
    double jitter = 0.0;
    /// WAIT(mutex) before WAIT(empty)/WAIT(full). Can deadlock.
    bool inverted_wait_order = false;
    /// Simulated time after which the run stops.
    Duration time_limit = 3600s;
};

/// Throws ConfigError. Every queue must receive at least one producer and
/// one consumer under round-robin assignment, so queues <= min(producers,
/// consumers).
void validate(const SimConfig& cfg);

enum class SemKind : std::uint8_t { mutex = 0, empty = 1, full = 2 };

struct SemaphoreId {
    SemKind kind = SemKind::mutex;
    unsigned queue = 0;

    /// "mutex_0", "empty_3", ...
    std::string name() const;
    /// 3 * queue + kind; the id used in lock-acquisition streams.
    std::uint64_t lock_id() const { return 3ull * queue + static_cast<std::uint64_t>(kind); }
    static std::optional<SemaphoreId> parse(std::string_view name);

    friend auto operator<=>(const SemaphoreId&, const SemaphoreId&) = default;
};

struct GroundTruth {
    /// (tid, semaphore name) -> blocked time and number of blocks.
    std::map<std::pair<std::int64_t, std::string>, WaitTotal> blocked;
    std::vector<unsigned> max_occupancy; // per queue
    Timestamp completion;
    bool completed = false;
    bool deadlocked = false;
    bool timed_out = false;
    std::uint64_t produced = 0;
    std::uint64_t consumed = 0;
    std::size_t event_count = 0;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

std::string truth_to_json(const GroundTruth& truth);
/// Throws Error on malformed input.
GroundTruth truth_from_json(std::string_view text);

struct CriticalSection {
    std::int64_t tid = 0;
    unsigned queue = 0;
    Timestamp start;
    Timestamp end;
};

struct OccupancyChange {
    Timestamp at;
    unsigned queue = 0;
    int occupancy = 0;
};

struct ThreadInfo {
    std::int64_t tid = 0;
    std::string comm;
    bool producer = true;
    unsigned queue = 0;
    std::uint64_t quota = 0; // items to produce or consume
};

struct SimResult {
    std::vector<TraceEvent> events;
    GroundTruth truth;
    std::vector<LockAcquisition> acquisitions;
    std::vector<CriticalSection> critical_sections;
    std::vector<OccupancyChange> occupancy;
    std::vector<ThreadInfo> threads;
};

/// Discrete-event run of the bounded-buffer system on a virtual nanosecond
/// clock. Deterministic for a given config.
SimResult simulate(const SimConfig& cfg);

struct Discrepancy {
    enum class Kind { mismatch, truncation };
    Kind kind = Kind::mismatch;
    std::int64_t tid = 0;
    std::string semaphore;
    WaitTotal expected;
    WaitTotal actual;
};

struct ReplayReport {
    std::vector<Discrepancy> discrepancies;
    bool truncated = false;
    std::size_t intervals_checked = 0;

    bool clean() const { return discrepancies.empty(); }
    std::string to_text() const;
};

/// Re-derives per-thread, per-semaphore blocked time from the trace with the
/// off-CPU analyzer and diffs it against the ledger.
ReplayReport replay_check(const std::vector<TraceEvent>& events, const GroundTruth& truth,
                          const OffcpuOptions& options = {});

/// Wait-site frame symbol for a semaphore ("wait_empty_0").
std::string wait_site_symbol(const SemaphoreId& sem);

} // namespace latprof::sim
