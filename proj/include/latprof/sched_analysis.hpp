#pragma once

#include "latprof/trace_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace latprof {

enum class ThreadState { Running, Runnable, Sleeping, Unknown };

std::string_view to_string(ThreadState s);

struct TimelineInterval {
    Timestamp start;
    Timestamp end;
    ThreadState state = ThreadState::Unknown;
    /// Stack of the sched_switch that opened the interval, if any.
    Stack stack;
    /// prev_state of the opening switch ("S", "D", "R+"); empty otherwise.
    std::string prev_state;
    /// Last sys_enter without a matching sys_exit when the interval opened.
    std::optional<std::string> pending_syscall;
    bool truncated = false;

    Duration length() const { return end - start; }
};

struct ThreadTimeline {
    std::int64_t tid = 0;
    std::string comm;
    /// Sorted, non-overlapping and abutting; spans [origin, trace end].
    std::vector<TimelineInterval> intervals;
};

/// Events that contradicted the per-thread state machine.
struct AnomalyTally {
    std::uint64_t wakeup_not_sleeping = 0;   // ignored
    std::uint64_t switch_out_not_running = 0; // ignored
    std::uint64_t switch_in_running = 0;      // ignored
    std::uint64_t implied_wakeup = 0;         // switch-in of a sleeping thread, applied
    std::uint64_t unknown_prev_state = 0;     // treated as sleeping

    std::uint64_t total() const {
        return wakeup_not_sleeping + switch_out_not_running + switch_in_running + implied_wakeup + unknown_prev_state;
    }
};

struct TimelineSet {
    std::map<std::int64_t, ThreadTimeline> threads;
    Timestamp origin;
    Timestamp end;
    AnomalyTally anomalies;
};

/// Stable sort by timestamp only; events sharing a timestamp keep input order,
/// which for recorded traces is the causal order.
std::vector<TraceEvent> sorted_by_time(std::vector<TraceEvent> events);

/// Replays sched_switch / sched_wakeup events through a per-thread state
/// machine. Thread id 0 (the idle task) is never tracked.
TimelineSet build_timelines(const std::vector<TraceEvent>& events);

struct OffcpuOptions {
    std::set<std::string> lock_symbols = default_lock_symbols();
    /// How far before a wait a block or network event may lie and still
    /// explain it.
    Duration lookback = std::chrono::milliseconds(1);

    static std::set<std::string> default_lock_symbols() {
        return {"futex_wait", "futex_wait_queue_me", "pthread_mutex_lock", "pthread_cond_wait", "pthread_join",
                "sem_wait"};
    }
};

struct WaitContext {
    std::string prev_state;
    Stack stack;
    std::optional<std::string> pending_syscall;
    bool recent_block_io = false;
    bool recent_network = false;
};

/// First matching rule wins: lock, block I/O, network, timer, unknown.
WaitReason classify_wait(const WaitContext& ctx, const OffcpuOptions& options = {});

/// One WaitInterval per Sleeping or Runnable interval, in (tid, start) order.
std::vector<WaitInterval> attribute_offcpu(const TimelineSet& timelines, const std::vector<TraceEvent>& events,
                                           const OffcpuOptions& options = {});

struct WaitTotal {
    Duration total{0};
    std::uint64_t count = 0;

    WaitTotal& operator+=(const WaitTotal& o) {
        total += o.total;
        count += o.count;
        return *this;
    }
    friend bool operator==(const WaitTotal&, const WaitTotal&) = default;
};

/// Histogram bucket for a wait: k covers [2^k, 2^(k+1)) microseconds; -1
/// collects everything below one microsecond.
int duration_bucket(Duration d);

/// Root-first symbol names joined by ';', or "[no stack]".
std::string stack_signature(const Stack& stack);

struct WaitSummary {
    std::map<std::pair<std::int64_t, WaitReason>, WaitTotal> by_thread_reason;
    std::map<std::string, WaitTotal> by_stack;
    std::map<int, std::uint64_t> histogram;

    /// Associative and commutative.
    WaitSummary& merge(const WaitSummary& other);

    std::map<WaitReason, WaitTotal> by_reason() const;
    std::map<std::int64_t, WaitTotal> by_thread() const;
    Duration total() const;
    bool empty() const { return by_thread_reason.empty(); }

    friend bool operator==(const WaitSummary&, const WaitSummary&) = default;
};

WaitSummary summarize_waits(const std::vector<WaitInterval>& intervals);

} // namespace latprof
