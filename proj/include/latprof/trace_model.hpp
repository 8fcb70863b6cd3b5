#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latprof {

using Duration = std::chrono::nanoseconds;

/// Point on the trace clock, integer nanoseconds. Never negative.
class Timestamp {
  public:
    constexpr Timestamp() = default;
    static constexpr Timestamp from_ns(std::int64_t ns) {
        Timestamp t;
        t.ns_ = ns < 0 ? 0 : ns;
        return t;
    }

    /// Parses "sec[.frac]" with up to nine fractional digits, exactly.
    static std::optional<Timestamp> parse(std::string_view text);

    constexpr std::int64_t ns() const { return ns_; }
    double seconds() const { return static_cast<double>(ns_) / 1e9; }

    /// "sec.fff" with `frac_digits` digits; extra precision is truncated.
    std::string format(int frac_digits = 9) const;

    friend constexpr Duration operator-(Timestamp a, Timestamp b) { return Duration(a.ns_ - b.ns_); }
    friend constexpr Timestamp operator+(Timestamp a, Duration d) { return from_ns(a.ns_ + d.count()); }
    friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
    friend constexpr bool operator==(Timestamp, Timestamp) = default;

  private:
    std::int64_t ns_ = 0;
};

/// Seconds with nine fractional digits ("1.500000000"), for durations.
std::string format_seconds(Duration d);

struct Frame {
    std::uint64_t address = 0;
    std::optional<std::string> symbol;
    std::optional<std::uint64_t> offset;
    std::optional<std::string> dso;

    /// Symbol name, or "[unknown]" when unresolved.
    std::string symbol_or_unknown() const;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// Leaf first, outermost caller last (perf script print order).
using Stack = std::vector<Frame>;

enum class EventClass { sched, syscalls, block, ext4, net, sock, skb, scsi, cpu_clock, other };

std::string_view to_string(EventClass c);

/// Maps a qualified event name ("class:name") or a bare sample event name to
/// its class. Total: unknown prefixes map to EventClass::other.
EventClass classify_event(std::string_view event_name);

/// Ordered key/value payload of a tracepoint.
class EventArgs {
  public:
    using Entry = std::pair<std::string, std::string>;

    void set(std::string key, std::string value);
    std::optional<std::string_view> get(std::string_view key) const;
    std::optional<std::int64_t> get_int(std::string_view key) const;
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    friend bool operator==(const EventArgs&, const EventArgs&) = default;

  private:
    std::vector<Entry> entries_;
};

struct TraceEvent {
    std::string comm;
    std::int64_t pid = 0;
    std::int64_t tid = 0;
    std::int32_t cpu = 0;
    Timestamp ts;
    /// Qualified as printed: "sched:sched_switch", "cpu-clock".
    std::string event;
    EventClass event_class = EventClass::other;
    EventArgs args;
    std::uint64_t period = 1;
    Stack stack;

    /// Event name without its class prefix ("sched_switch").
    std::string_view name() const;
    const Frame* leaf() const { return stack.empty() ? nullptr : &stack.front(); }

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Builds an event with event_class derived from `event`.
TraceEvent make_event(std::string comm, std::int64_t pid, std::int64_t tid, std::int32_t cpu, Timestamp ts,
                      std::string event);

enum class WaitReason { SchedulerDelay, BlockIO, Lock, Network, Timer, Unknown };
inline constexpr WaitReason kAllWaitReasons[] = {WaitReason::SchedulerDelay, WaitReason::BlockIO, WaitReason::Lock,
                                                 WaitReason::Network,        WaitReason::Timer,   WaitReason::Unknown};

std::string_view to_string(WaitReason r);
std::optional<WaitReason> parse_wait_reason(std::string_view text);

enum class WaitKind { Blocked, Runnable };

std::string_view to_string(WaitKind k);

struct WaitInterval {
    std::int64_t tid = 0;
    Timestamp start;
    Timestamp end;
    WaitKind kind = WaitKind::Blocked;
    WaitReason reason = WaitReason::Unknown;
    Stack stack;
    /// Still open when the trace ended; closed at the last event timestamp.
    bool truncated = false;
};

inline Duration duration(const WaitInterval& w) { return w.end - w.start; }

/// Earliest timestamp in `events`; the zero point for relative times.
Timestamp trace_origin(const std::vector<TraceEvent>& events);

} // namespace latprof
