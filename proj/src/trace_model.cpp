#include "latprof/trace_model.hpp"

#include "latprof/decimal.hpp"

#include <algorithm>
#include <charconv>

namespace latprof {

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    auto d = Decimal::parse(text);
    if (!d || d->units() < 0 || text.front() == '-' || text.front() == '+') return std::nullopt;
    return from_ns(d->units());
}

std::string Timestamp::format(int frac_digits) const {
    return Decimal::from_units(ns_).format(frac_digits, Decimal::Rounding::truncate);
}

std::string format_seconds(Duration d) { return Decimal::from_units(d.count()).format(9); }

std::string Frame::symbol_or_unknown() const { return symbol ? *symbol : std::string("[unknown]"); }

std::string_view to_string(EventClass c) {
    switch (c) {
    case EventClass::sched: return "sched";
    case EventClass::syscalls: return "syscalls";
    case EventClass::block: return "block";
    case EventClass::ext4: return "ext4";
    case EventClass::net: return "net";
    case EventClass::sock: return "sock";
    case EventClass::skb: return "skb";
    case EventClass::scsi: return "scsi";
    case EventClass::cpu_clock: return "cpu-clock";
    case EventClass::other: return "other";
    }
    return "other";
}

EventClass classify_event(std::string_view event_name) {
    auto colon = event_name.find(':');
    std::string_view prefix = colon == std::string_view::npos ? event_name : event_name.substr(0, colon);
    static constexpr std::pair<std::string_view, EventClass> kTable[] = {
        {"sched", EventClass::sched}, {"syscalls", EventClass::syscalls}, {"raw_syscalls", EventClass::syscalls},
        {"block", EventClass::block}, {"ext4", EventClass::ext4},         {"net", EventClass::net},
        {"sock", EventClass::sock},   {"skb", EventClass::skb},           {"scsi", EventClass::scsi},
    };
    if (colon == std::string_view::npos) {
        return (event_name == "cpu-clock" || event_name == "cpu-clock:u" || event_name == "cpu-clock:k")
                   ? EventClass::cpu_clock
                   : EventClass::other;
    }
    if (prefix == "cpu-clock") return EventClass::cpu_clock;
    for (const auto& [name, cls] : kTable) {
        if (prefix == name) return cls;
    }
    return EventClass::other;
}

void EventArgs::set(std::string key, std::string value) {
    for (auto& e : entries_) {
        if (e.first == key) {
            e.second = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string_view> EventArgs::get(std::string_view key) const {
    for (const auto& e : entries_) {
        if (e.first == key) return std::string_view(e.second);
    }
    return std::nullopt;
}

std::optional<std::int64_t> EventArgs::get_int(std::string_view key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size()) return std::nullopt;
    return out;
}

std::string_view TraceEvent::name() const {
    std::string_view e = event;
    auto colon = e.find(':');
    return colon == std::string_view::npos ? e : e.substr(colon + 1);
}

TraceEvent make_event(std::string comm, std::int64_t pid, std::int64_t tid, std::int32_t cpu, Timestamp ts,
                      std::string event) {
    TraceEvent e;
    e.comm = std::move(comm);
    e.pid = pid;
    e.tid = tid;
    e.cpu = cpu;
    e.ts = ts;
    e.event_class = classify_event(event);
    e.event = std::move(event);
    return e;
}

std::string_view to_string(WaitReason r) {
    switch (r) {
    case WaitReason::SchedulerDelay: return "SchedulerDelay";
    case WaitReason::BlockIO: return "BlockIO";
    case WaitReason::Lock: return "Lock";
    case WaitReason::Network: return "Network";
    case WaitReason::Timer: return "Timer";
    case WaitReason::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::optional<WaitReason> parse_wait_reason(std::string_view text) {
    for (auto r : kAllWaitReasons) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

std::string_view to_string(WaitKind k) { return k == WaitKind::Blocked ? "Blocked" : "Runnable"; }

Timestamp trace_origin(const std::vector<TraceEvent>& events) {
    if (events.empty()) return {};
    return std::min_element(events.begin(), events.end(),
                            [](const TraceEvent& a, const TraceEvent& b) { return a.ts < b.ts; })
        ->ts;
}

} // namespace latprof
