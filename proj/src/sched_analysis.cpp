#include "latprof/sched_analysis.hpp"

#include <algorithm>

namespace latprof {

std::string_view to_string(ThreadState s) {
    switch (s) {
    case ThreadState::Running: return "Running";
    case ThreadState::Runnable: return "Runnable";
    case ThreadState::Sleeping: return "Sleeping";
    case ThreadState::Unknown: return "Unknown";
    }
    return "Unknown";
}

std::vector<TraceEvent> sorted_by_time(std::vector<TraceEvent> events) {
    auto by_ts = [](const TraceEvent& a, const TraceEvent& b) { return a.ts < b.ts; };
    if (!std::is_sorted(events.begin(), events.end(), by_ts)) std::stable_sort(events.begin(), events.end(), by_ts);
    return events;
}

namespace {

enum class PrevState { runnable, sleeping, unrecognized };

PrevState classify_prev_state(std::string_view s) {
    static constexpr std::string_view kKnown = "RSDTtXZI";
    bool any = false;
    bool runnable = false;
    for (char c : s) {
        if (c == '+' || c == '|') continue;
        if (kKnown.find(c) == std::string_view::npos) return PrevState::unrecognized;
        any = true;
        runnable = runnable || c == 'R';
    }
    if (!any) return PrevState::unrecognized;
    return runnable ? PrevState::runnable : PrevState::sleeping;
}

struct OpenInterval {
    TimelineInterval interval;
    bool open = false;
};

class TimelineBuilder {
  public:
    explicit TimelineBuilder(Timestamp origin) : origin_(origin) {}

    void on_event(const TraceEvent& e) {
        if (e.tid > 0) {
            touch(e.tid, e.comm);
            track_syscall(e);
        }
        if (e.event_class != EventClass::sched) return;
        const auto name = e.name();
        if (name == "sched_switch") {
            auto prev = e.args.get_int("prev_pid");
            auto next = e.args.get_int("next_pid");
            if (prev && next && *prev == *next) return;
            if (prev && *prev > 0) switch_out(*prev, e);
            if (next && *next > 0) switch_in(*next, e);
        } else if (name == "sched_wakeup" || name == "sched_wakeup_new") {
            auto pid = e.args.get_int("pid");
            if (pid && *pid > 0) wakeup(*pid, e);
        }
    }

    TimelineSet finish(Timestamp end) {
        TimelineSet out;
        out.origin = origin_;
        out.end = end;
        out.anomalies = anomalies_;
        for (auto& [tid, st] : threads_) {
            if (st.current.open) {
                st.current.interval.end = end;
                st.current.interval.truncated = true;
                st.timeline.intervals.push_back(std::move(st.current.interval));
            }
            out.threads.emplace(tid, std::move(st.timeline));
        }
        return out;
    }

  private:
    struct ThreadState_ {
        ThreadTimeline timeline;
        OpenInterval current;
        std::optional<std::string> pending_syscall;
    };

    ThreadState_& touch(std::int64_t tid, std::string_view comm = {}) {
        auto [it, inserted] = threads_.try_emplace(tid);
        auto& st = it->second;
        if (inserted) {
            st.timeline.tid = tid;
            st.current.open = true;
            st.current.interval.start = origin_;
            st.current.interval.state = ThreadState::Unknown;
        }
        if (!comm.empty()) st.timeline.comm = std::string(comm);
        return st;
    }

    void track_syscall(const TraceEvent& e) {
        if (e.event_class != EventClass::syscalls) return;
        auto& st = threads_.at(e.tid);
        auto name = e.name();
        if (name.starts_with("sys_enter_")) {
            st.pending_syscall = std::string(name.substr(10));
        } else if (name.starts_with("sys_exit_")) {
            if (st.pending_syscall && *st.pending_syscall == name.substr(9)) st.pending_syscall.reset();
        }
    }

    static ThreadState state_of(const ThreadState_& st) { return st.current.interval.state; }

    void transition(ThreadState_& st, Timestamp at, ThreadState next, const TraceEvent* opener = nullptr,
                    std::string prev_state = {}) {
        st.current.interval.end = at;
        st.timeline.intervals.push_back(std::move(st.current.interval));
        TimelineInterval fresh;
        fresh.start = at;
        fresh.state = next;
        if (opener) fresh.stack = opener->stack;
        fresh.prev_state = std::move(prev_state);
        fresh.pending_syscall = st.pending_syscall;
        st.current.interval = std::move(fresh);
        st.current.open = true;
    }

    void switch_out(std::int64_t tid, const TraceEvent& e) {
        auto comm = e.args.get("prev_comm");
        auto& st = touch(tid, comm.value_or(""));
        auto s = state_of(st);
        if (s != ThreadState::Running && s != ThreadState::Unknown) {
            ++anomalies_.switch_out_not_running;
            return;
        }
        std::string prev_state(e.args.get("prev_state").value_or(""));
        auto cls = classify_prev_state(prev_state);
        if (cls == PrevState::unrecognized) ++anomalies_.unknown_prev_state;
        auto next = cls == PrevState::runnable ? ThreadState::Runnable : ThreadState::Sleeping;
        // only the switch's own task owns the recorded stack
        transition(st, e.ts, next, e.tid == tid ? &e : nullptr, std::move(prev_state));
    }

    void switch_in(std::int64_t tid, const TraceEvent& e) {
        auto comm = e.args.get("next_comm");
        auto& st = touch(tid, comm.value_or(""));
        switch (state_of(st)) {
        case ThreadState::Running: ++anomalies_.switch_in_running; return;
        case ThreadState::Sleeping: ++anomalies_.implied_wakeup; break;
        default: break;
        }
        transition(st, e.ts, ThreadState::Running);
    }

    void wakeup(std::int64_t tid, const TraceEvent& e) {
        auto comm = e.args.get("comm");
        auto& st = touch(tid, comm.value_or(""));
        auto s = state_of(st);
        if (s != ThreadState::Sleeping && s != ThreadState::Unknown) {
            ++anomalies_.wakeup_not_sleeping;
            return;
        }
        transition(st, e.ts, ThreadState::Runnable);
    }

    Timestamp origin_;
    std::map<std::int64_t, ThreadState_> threads_;
    AnomalyTally anomalies_;
};

bool is_network_class(EventClass c) {
    return c == EventClass::net || c == EventClass::sock || c == EventClass::skb;
}

bool any_in_window(const std::vector<Timestamp>& sorted, Timestamp start, Duration lookback) {
    Timestamp lo = Timestamp::from_ns(start.ns() - lookback.count());
    auto it = std::lower_bound(sorted.begin(), sorted.end(), lo);
    return it != sorted.end() && *it <= start;
}

bool in_set(const std::optional<std::string>& s, std::initializer_list<std::string_view> set) {
    if (!s) return false;
    return std::find(set.begin(), set.end(), std::string_view(*s)) != set.end();
}

} // namespace

TimelineSet build_timelines(const std::vector<TraceEvent>& events) {
    auto sorted = sorted_by_time(events);
    if (sorted.empty()) return {};
    TimelineBuilder builder(sorted.front().ts);
    for (const auto& e : sorted) builder.on_event(e);
    return builder.finish(sorted.back().ts);
}

WaitReason classify_wait(const WaitContext& ctx, const OffcpuOptions& options) {
    const bool lock_frame = std::any_of(ctx.stack.begin(), ctx.stack.end(), [&](const Frame& f) {
        return f.symbol && options.lock_symbols.count(*f.symbol) > 0;
    });
    if (in_set(ctx.pending_syscall, {"futex"}) || lock_frame) return WaitReason::Lock;
    if (ctx.prev_state.find('D') != std::string::npos ||
        in_set(ctx.pending_syscall, {"read", "write", "fsync", "fdatasync"}) || ctx.recent_block_io) {
        return WaitReason::BlockIO;
    }
    if (in_set(ctx.pending_syscall,
               {"poll", "select", "epoll_wait", "recvfrom", "recvmsg", "accept", "connect"}) ||
        ctx.recent_network) {
        return WaitReason::Network;
    }
    if (in_set(ctx.pending_syscall, {"nanosleep", "clock_nanosleep"})) return WaitReason::Timer;
    return WaitReason::Unknown;
}

std::vector<WaitInterval> attribute_offcpu(const TimelineSet& timelines, const std::vector<TraceEvent>& events,
                                           const OffcpuOptions& options) {
    std::map<std::int64_t, std::vector<Timestamp>> block_ts, net_ts;
    for (const auto& e : events) {
        if (e.event_class == EventClass::block) block_ts[e.tid].push_back(e.ts);
        if (is_network_class(e.event_class)) net_ts[e.tid].push_back(e.ts);
    }
    for (auto* m : {&block_ts, &net_ts}) {
        for (auto& [tid, v] : *m) std::sort(v.begin(), v.end());
    }
    auto recent = [&](const std::map<std::int64_t, std::vector<Timestamp>>& m, std::int64_t tid, Timestamp at) {
        auto it = m.find(tid);
        return it != m.end() && any_in_window(it->second, at, options.lookback);
    };

    std::vector<WaitInterval> out;
    for (const auto& [tid, tl] : timelines.threads) {
        for (const auto& iv : tl.intervals) {
            if (iv.state != ThreadState::Sleeping && iv.state != ThreadState::Runnable) continue;
            WaitInterval w;
            w.tid = tid;
            w.start = iv.start;
            w.end = iv.end;
            w.stack = iv.stack;
            w.truncated = iv.truncated;
            if (iv.state == ThreadState::Runnable) {
                w.kind = WaitKind::Runnable;
                w.reason = WaitReason::SchedulerDelay;
            } else {
                w.kind = WaitKind::Blocked;
                WaitContext ctx{iv.prev_state, iv.stack, iv.pending_syscall, recent(block_ts, tid, iv.start),
                                recent(net_ts, tid, iv.start)};
                w.reason = classify_wait(ctx, options);
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

int duration_bucket(Duration d) {
    std::int64_t ns = d.count();
    if (ns < 1000) return -1;
    int k = 0;
    std::int64_t bound = 2000;
    while (ns >= bound) {
        ++k;
        bound *= 2;
    }
    return k;
}

std::string stack_signature(const Stack& stack) {
    if (stack.empty()) return "[no stack]";
    std::string sig;
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        if (!sig.empty()) sig.push_back(';');
        sig += it->symbol_or_unknown();
    }
    return sig;
}

WaitSummary& WaitSummary::merge(const WaitSummary& other) {
    for (const auto& [k, v] : other.by_thread_reason) by_thread_reason[k] += v;
    for (const auto& [k, v] : other.by_stack) by_stack[k] += v;
    for (const auto& [k, v] : other.histogram) histogram[k] += v;
    return *this;
}

std::map<WaitReason, WaitTotal> WaitSummary::by_reason() const {
    std::map<WaitReason, WaitTotal> out;
    for (const auto& [k, v] : by_thread_reason) out[k.second] += v;
    return out;
}

std::map<std::int64_t, WaitTotal> WaitSummary::by_thread() const {
    std::map<std::int64_t, WaitTotal> out;
    for (const auto& [k, v] : by_thread_reason) out[k.first] += v;
    return out;
}

Duration WaitSummary::total() const {
    Duration t{0};
    for (const auto& [k, v] : by_thread_reason) t += v.total;
    return t;
}

WaitSummary summarize_waits(const std::vector<WaitInterval>& intervals) {
    WaitSummary s;
    for (const auto& w : intervals) {
        WaitTotal one{duration(w), 1};
        s.by_thread_reason[{w.tid, w.reason}] += one;
        s.by_stack[stack_signature(w.stack)] += one;
        ++s.histogram[duration_bucket(duration(w))];
    }
    return s;
}

} // namespace latprof
