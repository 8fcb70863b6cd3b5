#include "latprof/simgen.hpp"

#include "latprof/error.hpp"
#include "latprof/parsers.hpp"

#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>
#include <set>
#include <tuple>

#include "json.hpp"

namespace latprof::sim {

namespace {

constexpr std::int64_t kPid = 1000;
constexpr std::uint64_t kTextBase = 0x401000;

std::string_view kind_name(SemKind k) {
    switch (k) {
    case SemKind::mutex: return "mutex";
    case SemKind::empty: return "empty";
    case SemKind::full: return "full";
    }
    return "mutex";
}

Frame sim_frame(std::string symbol, std::uint64_t slot) {
    Frame f;
    f.address = kTextBase + slot * 0x40;
    f.symbol = std::move(symbol);
    f.dso = "simgen";
    return f;
}

class Jitter {
  public:
    Jitter(std::uint64_t seed, double amount) : rng_(seed), amount_(amount) {}

    // Scales by (1 + amount * u), u = 2 * (53 high bits of mt19937_64 / 2^53) - 1.
    Duration apply(Duration d) {
        if (amount_ == 0.0) return d;
        const double unit = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double u = 2.0 * unit - 1.0;
        auto ns = static_cast<std::int64_t>(std::llround(static_cast<double>(d.count()) * (1.0 + amount_ * u)));
        return Duration(std::max<std::int64_t>(ns, 1));
    }

  private:
    std::mt19937_64 rng_;
    double amount_;
};

struct Semaphore {
    SemaphoreId id;
    int count = 0;
    std::deque<std::size_t> waiters; // thread indices, FIFO
    std::deque<std::size_t> holds;   // outstanding acquisition records, oldest first
};

// Program counter of a producer or consumer loop.
enum class Step { compute, first_wait, second_wait, critical, signal, done };

struct Thread {
    ThreadInfo info;
    int cpu = 0;
    Step step = Step::compute;
    std::uint64_t completed_items = 0;
    bool blocked = false;
    Timestamp block_start;
    std::size_t blocked_on = 0; // semaphore index
    std::optional<std::size_t> pending_acquisition;
    std::optional<std::size_t> mutex_acquisition;
    Timestamp cs_start;
};

class Simulator {
  public:
    explicit Simulator(const SimConfig& cfg) : cfg_(cfg), jitter_(cfg.seed, cfg.jitter) {
        for (unsigned q = 0; q < cfg.queues; ++q) {
            for (auto k : {SemKind::mutex, SemKind::empty, SemKind::full}) {
                Semaphore s;
                s.id = {k, q};
                s.count = k == SemKind::mutex ? 1 : (k == SemKind::empty ? static_cast<int>(cfg.capacity) : 0);
                sems_.push_back(std::move(s));
            }
        }
        occupancy_.assign(cfg.queues, 0);
        result_.truth.max_occupancy.assign(cfg.queues, 0);

        std::vector<std::uint64_t> queue_items(cfg.queues, 0), queue_consumers(cfg.queues, 0);
        for (unsigned i = 0; i < cfg.producers; ++i) queue_items[i % cfg.queues] += cfg.items_per_producer;
        for (unsigned j = 0; j < cfg.consumers; ++j) ++queue_consumers[j % cfg.queues];
        std::vector<std::uint64_t> assigned(cfg.queues, 0);
        for (unsigned i = 0; i < cfg.producers; ++i) {
            add_thread("prod-" + std::to_string(i), true, i % cfg.queues, cfg.items_per_producer);
        }
        for (unsigned j = 0; j < cfg.consumers; ++j) {
            unsigned q = j % cfg.queues;
            std::uint64_t quota = queue_items[q] / queue_consumers[q] + (assigned[q] < queue_items[q] % queue_consumers[q] ? 1 : 0);
            ++assigned[q];
            add_thread("cons-" + std::to_string(j), false, q, quota);
        }
    }

    SimResult run() {
        for (std::size_t t = 0; t < threads_.size(); ++t) schedule(t, Timestamp{});
        const Timestamp limit = Timestamp{} + cfg_.time_limit;
        while (!ready_.empty()) {
            auto [at, tid, seq, index] = ready_.top();
            if (at > limit) {
                result_.truth.timed_out = true;
                break;
            }
            ready_.pop();
            now_ = at;
            advance(index);
        }
        finish();
        return std::move(result_);
    }

  private:
    using Entry = std::tuple<Timestamp, std::int64_t, std::uint64_t, std::size_t>;

    void add_thread(std::string comm, bool producer, unsigned queue, std::uint64_t quota) {
        Thread t;
        t.info = {kPid + 1 + static_cast<std::int64_t>(threads_.size()), std::move(comm), producer, queue, quota};
        t.cpu = static_cast<int>(threads_.size());
        if (quota == 0) t.step = Step::done;
        result_.threads.push_back(t.info);
        threads_.push_back(std::move(t));
    }

    void schedule(std::size_t index, Timestamp at) {
        if (threads_[index].step == Step::done) return;
        ready_.emplace(at, threads_[index].info.tid, seq_++, index);
    }

    Semaphore& sem(SemKind k, unsigned q) { return sems_[3 * q + static_cast<unsigned>(k)]; }

    SemKind first_wait(const Thread& t) const {
        if (cfg_.inverted_wait_order) return SemKind::mutex;
        return t.info.producer ? SemKind::empty : SemKind::full;
    }
    SemKind second_wait(const Thread& t) const {
        if (!cfg_.inverted_wait_order) return SemKind::mutex;
        return t.info.producer ? SemKind::empty : SemKind::full;
    }

    // Runs the thread until it blocks, sleeps for a duration, or finishes.
    void advance(std::size_t index) {
        Thread& t = threads_[index];
        if (t.blocked) {
            // resumed after a hand-off: the wait it blocked in has completed
            t.blocked = false;
            emit_switch_in(t);
            t.step = t.step == Step::first_wait ? Step::second_wait : Step::critical;
            if (t.step == Step::critical) enter_critical(t);
        }
        while (true) {
            switch (t.step) {
            case Step::compute:
                t.step = Step::first_wait;
                schedule(index, now_ + jitter_.apply(t.info.producer ? cfg_.produce_time : cfg_.consume_time));
                return;
            case Step::first_wait:
                if (!wait(index, sem(first_wait(t), t.info.queue))) return;
                t.step = Step::second_wait;
                break;
            case Step::second_wait:
                if (!wait(index, sem(second_wait(t), t.info.queue))) return;
                t.step = Step::critical;
                enter_critical(t);
                break;
            case Step::critical:
                t.step = Step::signal;
                schedule(index, now_ + jitter_.apply(cfg_.critical_section_time));
                return;
            case Step::signal: leave_critical(index); break;
            case Step::done: return;
            }
        }
    }

    void enter_critical(Thread& t) {
        t.cs_start = now_;
        int& occ = occupancy_[t.info.queue];
        occ += t.info.producer ? 1 : -1;
        auto& mx = result_.truth.max_occupancy[t.info.queue];
        if (occ > static_cast<int>(mx)) mx = static_cast<unsigned>(occ);
        result_.occupancy.push_back({now_, t.info.queue, occ});
    }

    void leave_critical(std::size_t index) {
        Thread& t = threads_[index];
        const unsigned q = t.info.queue;
        result_.critical_sections.push_back({t.info.tid, q, t.cs_start, now_});
        signal(index, sem(SemKind::mutex, q));
        signal(index, sem(t.info.producer ? SemKind::full : SemKind::empty, q));
        if (t.info.producer) ++result_.truth.produced;
        else ++result_.truth.consumed;
        ++t.completed_items;
        t.step = t.completed_items == t.info.quota ? Step::done : Step::compute;
    }

    std::size_t open_acquisition(const Thread& t, const Semaphore& s) {
        result_.acquisitions.push_back({t.info.tid, s.id.lock_id(), now_, now_, now_});
        released_.push_back(false);
        return result_.acquisitions.size() - 1;
    }

    void release(std::size_t acq) {
        result_.acquisitions[acq].release_ts = now_;
        released_[acq] = true;
    }

    // Marks `acq` granted now and records where it will be released.
    void grant(std::size_t index, Semaphore& s, std::size_t acq) {
        Thread& t = threads_[index];
        result_.acquisitions[acq].grant_ts = now_;
        if (s.id.kind == SemKind::mutex) {
            t.mutex_acquisition = acq;
        } else {
            s.holds.push_back(acq);
        }
    }

    bool wait(std::size_t index, Semaphore& s) {
        Thread& t = threads_[index];
        const std::size_t acq = open_acquisition(t, s);
        if (s.count > 0) {
            --s.count;
            grant(index, s, acq);
            return true;
        }
        t.blocked = true;
        t.block_start = now_;
        t.blocked_on = static_cast<std::size_t>(&s - sems_.data());
        t.pending_acquisition = acq;
        s.waiters.push_back(index);
        emit_switch_out(t, s.id);
        return false;
    }

    void signal(std::size_t signaller, Semaphore& s) {
        Thread& w = threads_[signaller];
        if (s.id.kind == SemKind::mutex) {
            release(*w.mutex_acquisition);
            w.mutex_acquisition.reset();
        } else if (!s.holds.empty()) {
            // a returned slot or item releases the oldest outstanding token
            release(s.holds.front());
            s.holds.pop_front();
        }
        if (s.waiters.empty()) {
            ++s.count;
            return;
        }
        const std::size_t woken = s.waiters.front();
        s.waiters.pop_front();
        Thread& t = threads_[woken];
        record_block(t, s.id, now_);
        grant(woken, s, *t.pending_acquisition);
        t.pending_acquisition.reset();
        emit_wakeup(w, t);
        schedule(woken, now_);
    }

    void record_block(const Thread& t, const SemaphoreId& id, Timestamp end) {
        auto& slot = result_.truth.blocked[{t.info.tid, id.name()}];
        slot.total += end - t.block_start;
        slot.count += 1;
    }

    TraceEvent header(const Thread& t) const {
        return make_event(t.info.comm, kPid, t.info.tid, t.cpu, now_, "sched:sched_switch");
    }

    void emit_switch_out(const Thread& t, const SemaphoreId& id) {
        TraceEvent e = header(t);
        e.args.set("prev_comm", t.info.comm);
        e.args.set("prev_pid", std::to_string(t.info.tid));
        e.args.set("prev_prio", "120");
        e.args.set("prev_state", "S");
        e.args.set("next_comm", "swapper/" + std::to_string(t.cpu));
        e.args.set("next_pid", "0");
        e.args.set("next_prio", "120");
        e.stack = {sim_frame("sem_wait", 0), sim_frame(wait_site_symbol(id), 1 + static_cast<std::uint64_t>(id.lock_id())),
                   sim_frame(t.info.producer ? "producer_loop" : "consumer_loop", 0x100 + (t.info.producer ? 0 : 1)),
                   sim_frame("main", 0x200)};
        result_.events.push_back(std::move(e));
    }

    void emit_switch_in(const Thread& t) {
        TraceEvent e = make_event("swapper", 0, 0, t.cpu, now_, "sched:sched_switch");
        e.args.set("prev_comm", "swapper/" + std::to_string(t.cpu));
        e.args.set("prev_pid", "0");
        e.args.set("prev_prio", "120");
        e.args.set("prev_state", "R");
        e.args.set("next_comm", t.info.comm);
        e.args.set("next_pid", std::to_string(t.info.tid));
        e.args.set("next_prio", "120");
        result_.events.push_back(std::move(e));
    }

    void emit_wakeup(const Thread& waker, const Thread& t) {
        TraceEvent e = make_event(waker.info.comm, kPid, waker.info.tid, waker.cpu, now_, "sched:sched_wakeup");
        e.args.set("comm", t.info.comm);
        e.args.set("pid", std::to_string(t.info.tid));
        e.args.set("prio", "120");
        e.args.set("target_cpu", std::to_string(t.cpu));
        result_.events.push_back(std::move(e));
    }

    void finish() {
        auto& truth = result_.truth;
        const Timestamp last_event = result_.events.empty() ? Timestamp{} : result_.events.back().ts;
        bool all_done = true;
        for (auto& t : threads_) {
            if (t.step == Step::done) continue;
            all_done = false;
            if (t.blocked) record_block(t, sems_[t.blocked_on].id, last_event);
        }
        truth.completed = all_done;
        truth.deadlocked = !all_done && !truth.timed_out;
        truth.completion = now_;
        // granted holds still outstanding end with the run; requests that
        // were never granted are dropped
        std::vector<LockAcquisition> kept;
        std::vector<bool> pending(result_.acquisitions.size(), false);
        for (auto& t : threads_) {
            if (t.pending_acquisition) pending[*t.pending_acquisition] = true;
        }
        for (std::size_t i = 0; i < result_.acquisitions.size(); ++i) {
            if (pending[i]) continue;
            if (!released_[i]) result_.acquisitions[i].release_ts = now_;
            kept.push_back(result_.acquisitions[i]);
        }
        result_.acquisitions = std::move(kept);
        truth.event_count = result_.events.size();
    }

    const SimConfig& cfg_;
    Jitter jitter_;
    std::vector<Semaphore> sems_;
    std::vector<Thread> threads_;
    std::vector<int> occupancy_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready_;
    std::uint64_t seq_ = 0;
    Timestamp now_;
    SimResult result_;
    std::vector<bool> released_;
};

} // namespace

std::string SemaphoreId::name() const { return std::string(kind_name(kind)) + "_" + std::to_string(queue); }

std::optional<SemaphoreId> SemaphoreId::parse(std::string_view name) {
    auto us = name.rfind('_');
    if (us == std::string_view::npos) return std::nullopt;
    auto kind = name.substr(0, us);
    auto q = detail::parse_uint(name.substr(us + 1));
    if (!q) return std::nullopt;
    for (auto k : {SemKind::mutex, SemKind::empty, SemKind::full}) {
        if (kind_name(k) == kind) return SemaphoreId{k, static_cast<unsigned>(*q)};
    }
    return std::nullopt;
}

std::string wait_site_symbol(const SemaphoreId& sem) { return "wait_" + sem.name(); }

void validate(const SimConfig& cfg) {
    if (cfg.producers < 1) throw ConfigError("producers must be >= 1");
    if (cfg.consumers < 1) throw ConfigError("consumers must be >= 1");
    if (cfg.queues < 1) throw ConfigError("queues must be >= 1");
    if (cfg.capacity < 1) throw ConfigError("capacity must be >= 1");
    if (cfg.items_per_producer < 1) throw ConfigError("items per producer must be >= 1");
    if (cfg.queues > std::min(cfg.producers, cfg.consumers)) {
        throw ConfigError("queues must not exceed min(producers, consumers)");
    }
    if (cfg.produce_time.count() <= 0 || cfg.consume_time.count() <= 0 || cfg.critical_section_time.count() <= 0) {
        throw ConfigError("durations must be positive");
    }
    if (!(cfg.jitter >= 0.0 && cfg.jitter <= 1.0)) throw ConfigError("jitter must be within [0, 1]");
    if (cfg.time_limit.count() <= 0) throw ConfigError("time limit must be positive");
}

SimResult simulate(const SimConfig& cfg) {
    validate(cfg);
    return Simulator(cfg).run();
}

std::string truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json j;
    j["completed"] = truth.completed;
    j["deadlocked"] = truth.deadlocked;
    j["timed_out"] = truth.timed_out;
    j["completion_ns"] = truth.completion.ns();
    j["produced"] = truth.produced;
    j["consumed"] = truth.consumed;
    j["event_count"] = truth.event_count;
    j["max_occupancy"] = truth.max_occupancy;
    auto blocked = nlohmann::ordered_json::array();
    for (const auto& [key, total] : truth.blocked) {
        blocked.push_back({{"tid", key.first},
                           {"semaphore", key.second},
                           {"blocked_ns", total.total.count()},
                           {"count", total.count}});
    }
    j["blocked"] = std::move(blocked);
    return j.dump(2, ' ', true) + "\n";
}

GroundTruth truth_from_json(std::string_view text) {
    try {
        auto j = nlohmann::json::parse(text);
        GroundTruth t;
        t.completed = j.at("completed").get<bool>();
        t.deadlocked = j.at("deadlocked").get<bool>();
        t.timed_out = j.at("timed_out").get<bool>();
        t.completion = Timestamp::from_ns(j.at("completion_ns").get<std::int64_t>());
        t.produced = j.at("produced").get<std::uint64_t>();
        t.consumed = j.at("consumed").get<std::uint64_t>();
        t.event_count = j.at("event_count").get<std::size_t>();
        t.max_occupancy = j.at("max_occupancy").get<std::vector<unsigned>>();
        for (const auto& b : j.at("blocked")) {
            t.blocked[{b.at("tid").get<std::int64_t>(), b.at("semaphore").get<std::string>()}] =
                WaitTotal{Duration(b.at("blocked_ns").get<std::int64_t>()), b.at("count").get<std::uint64_t>()};
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad ground-truth ledger: ") + e.what());
    }
}

std::string ReplayReport::to_text() const {
    std::ostringstream os;
    os << "replay check: " << intervals_checked << " lock waits compared, " << discrepancies.size()
       << " discrepancies" << (truncated ? " (trace truncated)" : "") << "\n";
    for (const auto& d : discrepancies) {
        os << "  " << (d.kind == Discrepancy::Kind::truncation ? "truncation" : "mismatch") << " tid=" << d.tid
           << " semaphore=" << d.semaphore << " expected=" << format_seconds(d.expected.total) << "s/"
           << d.expected.count << " actual=" << format_seconds(d.actual.total) << "s/" << d.actual.count << "\n";
    }
    return os.str();
}

ReplayReport replay_check(const std::vector<TraceEvent>& events, const GroundTruth& truth,
                          const OffcpuOptions& options) {
    ReplayReport report;
    report.truncated = events.size() < truth.event_count;
    auto timelines = build_timelines(events);
    auto intervals = attribute_offcpu(timelines, events, options);

    std::map<std::int64_t, std::vector<WaitInterval>> lock_waits;
    for (auto& w : intervals) {
        if (w.kind == WaitKind::Blocked && w.reason == WaitReason::Lock) lock_waits[w.tid].push_back(std::move(w));
    }
    std::map<std::pair<std::int64_t, std::string>, WaitTotal> observed;
    for (const auto& [tid, waits] : lock_waits) {
        report.intervals_checked += waits.size();
        for (const auto& [signature, total] : summarize_waits(waits).by_stack) {
            // signature is root-first: main;<loop>;wait_<sem>;sem_wait
            std::string sem = "[unattributed]";
            for (std::size_t pos = 0; pos < signature.size();) {
                auto end = signature.find(';', pos);
                auto part = std::string_view(signature).substr(pos, end == std::string::npos ? std::string::npos : end - pos);
                if (part.starts_with("wait_") && SemaphoreId::parse(part.substr(5))) sem = std::string(part.substr(5));
                if (end == std::string::npos) break;
                pos = end + 1;
            }
            observed[{tid, sem}] += total;
        }
    }

    auto kind = report.truncated ? Discrepancy::Kind::truncation : Discrepancy::Kind::mismatch;
    std::set<std::pair<std::int64_t, std::string>> keys;
    for (const auto& [k, v] : truth.blocked) keys.insert(k);
    for (const auto& [k, v] : observed) keys.insert(k);
    for (const auto& k : keys) {
        WaitTotal expected, actual;
        if (auto it = truth.blocked.find(k); it != truth.blocked.end()) expected = it->second;
        if (auto it = observed.find(k); it != observed.end()) actual = it->second;
        if (expected != actual) report.discrepancies.push_back({kind, k.first, k.second, expected, actual});
    }
    return report;
}

} // namespace latprof::sim
