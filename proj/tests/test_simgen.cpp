#include "doctest.h"
#include "oracles.hpp"

#include "latprof/error.hpp"
#include "latprof/export.hpp"
#include "latprof/parsers.hpp"
#include "latprof/simgen.hpp"

using namespace latprof;
using namespace std::chrono_literals;

namespace {

sim::SimConfig golden_config() {
    sim::SimConfig c;
    c.items_per_producer = 2;
    c.produce_time = 1s;
    c.consume_time = 3s;
    c.critical_section_time = 100ms;
    return c;
}

} // namespace

TEST_CASE("hand-traced single producer run") {
    auto r = sim::simulate(golden_config());
    const auto& t = r.truth;
    CHECK(t.completed);
    CHECK_FALSE(t.deadlocked);
    CHECK(t.completion.ns() == 6'200'000'000);
    CHECK(t.produced == 2);
    CHECK(t.consumed == 2);
    CHECK(t.max_occupancy == std::vector<unsigned>{1});
    REQUIRE(t.blocked.size() == 1);
    const auto& [key, total] = *t.blocked.begin();
    CHECK(key.first == 1001);
    CHECK(key.second == "empty_0");
    CHECK(total.total == 1s);
    CHECK(total.count == 1);

    REQUIRE(r.events.size() == 3);
    CHECK(r.events[0].ts.ns() == 2'100'000'000);
    CHECK(r.events[0].event == "sched:sched_switch");
    CHECK(r.events[0].stack.at(1).symbol == "wait_empty_0");
    CHECK(r.events[1].event == "sched:sched_wakeup");
    CHECK(r.events[1].tid == 1002);
    CHECK(r.events[2].ts.ns() == 3'100'000'000);
    CHECK(r.events[2].args.get_int("next_pid") == 1001);

    REQUIRE(r.critical_sections.size() == 4);
    CHECK(r.critical_sections[0].start.ns() == 1'000'000'000);
    CHECK(r.critical_sections[3].end.ns() == 6'200'000'000);
    CHECK(sim::replay_check(r.events, t).clean());
}

TEST_CASE("config validation") {
    auto bad = [](auto mutate) {
        sim::SimConfig c;
        c.producers = 2;
        c.consumers = 2;
        mutate(c);
        return c;
    };
    CHECK_NOTHROW(sim::validate(bad([](auto&) {})));
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.producers = 0; })), ConfigError);
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.capacity = 0; })), ConfigError);
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.items_per_producer = 0; })), ConfigError);
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.queues = 3; })), ConfigError);
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.jitter = 1.5; })), ConfigError);
    CHECK_THROWS_AS(sim::validate(bad([](auto& c) { c.produce_time = 0s; })), ConfigError);
    CHECK_THROWS_AS(sim::simulate(bad([](auto& c) { c.consumers = 0; })), ConfigError);
}

TEST_CASE("semaphore names") {
    sim::SemaphoreId id{sim::SemKind::full, 3};
    CHECK(id.name() == "full_3");
    CHECK(id.lock_id() == 11);
    CHECK(sim::SemaphoreId::parse("full_3") == id);
    CHECK_FALSE(sim::SemaphoreId::parse("fill_3"));
    CHECK_FALSE(sim::SemaphoreId::parse("full_x"));
    CHECK(sim::wait_site_symbol(id) == "wait_full_3");
}

TEST_CASE("runs are deterministic and conserve items") {
    oracle::Rng rng(12);
    for (int round = 0; round < 40; ++round) {
        sim::SimConfig c;
        c.producers = static_cast<unsigned>(rng.between(1, 4));
        c.consumers = static_cast<unsigned>(rng.between(1, 4));
        c.queues = static_cast<unsigned>(rng.between(1, std::min(c.producers, c.consumers)));
        c.capacity = static_cast<unsigned>(rng.between(1, 8));
        c.items_per_producer = static_cast<unsigned>(rng.between(1, 30));
        c.seed = static_cast<std::uint64_t>(rng.between(0, 1000));
        c.jitter = rng.chance(0.5) ? 0.3 : 0.0;
        auto a = sim::simulate(c), b = sim::simulate(c);
        CHECK(a.events == b.events);
        CHECK(a.truth == b.truth);
        CHECK(a.acquisitions == b.acquisitions);
        CHECK(a.truth.completed);
        CHECK(a.truth.produced == std::uint64_t{c.producers} * c.items_per_producer);
        CHECK(a.truth.consumed == a.truth.produced);
        for (auto occ : a.truth.max_occupancy) CHECK(occ <= c.capacity);
        for (const auto& o : a.occupancy) {
            CHECK(o.occupancy >= 0);
            CHECK(o.occupancy <= static_cast<int>(c.capacity));
        }
        CHECK(sim::truth_from_json(sim::truth_to_json(a.truth)) == a.truth);
        for (const auto& acq : a.acquisitions) {
            CHECK(acq.request_ts <= acq.grant_ts);
            CHECK(acq.grant_ts <= acq.release_ts);
        }
        // Mutex holds never overlap within a queue.
        std::map<std::uint64_t, std::vector<LockAcquisition>> mutexes;
        for (const auto& acq : a.acquisitions) {
            if (acq.lock_id % 3 == 0) mutexes[acq.lock_id].push_back(acq);
        }
        for (auto& [id, holds] : mutexes) {
            std::sort(holds.begin(), holds.end(),
                      [](const auto& x, const auto& y) { return x.grant_ts < y.grant_ts; });
            for (std::size_t i = 1; i < holds.size(); ++i) CHECK(holds[i - 1].release_ts <= holds[i].grant_ts);
        }
    }
}

TEST_CASE("trace text re-parses and checks clean") {
    sim::SimConfig c;
    c.producers = 3;
    c.consumers = 2;
    c.capacity = 2;
    c.items_per_producer = 20;
    c.jitter = 0.2;
    c.seed = 5;
    auto r = sim::simulate(c);
    auto text = render_perf_script(r.events);
    auto back = parse_perf_script(text, ParseMode::strict);
    CHECK(back.items == r.events);
    auto report = sim::replay_check(back.items, r.truth);
    CHECK(report.clean());
    CHECK(report.intervals_checked > 0);
    CHECK_FALSE(report.truncated);
}

TEST_CASE("dropped events are reported as truncation") {
    sim::SimConfig c;
    c.producers = 2;
    c.consumers = 2;
    c.capacity = 1;
    c.items_per_producer = 10;
    auto r = sim::simulate(c);
    REQUIRE(r.events.size() > 4);
    auto cut = r.events;
    cut.resize(cut.size() / 2);
    auto report = sim::replay_check(cut, r.truth);
    CHECK(report.truncated);
    REQUIRE_FALSE(report.clean());
    for (const auto& d : report.discrepancies) CHECK(d.kind == sim::Discrepancy::Kind::truncation);
    CHECK(report.to_text().find("truncation") != std::string::npos);

    auto tampered = r.truth;
    tampered.blocked.begin()->second.total += 1ns;
    auto mismatch = sim::replay_check(r.events, tampered);
    REQUIRE(mismatch.discrepancies.size() == 1);
    CHECK(mismatch.discrepancies[0].kind == sim::Discrepancy::Kind::mismatch);
}

TEST_CASE("inverted wait order deadlocks and the standard order does not") {
    sim::SimConfig c;
    c.producers = 2;
    c.consumers = 2;
    c.capacity = 1;
    c.items_per_producer = 20;
    c.jitter = 0.5;
    c.seed = 3;
    auto ok = sim::simulate(c);
    CHECK(ok.truth.completed);
    CHECK(detect_deadlock_risk(build_lock_order_graph(ok.acquisitions)).empty());
    c.inverted_wait_order = true;
    auto stuck = sim::simulate(c);
    CHECK(stuck.truth.deadlocked);
    CHECK_FALSE(stuck.truth.completed);
    CHECK(stuck.truth.produced < 40);
    CHECK(sim::replay_check(stuck.events, stuck.truth).clean());
}

TEST_CASE("time limit stops the run") {
    sim::SimConfig c;
    c.items_per_producer = 1000;
    c.time_limit = 10ms;
    auto r = sim::simulate(c);
    CHECK(r.truth.timed_out);
    CHECK_FALSE(r.truth.completed);
    CHECK_FALSE(r.truth.deadlocked);
    CHECK(r.truth.completion <= Timestamp::from_ns(10'000'000));
    CHECK(sim::replay_check(r.events, r.truth).clean());
}

TEST_CASE("jitter stays within its band") {
    sim::SimConfig c = golden_config();
    c.items_per_producer = 1;
    c.consume_time = 1s;
    c.jitter = 0.25;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        c.seed = seed;
        auto r = sim::simulate(c);
        const auto& cs = r.critical_sections.at(0);
        CHECK(cs.start.ns() >= 750'000'000);
        CHECK(cs.start.ns() <= 1'250'000'000);
        const auto len = (cs.end - cs.start).count();
        CHECK(len >= 75'000'000);
        CHECK(len <= 125'000'000);
    }
}
