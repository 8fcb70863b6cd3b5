#include "doctest.h"
#include "oracles.hpp"

#include "latprof/decimal.hpp"
#include "latprof/trace_model.hpp"

using namespace latprof;

TEST_CASE("decimal parses exact fixed-point text") {
    CHECK(Decimal::parse("45381.448")->units() == 45381'448'000'000);
    CHECK(Decimal::parse("-0.5")->units() == -500'000'000);
    CHECK(Decimal::parse(".25")->units() == 250'000'000);
    CHECK(Decimal::parse("7.")->units() == 7'000'000'000);
    CHECK(Decimal::parse("0.000000001")->units() == 1);
    CHECK_FALSE(Decimal::parse("0.0000000001"));
    CHECK_FALSE(Decimal::parse(""));
    CHECK_FALSE(Decimal::parse("."));
    CHECK_FALSE(Decimal::parse("1e3"));
    CHECK_FALSE(Decimal::parse("12a"));
    CHECK_FALSE(Decimal::parse("99999999999"));
    CHECK(Decimal::parse("9223372036.854775807"));
    CHECK_FALSE(Decimal::parse("9223372036.854775808"));
}

TEST_CASE("decimal formatting round-trips and rounds") {
    CHECK(Decimal::parse("5672.681")->format(3) == "5672.681");
    CHECK(Decimal::parse("1.0005")->format(3) == "1.001");
    CHECK(Decimal::parse("1.0005")->format(3, Decimal::Rounding::truncate) == "1.000");
    CHECK(Decimal::parse("-1.25")->format(1) == "-1.3");
    CHECK(Decimal::parse("-0.0001")->format(2) == "0.00");
    CHECK(Decimal::parse("3.500")->to_string() == "3.5");
    CHECK(Decimal::parse("3.000")->to_string() == "3");
    CHECK(Decimal{}.to_string() == "0");

    oracle::Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        auto d = Decimal::from_units(rng.between(-9'000'000'000'000'000'000, 9'000'000'000'000'000'000));
        CHECK(Decimal::parse(d.to_string()) == d);
        CHECK(Decimal::parse(d.format(9)) == d);
    }
}

TEST_CASE("decimal division rounds half away from zero") {
    CHECK(Decimal::parse("45381.448")->divided_by(8) == *Decimal::parse("5672.681"));
    CHECK(Decimal::from_units(5).divided_by(2).units() == 3);
    CHECK(Decimal::from_units(-5).divided_by(2).units() == -3);
    CHECK(Decimal::from_units(4).divided_by(3).units() == 1);
}

TEST_CASE("timestamps parse perf seconds and format truncated") {
    auto t = Timestamp::parse("12345.678901234");
    REQUIRE(t);
    CHECK(t->ns() == 12345'678'901'234);
    CHECK(t->format(6) == "12345.678901");
    CHECK(t->format(3) == "12345.678");
    CHECK_FALSE(Timestamp::parse("-1.0"));
    CHECK_FALSE(Timestamp::parse("1.2.3"));
    CHECK((Timestamp::from_ns(1500) - Timestamp::from_ns(500)).count() == 1000);
    CHECK(format_seconds(Duration(1'500'000'000)) == "1.500000000");
}

TEST_CASE("event classes come from the qualified name prefix") {
    CHECK(classify_event("sched:sched_switch") == EventClass::sched);
    CHECK(classify_event("syscalls:sys_enter_futex") == EventClass::syscalls);
    CHECK(classify_event("raw_syscalls:sys_enter") == EventClass::syscalls);
    CHECK(classify_event("block:block_rq_issue") == EventClass::block);
    CHECK(classify_event("net:net_dev_xmit") == EventClass::net);
    CHECK(classify_event("sock:inet_sock_set_state") == EventClass::sock);
    CHECK(classify_event("skb:kfree_skb") == EventClass::skb);
    CHECK(classify_event("scsi:scsi_dispatch_cmd_start") == EventClass::scsi);
    CHECK(classify_event("ext4:ext4_sync_file_enter") == EventClass::ext4);
    CHECK(classify_event("cpu-clock") == EventClass::cpu_clock);
    CHECK(classify_event("cycles") == EventClass::other);
    CHECK(classify_event("foo:bar") == EventClass::other);
    CHECK(classify_event("") == EventClass::other);
}

TEST_CASE("event args keep insertion order and parse integers") {
    EventArgs a;
    a.set("prev_pid", "42");
    a.set("prev_state", "S");
    a.set("prev_pid", "43");
    REQUIRE(a.entries().size() == 2);
    CHECK(a.entries()[0].first == "prev_pid");
    CHECK(a.get_int("prev_pid") == 43);
    CHECK_FALSE(a.get_int("prev_state"));
    CHECK_FALSE(a.get("missing"));
}

TEST_CASE("trace origin is the earliest timestamp") {
    std::vector<TraceEvent> ev{make_event("a", 1, 1, 0, Timestamp::from_ns(50), "cpu-clock"),
                               make_event("a", 1, 1, 0, Timestamp::from_ns(20), "cpu-clock"),
                               make_event("a", 1, 1, 0, Timestamp::from_ns(70), "cpu-clock")};
    CHECK(trace_origin(ev).ns() == 20);
    CHECK(trace_origin({}).ns() == 0);
    CHECK(ev[0].name() == "cpu-clock");
    auto s = make_event("a", 1, 1, 0, Timestamp{}, "sched:sched_switch");
    CHECK(s.name() == "sched_switch");
}

TEST_CASE("wait reasons have stable names") {
    for (auto r : kAllWaitReasons) CHECK(parse_wait_reason(to_string(r)) == r);
    CHECK_FALSE(parse_wait_reason("Sleeping"));
}
