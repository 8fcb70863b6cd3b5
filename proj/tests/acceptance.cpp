// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "oracles.hpp"

#include "latprof/cli.hpp"
#include "latprof/error.hpp"
#include "latprof/export.hpp"
#include "latprof/lock_analysis.hpp"
#include "latprof/parsers.hpp"
#include "latprof/profile_agg.hpp"
#include "latprof/sched_analysis.hpp"
#include "latprof/simgen.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace latprof;

namespace {

// Tolerances and budgets.
constexpr double kPercentTolerance = 0.01;
constexpr double kPieTolerance = 1e-9;
constexpr int kSimDraws = 120;
constexpr double kSimBudgetSeconds = 10.0;
constexpr int kConservationSets = 1000;
constexpr int kGraphTrials = 250;
constexpr std::size_t kGraphMaxNodes = 7;
constexpr double kGraphBudgetSeconds = 5.0;
constexpr std::uint64_t kDeadlockSeeds = 100;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Decimal dec(const char* s) { return *Decimal::parse(s); }

Outcome listing_goldens() {
    Outcome o;
    auto m = parse_mutrace("Mutex #   Locked  Changed    Cont. tot.Time[ms] avg.Time[ms] max.Time[ms]  Flags\n"
                           "       0        8        4        4    45381.448     5672.681     6303.132 M-.?-.\n",
                           ParseMode::strict)
                 .items;
    o.require(m.size() == 1, "mutrace row count");
    if (m.size() == 1) {
        const auto& r = m[0];
        o.require(r.locked == 8 && r.changed == 4 && r.contended == 4, "mutrace counts");
        o.require(r.total_ms == dec("45381.448") && r.avg_ms == dec("5672.681") && r.max_ms == dec("6303.132"),
                  "mutrace times");
        o.require(r.total_ms.divided_by(static_cast<std::int64_t>(r.locked)) == r.avg_ms, "avg == total/locked");
    }

    auto g = parse_gprof_flat(
                 "  \n"
                 " time   seconds   seconds    calls  ms/call  ms/call  name\n"
                 " 41.64      0.12     0.12                             main\n"
                 " 31.23      0.21     0.09        1    90.56    90.56  foo()\n"
                 " 26.02      0.29     0.08        1    75.47   166.02  bar()\n"
                 "  0.00      0.29     0.00        3     0.00     0.00  std::operator|(std::_Ios_Openmode, "
                 "std::_Ios_Openmode)\n"
                 "  0.00      0.29     0.00        1     0.00     0.00  _GLOBAL__sub_I__Z3foov\n"
                 "  0.00      0.29     0.00        1     0.00     0.00  __static_initialization_and_destruction_0(int, "
                 "int)\n",
                 ParseMode::strict)
                 .items;
    o.require(g.size() == 6, "gprof row count");
    if (g.size() == 6) {
        o.require(g[0] == GprofRow{dec("41.64"), dec("0.12"), dec("0.12"), std::nullopt, std::nullopt, std::nullopt,
                                   "main"},
                  "gprof main row");
        o.require(g[2] == GprofRow{dec("26.02"), dec("0.29"), dec("0.08"), 1, dec("75.47"), dec("166.02"), "bar()"},
                  "gprof bar() row");
    }

    auto x = parse_oprofile_flat("Function\t\ne1000_intr\t13 .32\te1000 \ntcp_v4_rcv\t8 .23\tvmlinux \nmain\t5 .47\trcv22\n",
                                 ParseMode::strict)
                 .items;
    o.require(x == std::vector<ImageProfileRow>{{"e1000_intr", dec("13.32"), "e1000"},
                                                {"tcp_v4_rcv", dec("8.23"), "vmlinux"},
                                                {"main", dec("5.47"), "rcv22"}},
              "xenoprof rows");
    o.detail = o.pass ? "mutrace 1 row, gprof 6 rows, xenoprof 3 rows exact" : o.detail;
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    oracle::Rng rng(20240601);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t waits = 0;
    for (int draw = 0; draw < kSimDraws; ++draw) {
        sim::SimConfig c;
        c.producers = static_cast<unsigned>(rng.between(1, 4));
        c.consumers = static_cast<unsigned>(rng.between(1, 4));
        c.queues = static_cast<unsigned>(rng.between(1, std::min(c.producers, c.consumers)));
        c.capacity = static_cast<unsigned>(rng.between(1, 8));
        c.items_per_producer = static_cast<unsigned>(rng.between(1, 50));
        c.jitter = rng.chance(0.5) ? 0.2 : 0.0;
        c.seed = static_cast<std::uint64_t>(rng.between(0, 1'000'000));
        auto r = sim::simulate(c);
        auto reparsed = parse_perf_script(render_perf_script(r.events), ParseMode::strict).items;
        auto report = sim::replay_check(reparsed, r.truth);
        waits += report.intervals_checked;
        o.require(report.clean(), "draw " + std::to_string(draw) + ": " + report.to_text());
    }
    const double secs = seconds_since(t0);
    o.require(secs < kSimBudgetSeconds, "took " + std::to_string(secs) + " s");
    if (o.pass) {
        o.detail = std::to_string(kSimDraws) + " draws, " + std::to_string(waits) +
                   " lock waits equal to the ns, " + std::to_string(secs).substr(0, 5) + " s";
    }
    return o;
}

Outcome conservation() {
    Outcome o;
    oracle::Rng rng(777);
    int profiles = 0;
    for (int set = 0; set < kConservationSets; ++set) {
        auto ev = oracle::random_sched_trace(rng, static_cast<int>(rng.between(1, 6)),
                                             static_cast<int>(rng.between(1, 120)));
        auto ts = build_timelines(ev);
        for (const auto& [tid, tl] : ts.threads) {
            Duration sum{0};
            bool abut = tl.intervals.front().start == ts.origin && tl.intervals.back().end == ts.end;
            for (std::size_t i = 0; i < tl.intervals.size(); ++i) {
                sum += tl.intervals[i].length();
                if (i > 0) abut = abut && tl.intervals[i - 1].end == tl.intervals[i].start;
            }
            o.require(abut && sum == ts.end - ts.origin, "timeline conservation, set " + std::to_string(set));
        }

        try {
            auto rows = flat_profile(ev, GroupBy{true, true, true});
            double sum = 0;
            for (const auto& r : rows) sum += r.percent;
            o.require(std::abs(sum - 100.0) <= kPercentTolerance, "percent sum " + std::to_string(sum));
            ++profiles;
        } catch (const AnalysisError&) {
        }

        auto waits = attribute_offcpu(ts, ev);
        auto summary = summarize_waits(waits);
        std::uint64_t hist = 0;
        for (const auto& [b, n] : summary.histogram) hist += n;
        o.require(hist == waits.size(), "wait histogram count, set " + std::to_string(set));
        auto h = events_per_second(ev, Duration(rng.between(1, 2'000'000'000)));
        o.require(h.total() == ev.size(), "events-per-second count, set " + std::to_string(set));

        for (auto mode : {PieMode::comm, PieMode::comm_dso}) {
            double sum = 0;
            for (const auto& [k, f] : utilization_pie(ev, mode).slices) sum += f;
            o.require(std::abs(sum - 1.0) <= kPieTolerance, "pie sum " + std::to_string(sum));
        }

        auto cg = build_call_graph(ev);
        std::uint64_t excl = 0;
        for (const auto& [k, w] : cg.nodes) excl += w.exclusive;
        o.require(excl == cg.total_weight, "call-graph exclusive sum, set " + std::to_string(set));
    }
    if (o.pass) {
        o.detail = std::to_string(kConservationSets) + " sets (" + std::to_string(profiles) +
                   " with samples): timeline, percent, histograms, pie, call graph";
    }
    return o;
}

Outcome graph_equivalence() {
    Outcome o;
    oracle::Rng rng(4242);
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < kGraphTrials; ++trial) {
        const auto n = static_cast<std::size_t>(rng.between(1, kGraphMaxNodes));
        const auto s = oracle::node_name(static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(n) - 1)));
        const auto t = oracle::node_name(static_cast<std::size_t>(rng.between(0, static_cast<std::int64_t>(n) - 1)));
        const auto tag = " (trial " + std::to_string(trial) + ")";

        auto dg = oracle::random_graph(rng, n, 0.35, true, false, true);
        auto sp = oracle::shortest(dg, s, t);
        try {
            auto got = shortest_path(dg, s, t);
            o.require(sp && got.weight == sp->weight && got.nodes == sp->nodes, "shortest_path" + tag);
        } catch (const AnalysisError&) {
            o.require(!sp, "shortest_path unreachable" + tag);
        }
        o.require(detect_cycles(dg, 8) == oracle::cycles(dg, 8), "detect_cycles" + tag);

        auto ug = oracle::random_graph(rng, n, 0.5, false);
        auto mst = oracle::mst_weight(ug);
        try {
            auto tree = minimum_spanning_tree(ug);
            o.require(mst && tree.total == *mst && tree.edges.size() + 1 == n, "minimum_spanning_tree" + tag);
        } catch (const AnalysisError&) {
            o.require(!mst, "minimum_spanning_tree disconnected" + tag);
        }

        auto dag = oracle::random_graph(rng, n, 0.4, true, true);
        auto cp = critical_path(dag, s);
        auto heavy = oracle::heaviest(dag, s);
        o.require(cp.weight == heavy.weight && cp.nodes == heavy.nodes, "critical_path" + tag);
    }
    const double secs = seconds_since(t0);
    o.require(secs < kGraphBudgetSeconds, "took " + std::to_string(secs) + " s");
    if (o.pass) {
        o.detail = std::to_string(kGraphTrials) + " graphs of <= " + std::to_string(kGraphMaxNodes) + " nodes, " +
                   std::to_string(secs).substr(0, 5) + " s";
    }
    return o;
}

Outcome deadlock_demo() {
    Outcome o;
    sim::SimConfig c;
    c.producers = 2;
    c.consumers = 2;
    c.capacity = 1;
    c.items_per_producer = 20;
    c.jitter = 0.5;
    int deadlocks = 0, with_cycle = 0, completed = 0, ordered_cycles = 0;
    for (std::uint64_t seed = 0; seed < kDeadlockSeeds; ++seed) {
        c.seed = seed;
        c.inverted_wait_order = true;
        auto inv = sim::simulate(c);
        if (inv.truth.deadlocked) {
            ++deadlocks;
            if (!detect_deadlock_risk(build_lock_order_graph(inv.acquisitions)).empty()) ++with_cycle;
        }
        c.inverted_wait_order = false;
        auto ok = sim::simulate(c);
        if (ok.truth.completed) ++completed;
        if (!detect_deadlock_risk(build_lock_order_graph(ok.acquisitions)).empty()) ++ordered_cycles;
    }
    o.require(with_cycle >= 1, "no deadlocking seed showed a lock-order cycle");
    o.require(completed == static_cast<int>(kDeadlockSeeds), "ordered variant failed to complete");
    o.detail = "inverted: " + std::to_string(deadlocks) + "/100 deadlocked, " + std::to_string(with_cycle) +
               " with a lock-order cycle; ordered: " + std::to_string(completed) + "/100 completed, " +
               std::to_string(ordered_cycles) + " with a cycle";
    return o;
}

Outcome round_trips() {
    Outcome o;
    oracle::Rng rng(5150);
    for (int round = 0; round < 200; ++round) {
        auto ev = oracle::random_sched_trace(rng, 5, static_cast<int>(rng.between(0, 60)));
        auto records = to_records(ev);
        o.require(parse_bulk_ndjson(to_bulk_ndjson(ev)) == records, "bulk parse-back");
        auto csv = parse_csv_records(to_csv(ev));
        for (auto& r : records) r.ts_ns = 0;
        o.require(csv == records, "csv parse-back");
    }

    auto dir = std::filesystem::temp_directory_path() / "latprof_acceptance";
    std::filesystem::create_directories(dir);
    const auto trace = (dir / "trace.txt").string();
    auto invoke = [](std::vector<std::string> argv) {
        std::istringstream in;
        std::ostringstream out, err;
        int code = cli::run(argv, in, out, err);
        return std::to_string(code) + "\n" + out.str();
    };
    const std::vector<std::string> sim_argv{"simulate", "--producers", "3", "--consumers", "2", "--capacity", "2",
                                            "--items", "30", "--jitter", "0.2", "--seed", "42"};
    const auto first_sim = invoke(sim_argv);
    o.require(first_sim == invoke(sim_argv), "simulate rerun differs");
    {
        std::ofstream(trace, std::ios::binary) << first_sim.substr(first_sim.find('\n') + 1);
    }
    for (const auto& argv : std::vector<std::vector<std::string>>{
             {"report", "-i", trace, "-i", trace},
             {"offcpu", "-i", trace},
             {"export", "--format", "csv", "-i", trace},
             {"export", "--format", "bulk", "-i", trace},
             {"export", "--format", "json", "-i", trace},
             {"parse", "-i", trace}}) {
        o.require(invoke(argv) == invoke(argv), "rerun differs: " + argv[0]);
    }
    if (o.pass) o.detail = "bulk and csv parse-back on 200 sets; 7 argv reruns byte-identical";
    return o;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"published listing goldens", listing_goldens},
        {"simulator oracle equivalence", oracle_equivalence},
        {"conservation suites", conservation},
        {"graph brute-force equivalence", graph_equivalence},
        {"deadlock demonstration", deadlock_demo},
        {"format round-trips and determinism", round_trips},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
