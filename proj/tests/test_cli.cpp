#include "doctest.h"

#include "latprof/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    int code = latprof::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_dir() {
    auto dir = fs::temp_directory_path() / "latprof_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    auto p = temp_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

std::string read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

constexpr const char* kSamples = "gzip 10/10 [000] 1.000000: 3 cpu-clock:\n"
                                 "\t1000 deflate (libz.so)\n"
                                 "\n"
                                 "gzip 10/10 [000] 1.500000: 1 cpu-clock:\n"
                                 "\t1000 memcpy (libc.so.6)\n"
                                 "\n"
                                 "scp 20/20 [001] 2.500000: 4 cpu-clock:\n"
                                 "\t1000 read (libc.so.6)\n";

} // namespace

TEST_CASE("usage errors exit 2 with a synopsis") {
    auto none = run({});
    CHECK(none.code == 2);
    CHECK(none.err.find("Usage") != std::string::npos);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"report", "--top", "x"}).code == 2);
    CHECK(run({"simulate", "--consumers", "0"}).code == 2);
    CHECK(run({"simulate", "--produce-time", "soon"}).code == 2);
    CHECK(run({"graph", "--cycles", "--mst"}).code == 2);
    CHECK(run({"graph"}, "a b\n").code == 2);
    CHECK(run({"report", "--format", "xml"}, kSamples).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("report prints the flat profile") {
    auto path = write("samples.txt", kSamples);
    auto r = run({"report", "--input", path, "--sort", "comm", "--top", "10"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# Flat profile") != std::string::npos);
    CHECK(r.out.find("   50.00%         2        4  gzip") != std::string::npos);
    auto by_sym = run({"report", "--sort", "symbol"}, kSamples);
    CHECK(by_sym.out.find("read") < by_sym.out.find("deflate"));
    CHECK(run({"report", "--sort", "pid"}, kSamples).code == 2);
}

TEST_CASE("report on table formats") {
    auto g = run({"report"}, " time   seconds   seconds    calls  ms/call  ms/call  name\n"
                             " 41.64      0.12     0.12                             main\n");
    CHECK(g.code == 0);
    CHECK(g.out.find("41.64%") != std::string::npos);
    auto m = run({"report"}, "Mutex #   Locked  Changed    Cont. tot.Time[ms] avg.Time[ms] max.Time[ms]  Flags\n"
                             "       0        8        4        4    45381.448     5672.681     6303.132 M-.?-.\n");
    CHECK(m.out.find("45381.448") != std::string::npos);
}

TEST_CASE("offcpu without sched events shows empty sections") {
    auto r = run({"offcpu"}, kSamples);
    CHECK(r.code == 0);
    CHECK(r.out.find("(no data)") != std::string::npos);
}

TEST_CASE("lenient and strict parsing") {
    std::string text = std::string(kSamples) + "garbage line here\n";
    auto lenient = run({"parse", "--format", "perf"}, text);
    CHECK(lenient.code == 0);
    CHECK(lenient.err.find("skipped 1 malformed line(s)") != std::string::npos);
    CHECK(lenient.out.find("\"comm\":\"scp\"") != std::string::npos);
    auto strict = run({"parse", "--format", "perf", "--strict"}, text);
    CHECK(strict.code == 1);
    CHECK(strict.err.find("line 9") != std::string::npos);
}

TEST_CASE("parse emits one JSON object per event") {
    auto r = run({"parse"}, kSamples);
    std::istringstream is(r.out);
    int n = 0;
    for (std::string line; std::getline(is, line); ++n) {
        auto j = nlohmann::json::parse(line);
        CHECK(j["type"] == "event");
    }
    CHECK(n == 3);
}

TEST_CASE("multiple inputs merge in argument order") {
    auto a = write("a.txt", "x 1/1 [000] 1.0: cpu-clock:\n");
    auto b = write("b.txt", "y 2/2 [000] 0.5: cpu-clock:\n");
    auto r = run({"parse", "-i", a, "-i", b});
    CHECK(r.out.find("\"comm\":\"x\"") < r.out.find("\"comm\":\"y\""));
    auto missing = run({"parse", "-i", (temp_dir() / "nope.txt").string()});
    CHECK(missing.code == 1);
}

TEST_CASE("graph queries") {
    const std::string edges = "a b 2\nb c 3\na c 4\n";
    CHECK(run({"graph", "--critical-path", "a"}, edges).out == "a -> b -> c\nweight 5\n");
    CHECK(run({"graph", "--shortest", "a", "c"}, edges).out == "a -> c\nweight 4\n");
    CHECK(run({"graph", "--topo"}, edges).out == "a\nb\nc\n");
    CHECK(run({"graph", "--mst", "--undirected"}, edges).out == "a -- b  2\nb -- c  3\ntotal 5\n");
    CHECK(run({"graph", "--cycles"}, edges).out == "no cycles\n");
    CHECK(run({"graph", "--cycles"}, "a b\nb a\n").out == "a -> b -> a\n");
    auto cyc = run({"graph", "--topo"}, "a b\nb a\n");
    CHECK(cyc.code == 1);
    CHECK(cyc.err.find("a -> b") != std::string::npos);
    CHECK(run({"graph", "--shortest", "c", "a"}, edges).code == 1);
}

TEST_CASE("simulate with check") {
    auto r = run({"simulate", "--producers", "2", "--consumers", "2", "--capacity", "4", "--items", "100", "--seed",
                  "7", "--check"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0 discrepancies") != std::string::npos);
}

TEST_CASE("simulate writes trace, ledger and acquisitions") {
    auto dir = temp_dir();
    auto trace = (dir / "sim.txt").string(), truth = (dir / "truth.json").string(), acq = (dir / "acq.csv").string();
    auto r = run({"simulate", "--items", "2", "--produce-time", "1", "--consume-time", "3", "--cs-time", "0.1",
                  "--out", trace, "--truth", truth, "--acquisitions", acq});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(r.err.find("completed at 6.200000000 s") != std::string::npos);
    auto j = nlohmann::json::parse(read(truth));
    CHECK(j["blocked"][0]["blocked_ns"] == 1'000'000'000);
    auto off = run({"offcpu", "-i", trace});
    CHECK(off.out.find("main;producer_loop;wait_empty_0;sem_wait") != std::string::npos);
    auto locks = run({"locks", "--acquisitions", acq});
    CHECK(locks.code == 0);
    CHECK(locks.out.find("no lock-order cycles") != std::string::npos);
}

TEST_CASE("locks reports a cycle for an inverted deadlock") {
    auto acq = (temp_dir() / "inv.csv").string();
    bool found = false;
    for (int seed = 0; seed < 100 && !found; ++seed) {
        auto r = run({"simulate", "--producers", "2", "--consumers", "2", "--capacity", "1", "--items", "20",
                      "--jitter", "0.5", "--seed", std::to_string(seed), "--inverted-wait-order", "--out",
                      (temp_dir() / "inv.txt").string(), "--acquisitions", acq});
        if (r.err.find("deadlocked") == std::string::npos) continue;
        found = run({"locks", "--acquisitions", acq}).out.find("cycle:") != std::string::npos;
    }
    CHECK(found);
}

TEST_CASE("export formats") {
    auto csv = run({"export", "--format", "csv"}, kSamples);
    CHECK(csv.out.rfind("timestamp,comm,pid,tid,cpu,event,dso,symbol\n0.000,gzip", 0) == 0);
    auto bulk = run({"export", "--format", "bulk", "--index", "perfidx"}, kSamples);
    CHECK(bulk.out.find("{\"index\":{\"_index\":\"perfidx\"}}") == 0);
    CHECK(run({"export", "--format", "bulk", "--index", "Bad"}, kSamples).code == 1);
    auto json = run({"export", "--format", "json", "--pie-mode", "comm_dso"}, kSamples);
    auto j = nlohmann::json::parse(json.out);
    CHECK(j["utilization"]["gzip (libz.so)"] == doctest::Approx(0.375));
    CHECK(j["events_per_second"]["bins"].size() == 2);
    CHECK(run({"export", "--format", "xml"}, kSamples).code == 2);
}

TEST_CASE("same argv gives byte-identical output") {
    auto a = run({"simulate", "--producers", "3", "--consumers", "2", "--jitter", "0.4", "--seed", "9"});
    auto b = run({"simulate", "--producers", "3", "--consumers", "2", "--jitter", "0.4", "--seed", "9"});
    CHECK(a.out == b.out);
    CHECK(run({"report"}, a.out).out == run({"report"}, b.out).out);
    CHECK(run({"export", "--format", "json"}, a.out).out == run({"export", "--format", "json"}, b.out).out);
}
