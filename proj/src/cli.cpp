#include "latprof/cli.hpp"

#include "latprof/error.hpp"
#include "latprof/export.hpp"
#include "latprof/graph_core.hpp"
#include "latprof/lock_analysis.hpp"
#include "latprof/parsers.hpp"
#include "latprof/profile_agg.hpp"
#include "latprof/sched_analysis.hpp"
#include "latprof/simgen.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace latprof::cli {

namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public Error {
  public:
    using Error::Error;
};

std::string read_stream(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path);
    return read_stream(f);
}

void write_output(const std::string& path, const std::string& data, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << data;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << data)) throw Error("cannot write " + path);
}

Duration parse_seconds(const std::string& text, const char* what) {
    auto d = Decimal::parse(text);
    if (!d) throw UsageError(std::string(what) + ": expected seconds, got \"" + text + "\"");
    return Duration(d->units());
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// Everything read from the inputs, merged in argument order.
struct Inputs {
    std::vector<TraceEvent> events;
    std::vector<GprofRow> gprof;
    std::vector<ImageProfileRow> oprofile;
    std::vector<MutexStats> mutexes;
    std::vector<SyscallRecord> syscalls;
    std::vector<std::string> diagnostics;

    void append(Inputs&& o) {
        std::move(o.events.begin(), o.events.end(), std::back_inserter(events));
        std::move(o.gprof.begin(), o.gprof.end(), std::back_inserter(gprof));
        std::move(o.oprofile.begin(), o.oprofile.end(), std::back_inserter(oprofile));
        std::move(o.mutexes.begin(), o.mutexes.end(), std::back_inserter(mutexes));
        std::move(o.syscalls.begin(), o.syscalls.end(), std::back_inserter(syscalls));
        std::move(o.diagnostics.begin(), o.diagnostics.end(), std::back_inserter(diagnostics));
    }
};

template <typename T>
std::vector<T> take(ParseOutcome<T>&& outcome, const std::string& name, Inputs& into) {
    for (const auto& e : outcome.errors) into.diagnostics.push_back(name + ": " + describe(e));
    return std::move(outcome.items);
}

Inputs parse_one(const std::string& name, const std::string& text, std::optional<InputFormat> forced,
                 ParseMode mode) {
    Inputs in;
    auto format = forced ? forced : sniff_format(text);
    if (!format) {
        if (!detail::is_blank(text)) in.diagnostics.push_back(name + ": unrecognized input format, skipped");
        return in;
    }
    try {
        switch (*format) {
        case InputFormat::perf: in.events = take(parse_perf_script(text, mode), name, in); break;
        case InputFormat::gprof: in.gprof = take(parse_gprof_flat(text, mode), name, in); break;
        case InputFormat::oprofile: in.oprofile = take(parse_oprofile_flat(text, mode), name, in); break;
        case InputFormat::mutrace: in.mutexes = take(parse_mutrace(text, mode), name, in); break;
        case InputFormat::strace: in.syscalls = take(parse_strace(text, mode), name, in); break;
        }
    } catch (const ParseError& e) {
        throw ParseError(LineError{e.detail().kind, e.detail().line, name + ": " + e.detail().reason});
    }
    return in;
}

struct CommonOptions {
    std::vector<std::string> inputs;
    std::string format;
    bool strict = false;
    std::size_t top = 20;
    std::string out;
};

/// Reads every input concurrently; results are merged in argument order.
Inputs load_inputs(const CommonOptions& opt, std::istream& stdin_stream, std::ostream& err) {
    std::optional<InputFormat> forced;
    if (!opt.format.empty()) {
        forced = parse_input_format(opt.format);
        if (!forced) throw UsageError("unknown input format \"" + opt.format + "\"");
    }
    const ParseMode mode = opt.strict ? ParseMode::strict : ParseMode::lenient;
    auto paths = opt.inputs.empty() ? std::vector<std::string>{"-"} : opt.inputs;
    std::vector<std::future<Inputs>> jobs;
    for (const auto& p : paths) {
        if (p == "-") {
            auto text = read_stream(stdin_stream);
            jobs.push_back(std::async(std::launch::deferred, [=] { return parse_one("<stdin>", text, forced, mode); }));
        } else {
            jobs.push_back(std::async(std::launch::async, [=] { return parse_one(p, read_file(p), forced, mode); }));
        }
    }
    Inputs all;
    for (auto& j : jobs) all.append(j.get());
    for (const auto& d : all.diagnostics) err << d << "\n";
    if (!all.diagnostics.empty()) err << "skipped " << all.diagnostics.size() << " malformed line(s)\n";
    return all;
}

void add_common(CLI::App* sub, CommonOptions& opt, bool format_flag = true) {
    sub->add_option("-i,--input", opt.inputs, "Input file(s); '-' or none reads standard input");
    if (format_flag) sub->add_option("--format", opt.format, "Input format: perf|gprof|oprofile|mutrace|strace");
    sub->add_flag("--strict", opt.strict, "Fail on the first malformed line");
    sub->add_option("--top", opt.top, "Rows to show")->capture_default_str();
    sub->add_option("-o,--out", opt.out, "Output file (default: standard output)");
}

ojson frame_json(const Frame& f) {
    ojson j;
    j["address"] = f.address;
    j["symbol"] = f.symbol ? ojson(*f.symbol) : ojson(nullptr);
    j["offset"] = f.offset ? ojson(*f.offset) : ojson(nullptr);
    j["dso"] = f.dso ? ojson(*f.dso) : ojson(nullptr);
    return j;
}

std::string dump_line(const ojson& j) { return j.dump(-1, ' ', true, ojson::error_handler_t::replace) + "\n"; }

std::string parse_ndjson(const Inputs& in) {
    std::string out;
    for (const auto& e : in.events) {
        ojson j;
        j["type"] = "event";
        j["comm"] = e.comm;
        j["pid"] = e.pid;
        j["tid"] = e.tid;
        j["cpu"] = e.cpu;
        j["ts_ns"] = e.ts.ns();
        j["event"] = e.event;
        j["class"] = to_string(e.event_class);
        j["period"] = e.period;
        ojson args = ojson::object();
        for (const auto& [k, v] : e.args.entries()) args[k] = v;
        j["args"] = std::move(args);
        auto stack = ojson::array();
        for (const auto& f : e.stack) stack.push_back(frame_json(f));
        j["stack"] = std::move(stack);
        out += dump_line(j);
    }
    auto opt_dec = [](const std::optional<Decimal>& d) { return d ? ojson(d->to_string()) : ojson(nullptr); };
    for (const auto& r : in.gprof) {
        out += dump_line({{"type", "gprof"},
                          {"percent_time", r.percent_time.to_string()},
                          {"cumulative_s", r.cumulative_s.to_string()},
                          {"self_s", r.self_s.to_string()},
                          {"calls", r.calls ? ojson(*r.calls) : ojson(nullptr)},
                          {"self_ms_per_call", opt_dec(r.self_ms_per_call)},
                          {"total_ms_per_call", opt_dec(r.total_ms_per_call)},
                          {"name", r.name}});
    }
    for (const auto& r : in.oprofile) {
        out += dump_line({{"type", "image_profile"}, {"symbol", r.symbol}, {"percent", r.percent.to_string()}, {"image", r.image}});
    }
    for (const auto& m : in.mutexes) {
        out += dump_line({{"type", "mutex"},
                          {"mutex", m.mutex_id},
                          {"locked", m.locked},
                          {"changed", m.changed},
                          {"contended", m.contended},
                          {"total_ms", m.total_ms.to_string()},
                          {"avg_ms", m.avg_ms.to_string()},
                          {"max_ms", m.max_ms.to_string()},
                          {"flags", m.flags}});
    }
    for (const auto& s : in.syscalls) {
        out += dump_line({{"type", "syscall"},
                          {"rel_ts", s.rel_ts.to_string()},
                          {"name", s.name},
                          {"args", s.args_text},
                          {"retval", s.retval},
                          {"duration_s", opt_dec(s.wall_duration_s)}});
    }
    return out;
}

GroupBy parse_group_by(const std::string& spec) {
    GroupBy g{false, false, false};
    for (const auto& k : split_list(spec)) {
        if (k == "comm") g.comm = true;
        else if (k == "dso") g.dso = true;
        else if (k == "symbol" || k == "sym") g.symbol = true;
        else throw UsageError("unknown sort key \"" + k + "\" (expected comm, dso, symbol)");
    }
    if (!g.comm && !g.dso && !g.symbol) throw UsageError("--sort needs at least one key");
    return g;
}

std::vector<FlatProfileRow> profile_or_empty(const std::vector<TraceEvent>& events, GroupBy g,
                                             const SampleFilter& filter) {
    try {
        return flat_profile(events, g, filter);
    } catch (const AnalysisError& e) {
        if (e.kind() == AnalysisErrorKind::no_samples) return {};
        throw;
    }
}

std::vector<FlatProfileRow> table_profile(const Inputs& in) {
    std::vector<FlatProfileRow> rows;
    for (const auto& r : in.gprof) {
        FlatProfileRow row;
        row.key.symbol = r.name;
        row.percent = r.percent_time.to_double();
        rows.push_back(std::move(row));
    }
    for (const auto& r : in.oprofile) {
        FlatProfileRow row;
        row.key.dso = r.image;
        row.key.symbol = r.symbol;
        row.percent = r.percent.to_double();
        rows.push_back(std::move(row));
    }
    return rows;
}

struct OffcpuArgs {
    std::string lock_symbols;
    std::string lookback;
};

OffcpuOptions offcpu_options(const OffcpuArgs& a) {
    OffcpuOptions o;
    if (!a.lock_symbols.empty()) {
        auto list = split_list(a.lock_symbols);
        o.lock_symbols = {list.begin(), list.end()};
    }
    if (!a.lookback.empty()) o.lookback = parse_seconds(a.lookback, "--lookback");
    return o;
}

WaitSummary wait_summary(const std::vector<TraceEvent>& events, const OffcpuOptions& o) {
    auto timelines = build_timelines(events);
    return summarize_waits(attribute_offcpu(timelines, events, o));
}

std::string render_offcpu(const std::vector<TraceEvent>& events, const OffcpuOptions& o, std::size_t top) {
    auto timelines = build_timelines(events);
    auto summary = summarize_waits(attribute_offcpu(timelines, events, o));
    std::ostringstream os;
    os << "# Off-CPU wait by reason\n";
    if (summary.empty()) {
        os << "(no data)\n";
    } else {
        for (const auto& [reason, t] : summary.by_reason()) {
            os << std::left << std::setw(15) << to_string(reason) << std::right << std::setw(22)
               << format_seconds(t.total) << std::setw(10) << t.count << "\n";
        }
    }
    os << "\n# Off-CPU wait by thread\n";
    if (summary.empty()) {
        os << "(no data)\n";
    } else {
        for (const auto& [key, t] : summary.by_thread_reason) {
            auto it = timelines.threads.find(key.first);
            std::string comm = it == timelines.threads.end() ? "" : it->second.comm;
            os << std::setw(8) << key.first << "  " << std::left << std::setw(16) << comm << std::setw(15)
               << to_string(key.second) << std::right << std::setw(22) << format_seconds(t.total) << std::setw(10)
               << t.count << "\n";
        }
    }
    os << "\n# Off-CPU wait by stack\n";
    if (summary.by_stack.empty()) {
        os << "(no data)\n";
    } else {
        std::vector<std::pair<std::string, WaitTotal>> stacks(summary.by_stack.begin(), summary.by_stack.end());
        std::stable_sort(stacks.begin(), stacks.end(),
                         [](const auto& a, const auto& b) { return a.second.total > b.second.total; });
        if (stacks.size() > top) stacks.resize(top);
        for (const auto& [sig, t] : stacks) {
            os << std::setw(22) << format_seconds(t.total) << std::setw(10) << t.count << "  " << sig << "\n";
        }
    }
    os << "\n# Wait duration histogram (log2 microseconds)\n";
    if (summary.histogram.empty()) {
        os << "(no data)\n";
    } else {
        for (const auto& [bucket, n] : summary.histogram) {
            std::string label = bucket < 0 ? "<1us" : "[2^" + std::to_string(bucket) + ", 2^" +
                                                          std::to_string(bucket + 1) + ") us";
            os << std::left << std::setw(22) << label << std::right << std::setw(10) << n << "\n";
        }
    }
    const auto& a = timelines.anomalies;
    if (a.total() > 0) {
        os << "\n# State machine anomalies\n"
           << "wakeup_not_sleeping " << a.wakeup_not_sleeping << "\nswitch_out_not_running "
           << a.switch_out_not_running << "\nswitch_in_running " << a.switch_in_running << "\nimplied_wakeup "
           << a.implied_wakeup << "\nunknown_prev_state " << a.unknown_prev_state << "\n";
    }
    return os.str();
}

std::string render_locks(const std::vector<MutexStats>& rows, const std::optional<LockOrderGraph>& order,
                         std::size_t max_len) {
    std::ostringstream os;
    os << "# Lock contention\n";
    if (rows.empty()) {
        os << "(no data)\n";
    } else {
        os << kMutexTableHeader << "\n";
        for (const auto& r : rows) {
            os << format_mutex_row(r);
            if (auto bad = check_mutex_stats(r)) os << "  [inconsistent: " << *bad << "]";
            os << "\n";
        }
    }
    if (order) {
        os << "\n# Lock order\n";
        if (order->edges.empty()) os << "(no data)\n";
        for (const auto& [e, n] : order->edges) os << e.first << " -> " << e.second << "  " << n << "\n";
        os << "\n# Deadlock risk\n";
        auto cycles = detect_deadlock_risk(*order, max_len);
        if (cycles.empty()) os << "no lock-order cycles\n";
        for (const auto& c : cycles) {
            os << "cycle:";
            for (auto id : c) os << " " << id;
            os << " -> " << c.front() << "\n";
        }
    }
    return os.str();
}

std::string join(const std::vector<std::string>& v, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? std::string(sep) : "") + v[i];
    return out;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Offline latency profiler for textual trace output", "latprof"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "latprof 0.1.0");

    CommonOptions parse_opt, report_opt, offcpu_opt, locks_opt, graph_opt, export_opt;

    auto* parse_cmd = app.add_subcommand("parse", "Dump normalized records as NDJSON");
    add_common(parse_cmd, parse_opt);

    auto* report_cmd = app.add_subcommand("report", "Flat profile, wait and lock summary");
    add_common(report_cmd, report_opt);
    std::string sort_keys = "comm,dso";
    std::string sample_event;
    OffcpuArgs report_offcpu;
    report_cmd->add_option("--sort", sort_keys, "Profile key: comma list of comm,dso,symbol")->capture_default_str();
    report_cmd->add_option("--event", sample_event, "Count only this sample event (default: cpu-clock)");
    report_cmd->add_option("--lock-symbols", report_offcpu.lock_symbols, "Comma list replacing the lock symbol set");
    report_cmd->add_option("--lookback", report_offcpu.lookback, "Wait classification lookback in seconds");

    auto* offcpu_cmd = app.add_subcommand("offcpu", "Off-CPU wait attribution");
    add_common(offcpu_cmd, offcpu_opt);
    OffcpuArgs offcpu_args;
    offcpu_cmd->add_option("--lock-symbols", offcpu_args.lock_symbols, "Comma list replacing the lock symbol set");
    offcpu_cmd->add_option("--lookback", offcpu_args.lookback, "Wait classification lookback in seconds");

    auto* locks_cmd = app.add_subcommand("locks", "Lock contention and deadlock risk");
    add_common(locks_cmd, locks_opt);
    std::string acquisitions_path, basis = "wait";
    std::size_t max_cycle = 8;
    locks_cmd->add_option("--acquisitions", acquisitions_path, "Acquisition CSV (tid,lock_id,request,grant,release)");
    locks_cmd->add_option("--basis", basis, "Time columns measure wait or hold")
        ->check(CLI::IsMember({"wait", "hold"}))
        ->capture_default_str();
    locks_cmd->add_option("--max-cycle", max_cycle, "Longest lock cycle to report")->capture_default_str();

    auto* graph_cmd = app.add_subcommand("graph", "Dependency graph queries on an edge list");
    add_common(graph_cmd, graph_opt, false);
    std::string cp_source;
    std::vector<std::string> shortest;
    bool cycles = false, mst = false, topo = false, undirected = false;
    auto* g_cp = graph_cmd->add_option("--critical-path", cp_source, "Heaviest path from SRC");
    auto* g_cy = graph_cmd->add_flag("--cycles", cycles, "Elementary cycles");
    auto* g_sp = graph_cmd->add_option("--shortest", shortest, "Lightest path A B")->expected(2);
    auto* g_mst = graph_cmd->add_flag("--mst", mst, "Minimum spanning tree (with --undirected)");
    auto* g_topo = graph_cmd->add_flag("--topo", topo, "Topological order");
    graph_cmd->add_flag("--undirected", undirected, "Treat edges as undirected");
    graph_cmd->add_option("--max-cycle", max_cycle, "Longest cycle to report")->capture_default_str();
    for (auto* a : {g_cp, g_cy, g_sp, g_mst, g_topo}) {
        for (auto* b : {g_cp, g_cy, g_sp, g_mst, g_topo}) {
            if (a != b) a->excludes(b);
        }
    }

    auto* sim_cmd = app.add_subcommand("simulate", "Producer-consumer trace generator");
    sim::SimConfig cfg;
    std::string produce_time = "0.001", consume_time = "0.001", cs_time = "0.0001", time_limit = "3600";
    std::string sim_out, truth_out, acq_out;
    bool check = false;
    sim_cmd->add_option("--producers", cfg.producers)->capture_default_str();
    sim_cmd->add_option("--consumers", cfg.consumers)->capture_default_str();
    sim_cmd->add_option("--queues", cfg.queues)->capture_default_str();
    sim_cmd->add_option("--capacity", cfg.capacity)->capture_default_str();
    sim_cmd->add_option("--items", cfg.items_per_producer, "Items per producer")->capture_default_str();
    sim_cmd->add_option("--produce-time", produce_time, "Seconds")->capture_default_str();
    sim_cmd->add_option("--consume-time", consume_time, "Seconds")->capture_default_str();
    sim_cmd->add_option("--cs-time", cs_time, "Critical section seconds")->capture_default_str();
    sim_cmd->add_option("--seed", cfg.seed)->capture_default_str();
    sim_cmd->add_option("--jitter", cfg.jitter, "Relative duration jitter in [0,1]")->capture_default_str();
    sim_cmd->add_flag("--inverted-wait-order", cfg.inverted_wait_order, "Take the mutex before the slot");
    sim_cmd->add_option("--time-limit", time_limit, "Seconds of simulated time")->capture_default_str();
    sim_cmd->add_option("-o,--out", sim_out, "Trace output (default: standard output)");
    sim_cmd->add_option("--truth", truth_out, "Write the ground-truth ledger as JSON");
    sim_cmd->add_option("--acquisitions", acq_out, "Write the lock acquisition stream as CSV");
    sim_cmd->add_flag("--check", check, "Replay the trace through the analyzer and compare with the ledger");

    auto* export_cmd = app.add_subcommand("export", "Dashboard data files");
    add_common(export_cmd, export_opt, false);
    std::string export_format = "csv", index = std::string(kDefaultIndex), bin_width = "1", pie_mode = "comm";
    export_cmd->add_option("--format", export_format, "csv|bulk|json")
        ->check(CLI::IsMember({"csv", "bulk", "json"}))
        ->capture_default_str();
    export_cmd->add_option("--input-format", export_opt.format, "Input format override");
    export_cmd->add_option("--index", index, "Bulk index name")->capture_default_str();
    export_cmd->add_option("--bin-width", bin_width, "Histogram bin width in seconds")->capture_default_str();
    export_cmd->add_option("--pie-mode", pie_mode, "comm or comm_dso")
        ->check(CLI::IsMember({"comm", "comm_dso"}))
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "latprof: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (parse_cmd->parsed()) {
            auto inputs = load_inputs(parse_opt, in, err);
            write_output(parse_opt.out, parse_ndjson(inputs), out);
        } else if (report_cmd->parsed()) {
            auto inputs = load_inputs(report_opt, in, err);
            SampleFilter filter;
            if (!sample_event.empty()) filter.event = sample_event;
            auto profile = profile_or_empty(inputs.events, parse_group_by(sort_keys), filter);
            auto tables = table_profile(inputs);
            profile.insert(profile.end(), tables.begin(), tables.end());
            auto waits = wait_summary(inputs.events, offcpu_options(report_offcpu));
            write_output(report_opt.out, render_text_report(profile, waits, inputs.mutexes, report_opt.top), out);
        } else if (offcpu_cmd->parsed()) {
            auto inputs = load_inputs(offcpu_opt, in, err);
            write_output(offcpu_opt.out, render_offcpu(inputs.events, offcpu_options(offcpu_args), offcpu_opt.top),
                         out);
        } else if (locks_cmd->parsed()) {
            std::vector<MutexStats> rows;
            if (!locks_opt.inputs.empty() || acquisitions_path.empty()) rows = load_inputs(locks_opt, in, err).mutexes;
            std::optional<LockOrderGraph> order;
            if (!acquisitions_path.empty()) {
                const auto text = acquisitions_path == "-" ? read_stream(in) : read_file(acquisitions_path);
                auto parsed = parse_acquisitions_csv(text, locks_opt.strict ? ParseMode::strict : ParseMode::lenient);
                for (const auto& e : parsed.errors) err << acquisitions_path << ": " << describe(e) << "\n";
                auto stats = contention_stats(parsed.items, basis == "hold" ? StatBasis::hold : StatBasis::wait);
                rows.insert(rows.end(), stats.begin(), stats.end());
                order = build_lock_order_graph(parsed.items);
            }
            write_output(locks_opt.out, render_locks(rows, order, max_cycle), out);
        } else if (graph_cmd->parsed()) {
            std::string text;
            if (graph_opt.inputs.empty()) {
                text = read_stream(in);
            } else {
                for (const auto& p : graph_opt.inputs) text += (p == "-" ? read_stream(in) : read_file(p)) + "\n";
            }
            Graph g = parse_edge_list(text, undirected);
            std::ostringstream os;
            if (!cp_source.empty()) {
                auto p = critical_path(g, cp_source);
                os << join(p.nodes, " -> ") << "\nweight " << p.weight.to_string() << "\n";
            } else if (!shortest.empty()) {
                auto p = shortest_path(g, shortest[0], shortest[1]);
                os << join(p.nodes, " -> ") << "\nweight " << p.weight.to_string() << "\n";
            } else if (mst) {
                auto t = minimum_spanning_tree(g);
                for (const auto& e : t.edges) os << e.src << " -- " << e.dst << "  " << e.weight.to_string() << "\n";
                os << "total " << t.total.to_string() << "\n";
            } else if (cycles) {
                auto found = detect_cycles(g, max_cycle);
                if (found.empty()) os << "no cycles\n";
                for (const auto& c : found) os << join(c, " -> ") << " -> " << c.front() << "\n";
            } else if (topo) {
                os << join(topo_sort(g), "\n") << "\n";
            } else {
                throw UsageError("graph needs one of --critical-path, --cycles, --shortest, --mst, --topo");
            }
            write_output(graph_opt.out, os.str(), out);
        } else if (sim_cmd->parsed()) {
            cfg.produce_time = parse_seconds(produce_time, "--produce-time");
            cfg.consume_time = parse_seconds(consume_time, "--consume-time");
            cfg.critical_section_time = parse_seconds(cs_time, "--cs-time");
            cfg.time_limit = parse_seconds(time_limit, "--time-limit");
            try {
                sim::validate(cfg);
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
            auto result = sim::simulate(cfg);
            const auto trace = render_perf_script(result.events);
            if (!truth_out.empty()) write_output(truth_out, sim::truth_to_json(result.truth), out);
            if (!acq_out.empty()) write_output(acq_out, write_acquisitions_csv(result.acquisitions), out);
            const auto& t = result.truth;
            err << "simulate: " << (t.completed ? "completed" : t.deadlocked ? "deadlocked" : "time limit reached")
                << " at " << format_seconds(t.completion - Timestamp{}) << " s, " << t.event_count << " events, "
                << t.produced << " produced, " << t.consumed << " consumed\n";
            if (check) {
                if (!sim_out.empty()) write_output(sim_out, trace, out);
                auto reparsed = parse_perf_script(trace, ParseMode::strict).items;
                auto report = sim::replay_check(reparsed, result.truth);
                out << report.to_text();
                return report.clean() ? kExitOk : kExitAnalysis;
            }
            write_output(sim_out, trace, out);
        } else if (export_cmd->parsed()) {
            auto inputs = load_inputs(export_opt, in, err);
            const auto& events = inputs.events;
            std::string data;
            if (export_format == "csv") {
                data = to_csv(events);
            } else if (export_format == "bulk") {
                data = to_bulk_ndjson(events, index);
            } else {
                ReportData rd;
                rd.profile = profile_or_empty(events, GroupBy{true, true, false}, {});
                rd.waits = wait_summary(events, {});
                rd.mutex_stats = inputs.mutexes;
                rd.histogram = events_per_second(events, parse_seconds(bin_width, "--bin-width"));
                if (!events.empty()) rd.pie = utilization_pie(events, pie_mode == "comm" ? PieMode::comm : PieMode::comm_dso);
                data = to_json_report(rd);
            }
            write_output(export_opt.out, data, out);
        }
    } catch (const UsageError& e) {
        err << "latprof: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CycleError& e) {
        err << "latprof: " << e.what() << ": " << join(e.witness(), " -> ") << "\n";
        return kExitAnalysis;
    } catch (const Error& e) {
        err << "latprof: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitOk;
}

} // namespace latprof::cli
