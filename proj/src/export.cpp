#include "latprof/export.hpp"

#include "latprof/error.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace latprof {

namespace {

using ojson = nlohmann::ordered_json;

std::string printf_string(const char* fmt, auto... args) {
    int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string s(static_cast<std::size_t>(n) + 1, '\0');
    std::snprintf(s.data(), s.size(), fmt, args...);
    s.pop_back();
    return s;
}

std::string dump(const ojson& j, int indent = -1) {
    return j.dump(indent, ' ', true, ojson::error_handler_t::replace);
}

std::string relative_ms(Timestamp ts, Timestamp origin) { return Timestamp::from_ns((ts - origin).count()).format(3); }

std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// RFC-4180 records; quoted fields may span lines.
std::vector<std::vector<std::string>> read_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, field_started = false;
    std::size_t line = 1;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_field();
            rows.push_back(std::move(row));
            row.clear();
            ++line;
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw ParseError({ParseErrorKind::malformed_row, line, "unterminated quoted field"});
    if (field_started || !row.empty()) {
        end_field();
        rows.push_back(std::move(row));
    }
    return rows;
}

bool valid_index_name(std::string_view name) {
    return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

std::uint64_t sample_weight(const TraceEvent& e) { return e.event_class == EventClass::cpu_clock ? e.period : 1; }

std::string profile_key_text(const ProfileKey& k) {
    std::string out;
    auto add = [&](const std::optional<std::string>& v, std::string_view absent) {
        if (!out.empty()) out += "  ";
        out += v ? *v : std::string(absent);
    };
    if (k.comm) add(k.comm, "");
    if (k.dso) add(k.dso, "[unknown]");
    if (k.symbol) add(k.symbol, "[unknown]");
    return out;
}

ojson profile_key_json(const ProfileKey& k) {
    ojson j = ojson::object();
    if (k.comm) j["comm"] = *k.comm;
    if (k.dso) j["dso"] = *k.dso;
    if (k.symbol) j["symbol"] = *k.symbol;
    return j;
}

} // namespace

std::vector<EventRecord> to_records(const std::vector<TraceEvent>& events, std::optional<Timestamp> origin) {
    const Timestamp zero = origin ? *origin : trace_origin(events);
    std::vector<EventRecord> out;
    out.reserve(events.size());
    for (const auto& e : events) {
        EventRecord r;
        r.timestamp_rel = relative_ms(e.ts, zero);
        r.comm = e.comm;
        r.pid = e.pid;
        r.tid = e.tid;
        r.cpu = e.cpu;
        r.event = e.event;
        if (const Frame* leaf = e.leaf()) {
            r.dso = leaf->dso.value_or("");
            r.symbol = leaf->symbol.value_or("");
        }
        r.ts_ns = e.ts.ns();
        out.push_back(std::move(r));
    }
    return out;
}

std::string render_perf_script(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += printf_string("%16s %" PRId64 "/%" PRId64 " [%03d] %s: ", e.comm.c_str(), e.pid, e.tid, e.cpu,
                             e.ts.format(9).c_str());
        if (e.period != 1) out += std::to_string(e.period) + " ";
        out += e.event + ":";
        const auto& entries = e.args.entries();
        if (entries.size() == 1 && entries.front().first == "raw") {
            out += " " + entries.front().second;
        } else {
            for (const auto& [k, v] : entries) {
                if (k == "next_comm") out += " ==>";
                out += " " + k + "=" + v;
            }
        }
        out += "\n";
        for (const auto& f : e.stack) {
            out += printf_string("\t%16" PRIx64 " %s", f.address, f.symbol_or_unknown().c_str());
            if (f.symbol && f.offset) out += printf_string("+0x%" PRIx64, *f.offset);
            out += " (" + f.dso.value_or("[unknown]") + ")\n";
        }
        if (!e.stack.empty()) out += "\n";
    }
    return out;
}

std::string to_csv(const std::vector<TraceEvent>& events) {
    std::string out(kCsvHeader);
    out += "\n";
    for (const auto& r : to_records(events)) {
        out += r.timestamp_rel + "," + csv_field(r.comm) + "," + std::to_string(r.pid) + "," + std::to_string(r.tid) +
               "," + std::to_string(r.cpu) + "," + csv_field(r.event) + "," + csv_field(r.dso) + "," +
               csv_field(r.symbol) + "\n";
    }
    return out;
}

std::vector<EventRecord> parse_csv_records(std::string_view text) {
    auto rows = read_csv(text);
    if (rows.empty() || rows.front().size() != 8) {
        throw ParseError({ParseErrorKind::missing_header, 1, "expected CSV header " + std::string(kCsvHeader)});
    }
    std::vector<EventRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        auto pid = detail::parse_int(row.size() == 8 ? row[2] : "");
        auto tid = detail::parse_int(row.size() == 8 ? row[3] : "");
        auto cpu = detail::parse_int(row.size() == 8 ? row[4] : "");
        if (!pid || !tid || !cpu) {
            throw ParseError({ParseErrorKind::malformed_row, i + 1, "expected 8 fields with numeric pid, tid, cpu"});
        }
        out.push_back({row[0], row[1], *pid, *tid, static_cast<std::int32_t>(*cpu), row[5], row[6], row[7], 0});
    }
    return out;
}

std::string to_bulk_ndjson(const std::vector<TraceEvent>& events, std::string_view index_name) {
    if (!valid_index_name(index_name)) {
        throw AnalysisError(AnalysisErrorKind::bad_index_name,
                            "index name must match [a-z0-9_-]+: \"" + std::string(index_name) + "\"");
    }
    const std::string action = dump(ojson{{"index", {{"_index", std::string(index_name)}}}}) + "\n";
    std::string out;
    for (const auto& r : to_records(events)) {
        ojson doc;
        doc["timestamp"] = r.timestamp_rel;
        doc["comm"] = r.comm;
        doc["pid"] = r.pid;
        doc["tid"] = r.tid;
        doc["cpu"] = r.cpu;
        doc["event"] = r.event;
        doc["dso"] = r.dso;
        doc["symbol"] = r.symbol;
        doc["ts_ns"] = r.ts_ns;
        out += action;
        out += dump(doc) + "\n";
    }
    return out;
}

std::vector<EventRecord> parse_bulk_ndjson(std::string_view text) {
    std::vector<EventRecord> out;
    detail::LineReader reader(text);
    std::string_view line;
    bool expect_action = true;
    while (reader.next(line)) {
        if (detail::is_blank(line)) continue;
        try {
            auto j = ojson::parse(line);
            if (expect_action) {
                if (!j.contains("index")) throw ParseError({ParseErrorKind::malformed_line, reader.line_number(), "expected action line"});
            } else {
                out.push_back({j.at("timestamp").get<std::string>(), j.at("comm").get<std::string>(),
                               j.at("pid").get<std::int64_t>(), j.at("tid").get<std::int64_t>(),
                               j.at("cpu").get<std::int32_t>(), j.at("event").get<std::string>(),
                               j.at("dso").get<std::string>(), j.at("symbol").get<std::string>(),
                               j.at("ts_ns").get<std::int64_t>()});
            }
        } catch (const ojson::exception& e) {
            throw ParseError({ParseErrorKind::malformed_line, reader.line_number(), e.what()});
        }
        expect_action = !expect_action;
    }
    if (!expect_action) throw ParseError({ParseErrorKind::malformed_line, reader.line_number(), "action without document"});
    return out;
}

std::uint64_t HistogramView::total() const {
    std::uint64_t n = 0;
    for (const auto& bin : bins) {
        for (const auto& [k, c] : bin) n += c;
    }
    return n;
}

HistogramView events_per_second(const std::vector<TraceEvent>& events, Duration bin_width) {
    if (bin_width.count() <= 0) throw AnalysisError(AnalysisErrorKind::invalid_argument, "bin width must be positive");
    HistogramView h;
    h.bin_width = bin_width;
    const Timestamp origin = trace_origin(events);
    for (const auto& e : events) {
        auto bin = static_cast<std::size_t>((e.ts - origin).count() / bin_width.count());
        if (bin >= h.bins.size()) h.bins.resize(bin + 1);
        ++h.bins[bin][e.comm];
    }
    return h;
}

PieView utilization_pie(const std::vector<TraceEvent>& events, PieMode mode) {
    if (events.empty()) throw AnalysisError(AnalysisErrorKind::empty_input, "no events for the utilization pie");
    std::map<std::string, std::uint64_t> weights;
    std::uint64_t total = 0;
    for (const auto& e : events) {
        std::string key = e.comm;
        if (mode == PieMode::comm_dso) {
            const Frame* leaf = e.leaf();
            key += " (" + (leaf && leaf->dso ? *leaf->dso : std::string("[unknown]")) + ")";
        }
        weights[key] += sample_weight(e);
        total += sample_weight(e);
    }
    PieView pie;
    for (const auto& [k, w] : weights) pie.slices[k] = static_cast<double>(w) / static_cast<double>(total);
    return pie;
}

std::string format_mutex_row(const MutexStats& s) {
    return printf_string("%8" PRIu64 " %8" PRIu64 " %8" PRIu64 " %8" PRIu64 " %12s %12s %12s %s", s.mutex_id,
                         s.locked, s.changed, s.contended, s.total_ms.format(3).c_str(), s.avg_ms.format(3).c_str(),
                         s.max_ms.format(3).c_str(), s.flags.c_str());
}

std::string render_text_report(const std::vector<FlatProfileRow>& profile, const WaitSummary& waits,
                               const std::vector<MutexStats>& mutex_stats, std::size_t top_n) {
    std::ostringstream os;
    os << "# Flat profile\n";
    if (profile.empty()) {
        os << "(no data)\n";
    } else {
        auto rows = profile;
        std::stable_sort(rows.begin(), rows.end(),
                         [](const FlatProfileRow& a, const FlatProfileRow& b) { return a.percent > b.percent; });
        if (rows.size() > top_n) rows.resize(top_n);
        os << " Overhead   Samples   Weight  Key\n";
        for (const auto& r : rows) {
            os << printf_string("%8.2f%% %9" PRIu64 " %8" PRIu64 "  %s\n", r.percent, r.samples, r.weight,
                                profile_key_text(r.key).c_str());
        }
    }
    os << "\n# Off-CPU wait by reason\n";
    if (waits.empty()) {
        os << "(no data)\n";
    } else {
        os << "Reason              Total[s]     Count\n";
        for (const auto& [reason, total] : waits.by_reason()) {
            os << printf_string("%-14s %13s %9" PRIu64 "\n", std::string(to_string(reason)).c_str(),
                                format_seconds(total.total).c_str(), total.count);
        }
    }
    os << "\n# Lock contention\n";
    if (mutex_stats.empty()) {
        os << "(no data)\n";
    } else {
        os << kMutexTableHeader << "\n";
        for (const auto& s : mutex_stats) os << format_mutex_row(s) << "\n";
    }
    return os.str();
}

std::string to_json_report(const ReportData& data) {
    ojson j;
    auto profile = ojson::array();
    for (const auto& r : data.profile) {
        profile.push_back(
            {{"key", profile_key_json(r.key)}, {"samples", r.samples}, {"weight", r.weight}, {"percent", r.percent}});
    }
    j["profile"] = std::move(profile);

    ojson waits;
    auto by_reason = ojson::array();
    for (const auto& [reason, total] : data.waits.by_reason()) {
        by_reason.push_back({{"reason", to_string(reason)}, {"total_ns", total.total.count()}, {"count", total.count}});
    }
    waits["by_reason"] = std::move(by_reason);
    auto by_thread = ojson::array();
    for (const auto& [key, total] : data.waits.by_thread_reason) {
        by_thread.push_back({{"tid", key.first},
                             {"reason", to_string(key.second)},
                             {"total_ns", total.total.count()},
                             {"count", total.count}});
    }
    waits["by_thread_reason"] = std::move(by_thread);
    auto by_stack = ojson::array();
    for (const auto& [sig, total] : data.waits.by_stack) {
        by_stack.push_back({{"stack", sig}, {"total_ns", total.total.count()}, {"count", total.count}});
    }
    waits["by_stack"] = std::move(by_stack);
    auto hist = ojson::array();
    for (const auto& [bucket, n] : data.waits.histogram) hist.push_back({{"bucket", bucket}, {"count", n}});
    waits["histogram"] = std::move(hist);
    j["waits"] = std::move(waits);

    auto locks = ojson::array();
    for (const auto& s : data.mutex_stats) {
        locks.push_back({{"mutex", s.mutex_id},
                         {"locked", s.locked},
                         {"changed", s.changed},
                         {"contended", s.contended},
                         {"total_ms", s.total_ms.to_string()},
                         {"avg_ms", s.avg_ms.to_string()},
                         {"max_ms", s.max_ms.to_string()},
                         {"flags", s.flags}});
    }
    j["locks"] = std::move(locks);

    ojson histogram;
    histogram["bin_width_ns"] = data.histogram.bin_width.count();
    auto bins = ojson::array();
    for (std::size_t i = 0; i < data.histogram.bins.size(); ++i) {
        ojson counts = ojson::object();
        for (const auto& [comm, n] : data.histogram.bins[i]) counts[comm] = n;
        bins.push_back({{"start_ns", data.histogram.bin_start(i).count()}, {"counts", std::move(counts)}});
    }
    histogram["bins"] = std::move(bins);
    j["events_per_second"] = std::move(histogram);

    ojson pie = ojson::object();
    if (data.pie) {
        for (const auto& [k, f] : data.pie->slices) pie[k] = f;
    }
    j["utilization"] = std::move(pie);
    return dump(j, 2) + "\n";
}

} // namespace latprof
