#pragma once

#include "latprof/lock_analysis.hpp"
#include "latprof/parsers.hpp"
#include "latprof/profile_agg.hpp"
#include "latprof/sched_analysis.hpp"
#include "latprof/trace_model.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latprof {

/// Flattened view of one event as it appears in the CSV and bulk exports.
struct EventRecord {
    std::string timestamp_rel; // seconds since the trace origin, "ss.SSS", truncated
    std::string comm;
    std::int64_t pid = 0;
    std::int64_t tid = 0;
    std::int32_t cpu = 0;
    std::string event;
    std::string dso;    // leaf frame's, or empty
    std::string symbol; // leaf frame's, or empty
    std::int64_t ts_ns = 0; // absolute; carried by the bulk format only

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Relative times use `origin` when given, else the earliest event.
std::vector<EventRecord> to_records(const std::vector<TraceEvent>& events,
                                    std::optional<Timestamp> origin = std::nullopt);

/// perf script text that parse_perf_script reads back to the same events.
std::string render_perf_script(const std::vector<TraceEvent>& events);

inline constexpr std::string_view kCsvHeader = "timestamp,comm,pid,tid,cpu,event,dso,symbol";

std::string to_csv(const std::vector<TraceEvent>& events);
/// Reads to_csv output back. ts_ns stays 0. Throws ParseError.
std::vector<EventRecord> parse_csv_records(std::string_view text);

inline constexpr std::string_view kDefaultIndex = "linuxperf";

/// Action/document line pairs for a bulk indexing request. Throws
/// AnalysisError(bad_index_name) unless `index_name` matches [a-z0-9_-]+.
std::string to_bulk_ndjson(const std::vector<TraceEvent>& events, std::string_view index_name = kDefaultIndex);
/// Documents of a bulk file, in order. Throws ParseError.
std::vector<EventRecord> parse_bulk_ndjson(std::string_view text);

struct HistogramView {
    Duration bin_width = std::chrono::seconds(1);
    /// bin index -> comm -> count. Bins start at 0; every bin up to the last
    /// occupied one is present.
    std::vector<std::map<std::string, std::uint64_t>> bins;

    Duration bin_start(std::size_t i) const { return bin_width * static_cast<std::int64_t>(i); }
    std::uint64_t total() const;
};

/// Throws AnalysisError(invalid_argument) unless bin_width > 0.
HistogramView events_per_second(const std::vector<TraceEvent>& events, Duration bin_width = std::chrono::seconds(1));

enum class PieMode { comm, comm_dso };

struct PieView {
    /// Key is the comm, or "comm (dso)" in comm_dso mode.
    std::map<std::string, double> slices;
};

/// Sample events (cpu-clock) weigh their period, others count once. Throws
/// AnalysisError(empty_input).
PieView utilization_pie(const std::vector<TraceEvent>& events, PieMode mode = PieMode::comm);

inline constexpr std::string_view kMutexTableHeader =
    "Mutex #   Locked  Changed    Cont. tot.Time[ms] avg.Time[ms] max.Time[ms]  Flags";

std::string format_mutex_row(const MutexStats& s);

/// Fixed-width text: flat profile, wait totals by reason, lock table.
std::string render_text_report(const std::vector<FlatProfileRow>& profile, const WaitSummary& waits,
                               const std::vector<MutexStats>& mutex_stats, std::size_t top_n = 20);

struct ReportData {
    std::vector<FlatProfileRow> profile;
    WaitSummary waits;
    std::vector<MutexStats> mutex_stats;
    HistogramView histogram;
    std::optional<PieView> pie;
};

/// One JSON document holding every view; keys are stable, output ASCII.
std::string to_json_report(const ReportData& data);

} // namespace latprof
