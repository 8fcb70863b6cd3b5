#pragma once

#include "latprof/decimal.hpp"
#include "latprof/error.hpp"
#include "latprof/trace_model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latprof {

enum class ParseMode { lenient, strict };

/// Items recovered from an input plus the lines that were rejected. In strict
/// mode the first rejected line is thrown as ParseError instead.
template <typename T>
struct ParseOutcome {
    std::vector<T> items;
    std::vector<LineError> errors;
};

struct GprofRow {
    Decimal percent_time;
    Decimal cumulative_s;
    Decimal self_s;
    std::optional<std::uint64_t> calls;
    std::optional<Decimal> self_ms_per_call;
    std::optional<Decimal> total_ms_per_call;
    std::string name;

    friend bool operator==(const GprofRow&, const GprofRow&) = default;
};

struct ImageProfileRow {
    std::string symbol;
    Decimal percent;
    std::string image;

    friend bool operator==(const ImageProfileRow&, const ImageProfileRow&) = default;
};

/// One row of a mutrace-style summary. Times are milliseconds.
struct MutexStats {
    std::uint64_t mutex_id = 0;
    std::uint64_t locked = 0;
    std::uint64_t changed = 0;
    std::uint64_t contended = 0;
    Decimal total_ms;
    Decimal avg_ms;
    Decimal max_ms;
    std::string flags;

    friend bool operator==(const MutexStats&, const MutexStats&) = default;
};

/// Empty when the row satisfies the count and timing invariants, otherwise a
/// short description of the first violation.
std::optional<std::string> check_mutex_stats(const MutexStats& s);

struct SyscallRecord {
    Decimal rel_ts;
    std::string name;
    std::string args_text;
    std::string retval;
    std::optional<Decimal> wall_duration_s;

    friend bool operator==(const SyscallRecord&, const SyscallRecord&) = default;
};

/// perf script text. Header grammar:
///
///     comm  pid/tid [cpu] sec.frac: [period] event: payload
///     comm  tid [cpu] sec.frac: [period] event: payload
///
/// followed by indented frame lines `addr symbol[+0xoff] (dso)`, leaf first,
/// terminated by a blank line or the next header.
ParseOutcome<TraceEvent> parse_perf_script(std::string_view text, ParseMode mode = ParseMode::lenient);

/// Parses a single header line (no stack). Returns nullopt and fills `reason`
/// when the line matches no header form.
std::optional<TraceEvent> parse_perf_header(std::string_view line, std::string* reason = nullptr);

/// Splits a tracepoint payload into key=value args, or stores it whole under
/// "raw" when any token is not key=value. The "==>" separator is skipped.
EventArgs parse_payload(std::string_view payload);

ParseOutcome<GprofRow> parse_gprof_flat(std::string_view text, ParseMode mode = ParseMode::lenient);
ParseOutcome<ImageProfileRow> parse_oprofile_flat(std::string_view text, ParseMode mode = ParseMode::lenient);
ParseOutcome<MutexStats> parse_mutrace(std::string_view text, ParseMode mode = ParseMode::lenient);
ParseOutcome<SyscallRecord> parse_strace(std::string_view text, ParseMode mode = ParseMode::lenient);

enum class InputFormat { perf, gprof, oprofile, mutrace, strace };

std::string_view to_string(InputFormat f);
std::optional<InputFormat> parse_input_format(std::string_view name);

/// Guesses the format from the first non-blank line.
std::optional<InputFormat> sniff_format(std::string_view text);

namespace detail {

/// Line splitter that tracks 1-based line numbers and strips a trailing CR.
class LineReader {
  public:
    explicit LineReader(std::string_view text) : text_(text) {}
    bool next(std::string_view& line);
    std::size_t line_number() const { return line_no_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
bool is_blank(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_hex(std::string_view s);

} // namespace detail

} // namespace latprof
