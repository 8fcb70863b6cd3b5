#include "latprof/parsers.hpp"

#include "sink.hpp"

namespace latprof {

using detail::parse_uint;
using detail::split_ws;
using detail::trim;

namespace {

const Decimal kHundred = Decimal::from_int(100);
const Decimal kZero{};

bool in_percent_range(Decimal d) { return d >= kZero && d <= kHundred; }

// Offset of token `tok` (a view into `line`) from the start of `line`.
std::size_t offset_in(std::string_view line, std::string_view tok) {
    return static_cast<std::size_t>(tok.data() - line.data());
}

bool is_gprof_header(const std::vector<std::string_view>& toks) {
    return toks.size() >= 3 && toks[0] == "time" && toks[1] == "seconds" && toks[2] == "seconds";
}

} // namespace

ParseOutcome<GprofRow> parse_gprof_flat(std::string_view text, ParseMode mode) {
    detail::Sink<GprofRow> sink(mode);
    detail::LineReader reader(text);
    std::string_view line;
    bool header_seen = false;
    while (reader.next(line)) {
        auto toks = split_ws(line);
        if (!header_seen) {
            header_seen = is_gprof_header(toks);
            continue;
        }
        if (toks.empty()) break; // flat table ends at the first blank line
        const std::size_t ln = reader.line_number();
        if (toks.size() < 4) {
            sink.fail(ParseErrorKind::malformed_row, ln, "expected at least three numeric columns and a name");
            continue;
        }
        auto pct = Decimal::parse(toks[0]);
        auto cum = Decimal::parse(toks[1]);
        auto self = Decimal::parse(toks[2]);
        if (!pct || !cum || !self) {
            sink.fail(ParseErrorKind::malformed_row, ln, "non-numeric time column");
            continue;
        }
        if (!in_percent_range(*pct) || *cum < kZero || *self < kZero) {
            sink.fail(ParseErrorKind::malformed_row, ln, "time column out of range");
            continue;
        }
        GprofRow row{*pct, *cum, *self, std::nullopt, std::nullopt, std::nullopt, {}};
        std::size_t name_tok = 3;
        if (toks.size() >= 7) {
            auto calls = parse_uint(toks[3]);
            auto self_ms = Decimal::parse(toks[4]);
            auto total_ms = Decimal::parse(toks[5]);
            if (calls && self_ms && total_ms) {
                row.calls = *calls;
                row.self_ms_per_call = *self_ms;
                row.total_ms_per_call = *total_ms;
                name_tok = 6;
            }
        }
        row.name = std::string(trim(line.substr(offset_in(line, toks[name_tok]))));
        sink.add(std::move(row));
    }
    if (!header_seen) sink.fail(ParseErrorKind::missing_header, 0, "gprof flat-profile column header not found");
    return sink.finish();
}

ParseOutcome<ImageProfileRow> parse_oprofile_flat(std::string_view text, ParseMode mode) {
    detail::Sink<ImageProfileRow> sink(mode);
    detail::LineReader reader(text);
    std::string_view line;
    bool any_row = false;
    while (reader.next(line)) {
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (!any_row && toks[0] == "Function") continue;
        const std::size_t ln = reader.line_number();
        any_row = true;
        if (toks.size() < 3) {
            sink.fail(ParseErrorKind::malformed_row, ln, "expected `symbol percent image`");
            continue;
        }
        // "13 .32" is accepted as 13.32
        std::string pct_text;
        for (std::size_t i = 1; i + 1 < toks.size(); ++i) pct_text += toks[i];
        auto pct = Decimal::parse(pct_text);
        if (!pct || Decimal::parse(toks.back())) {
            sink.fail(ParseErrorKind::malformed_row, ln, "expected `symbol percent image`");
            continue;
        }
        if (!in_percent_range(*pct)) {
            sink.fail(ParseErrorKind::malformed_row, ln, "percent out of range");
            continue;
        }
        sink.add(ImageProfileRow{std::string(toks[0]), *pct, std::string(toks.back())});
    }
    return sink.finish();
}

std::optional<std::string> check_mutex_stats(const MutexStats& s) {
    if (s.changed > s.locked) return "changed exceeds locked";
    if (s.contended > s.locked) return "contended exceeds locked";
    if (s.total_ms < kZero || s.avg_ms < kZero || s.max_ms < kZero) return "negative time";
    if (s.locked > 0) {
        if (s.max_ms < s.avg_ms) return "max below average";
        // |avg - total/locked| <= 0.0005 * locked, scaled through by locked
        const __int128 n = static_cast<__int128>(s.locked);
        __int128 diff = static_cast<__int128>(s.avg_ms.units()) * n - s.total_ms.units();
        if (diff < 0) diff = -diff;
        const __int128 tol = static_cast<__int128>(Decimal::parse("0.0005")->units()) * n * n;
        if (diff > tol) return "average inconsistent with total/locked";
    }
    return std::nullopt;
}

ParseOutcome<MutexStats> parse_mutrace(std::string_view text, ParseMode mode) {
    detail::Sink<MutexStats> sink(mode);
    detail::LineReader reader(text);
    std::string_view line;
    bool header_seen = false;
    while (reader.next(line)) {
        auto trimmed = trim(line);
        if (!header_seen) {
            header_seen = trimmed.starts_with("Mutex #");
            continue;
        }
        if (trimmed.empty()) break;
        const std::size_t ln = reader.line_number();
        auto toks = split_ws(trimmed);
        if (toks.size() != 7 && toks.size() != 8) {
            sink.fail(ParseErrorKind::malformed_row, ln, "expected 7 or 8 columns");
            continue;
        }
        auto id = parse_uint(toks[0]);
        auto locked = parse_uint(toks[1]);
        auto changed = parse_uint(toks[2]);
        auto cont = parse_uint(toks[3]);
        auto total = Decimal::parse(toks[4]);
        auto avg = Decimal::parse(toks[5]);
        auto max = Decimal::parse(toks[6]);
        if (!id || !locked || !changed || !cont || !total || !avg || !max) {
            sink.fail(ParseErrorKind::malformed_row, ln, "non-numeric column");
            continue;
        }
        MutexStats s{*id, *locked, *changed, *cont, *total, *avg, *max,
                     toks.size() == 8 ? std::string(toks[7]) : std::string()};
        if (auto bad = check_mutex_stats(s)) {
            sink.fail(ParseErrorKind::malformed_row, ln, *bad);
            continue;
        }
        sink.add(std::move(s));
    }
    if (!header_seen) sink.fail(ParseErrorKind::missing_header, 0, "mutrace `Mutex #` header not found");
    return sink.finish();
}

} // namespace latprof
