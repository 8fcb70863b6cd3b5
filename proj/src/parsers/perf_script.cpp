#include "latprof/parsers.hpp"

#include "sink.hpp"

namespace latprof {

using detail::parse_hex;
using detail::parse_int;
using detail::parse_uint;
using detail::split_ws;
using detail::trim;

namespace {

// Consumes one whitespace-delimited token from the front of `s`.
std::string_view take_token(std::string_view& s) {
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    auto tok = s.substr(i, j - i);
    s.remove_prefix(j);
    return tok;
}

std::optional<Frame> parse_frame(std::string_view line) {
    line = trim(line);
    std::string_view rest = line;
    auto addr_tok = take_token(rest);
    auto addr = parse_hex(addr_tok);
    if (!addr) return std::nullopt;
    Frame f;
    f.address = *addr;
    rest = trim(rest);
    if (!rest.empty() && rest.back() == ')') {
        auto open = rest.rfind('(');
        // the dso is the last parenthesised group, separated by whitespace
        while (open != std::string_view::npos && open > 0 && rest[open - 1] != ' ' && rest[open - 1] != '\t') {
            open = rest.rfind('(', open - 1);
        }
        if (open != std::string_view::npos) {
            auto dso = rest.substr(open + 1, rest.size() - open - 2);
            if (!dso.empty() && dso != "[unknown]" && dso != "unknown") f.dso = std::string(dso);
            rest = trim(rest.substr(0, open));
        }
    }
    if (!rest.empty() && rest != "[unknown]") {
        auto plus = rest.rfind("+0x");
        if (plus != std::string_view::npos && plus > 0) {
            if (auto off = parse_hex(rest.substr(plus + 1))) {
                f.offset = *off;
                rest = rest.substr(0, plus);
            }
        }
        f.symbol = std::string(rest);
    }
    return f;
}

} // namespace

EventArgs parse_payload(std::string_view payload) {
    EventArgs args;
    payload = trim(payload);
    if (payload.empty()) return args;
    EventArgs kv;
    for (auto tok : split_ws(payload)) {
        if (tok == "==>") continue;
        auto eq = tok.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            args.set("raw", std::string(payload));
            return args;
        }
        kv.set(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    }
    return kv;
}

std::optional<TraceEvent> parse_perf_header(std::string_view line, std::string* reason) {
    auto fail = [&](const char* why) -> std::optional<TraceEvent> {
        if (reason) *reason = why;
        return std::nullopt;
    };
    std::string_view rest = trim(line);
    auto comm = take_token(rest);
    if (comm.empty()) return fail("empty line");
    auto ids = take_token(rest);
    std::optional<std::int64_t> pid, tid;
    if (auto slash = ids.find('/'); slash != std::string_view::npos) {
        pid = parse_int(ids.substr(0, slash));
        tid = parse_int(ids.substr(slash + 1));
    } else {
        tid = parse_int(ids);
        pid = tid;
    }
    if (!pid || !tid) return fail("expected pid/tid after comm (comm may not contain spaces)");
    if (*pid < 0 || *tid < 0) return fail("negative pid/tid");
    auto cpu_tok = take_token(rest);
    if (cpu_tok.size() < 3 || cpu_tok.front() != '[' || cpu_tok.back() != ']') return fail("expected [cpu]");
    auto cpu = parse_uint(cpu_tok.substr(1, cpu_tok.size() - 2));
    if (!cpu || *cpu > 1u << 20) return fail("bad cpu index");
    auto ts_tok = take_token(rest);
    if (ts_tok.size() < 2 || ts_tok.back() != ':') return fail("expected timestamp followed by ':'");
    auto ts = Timestamp::parse(ts_tok.substr(0, ts_tok.size() - 1));
    if (!ts) return fail("bad timestamp");
    auto ev_tok = take_token(rest);
    std::uint64_t period = 1;
    if (auto p = parse_uint(ev_tok)) {
        period = *p;
        ev_tok = take_token(rest);
    }
    if (ev_tok.size() < 2 || ev_tok.back() != ':') return fail("expected event name followed by ':'");
    TraceEvent e = make_event(std::string(comm), *pid, *tid, static_cast<std::int32_t>(*cpu), *ts,
                              std::string(ev_tok.substr(0, ev_tok.size() - 1)));
    e.period = period;
    e.args = parse_payload(rest);
    return e;
}

ParseOutcome<TraceEvent> parse_perf_script(std::string_view text, ParseMode mode) {
    detail::Sink<TraceEvent> sink(mode);
    detail::LineReader reader(text);
    std::optional<TraceEvent> current;
    auto flush = [&] {
        if (current) sink.add(std::move(*current));
        current.reset();
    };
    std::string_view line;
    while (reader.next(line)) {
        if (detail::is_blank(line)) {
            flush();
            continue;
        }
        if (trim(line).front() == '#') continue;
        std::string why;
        if (auto ev = parse_perf_header(line, &why)) {
            flush();
            current = std::move(ev);
            continue;
        }
        const bool indented = line.front() == ' ' || line.front() == '\t';
        if (indented) {
            if (auto frame = parse_frame(line)) {
                if (current) {
                    current->stack.push_back(std::move(*frame));
                } else {
                    sink.fail(ParseErrorKind::malformed_line, reader.line_number(),
                              "stack frame without a sample header");
                }
                continue;
            }
        }
        flush();
        sink.fail(ParseErrorKind::malformed_line, reader.line_number(), why);
    }
    flush();
    return sink.finish();
}

} // namespace latprof
