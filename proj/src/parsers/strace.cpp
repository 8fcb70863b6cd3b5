#include "latprof/parsers.hpp"

#include "sink.hpp"

#include <map>

namespace latprof {

using detail::trim;

namespace {

struct Pending {
    SyscallRecord record;
    std::size_t line = 0;
};

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Strips a trailing -T duration "<0.000011>" if present.
std::optional<Decimal> take_duration(std::string_view& s) {
    s = trim(s);
    if (s.empty() || s.back() != '>') return std::nullopt;
    auto open = s.rfind('<');
    if (open == std::string_view::npos) return std::nullopt;
    auto d = Decimal::parse(s.substr(open + 1, s.size() - open - 2));
    if (!d || *d < Decimal{}) return std::nullopt;
    s = trim(s.substr(0, open));
    return d;
}

// Splits "args) = ret" at the last ") = ". Returns false if absent.
bool split_result(std::string_view s, std::string_view& args, std::string_view& ret) {
    auto pos = s.rfind(") = ");
    if (pos == std::string_view::npos) {
        if (s.ends_with(") =")) {
            args = s.substr(0, s.size() - 3);
            ret = {};
            return true;
        }
        return false;
    }
    args = s.substr(0, pos);
    ret = trim(s.substr(pos + 4));
    return true;
}

std::string join_args(std::string_view head, std::string_view tail) {
    head = trim(head);
    tail = trim(tail);
    if (head.empty()) return std::string(tail);
    if (tail.empty()) return std::string(head);
    return std::string(head) + " " + std::string(tail);
}

} // namespace

ParseOutcome<SyscallRecord> parse_strace(std::string_view text, ParseMode mode) {
    detail::Sink<SyscallRecord> sink(mode);
    detail::LineReader reader(text);
    std::map<std::int64_t, Pending> pending; // keyed by pid, 0 without -f
    std::string_view raw;
    while (reader.next(raw)) {
        auto line = trim(raw);
        if (line.empty()) continue;
        const std::size_t ln = reader.line_number();
        auto bad = [&](const char* why) { sink.fail(ParseErrorKind::malformed_row, ln, why); };

        std::int64_t pid = 0;
        if (line.starts_with("[pid")) {
            auto close = line.find(']');
            auto p = close == std::string_view::npos ? std::nullopt : detail::parse_int(trim(line.substr(4, close - 4)));
            if (!p) {
                bad("bad [pid N] prefix");
                continue;
            }
            pid = *p;
            line = trim(line.substr(close + 1));
        }
        auto sp = line.find_first_of(" \t");
        auto rel = Decimal::parse(line.substr(0, sp));
        if (sp == std::string_view::npos || !rel || *rel < Decimal{}) {
            bad("expected relative timestamp");
            continue;
        }
        std::string_view rest = trim(line.substr(sp));
        if (rest.starts_with("---") || rest.starts_with("+++")) continue; // signal or exit notice

        if (rest.starts_with("<...")) {
            auto mark = rest.find(" resumed>");
            auto it = pending.find(pid);
            if (mark == std::string_view::npos) {
                bad("bad resumed line");
                continue;
            }
            auto name = trim(rest.substr(4, mark - 4));
            if (it == pending.end() || it->second.record.name != name) {
                bad("resumed syscall without matching unfinished line");
                continue;
            }
            std::string_view tail = rest.substr(mark + 9);
            auto dur = take_duration(tail);
            std::string_view args, ret;
            if (!split_result(tail, args, ret)) {
                bad("missing `) = retval`");
                continue;
            }
            SyscallRecord rec = std::move(it->second.record);
            pending.erase(it);
            rec.args_text = join_args(rec.args_text, args);
            rec.retval = std::string(ret);
            rec.wall_duration_s = dur;
            sink.add(std::move(rec));
            continue;
        }

        auto paren = rest.find('(');
        if (paren == std::string_view::npos || paren == 0) {
            bad("expected name(args)");
            continue;
        }
        auto name = rest.substr(0, paren);
        bool ok_name = true;
        for (char c : name) ok_name = ok_name && is_name_char(c);
        if (!ok_name) {
            bad("bad syscall name");
            continue;
        }
        std::string_view after = rest.substr(paren + 1);
        if (auto u = after.rfind("<unfinished ...>"); u != std::string_view::npos) {
            if (pending.count(pid)) bad("unfinished syscall interrupted by another unfinished one");
            SyscallRecord rec{*rel, std::string(name), std::string(trim(after.substr(0, u))), {}, std::nullopt};
            pending[pid] = Pending{std::move(rec), ln};
            continue;
        }
        auto dur = take_duration(after);
        std::string_view args, ret;
        if (!split_result(after, args, ret)) {
            bad("missing `) = retval`");
            continue;
        }
        sink.add(SyscallRecord{*rel, std::string(name), std::string(args), std::string(ret), dur});
    }
    for (auto& [pid, p] : pending) sink.add(std::move(p.record)); // never resumed before EOF
    return sink.finish();
}

} // namespace latprof
