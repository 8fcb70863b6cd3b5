#include "latprof/parsers.hpp"

#include <charconv>

namespace latprof {
namespace detail {

bool LineReader::next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

std::optional<std::uint64_t> parse_uint(std::string_view s) {
    if (s.empty() || s.front() == '+' || s.front() == '-') return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    if (s.empty() || s.front() == '+') return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_hex(std::string_view s) {
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    if (s.empty() || s.size() > 16) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

} // namespace detail

std::string_view to_string(InputFormat f) {
    switch (f) {
    case InputFormat::perf: return "perf";
    case InputFormat::gprof: return "gprof";
    case InputFormat::oprofile: return "oprofile";
    case InputFormat::mutrace: return "mutrace";
    case InputFormat::strace: return "strace";
    }
    return "perf";
}

std::optional<InputFormat> parse_input_format(std::string_view name) {
    for (auto f : {InputFormat::perf, InputFormat::gprof, InputFormat::oprofile, InputFormat::mutrace,
                   InputFormat::strace}) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

namespace {

bool looks_like_strace(std::string_view line) {
    using namespace detail;
    if (line.starts_with("[pid")) {
        auto close = line.find(']');
        if (close == std::string_view::npos) return false;
        line = trim(line.substr(close + 1));
    }
    auto toks = split_ws(line);
    if (toks.size() < 2 || !Decimal::parse(toks[0])) return false;
    std::string_view rest = toks[1];
    return rest.find('(') != std::string_view::npos || rest == "<..." || rest == "---" || rest == "+++";
}

bool looks_like_gprof(const std::vector<std::string_view>& toks, std::string_view line) {
    if (line.starts_with("Flat profile") || line.starts_with("Each sample counts")) return true;
    if (toks.size() >= 3 && toks[0] == "time" && toks[1] == "seconds" && toks[2] == "seconds") return true;
    return toks.size() >= 2 && toks[0] == "%" && toks[1] == "cumulative";
}

bool looks_like_oprofile(const std::vector<std::string_view>& toks) {
    if (!toks.empty() && toks[0] == "Function") return true;
    if (toks.size() < 3) return false;
    std::string middle;
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) middle += toks[i];
    return Decimal::parse(middle).has_value();
}

} // namespace

std::optional<InputFormat> sniff_format(std::string_view text) {
    detail::LineReader reader(text);
    std::string_view raw;
    while (reader.next(raw)) {
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto toks = detail::split_ws(line);
        if (line.starts_with("Mutex #") || line.starts_with("mutrace:")) return InputFormat::mutrace;
        if (looks_like_gprof(toks, line)) return InputFormat::gprof;
        if (parse_perf_header(line)) return InputFormat::perf;
        if (looks_like_strace(line)) return InputFormat::strace;
        if (looks_like_oprofile(toks)) return InputFormat::oprofile;
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace latprof
