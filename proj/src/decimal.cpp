#include "latprof/decimal.hpp"

#include <cstdlib>
#include <limits>

namespace latprof {

std::optional<Decimal> Decimal::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t i = 0;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++int_digits) {
        int d = text[i] - '0';
        if (whole > (kMax / kScale - d) / 10) return std::nullopt;
        whole = whole * 10 + d;
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++frac_digits) {
            if (frac_digits == static_cast<std::size_t>(kDigits)) return std::nullopt;
            frac = frac * 10 + (text[i] - '0');
        }
        if (frac_digits == 0 && int_digits == 0) return std::nullopt;
    }
    if (i != text.size() || (int_digits == 0 && frac_digits == 0)) return std::nullopt;
    for (std::size_t k = frac_digits; k < static_cast<std::size_t>(kDigits); ++k) frac *= 10;
    if (whole == kMax / kScale && frac > kMax % kScale) return std::nullopt;
    std::int64_t units = whole * kScale + frac;
    return from_units(negative ? -units : units);
}

Decimal Decimal::divided_by(std::int64_t k) const {
    std::int64_t q = units_ / k;
    std::int64_t r = units_ % k;
    if (2 * std::llabs(r) >= std::llabs(k)) q += ((units_ < 0) != (k < 0)) ? -1 : 1;
    return from_units(q);
}

std::string Decimal::format(int frac_digits, Rounding mode) const {
    if (frac_digits < 0) frac_digits = 0;
    if (frac_digits > kDigits) frac_digits = kDigits;
    std::int64_t step = 1;
    for (int k = frac_digits; k < kDigits; ++k) step *= 10;
    bool negative = units_ < 0;
    // magnitude in units of `step`
    std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(units_ + 1)) + 1 : static_cast<std::uint64_t>(units_);
    std::uint64_t q = mag / step;
    std::uint64_t r = mag % step;
    if (mode == Rounding::nearest && 2 * r >= static_cast<std::uint64_t>(step)) ++q;
    std::uint64_t frac_scale = static_cast<std::uint64_t>(kScale / step);
    std::uint64_t whole = q / frac_scale;
    std::uint64_t frac = q % frac_scale;
    std::string out;
    if (negative && q != 0) out.push_back('-');
    out += std::to_string(whole);
    if (frac_digits > 0) {
        std::string f = std::to_string(frac);
        out.push_back('.');
        out.append(static_cast<std::size_t>(frac_digits) - f.size(), '0');
        out += f;
    }
    return out;
}

std::string Decimal::to_string() const {
    std::string s = format(kDigits);
    auto dot = s.find('.');
    auto last = s.find_last_not_of('0');
    if (last == dot) return s.substr(0, dot);
    return s.substr(0, last + 1);
}

} // namespace latprof
