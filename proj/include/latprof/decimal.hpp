#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace latprof {

/// Exact fixed-point number with nine fractional digits.
///
/// Every decimal literal a profiler prints (percentages, seconds, milliseconds)
/// fits exactly, so values read from text compare and add without drift.
/// Range is roughly +/-9.2e9.
class Decimal {
  public:
    static constexpr int kDigits = 9;
    static constexpr std::int64_t kScale = 1'000'000'000;

    constexpr Decimal() = default;

    static constexpr Decimal from_units(std::int64_t units) {
        Decimal d;
        d.units_ = units;
        return d;
    }
    static constexpr Decimal from_int(std::int64_t v) { return from_units(v * kScale); }

    /// Parses `[+-]digits[.digits]` or `[+-].digits` in the C locale. Returns
    /// nullopt on any other shape, on more than nine fractional digits, or on
    /// overflow.
    static std::optional<Decimal> parse(std::string_view text);

    constexpr std::int64_t units() const { return units_; }
    double to_double() const { return static_cast<double>(units_) / kScale; }

    enum class Rounding { nearest, truncate };
    /// Fixed notation with exactly `frac_digits` digits after the point.
    std::string format(int frac_digits, Rounding mode = Rounding::nearest) const;
    /// Shortest exact representation ("0.5", "3", "45381.448").
    std::string to_string() const;

    friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
    friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
    friend constexpr Decimal operator*(Decimal a, std::int64_t k) { return from_units(a.units_ * k); }
    Decimal& operator+=(Decimal o) {
        units_ += o.units_;
        return *this;
    }
    /// Division by an integer, rounded half away from zero to the last digit.
    Decimal divided_by(std::int64_t k) const;

    friend constexpr auto operator<=>(Decimal, Decimal) = default;
    friend constexpr bool operator==(Decimal, Decimal) = default;

  private:
    std::int64_t units_ = 0;
};

} // namespace latprof
