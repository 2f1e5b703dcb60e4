#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace cyclekit {

/// A calendar quarter. Ordered lexicographically by (year, q).
class Quarter {
public:
    constexpr Quarter() = default;
    Quarter(int year, int q);

    [[nodiscard]] constexpr int year() const noexcept { return year_; }
    [[nodiscard]] constexpr int q() const noexcept { return q_; }

    /// Quarters elapsed since 0000Q1; strictly monotone in calendar order.
    [[nodiscard]] constexpr std::int64_t ordinal() const noexcept {
        return static_cast<std::int64_t>(year_) * 4 + (q_ - 1);
    }

    [[nodiscard]] static Quarter from_ordinal(std::int64_t ordinal);

    [[nodiscard]] Quarter operator+(std::int64_t n) const { return from_ordinal(ordinal() + n); }
    [[nodiscard]] Quarter operator-(std::int64_t n) const { return from_ordinal(ordinal() - n); }

    [[nodiscard]] std::string to_string() const;

    friend constexpr auto operator<=>(const Quarter&, const Quarter&) = default;
    friend constexpr bool operator==(const Quarter&, const Quarter&) = default;

private:
    int year_ = 1970;
    int q_ = 1;
};

/// Decodes `YYYYQn`; throws Error{malformed} otherwise.
Quarter parse_quarter(std::string_view text);

/// Number of quarters from `b` to `a`; positive when `a` is later.
[[nodiscard]] constexpr std::int64_t quarter_diff(const Quarter& a, const Quarter& b) noexcept {
    return a.ordinal() - b.ordinal();
}

[[nodiscard]] inline Quarter quarter_add(const Quarter& q, std::int64_t n) { return q + n; }

}  // namespace cyclekit
