//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <string>
#include <string_view>

#include "msdi/errors.hpp"

namespace msdi {

// A calendar month. Stored as (year, month in 1..12) and freely convertible
// to a linear month index so gap checks and window arithmetic stay trivial.
struct YearMonth {
    int year = 1970;
    int month = 1;

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;

    int linear() const noexcept { return year * 12 + (month - 1); }

    static YearMonth from_linear(int index) noexcept {
        int y = index / 12;
        int m = index % 12;
        if (m < 0) {
            m += 12;
            y -= 1;
        }
        return YearMonth{y, m + 1};
    }

    YearMonth next() const noexcept { return from_linear(linear() + 1); }

    YearMonth plus(int months) const noexcept { return from_linear(linear() + months); }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return std::string(buf);
    }
};

// Parses "YYYY-MM". Anything else is a validation error.
inline YearMonth parse_year_month(std::string_view text) {
    auto fail = [&] {
        throw_validation("unparsable month '" + std::string(text) + "', expected YYYY-MM");
    };
    if (text.size() != 7 || text[4] != '-') fail();
    int year = 0;
    int month = 0;
    auto r1 = std::from_chars(text.data(), text.data() + 4, year);
    auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
    if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != text.data() + 4 ||
        r2.ptr != text.data() + 7)
        fail();
    if (month < 1 || month > 12) fail();
    return YearMonth{year, month};
}

// Inclusive month range.
struct MonthRange {
    YearMonth start;
    YearMonth end;

    bool empty() const noexcept { return end < start; }
    int size() const noexcept { return empty() ? 0 : end.linear() - start.linear() + 1; }
    bool contains(const YearMonth& ym) const noexcept { return start <= ym && ym <= end; }
};

}  // namespace msdi
