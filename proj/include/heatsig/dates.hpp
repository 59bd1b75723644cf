#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace heatsig {

// All series are daily; a day is a count of days since the civil epoch.
using Day = std::chrono::sys_days;

// Parses strict ISO "YYYY-MM-DD". Returns nullopt on any deviation,
// including calendar-invalid dates like 2019-02-29.
std::optional<Day> parse_date(std::string_view text);

std::string format_date(Day d);

// 1-based ordinal day within its calendar year (Dec 31 -> 365 or 366).
int day_of_year(Day d);

// Calendar month 1..12.
int month_of(Day d);

// Contiguous run of calendar days: start, start+1, ..., start+length-1.
struct DateIndex {
    Day start{};
    int length = 0;

    DateIndex() = default;
    DateIndex(Day start_day, int n);

    Day date(int t) const { return start + std::chrono::days{t}; }
    Day last() const { return date(length - 1); }
    bool contains(Day d) const { return d >= start && d <= last(); }
    // Offset of d within the run; requires contains(d).
    int offset_of(Day d) const;

    friend bool operator==(const DateIndex&, const DateIndex&) = default;
};

} // namespace heatsig
