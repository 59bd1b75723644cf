#include "heatsig/dates.hpp"

#include <charconv>
#include <stdexcept>

namespace heatsig {

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

std::optional<Day> parse_date(std::string_view text) {
    // YYYY-MM-DD, fixed width.
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y},
                                          std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::string format_date(Day d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    const int y = int(ymd.year());
    const unsigned m = unsigned(ymd.month());
    const unsigned dd = unsigned(ymd.day());
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, dd);
    return buf;
}

int day_of_year(Day d) {
    const std::chrono::year_month_day ymd{d};
    const Day jan1{std::chrono::year_month_day{ymd.year(), std::chrono::January,
                                               std::chrono::day{1}}};
    return int((d - jan1).count()) + 1;
}

int month_of(Day d) {
    return int(unsigned(std::chrono::year_month_day{d}.month()));
}

DateIndex::DateIndex(Day start_day, int n) : start(start_day), length(n) {
    if (n < 1) throw std::invalid_argument("DateIndex length must be >= 1");
}

int DateIndex::offset_of(Day d) const {
    if (!contains(d)) throw std::invalid_argument("date outside index range");
    return int((d - start).count());
}

} // namespace heatsig
