#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace rvf {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int32_t serial = 0;

    auto operator<=>(const Date&) const = default;

    Date next() const { return Date{serial + 1}; }

    static Date from_ymd(int y, int m, int d) {
        if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m))
            throw std::invalid_argument("invalid calendar date");
        // days_from_civil (Hinnant)
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date{static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468)};
    }

    void to_ymd(int& y, int& m, int& d) const {
        // civil_from_days (Hinnant)
        std::int64_t z = serial + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
        m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
        y = static_cast<int>(yy + (m <= 2));
    }

    int year() const {
        int y, m, d;
        to_ymd(y, m, d);
        return y;
    }

    std::string to_string() const {
        int y, m, d;
        to_ymd(y, m, d);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
        return buf;
    }

    // Parses strict "YYYY-MM-DD".
    static Date parse(const std::string& s) {
        int y, m, d;
        char extra;
        if (std::sscanf(s.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &extra) != 3 || s.size() != 10)
            throw std::invalid_argument("bad date '" + s + "' (expected YYYY-MM-DD)");
        return from_ymd(y, m, d);
    }

private:
    static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }
    static int days_in_month(int y, int m) {
        static constexpr int k[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : k[m - 1];
    }
};

struct DateRange {
    Date start;
    Date end;  // inclusive

    bool contains(Date d) const { return d >= start && d <= end; }
};

// Intraday timestamp: date plus second-of-day.
struct DateTime {
    Date date;
    std::int32_t second_of_day = 0;

    auto operator<=>(const DateTime&) const = default;

    // Accepts "YYYY-MM-DD HH:MM[:SS]" or "YYYY-MM-DDTHH:MM[:SS]", optional trailing 'Z'.
    static DateTime parse(std::string s) {
        if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.pop_back();
        if (s.size() < 16) throw std::invalid_argument("bad timestamp '" + s + "'");
        if (s[10] != ' ' && s[10] != 'T')
            throw std::invalid_argument("bad timestamp '" + s + "'");
        Date d = Date::parse(s.substr(0, 10));
        int hh = 0, mm = 0, ss = 0;
        int n = std::sscanf(s.c_str() + 11, "%2d:%2d:%2d", &hh, &mm, &ss);
        if (n < 2 || hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60)
            throw std::invalid_argument("bad timestamp '" + s + "'");
        return DateTime{d, hh * 3600 + mm * 60 + ss};
    }
};

}  // namespace rvf
