// Copyright 2026 The qlstm-forecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "qlstm/error.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

namespace qlstm {

/// Calendar day (proleptic Gregorian), ISO-8601 text form YYYY-MM-DD.
class Date {
  public:
    Date() = default;
    explicit Date(std::chrono::sys_days days) : days_(days) {}
    Date(int year, unsigned month, unsigned day) {
        const std::chrono::year_month_day ymd{std::chrono::year{year},
                                              std::chrono::month{month},
                                              std::chrono::day{day}};
        if (!ymd.ok()) {
            throw FormatError("invalid calendar date " + std::to_string(year) +
                              "-" + std::to_string(month) + "-" +
                              std::to_string(day));
        }
        days_ = std::chrono::sys_days{ymd};
    }

    /// Parses exactly "YYYY-MM-DD".
    static Date parse(std::string_view text) {
        auto fail = [&]() {
            return FormatError("invalid date '" + std::string(text) +
                               "' (expected YYYY-MM-DD)");
        };
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw fail();
        }
        auto field = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            const char *first = text.data() + pos;
            const char *last = first + len;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || *first == '-' || *first == '+') {
                throw fail();
            }
            return v;
        };
        const int y = field(0, 4);
        const int m = field(5, 2);
        const int d = field(8, 2);
        const std::chrono::year_month_day ymd{
            std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) {
            throw fail();
        }
        return Date(std::chrono::sys_days{ymd});
    }

    [[nodiscard]] std::string to_string() const {
        const std::chrono::year_month_day ymd{days_};
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()));
        return buf;
    }

    [[nodiscard]] std::chrono::sys_days days() const { return days_; }

    /// Days since 1970-01-01.
    [[nodiscard]] long serial() const { return days_.time_since_epoch().count(); }

    [[nodiscard]] unsigned day_of_month() const {
        return static_cast<unsigned>(std::chrono::year_month_day{days_}.day());
    }

    [[nodiscard]] Date end_of_month() const {
        const std::chrono::year_month_day ymd{days_};
        return Date(std::chrono::sys_days{
            std::chrono::year_month_day_last{ymd.year(),
                                             std::chrono::month_day_last{ymd.month()}}});
    }

    [[nodiscard]] Date plus_days(long n) const {
        return Date(days_ + std::chrono::days{n});
    }

    friend long operator-(const Date &a, const Date &b) {
        return (a.days_ - b.days_).count();
    }
    auto operator<=>(const Date &) const = default;

  private:
    std::chrono::sys_days days_{};
};

} // namespace qlstm
