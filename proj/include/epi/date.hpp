#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace epi {

/// Calendar day. Stored as days since the Unix epoch.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days d) : days_(d) {}

    static Date from_ymd(int year, unsigned month, unsigned day);

    /// Strict ISO-8601 `YYYY-MM-DD`; nullopt for anything else, including invalid days.
    static std::optional<Date> parse(std::string_view text);

    std::string iso() const;
    std::chrono::sys_days sys_days() const { return days_; }

    Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }
    long days_until(Date other) const { return (other.days_ - days_).count(); }

    friend constexpr auto operator<=>(const Date&, const Date&) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace epi
