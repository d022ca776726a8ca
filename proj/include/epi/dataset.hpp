#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epi/date.hpp"

namespace epi {

enum class Column { Tests, Confirmed, Deaths };

inline constexpr std::array<Column, 3> kAllColumns{Column::Tests, Column::Confirmed, Column::Deaths};

std::string_view to_string(Column c) noexcept;
std::optional<Column> column_from_string(std::string_view name) noexcept;

struct DailyRecord {
    Date date;
    long day_index = 0;
    std::optional<double> tests;
    std::optional<double> confirmed;
    std::optional<double> deaths;

    const std::optional<double>& value(Column c) const;
    std::optional<double>& value(Column c);

    friend bool operator==(const DailyRecord&, const DailyRecord&) = default;
};

/// Dated observations sorted ascending, one record per calendar day.
struct CaseSeries {
    std::vector<DailyRecord> records;
    std::string source_label;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }
    const Date& first_date() const { return records.front().date; }
    const Date& last_date() const { return records.back().date; }

    /// Present values of one column, in date order.
    std::vector<double> present(Column c) const;
    std::size_t missing_count(Column c) const;

    friend bool operator==(const CaseSeries&, const CaseSeries&) = default;
};

/// Header names for each field. `tests` may be absent from a file, in which
/// case every record has tests missing.
struct CsvSchema {
    std::string date = "date";
    std::string tests = "tests";
    std::string confirmed = "confirmed";
    std::string deaths = "deaths";
};

struct ParseOptions {
    /// Insert all-missing records for absent calendar days instead of raising GapInDates.
    bool fill_gaps = false;
};

CaseSeries parse_csv(std::string_view text, const CsvSchema& schema = {}, const ParseOptions& options = {},
                     std::string source_label = "inline");

CaseSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema = {}, const ParseOptions& options = {});

/// Writes the series back in the same schema. Missing cells are empty.
std::string serialize_csv(const CaseSeries& series, const CsvSchema& schema = {});

/// Describe-style summary. Moments other than `count` are NaN for an empty input.
struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;  // sample, ddof = 1
    double min = 0.0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
    double max = 0.0;

    bool defined() const { return count > 0; }
};

SummaryStats summarize(std::span<const double> values);

/// Quantile with linear interpolation between closest ranks of sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

CaseSeries window(const CaseSeries& series, Date from, Date to);

enum class ImputePolicy { Mean, ForwardFill };

std::string_view to_string(ImputePolicy p) noexcept;
std::optional<ImputePolicy> impute_policy_from_string(std::string_view name) noexcept;

/// Fills missing values in the given columns. Mean-imputed values may be fractional.
CaseSeries impute_missing(const CaseSeries& series, ImputePolicy policy,
                          std::span<const Column> columns = kAllColumns);

}  // namespace epi
