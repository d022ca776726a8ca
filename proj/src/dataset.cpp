#include "epi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "epi/error.hpp"

namespace epi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == ',' && !quoted) {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    out.push_back(trim(line.substr(start)));
    return out;
}

// Nonnegative integral count, or nullopt for empty / unparseable cells.
std::optional<double> parse_count(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
    if (!std::isfinite(value) || value < 0.0 || value != std::floor(value)) return std::nullopt;
    return value;
}

std::string format_count(const std::optional<double>& v) {
    if (!v) return {};
    std::ostringstream os;
    os.precision(17);
    os << *v;
    return os.str();
}

}  // namespace

std::string_view to_string(Column c) noexcept {
    switch (c) {
        case Column::Tests: return "tests";
        case Column::Confirmed: return "confirmed";
        case Column::Deaths: return "deaths";
    }
    return "?";
}

std::optional<Column> column_from_string(std::string_view name) noexcept {
    for (auto c : kAllColumns)
        if (to_string(c) == name) return c;
    return std::nullopt;
}

const std::optional<double>& DailyRecord::value(Column c) const {
    switch (c) {
        case Column::Tests: return tests;
        case Column::Confirmed: return confirmed;
        case Column::Deaths: return deaths;
    }
    return tests;
}

std::optional<double>& DailyRecord::value(Column c) {
    return const_cast<std::optional<double>&>(std::as_const(*this).value(c));
}

std::vector<double> CaseSeries::present(Column c) const {
    std::vector<double> out;
    out.reserve(records.size());
    for (const auto& r : records)
        if (r.value(c)) out.push_back(*r.value(c));
    return out;
}

std::size_t CaseSeries::missing_count(Column c) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [c](const DailyRecord& r) { return !r.value(c); }));
}

CaseSeries parse_csv(std::string_view text, const CsvSchema& schema, const ParseOptions& options,
                     std::string source_label) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!trim(line).empty()) lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) throw Error(ErrorCode::MalformedHeader, "no header row");

    const auto header = split_fields(lines.front());
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto date_col = find_col(schema.date);
    const auto confirmed_col = find_col(schema.confirmed);
    const auto deaths_col = find_col(schema.deaths);
    const auto tests_col = find_col(schema.tests);
    if (!date_col || !confirmed_col || !deaths_col) {
        std::string missing;
        if (!date_col) missing += " " + schema.date;
        if (!confirmed_col) missing += " " + schema.confirmed;
        if (!deaths_col) missing += " " + schema.deaths;
        throw Error(ErrorCode::MalformedHeader, "required columns absent:" + missing);
    }

    CaseSeries series;
    series.source_label = std::move(source_label);
    series.records.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const auto fields = split_fields(lines[row]);
        auto cell = [&](std::optional<std::size_t> col) -> std::string_view {
            return col && *col < fields.size() ? fields[*col] : std::string_view{};
        };
        auto date = Date::parse(cell(date_col));
        if (!date)
            throw Error(ErrorCode::UnparseableDate,
                        "data row " + std::to_string(row) + ": '" + std::string(cell(date_col)) + "'");
        DailyRecord rec;
        rec.date = *date;
        rec.tests = parse_count(cell(tests_col));
        rec.confirmed = parse_count(cell(confirmed_col));
        rec.deaths = parse_count(cell(deaths_col));
        series.records.push_back(rec);
    }

    std::stable_sort(series.records.begin(), series.records.end(),
                     [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.records.size(); ++i)
        if (series.records[i].date == series.records[i - 1].date)
            throw Error(ErrorCode::DuplicateDate, series.records[i].date.iso());

    if (!series.records.empty()) {
        std::vector<DailyRecord> filled;
        filled.reserve(series.records.size());
        for (const auto& rec : series.records) {
            if (!filled.empty()) {
                const long step = filled.back().date.days_until(rec.date);
                if (step > 1 && !options.fill_gaps)
                    throw Error(ErrorCode::GapInDates, "no record between " + filled.back().date.iso() + " and " +
                                                           rec.date.iso());
                for (long k = 1; k < step; ++k) {
                    DailyRecord blank;
                    blank.date = filled.back().date.plus_days(1);
                    filled.push_back(blank);
                }
            }
            filled.push_back(rec);
        }
        for (std::size_t i = 0; i < filled.size(); ++i) filled[i].day_index = static_cast<long>(i);
        series.records = std::move(filled);
    }
    return series;
}

CaseSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema, options, path.filename().string());
}

std::string serialize_csv(const CaseSeries& series, const CsvSchema& schema) {
    std::string out = schema.date + "," + schema.tests + "," + schema.confirmed + "," + schema.deaths + "\n";
    for (const auto& r : series.records) {
        out += r.date.iso();
        out += ',' + format_count(r.tests) + ',' + format_count(r.confirmed) + ',' + format_count(r.deaths) + '\n';
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::span<const double> values) {
    SummaryStats s;
    s.count = values.size();
    if (values.empty()) {
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();
        s.mean = s.std = s.min = s.q25 = s.q50 = s.q75 = s.max = nan;
        return s;
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
    s.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : std::numeric_limits<double>::quiet_NaN();
    s.min = sorted.front();
    s.max = sorted.back();
    s.q25 = quantile_sorted(sorted, 0.25);
    s.q50 = quantile_sorted(sorted, 0.50);
    s.q75 = quantile_sorted(sorted, 0.75);
    return s;
}

CaseSeries window(const CaseSeries& series, Date from, Date to) {
    if (to < from) throw Error(ErrorCode::InvalidConfig, "window end " + to.iso() + " precedes start " + from.iso());
    CaseSeries out;
    out.source_label = series.source_label + "[" + from.iso() + ".." + to.iso() + "]";
    for (const auto& r : series.records)
        if (from <= r.date && r.date <= to) out.records.push_back(r);
    if (out.records.empty())
        throw Error(ErrorCode::EmptyWindow, "no records between " + from.iso() + " and " + to.iso());
    for (std::size_t i = 0; i < out.records.size(); ++i) out.records[i].day_index = static_cast<long>(i);
    return out;
}

std::string_view to_string(ImputePolicy p) noexcept {
    return p == ImputePolicy::Mean ? "mean" : "forward-fill";
}

std::optional<ImputePolicy> impute_policy_from_string(std::string_view name) noexcept {
    if (name == "mean") return ImputePolicy::Mean;
    if (name == "forward-fill" || name == "ffill") return ImputePolicy::ForwardFill;
    return std::nullopt;
}

CaseSeries impute_missing(const CaseSeries& series, ImputePolicy policy, std::span<const Column> columns) {
    CaseSeries out = series;
    for (Column c : columns) {
        const auto present = series.present(c);
        if (present.size() == series.size()) continue;
        if (present.empty()) throw Error(ErrorCode::AllMissingColumn, std::string(to_string(c)));
        if (policy == ImputePolicy::Mean) {
            const double mean = std::accumulate(present.begin(), present.end(), 0.0) /
                                static_cast<double>(present.size());
            for (auto& r : out.records)
                if (!r.value(c)) r.value(c) = mean;
        } else {
            double last = present.front();
            for (auto& r : out.records) {
                if (r.value(c))
                    last = *r.value(c);
                else
                    r.value(c) = last;
            }
        }
    }
    return out;
}

}  // namespace epi
