#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epi/dataset.hpp"
#include "epi/error.hpp"
#include "test_util.hpp"

using namespace epi;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an epi::Error");
    return ErrorCode::Io;
}

// Statistics computed without sorting: pairwise-difference variance and
// order statistics by selection.
struct OracleStats {
    double mean, std, min, max, q25, q50, q75;
};

double select_kth(std::vector<double> v, std::size_t k) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

OracleStats oracle(const std::vector<double>& v) {
    const std::size_t n = v.size();
    long double sum = 0.0L;
    for (double x : v) sum += x;
    long double pair = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pair += static_cast<long double>(v[i] - v[j]) * (v[i] - v[j]);
    auto quant = [&](double q) {
        const double h = (static_cast<double>(n) - 1.0) * q;
        const auto lo = static_cast<std::size_t>(h);
        const double a = select_kth(v, lo);
        const double b = select_kth(v, std::min(lo + 1, n - 1));
        return a + (h - static_cast<double>(lo)) * (b - a);
    };
    return {static_cast<double>(sum / n), std::sqrt(static_cast<double>(pair / (n * (n - 1.0L)))),
            *std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end()), quant(0.25), quant(0.5),
            quant(0.75)};
}

}  // namespace

TEST_CASE("parse_csv reads well-formed rows in date order") {
    const auto s = parse_csv("date,tests,confirmed,deaths\n2020-03-03,30,3,0\n2020-03-01,10,1,0\n2020-03-02,20,2,1\n");
    REQUIRE(s.size() == 3);
    CHECK(s.records[0].date == Date::from_ymd(2020, 3, 1));
    CHECK(s.records[2].date == Date::from_ymd(2020, 3, 3));
    CHECK(s.records[1].confirmed == 2.0);
    CHECK(s.records[1].deaths == 1.0);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.records[i].day_index == static_cast<long>(i));
}

TEST_CASE("empty and unparseable cells become missing") {
    const auto s = parse_csv("date,tests,confirmed,deaths\n2020-03-01,10,,0\n2020-03-02,x,-4,1.5\n");
    CHECK_FALSE(s.records[0].confirmed.has_value());
    CHECK_FALSE(s.records[1].tests.has_value());
    CHECK_FALSE(s.records[1].confirmed.has_value());
    CHECK_FALSE(s.records[1].deaths.has_value());
    CHECK(s.missing_count(Column::Confirmed) == 2);
}

TEST_CASE("parse_csv error paths") {
    CHECK(code_of([] { parse_csv("date,tests,confirmed,deaths\n2020-03-05,1,1,1\n2020-03-05,2,2,2\n"); }) ==
          ErrorCode::DuplicateDate);
    CHECK(code_of([] { parse_csv("date,tests,confirmed\n2020-03-05,1,1\n"); }) == ErrorCode::MalformedHeader);
    CHECK(code_of([] { parse_csv(""); }) == ErrorCode::MalformedHeader);
    try {
        parse_csv("date,tests,confirmed,deaths\n2020-03-01,1,1,1\n2020-02-30,1,1,1\n");
        FAIL("expected UnparseableDate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnparseableDate);
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("calendar gaps are rejected unless filling is requested") {
    const std::string text = "date,tests,confirmed,deaths\n2020-03-01,1,1,1\n2020-03-04,4,4,4\n";
    CHECK(code_of([&] { parse_csv(text); }) == ErrorCode::GapInDates);
    const auto s = parse_csv(text, {}, {.fill_gaps = true});
    REQUIRE(s.size() == 4);
    CHECK_FALSE(s.records[1].confirmed.has_value());
    CHECK_FALSE(s.records[2].deaths.has_value());
    CHECK(s.records[3].day_index == 3);
    CHECK(s.records[3].confirmed == 4.0);
}

TEST_CASE("custom headers and absent tests column") {
    CsvSchema schema;
    schema.date = "day";
    schema.confirmed = "cases";
    const auto s = parse_csv("cases,day,deaths,extra\n5,2021-01-01,1,z\n6,2021-01-02,0,z\n", schema);
    REQUIRE(s.size() == 2);
    CHECK(s.records[1].confirmed == 6.0);
    CHECK(s.missing_count(Column::Tests) == 2);
}

TEST_CASE("parse -> serialize -> parse round-trips") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        CaseSeries s;
        s.source_label = "inline";
        const auto n = 1 + rng.below(40);
        const Date start = Date::from_ymd(2019, 12, 20).plus_days(static_cast<long>(rng.below(900)));
        for (std::size_t i = 0; i < n; ++i) {
            DailyRecord r;
            r.date = start.plus_days(static_cast<long>(i));
            r.day_index = static_cast<long>(i);
            for (Column c : kAllColumns)
                if (rng.uniform() > 0.15) r.value(c) = static_cast<double>(rng.below(100000));
            s.records.push_back(r);
        }
        const auto again = parse_csv(serialize_csv(s));
        CHECK(again == s);
    }
}

TEST_CASE("summarize hand cases") {
    const std::vector<double> v{1, 2, 3, 4};
    const auto s = summarize(v);
    CHECK(s.count == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.q50 == doctest::Approx(2.5));
    CHECK(s.q25 == doctest::Approx(1.75));
    CHECK(s.q75 == doctest::Approx(3.25));
    CHECK(s.std == doctest::Approx(1.2909944487358056).epsilon(1e-12));

    const std::vector<double> flat{5, 5, 5};
    const auto f = summarize(flat);
    CHECK(f.mean == 5.0);
    CHECK(f.std == 0.0);
    CHECK(f.min == 5.0);
    CHECK(f.max == 5.0);

    const auto e = summarize({});
    CHECK(e.count == 0);
    CHECK_FALSE(e.defined());
    CHECK(std::isnan(e.mean));
    CHECK(std::isnan(e.q50));
}

TEST_CASE("summarize agrees with the selection/pairwise oracle") {
    Rng rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = 2 + rng.below(200);
        std::vector<double> v(n);
        for (auto& x : v) x = std::round(rng.uniform(0.0, 20000.0));
        const auto s = summarize(v);
        const auto o = oracle(v);
        CHECK(testutil::rel_err(s.mean, o.mean) < 1e-9);
        CHECK(testutil::rel_err(s.std, o.std) < 1e-9);
        CHECK(s.min == o.min);
        CHECK(s.max == o.max);
        CHECK(testutil::rel_err(s.q25, o.q25) < 1e-9);
        CHECK(testutil::rel_err(s.q50, o.q50) < 1e-9);
        CHECK(testutil::rel_err(s.q75, o.q75) < 1e-9);
        CHECK(s.min <= s.q25);
        CHECK(s.q25 <= s.q50);
        CHECK(s.q50 <= s.q75);
        CHECK(s.q75 <= s.max);
    }
}

TEST_CASE("window") {
    const auto s = testutil::make_series({1, 2, 3, 4, 5, 6});
    SUBCASE("full span is the identity up to re-basing") {
        const auto w = window(s, s.first_date(), s.last_date());
        REQUIRE(w.size() == s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(w.records[i].date == s.records[i].date);
            CHECK(w.records[i].confirmed == s.records[i].confirmed);
            CHECK(w.records[i].day_index == static_cast<long>(i));
        }
    }
    SUBCASE("inner window re-bases day_index and labels the range") {
        const auto w = window(s, s.first_date().plus_days(2), s.first_date().plus_days(4));
        REQUIRE(w.size() == 3);
        CHECK(w.records[0].day_index == 0);
        CHECK(w.records[0].confirmed == 3.0);
        CHECK(w.source_label.find("2021-01-03..2021-01-05") != std::string::npos);
    }
    SUBCASE("errors") {
        CHECK(code_of([&] { window(s, s.last_date().plus_days(1), s.last_date().plus_days(9)); }) ==
              ErrorCode::EmptyWindow);
        CHECK(code_of([&] { window(s, s.last_date(), s.first_date()); }) == ErrorCode::InvalidConfig);
    }
}

TEST_CASE("impute_missing") {
    auto s = testutil::make_series({10, 0, 20});
    s.records[1].confirmed.reset();
    const auto mean = impute_missing(s, ImputePolicy::Mean);
    CHECK(mean.records[1].confirmed == 15.0);

    auto t = testutil::make_series({0, 7, 0});
    t.records[0].confirmed.reset();
    t.records[2].confirmed.reset();
    const auto ff = impute_missing(t, ImputePolicy::ForwardFill);
    CHECK(ff.records[0].confirmed == 7.0);
    CHECK(ff.records[1].confirmed == 7.0);
    CHECK(ff.records[2].confirmed == 7.0);

    auto u = testutil::make_series({1, 2});
    for (auto& r : u.records) r.deaths.reset();
    CHECK(code_of([&] { impute_missing(u, ImputePolicy::Mean); }) == ErrorCode::AllMissingColumn);
    // untouched when the column is not requested
    const Column only_confirmed[] = {Column::Confirmed};
    CHECK(impute_missing(u, ImputePolicy::Mean, only_confirmed).missing_count(Column::Deaths) == 2);
}

TEST_CASE("after imputation every requested column is complete") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> c(3 + rng.below(30));
        for (auto& x : c) x = static_cast<double>(rng.below(1000));
        auto s = testutil::make_series(c);
        for (auto& r : s.records)
            for (Column col : kAllColumns)
                if (rng.uniform() < 0.3) r.value(col).reset();
        for (Column col : kAllColumns)
            if (s.present(col).empty()) s.records[0].value(col) = 1.0;
        for (auto policy : {ImputePolicy::Mean, ImputePolicy::ForwardFill}) {
            const auto out = impute_missing(s, policy);
            for (Column col : kAllColumns) CHECK(out.present(col).size() == out.size());
        }
    }
}
