#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "loadcast/error.hpp"
#include "loadcast/series.hpp"

using namespace loadcast;
using Catch::Matchers::ContainsSubstring;

namespace {

ParseError::Kind parse_kind(std::string_view text) {
    try {
        parse_series(text);
    } catch (const ParseError& e) {
        return e.kind();
    }
    FAIL("expected a parse error");
    return ParseError::Kind::Header;
}

}  // namespace

TEST_CASE("month keys order and roll over the year") {
    const MonthKey dec{2013, 12};
    CHECK(dec.next() == MonthKey{2014, 1});
    CHECK(MonthKey{2013, 3} < MonthKey{2013, 4});
    CHECK(MonthKey{2013, 12} < MonthKey{2014, 1});
    CHECK(MonthKey{2013, 1}.plus(25) == MonthKey{2015, 2});
    CHECK(MonthKey{2015, 2}.plus(-25) == MonthKey{2013, 1});
    CHECK(MonthKey{2013, 1}.until(MonthKey{2014, 3}) == 14);
    CHECK(MonthKey::parse("2020-07") == MonthKey{2020, 7});
    CHECK(MonthKey{2020, 7}.str() == "2020-07");
    CHECK_THROWS_AS(MonthKey::parse("2020-13"), ValidationError);
    CHECK_THROWS_AS(MonthKey::parse("2020/07"), ValidationError);
    CHECK_THROWS_AS(MonthKey::parse("20-07"), ValidationError);
}

TEST_CASE("parse_series reads consecutive months") {
    const auto s = parse_series("month,load\n2013-01,100\n2013-02,110");
    CHECK(s.start() == MonthKey{2013, 1});
    CHECK(s.values() == std::vector<double>{100, 110});
}

TEST_CASE("parse_series accepts CRLF and a byte order mark") {
    const auto s = parse_series("\xEF\xBB\xBFmonth,load\r\n2013-01,100\r\n2013-02,110\r\n");
    CHECK(s.size() == 2);
    CHECK(s[1] == 110);
}

TEST_CASE("parse_series reports each defect as its own error kind") {
    SECTION("gap") {
        try {
            parse_series("month,load\n2013-01,100\n2013-03,110\n");
            FAIL("no error");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseError::Kind::Gap);
            CHECK(e.row() == 2);
            CHECK_THAT(e.what(), ContainsSubstring("row 2"));
        }
    }
    SECTION("duplicate") { CHECK(parse_kind("month,load\n2013-01,100\n2013-01,110\n") == ParseError::Kind::Duplicate); }
    SECTION("unparsable") { CHECK(parse_kind("month,load\n2013-01,abc\n") == ParseError::Kind::Unparsable); }
    SECTION("non-finite") { CHECK(parse_kind("month,load\n2013-01,inf\n") == ParseError::Kind::NonFinite); }
    SECTION("nan") { CHECK(parse_kind("month,load\n2013-01,nan\n") == ParseError::Kind::NonFinite); }
    SECTION("header") { CHECK(parse_kind("date,load\n2013-01,1\n") == ParseError::Kind::Header); }
    SECTION("month format") { CHECK(parse_kind("month,load\n2013-1,1\n") == ParseError::Kind::Format); }
}

TEST_CASE("series values round-trip bit-exactly through CSV") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::vector<double> values(200);
    for (auto& v : values) v = u(rng);
    values[0] = 0.1;
    values[1] = 1.0 / 3.0;
    values[2] = -std::numeric_limits<double>::denorm_min();
    const MonthlySeries s({1999, 11}, values);
    const auto back = parse_series(serialize_series(s));
    CHECK(back.start() == s.start());
    CHECK(back.values() == s.values());
}

TEST_CASE("parse_exog keeps extra columns and derives month_index") {
    const auto t = parse_exog("month,temp_mean_c,holiday_days,econ_index,price\n2013-05,20.5,1,1.02,0.7\n");
    CHECK(t.size() == 1);
    CHECK(t.names() == std::vector<std::string>{"temp_mean_c", "holiday_days", "month_index", "econ_index", "price"});
    CHECK(t.value({2013, 5}, "month_index") == 5);
    CHECK(t.value({2013, 5}, "price") == 0.7);
    const auto back = parse_exog(serialize_exog(t));
    CHECK(back.names() == t.names());
    CHECK(back.value({2013, 5}, "econ_index") == 1.02);
}

TEST_CASE("parse_exog rejects bad cells") {
    SECTION("negative holidays") {
        CHECK_THROWS_AS(parse_exog("month,temp_mean_c,holiday_days\n2013-01,3,-1\n"), ValidationError);
    }
    SECTION("missing temperature names the column") {
        try {
            parse_exog("month,temp_mean_c,holiday_days\n2013-01,,2\n");
            FAIL("no error");
        } catch (const ParseError& e) {
            CHECK(e.kind() == ParseError::Kind::MissingCell);
            CHECK_THAT(e.what(), ContainsSubstring("temp_mean_c"));
        }
    }
    SECTION("gap") {
        CHECK_THROWS_AS(parse_exog("month,temp_mean_c,holiday_days\n2013-01,1,2\n2013-03,1,2\n"), ParseError);
    }
}

namespace {

ExogTable flat_exog(MonthKey start, std::size_t n) {
    std::vector<double> temp(n), hol(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) temp[i] = static_cast<double>(i);
    return ExogTable(start, temp, hol);
}

MonthlySeries ramp(MonthKey start, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 100.0 + static_cast<double>(i);
    return MonthlySeries(start, v);
}

}  // namespace

TEST_CASE("align keeps only rows with lag-12 support") {
    const MonthKey start{2013, 1};
    SECTION("24 months give 12 rows") {
        const auto s = ramp(start, 24);
        const auto fm = align(s, flat_exog(start, 24), s.values());
        REQUIRE(fm.rows() == 12);
        CHECK(fm.keys.front() == MonthKey{2014, 1});
        const auto lag = *fm.column_index("lag12");
        const auto row = static_cast<Eigen::Index>(MonthKey{2014, 1}.until({2014, 3}));
        CHECK(fm.data(row, static_cast<Eigen::Index>(lag)) == s[2]);  // 2013-03
        CHECK((*fm.target)(row) == s[14]);
    }
    SECTION("12 months give an empty matrix") {
        const auto s = ramp(start, 12);
        const auto fm = align(s, flat_exog(start, 12), s.values());
        CHECK(fm.empty());
        CHECK(fm.data.rows() == 0);
    }
    SECTION("row count is length minus 12") {
        for (std::size_t n : {13u, 30u, 61u}) {
            const auto s = ramp(start, n);
            CHECK(align(s, flat_exog(start, n), s.values()).rows() == n - 12);
        }
    }
    SECTION("coverage holes are listed") {
        const auto s = ramp(start, 24);
        try {
            align(s, flat_exog({2013, 3}, 20), s.values());
            FAIL("no error");
        } catch (const ValidationError& e) {
            CHECK_THAT(e.what(), ContainsSubstring("2013-01"));
            CHECK_THAT(e.what(), ContainsSubstring("2013-02"));
            CHECK_THAT(e.what(), ContainsSubstring("2014-11"));
        }
    }
}

TEST_CASE("train_test_split holds out the final months") {
    const auto s = ramp({2013, 1}, 108);
    const auto split = train_test_split(s);
    CHECK(split.train.size() == 96);
    CHECK(split.test.size() == 12);
    CHECK(split.test.start() == MonthKey{2021, 1});

    std::vector<double> joined = split.train.values();
    joined.insert(joined.end(), split.test.values().begin(), split.test.values().end());
    CHECK(joined == s.values());

    const auto edge = train_test_split(ramp({2013, 1}, 13), 12);
    CHECK(edge.train.size() == 1);
    CHECK(edge.test.size() == 12);
    CHECK_THROWS_AS(train_test_split(ramp({2013, 1}, 12), 12), ValidationError);
    CHECK_THROWS_AS(train_test_split(ramp({2013, 1}, 24), 0), ValidationError);
}

TEST_CASE("series rejects non-finite values and empty input") {
    CHECK_THROWS_AS(MonthlySeries({2013, 1}, {}), ValidationError);
    CHECK_THROWS_AS(MonthlySeries({2013, 1}, {1.0, std::nan("")}), ValidationError);
}
