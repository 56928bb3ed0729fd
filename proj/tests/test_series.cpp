#include "ctsconf/series.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace ctsconf;

namespace {

TimeSeries ramp(std::size_t n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 1.0);
    return TimeSeries::from_values("r", v);
}

}  // namespace

TEST(TimeSeries, RejectsInvalidInput) {
    EXPECT_THROW(TimeSeries("a", {}, {}), DataError);
    EXPECT_THROW(TimeSeries("a", {0, 1}, {1.0}), DataError);
    EXPECT_THROW(TimeSeries("a", {1, 1}, {1.0, 2.0}), DataError);
    EXPECT_THROW(TimeSeries("a", {0}, {std::nan("")}), DataError);
    EXPECT_THROW(TimeSeries("a", {0}, {1.0}, 0), DataError);
}

TEST(Split, PartitionsFromTheEnd) {
    const auto s = ramp(10);
    const auto seg = split(s, {5, 3, 2});
    EXPECT_EQ(seg.train.size(), 5u);
    EXPECT_EQ(seg.cal.size(), 3u);
    EXPECT_EQ(seg.test.size(), 2u);
    EXPECT_DOUBLE_EQ(seg.test[0], 9.0);
    EXPECT_DOUBLE_EQ(seg.test[1], 10.0);
    EXPECT_DOUBLE_EQ(seg.cal[0], 6.0);
}

TEST(Split, DropsLeadingObservations) {
    const auto seg = split(ramp(10), {2, 2, 2});
    EXPECT_DOUBLE_EQ(seg.train[0], 5.0);
}

TEST(Split, TooShortNamesBothLengths) {
    try {
        split(ramp(10), {5, 4, 2});
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("need 11, have 10"), std::string::npos) << e.what();
    }
}

TEST(Split, SingletonSegments) {
    const auto seg = split(ramp(3), {1, 1, 1});
    EXPECT_DOUBLE_EQ(seg.train[0], 1.0);
    EXPECT_DOUBLE_EQ(seg.cal[0], 2.0);
    EXPECT_DOUBLE_EQ(seg.test[0], 3.0);
}

TEST(RollingOrigins, Enumerates) {
    auto origins = [](std::size_t n, std::size_t first, std::size_t step) {
        std::vector<std::size_t> out;
        for (const auto& o : rolling_origins(ramp(n), first, step)) out.push_back(o.origin);
        return out;
    };
    EXPECT_EQ(origins(10, 7, 1), (std::vector<std::size_t>{7, 8, 9}));
    EXPECT_EQ(origins(10, 7, 2), (std::vector<std::size_t>{7, 9}));
    EXPECT_TRUE(origins(5, 9, 1).empty());
}

TEST(ParsePanel, SingleSeries) {
    const auto p = parse_panel("unique_id,ds,y\nA,2020-01-01,1.0\nA,2020-02-01,2.0");
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].id(), "A");
    EXPECT_EQ(p[0].size(), 2u);
    EXPECT_EQ(p.axis(), TimeAxis::date);
    EXPECT_DOUBLE_EQ(p[0][1], 2.0);
}

TEST(ParsePanel, SortsById) {
    const auto p = parse_panel("unique_id,ds,y\nB,1,1\nB,2,2\nA,1,3\n");
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0].id(), "A");
    EXPECT_EQ(p[1].id(), "B");
    EXPECT_EQ(p.axis(), TimeAxis::integer);
}

TEST(ParsePanel, SortsRowsWithinSeriesByTime) {
    const auto p = parse_panel("unique_id,ds,y\nA,2,20\nA,1,10\n");
    EXPECT_DOUBLE_EQ(p[0][0], 10.0);
}

TEST(ParsePanel, NonFiniteValueNamesRow) {
    try {
        parse_panel("unique_id,ds,y\nA,2020-01-01,NaN");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    }
}

TEST(ParsePanel, RejectsMalformedInput) {
    EXPECT_THROW(parse_panel(""), DataError);
    EXPECT_THROW(parse_panel("id,ds,y\nA,1,1"), DataError);
    EXPECT_THROW(parse_panel("unique_id,ds,y\nA,x,1"), DataError);
    EXPECT_THROW(parse_panel("unique_id,ds,y\nA,1,abc"), DataError);
    EXPECT_THROW(parse_panel("unique_id,ds,y\nA,1,1\nA,2020-01-01,2"), DataError);
    EXPECT_THROW(parse_panel("unique_id,ds,y\nA,1,1\nA,1,2"), DataError);
    EXPECT_THROW(parse_panel("unique_id,ds,y\nA,2020-02-30,1"), DataError);
}

TEST(ParsePanel, DuplicateNamesLaterRow) {
    try {
        parse_panel("unique_id,ds,y\nA,1,1\nA,2,2\nA,1,3");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
}

TEST(ParsePanel, RoundTrip) {
    const std::string text =
        "unique_id,ds,y\nA,2019-12-01,0.1\nA,2020-01-01,-3.25\nB,2020-02-29,1e-300\nB,2020-03-01,12345.678\n";
    const auto p = parse_panel(text);
    EXPECT_EQ(serialize_panel(p), text);
    EXPECT_EQ(parse_panel(serialize_panel(p)), p);
}

TEST(ParsePanel, AcceptsCrlf) {
    const auto p = parse_panel("unique_id,ds,y\r\nA,1,1.5\r\nA,2,2.5\r\n");
    EXPECT_EQ(p[0].size(), 2u);
}

TEST(SeriesPanel, RejectsDuplicateIds) {
    std::vector<TimeSeries> v{TimeSeries::from_values("a", {1.0}), TimeSeries::from_values("a", {2.0})};
    EXPECT_THROW(SeriesPanel{v}, DataError);
}
