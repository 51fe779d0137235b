#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "paintmo/error.hpp"
#include "paintmo/outcomes.hpp"
#include "paintmo/serialization.hpp"

using namespace paintmo;

namespace {

OutcomeSet wastewater() { return load_outcome_set(std::string(PAINTMO_TEST_DATA) + "/wastewater.csv"); }

OutcomeSet parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_outcome_set(in, OutcomeFormat::csv);
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::contract;
}

} // namespace

TEST(Ingest, WastewaterCanonicalizesBiogas) {
    const auto set = wastewater();
    ASSERT_EQ(set.size(), 6u);
    ASSERT_EQ(set.objective_count(), 5u);
    EXPECT_EQ(set.specs[4].direction, Direction::maximize);
    const double biogas[] = {-9731, -9935, -9560, -9571, -9626, -9529};
    for (std::size_t r = 0; r < 6; ++r) EXPECT_DOUBLE_EQ(set.points[r][4], biogas[r]);
    EXPECT_DOUBLE_EQ(set.points[2][0], 17.30);
    EXPECT_EQ(set.provenance[0], "s1");
    EXPECT_EQ(set.provenance[5], "p2");
    EXPECT_EQ(to_display(set.specs, set.points[0])[4], 9731.0);
}

TEST(Ingest, HeaderOnlyGivesEmptySet) {
    const auto set = parse_csv("name,a,b\nunit,,\ndirection,min,min\n");
    EXPECT_EQ(set.size(), 0u);
    EXPECT_EQ(set.objective_count(), 2u);
}

TEST(Ingest, SingleRowPassesThrough) {
    const auto set = parse_csv("name,a,b\nunit,,\ndirection,min,min\nx,1,2\n");
    ASSERT_EQ(set.size(), 1u);
    EXPECT_EQ(set.points[0], (Point{1, 2}));
}

TEST(Ingest, ErrorsCarryKindAndRow) {
    EXPECT_EQ(kind_of([] { parse_csv("name,a,b\nunit,,\ndirection,min,min\nx,1\n"); }), ErrorKind::parse);
    try {
        parse_csv("name,a,b\nunit,,\ndirection,min,min\nx,1,2\ny,1,abc\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("row 5"), std::string::npos) << e.what();
    }
    EXPECT_EQ(kind_of([] { parse_csv("name,a,b\nunit,,\ndirection,min,min\nx,1,nan\n"); }), ErrorKind::data);
    EXPECT_EQ(kind_of([] { parse_csv("name,a,a\nunit,,\ndirection,min,min\n"); }), ErrorKind::schema);
    EXPECT_EQ(kind_of([] { parse_csv("name,a\nunit,\ndirection,min\n"); }), ErrorKind::schema);
    EXPECT_EQ(kind_of([] { parse_csv("name,a,b\nunit,,\ndirection,min,up\n"); }), ErrorKind::parse);
}

TEST(Ingest, JsonRoundTripIsCanonical) {
    const auto set = wastewater();
    const auto doc = to_json(set);
    EXPECT_EQ(doc.at("space"), "canonical");
    EXPECT_EQ(outcome_set_from_json(doc), set);
    std::istringstream in(R"({"objectives":[{"name":"a","direction":"max"},{"name":"b","direction":"min"}],
                            "points":[[2,3]]})");
    const auto parsed = parse_outcome_set(in, OutcomeFormat::json);
    EXPECT_EQ(parsed.points[0], (Point{-2, 3}));
}

TEST(Dominance, Examples) {
    EXPECT_TRUE(dominates(Point{0, 0}, Point{1, 1}));
    EXPECT_FALSE(dominates(Point{1, 1}, Point{0, 0}));
    const Point s3{17.30, 419.0, 16.27, 14870, -9560};
    const Point s4{17.74, 414.6, 14.41, 14910, -9571};
    EXPECT_FALSE(dominates(s3, s4));
    EXPECT_FALSE(dominates(s4, s3));
    EXPECT_FALSE(dominates(s3, s3));
    EXPECT_TRUE(dominates(Point{0, 1}, Point{0, 2}));
    EXPECT_FALSE(dominates(Point{0, 1}, Point{0, 1.5}, 1.0));
}

TEST(ParetoFilter, Examples) {
    EXPECT_EQ(pareto_filter(wastewater()).size(), 6u);
    OutcomeSet two{{{"a", "", Direction::minimize}, {"b", "", Direction::minimize}}, {{0, 0}, {1, 1}}, {"x", "y"}};
    const auto kept = pareto_filter(two);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept.points[0], (Point{0, 0}));
    EXPECT_EQ(kept.provenance[0], "x");
    OutcomeSet dup{two.specs, {{1, 2}, {1, 2}}, {"x", "y"}};
    EXPECT_EQ(pareto_filter(dup).size(), 2u);
    EXPECT_EQ(pareto_filter(dup, 0.0).size(), 2u);
}

TEST(ParetoFilter, KeepsExactlyNondominatedPoints) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        OutcomeSet set;
        set.specs = {{"a", "", Direction::minimize}, {"b", "", Direction::minimize}, {"c", "", Direction::minimize}};
        for (int i = 0; i < 30; ++i) set.points.push_back({u(rng), u(rng), u(rng)});
        const auto kept = pareto_filter(set, 0.0);
        for (const auto& p : set.points) {
            bool dominated = false;
            for (const auto& q : set.points) dominated = dominated || dominates(q, p);
            const bool retained = std::find(kept.points.begin(), kept.points.end(), p) != kept.points.end();
            EXPECT_NE(dominated, retained);
        }
    }
}

TEST(Ranges, Wastewater) {
    const auto r = compute_ranges(wastewater());
    const Point ideal{16.67, 411.6, 14.41, 14860, -9935};
    const Point nadir{17.74, 419.0, 27.86, 15250, -9529};
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_DOUBLE_EQ(r.ideal[i], ideal[i]);
        EXPECT_DOUBLE_EQ(r.nadir_estimate[i], nadir[i]);
        EXPECT_DOUBLE_EQ(r.weights[i], 1.0 / (nadir[i] - ideal[i] + kDefaultRangeDelta));
    }
}

TEST(Ranges, EdgeCases) {
    const Point p{3, 4};
    const auto single = compute_ranges(std::vector<Point>{p}, 1e-6);
    EXPECT_EQ(single.ideal, p);
    EXPECT_EQ(single.nadir_estimate, p);
    EXPECT_DOUBLE_EQ(single.weights[0], 1e6);
    const auto two = compute_ranges(std::vector<Point>{{0, 1}, {1, 0}}, 0.0);
    EXPECT_EQ(two.ideal, (Point{0, 0}));
    EXPECT_EQ(two.nadir_estimate, (Point{1, 1}));
    EXPECT_EQ(two.weights, (Point{1, 1}));
    EXPECT_EQ(kind_of([] { compute_ranges(std::vector<Point>{}); }), ErrorKind::empty_set);
    EXPECT_EQ(kind_of([] { compute_ranges(std::vector<Point>{{1, 1}}, 0.0); }), ErrorKind::data);
    const auto n = two.normalize(Point{0.5, 0.25});
    EXPECT_EQ(two.denormalize(n), (Point{0.5, 0.25}));
}
