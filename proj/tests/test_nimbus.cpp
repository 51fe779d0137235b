#include <random>

#include <gtest/gtest.h>

#include "paintmo/approximation.hpp"
#include "paintmo/error.hpp"
#include "paintmo/nimbus.hpp"

using namespace paintmo;

namespace {

using C = ObjectiveClass;

Classification make(std::vector<ClassEntry> entries, Point current) { return {std::move(entries), std::move(current)}; }

bool has_code(const std::vector<Violation>& v, const std::string& code) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

Approximation segment_approx() {
    Approximation a;
    a.outcome_set.specs = {{"f1", "", Direction::minimize}, {"f2", "", Direction::minimize}};
    a.outcome_set.points = {{0, 1}, {1, 0}};
    a.outcome_set.provenance = {"a", "b"};
    a.polytopes = {Simplex({0, 1})};
    return a;
}

OutcomeSet wastewater() { return load_outcome_set(std::string(PAINTMO_TEST_DATA) + "/wastewater.csv"); }

} // namespace

TEST(Validate, AllKeepIsRejected) {
    const auto v = validate_classification(make({{C::keep, {}}, {C::keep, {}}}, {0.5, 0.5}));
    EXPECT_TRUE(has_code(v, "nothing_to_improve"));
    EXPECT_TRUE(has_code(v, "nothing_to_relax"));
}

TEST(Validate, WorsenToCurrentAllowed) {
    EXPECT_TRUE(validate_classification(make({{C::improve, {}}, {C::worsen_to, 0.5}, {C::worsen_to, 0.2}},
                                             {0.5, 0.5, 0.2}))
                    .empty());
}

TEST(Validate, AspirationMustImprove) {
    const auto v = validate_classification(make({{C::improve_to, 0.7}, {C::free, {}}}, {0.5, 0.5}));
    ASSERT_TRUE(has_code(v, "aspiration_not_improving"));
    EXPECT_EQ(v.front().objective, 0u);
}

TEST(Validate, OtherRules) {
    EXPECT_TRUE(has_code(validate_classification(make({{C::improve, {}}}, {0.5, 0.5})), "class_count"));
    EXPECT_TRUE(has_code(validate_classification(make({{C::improve_to, {}}, {C::free, {}}}, {0.5, 0.5})),
                         "missing_level"));
    EXPECT_TRUE(has_code(validate_classification(make({{C::improve, 0.1}, {C::free, {}}}, {0.5, 0.5})),
                         "unexpected_level"));
    EXPECT_TRUE(has_code(validate_classification(make({{C::improve, {}}, {C::worsen_to, 0.4}}, {0.5, 0.5})),
                         "bound_not_relaxing"));
    EXPECT_TRUE(has_code(
        validate_classification(make({{C::improve, {}}, {C::free, {}}}, {0.5, std::numeric_limits<double>::infinity()})),
        "current_not_finite"));
    EXPECT_TRUE(has_code(validate_classification(make({{C::improve_to, std::nan("")}, {C::free, {}}}, {0.5, 0.5})),
                         "level_not_finite"));
}

TEST(Subproblem, ImproveFree) {
    Ranges r{{0, 0}, {1, 1}, {1, 1}};
    const auto s = build_subproblem(make({{C::improve, {}}, {C::free, {}}}, {0.5, 0.5}), r);
    EXPECT_EQ(s.reference, (Point{0, 1}));
    ASSERT_EQ(s.upper_bounds.size(), 2u);
    EXPECT_EQ(s.upper_bounds[0], 0.5);
    EXPECT_FALSE(s.upper_bounds[1]);
    EXPECT_EQ(s.weights, r.weights);
}

TEST(Subproblem, ImproveToWorsenTo) {
    Ranges r{{0, 0}, {1, 1}, {1, 1}};
    const auto s = build_subproblem(make({{C::improve_to, 0.3}, {C::worsen_to, 0.8}}, {0.5, 0.5}), r);
    EXPECT_EQ(s.reference, (Point{0.3, 0.8}));
    EXPECT_EQ(s.upper_bounds[0], 0.5);
    EXPECT_EQ(s.upper_bounds[1], 0.8);
}

TEST(Subproblem, KeepAndInvalid) {
    Ranges r{{0, 0, 0}, {1, 1, 1}, {1, 1, 1}};
    const auto s = build_subproblem(make({{C::keep, {}}, {C::improve, {}}, {C::free, {}}}, {0.5, 0.5, 0.5}), r);
    EXPECT_EQ(s.reference, (Point{0.5, 0, 1}));
    EXPECT_EQ(s.upper_bounds[0], 0.5);
    try {
        build_subproblem(make({{C::keep, {}}, {C::keep, {}}, {C::keep, {}}}, {0.5, 0.5, 0.5}), r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::contract);
    }
}

TEST(Step, SegmentImproveFirst) {
    const auto a = segment_approx();
    const auto prob = build_surrogate(a);
    const auto ranges = compute_ranges(a.outcome_set);
    const auto start = neutral_start(prob, ranges);
    ASSERT_TRUE(start.has_outcome());
    EXPECT_EQ(start.kind, RecordKind::neutral_start);
    EXPECT_NEAR((*start.outcome)[0], 0.5, 1e-6);
    const auto c = make({{C::improve, {}}, {C::free, {}}}, *start.outcome);
    const auto rec = nimbus_step(prob, ranges, c);
    ASSERT_TRUE(rec.has_outcome());
    EXPECT_NEAR((*rec.outcome)[0], 0.0, 1e-9);
    EXPECT_NEAR((*rec.outcome)[1], 1.0, 1e-9);
    EXPECT_EQ(rec.classification, c);
    EXPECT_EQ(nimbus_step(prob, ranges, c), rec);
}

TEST(Step, InfeasibleRecordsMessage) {
    // Two separate vertices: improving f1 below 0.5 forces f2 above 0.5.
    Approximation a = segment_approx();
    a.outcome_set.points = {{0, 1}, {0.5, 0.5}, {1, 0}};
    a.outcome_set.provenance = {"a", "b", "c"};
    a.polytopes = {Simplex({0}), Simplex({1}), Simplex({2})};
    const auto prob = build_surrogate(a);
    const auto ranges = compute_ranges(a.outcome_set);
    const auto rec = nimbus_step(prob, ranges, make({{C::improve, {}}, {C::worsen_to, 0.5}}, {0.5, 0.5}));
    ASSERT_TRUE(rec.has_outcome());
    EXPECT_NEAR((*rec.outcome)[0], 0.5, 1e-9);
    const auto bad = nimbus_step(prob, ranges, make({{C::improve, {}}, {C::worsen_to, 0.6}}, {0.25, 0.25}));
    EXPECT_FALSE(bad.has_outcome());
    EXPECT_EQ(bad.message, kInfeasibleMessage);
}

TEST(Step, WastewaterRelaxNitrogenImproveChemicalAeration) {
    const auto set = wastewater();
    const auto approx = build_approximation(set);
    const auto prob = build_surrogate(approx);
    const auto ranges = compute_ranges(approx.outcome_set);
    const Point s3 = set.points[2];
    const auto c = make({{C::free, {}}, {C::improve, {}}, {C::improve, {}}, {C::free, {}}, {C::free, {}}}, s3);
    ASSERT_TRUE(validate_classification(c).empty());
    const auto spec = build_subproblem(c, ranges);
    EXPECT_EQ(spec.reference[1], ranges.ideal[1]);
    EXPECT_EQ(spec.reference[0], ranges.nadir_estimate[0]);
    const auto rec = nimbus_step(prob, ranges, c);
    ASSERT_TRUE(rec.has_outcome());
    EXPECT_LE((*rec.outcome)[1], s3[1] + 1e-7 / ranges.weights[1]);
    EXPECT_LE((*rec.outcome)[2], s3[2] + 1e-7 / ranges.weights[2]);
}

TEST(Names, RoundTrip) {
    for (auto k : {C::improve, C::improve_to, C::keep, C::worsen_to, C::free}) {
        EXPECT_EQ(parse_objective_class(to_string(k)), k);
    }
    for (auto k : {RecordKind::neutral_start, RecordKind::classification, RecordKind::projection}) {
        EXPECT_EQ(parse_record_kind(to_string(k)), k);
    }
    EXPECT_THROW(parse_objective_class("better"), Error);
}
