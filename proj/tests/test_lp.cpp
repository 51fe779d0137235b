#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "paintmo/error.hpp"
#include "paintmo/lp.hpp"

using namespace paintmo;

TEST(SolveLp, MaximizeBounded) {
    LinearProgram lp(Sense::maximize);
    lp.add_variable(1.0);
    lp.add_constraint({1.0}, Relation::less_equal, 3.0);
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 3.0, 1e-12);
    EXPECT_NEAR(s.point[0], 3.0, 1e-12);
}

TEST(SolveLp, CoveringRow) {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_variable(1.0);
    lp.add_constraint({1.0, 1.0}, Relation::greater_equal, 1.0);
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 1.0, 1e-12);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_constraint({1.0}, Relation::less_equal, 0.0);
    lp.add_constraint({1.0}, Relation::greater_equal, 1.0);
    EXPECT_EQ(solve_lp(lp).status, LpStatus::infeasible);

    LinearProgram up(Sense::maximize);
    up.add_variable(1.0);
    EXPECT_EQ(solve_lp(up).status, LpStatus::unbounded);
}

TEST(SolveLp, FreeVariablesAndEquality) {
    // min t s.t. t >= x - 2, t >= 2 - x, x = 5 -> t = 3
    LinearProgram lp;
    lp.add_variable(1.0, -kInfinity, kInfinity);
    lp.add_variable(0.0, -kInfinity, kInfinity);
    lp.add_constraint({1.0, -1.0}, Relation::greater_equal, -2.0);
    lp.add_constraint({1.0, 1.0}, Relation::greater_equal, 2.0);
    lp.add_constraint({0.0, 1.0}, Relation::equal, 5.0);
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 3.0, 1e-10);
    EXPECT_NEAR(s.point[1], 5.0, 1e-10);
}

TEST(SolveLp, UpperBoundsAndNegativeLower) {
    LinearProgram lp(Sense::maximize);
    lp.add_variable(2.0, -1.0, 4.0);
    lp.add_variable(-1.0, -3.0, 2.0);
    const auto s = solve_lp(lp);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_NEAR(s.value, 11.0, 1e-10);
}

TEST(SolveLp, DimensionMismatchIsContractError) {
    LinearProgram lp;
    lp.add_variable(1.0);
    EXPECT_THROW(lp.add_constraint({1.0, 2.0}, Relation::less_equal, 1.0), Error);
}

TEST(SolveLp, RandomFeasibleProgramsSatisfyRows) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        LinearProgram lp(Sense::maximize);
        const std::size_t n = 2 + trial % 4;
        for (std::size_t j = 0; j < n; ++j) lp.add_variable(u(rng));
        for (int r = 0; r < 6; ++r) {
            std::vector<double> row(n);
            for (auto& v : row) v = u(rng);
            lp.add_constraint(row, Relation::less_equal, 1.0 + u(rng));
        }
        const auto s = solve_lp(lp);
        ASSERT_EQ(s.status, LpStatus::optimal);
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_GE(s.point[j], -1e-9);
            obj += lp.objective()[j] * s.point[j];
        }
        EXPECT_NEAR(obj, s.value, 1e-9);
        for (const auto& c : lp.constraints()) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += c.coefficients[j] * s.point[j];
            EXPECT_LE(lhs, c.rhs + 1e-9);
        }
    }
}

TEST(DominatingGap, Examples) {
    const std::vector<Point> v{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    const auto self = max_dominating_gap(Simplex({0}), Simplex({0}), v);
    ASSERT_TRUE(self);
    EXPECT_NEAR(*self, 0.0, 1e-12);
    const auto pq = max_dominating_gap(Simplex({0}), Simplex({1}), v);
    ASSERT_TRUE(pq);
    EXPECT_NEAR(*pq, 2.0, 1e-12);
    EXPECT_FALSE(max_dominating_gap(Simplex({1}), Simplex({0}), v));
    const auto seg = max_dominating_gap(Simplex({2, 3}), Simplex({2, 3}), v);
    ASSERT_TRUE(seg);
    EXPECT_NEAR(*seg, 0.0, 1e-9);
    const auto sampled = oracle::sampled_dominating_gap(Simplex({2, 3}), Simplex({2, 3}), v, 200);
    ASSERT_TRUE(sampled);
    EXPECT_NEAR(*sampled, 0.0, 1e-9);
}

TEST(DominatingGap, AtLeastSampledGap) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Point> v(5, Point(2));
        for (auto& p : v) {
            for (auto& x : p) x = u(rng);
        }
        const Simplex p({0, 1});
        const Simplex q({2, 3, 4});
        const auto exact = max_dominating_gap(p, q, v);
        const auto sampled = oracle::sampled_dominating_gap(p, q, v, 40);
        if (sampled) {
            ASSERT_TRUE(exact);
            EXPECT_GE(*exact, *sampled - 1e-9);
        }
        if (!exact) EXPECT_FALSE(sampled);
    }
}

TEST(Membership, Residual) {
    const std::vector<Point> v{{0, 0}, {1, 0}, {0, 1}};
    const Simplex s({0, 1, 2});
    EXPECT_NEAR(simplex_membership_residual(Point{0.2, 0.3}, s, v), 0.0, 1e-12);
    EXPECT_GT(simplex_membership_residual(Point{1, 1}, s, v), 0.5);
}
