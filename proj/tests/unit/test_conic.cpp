/*
 Copyright 2026 The cloudmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "cloudmpc/conic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace cloudmpc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ConicProgram empty_program(int n)
{
    ConicProgram p;
    p.c = Vector::Zero(n);
    p.A = Matrix::Zero(0, n);
    p.b = Vector::Zero(0);
    p.lower = Vector::Constant(n, -kInf);
    p.upper = Vector::Constant(n, kInf);
    return p;
}

void add_row(ConicProgram& p, std::initializer_list<double> a, double b)
{
    const auto r = p.A.rows();
    p.A.conservativeResize(r + 1, p.A.cols());
    p.b.conservativeResize(r + 1);
    Eigen::Index j = 0;
    for (double v : a) p.A(r, j++) = v;
    p.b[r] = b;
}

// Minimum of c^T z over the intersection points of every pair of rows (2-D LP oracle).
double lp_vertex_oracle(const ConicProgram& p)
{
    double best = kInf;
    for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < p.A.rows(); ++j) {
            Eigen::Matrix2d M;
            M << p.A.row(i), p.A.row(j);
            if (std::abs(M.determinant()) < 1e-10) continue;
            const Eigen::Vector2d z = M.inverse() * (Eigen::Vector2d(p.b[i], p.b[j]));
            if (((p.A * Vector(z)) - p.b).maxCoeff() <= 1e-9) best = std::min(best, p.c.dot(Vector(z)));
        }
    }
    return best;
}

} // namespace

TEST(Conic, SmallLinearProgram)
{
    ConicProgram p = empty_program(2);
    p.c << -1, -1;
    add_row(p, {1, 2}, 4);
    add_row(p, {3, 1}, 6);
    add_row(p, {-1, 0}, 0);
    add_row(p, {0, -1}, 0);
    const ConicResult r = solve_conic(p);
    ASSERT_EQ(r.status, ConicStatus::Optimal);
    EXPECT_NEAR(r.objective, lp_vertex_oracle(p), 1e-6);
    EXPECT_NEAR(r.z[0], 1.6, 1e-5);
    EXPECT_NEAR(r.z[1], 1.2, 1e-5);
    EXPECT_LE(r.max_violation, 1e-6);
}

TEST(Conic, RandomLinearProgramsMatchVertexEnumeration)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int solved = 0;
    for (int s = 0; s < 30; ++s) {
        ConicProgram p = empty_program(2);
        p.c << u(rng), u(rng);
        add_row(p, {1, 0}, 5);
        add_row(p, {-1, 0}, 5);
        add_row(p, {0, 1}, 5);
        add_row(p, {0, -1}, 5);
        for (int k = 0; k < 4; ++k) add_row(p, {u(rng), u(rng)}, 1.0 + u(rng));
        const double oracle = lp_vertex_oracle(p);
        const ConicResult r = solve_conic(p);
        if (!std::isfinite(oracle)) {
            EXPECT_EQ(r.status, ConicStatus::Infeasible);
            continue;
        }
        ASSERT_EQ(r.status, ConicStatus::Optimal) << s;
        EXPECT_NEAR(r.objective, oracle, 1e-5 * std::max(1.0, std::abs(oracle))) << s;
        ++solved;
    }
    EXPECT_GT(solved, 10);
}

TEST(Conic, ProjectionOntoHalfspaceThroughACone)
{
    // min t  s.t.  ||(x, y) - (3, 4)|| <= t,  x + y <= 1.  Distance is (7 - 1) / sqrt(2).
    ConicProgram p = empty_program(3);
    p.c << 0, 0, 1;
    add_row(p, {1, 1, 0}, 1);
    SecondOrderCone cone;
    cone.F = Matrix::Zero(2, 3);
    cone.F(0, 0) = 1;
    cone.F(1, 1) = 1;
    cone.f = Vector(2);
    cone.f << -3, -4;
    cone.g = Vector(3);
    cone.g << 0, 0, 1;
    cone.h = 0;
    p.cones.push_back(cone);
    const ConicResult r = solve_conic(p);
    ASSERT_EQ(r.status, ConicStatus::Optimal);
    EXPECT_NEAR(r.objective, 6.0 / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(r.z[0], 0.0, 1e-4);
    EXPECT_NEAR(r.z[1], 1.0, 1e-4);
    EXPECT_LE(conic_violation(p, r.z), 1e-6);
}

TEST(Conic, DetectsInfeasibility)
{
    ConicProgram p = empty_program(1);
    p.c << 1;
    add_row(p, {1}, -1);
    add_row(p, {-1}, -1);
    const ConicResult r = solve_conic(p);
    EXPECT_EQ(r.status, ConicStatus::Infeasible);
    EXPECT_GT(r.phase1_sigma, 0.5);
}

TEST(Conic, FixedVariablesAreEliminated)
{
    ConicProgram p = empty_program(2);
    p.c << 1, 1;
    add_row(p, {1, -1}, 0);  // y >= x
    p.lower << 2, -kInf;
    p.upper << 2, kInf;
    const ConicResult r = solve_conic(p);
    ASSERT_EQ(r.status, ConicStatus::Optimal);
    EXPECT_EQ(r.z[0], 2.0);
    EXPECT_NEAR(r.z[1], 2.0, 1e-6);
}

TEST(Conic, WarmStartGivesSameOptimum)
{
    ConicProgram p = empty_program(2);
    p.c << 1, 2;
    add_row(p, {-1, -1}, -1);
    p.lower << 0, 0;
    p.upper << 10, 10;
    const Vector start = Vector::Constant(2, 3.0);
    const ConicResult cold = solve_conic(p);
    const ConicResult warm = solve_conic(p, {}, &start);
    ASSERT_EQ(warm.status, ConicStatus::Optimal);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-7);
    EXPECT_NEAR(warm.objective, 1.0, 1e-7);
}

TEST(Conic, LargeMagnitudeRowsStillStartPhaseOne)
{
    // Rows of magnitude 1e12 used to swamp the initial relaxation margin.
    ConicProgram p = empty_program(2);
    p.c << 1, 1;
    add_row(p, {-1e12, 0}, -1e12);
    add_row(p, {0, -1}, -1);
    p.upper << 1e13, 1e13;
    const ConicResult r = solve_conic(p);
    ASSERT_EQ(r.status, ConicStatus::Optimal);
    EXPECT_NEAR(r.z[0], 1.0, 1e-6);
    EXPECT_NEAR(r.z[1], 1.0, 1e-6);
}
