// SPDX-License-Identifier: Apache-2.0
//
// rismcrb - localization bounds under RIS amplitude-model mismatch
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include "rismcrb/optimizer.hpp"

using namespace rismcrb;
using V3 = Eigen::Vector3d;

namespace
{
    double rosenbrock3(const V3 &x)
    {
        return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2) + 100 * std::pow(x[2] - x[1] * x[1], 2) +
               std::pow(1 - x[1], 2);
    }
}

TEST_CASE("convex quadratic from several starts", "[optimizer]")
{
    const V3 c(1.5, -2.0, 0.25);
    auto f = [&](const V3 &x) { return (x - c).squaredNorm(); };
    OptimizerSettings s;
    for (const V3 &x0 : {V3(0, 0, 0), V3(10, 10, -10), V3(1.4, -2.1, 0.3)})
    {
        const auto r = local_minimize<3>(f, x0, s);
        CHECK(r.converged);
        CHECK((r.x - c).norm() < 10 * s.x_tol);
        CHECK(r.f <= f(x0));
    }
}

TEST_CASE("constant objective returns the start", "[optimizer]")
{
    const V3 x0(0.3, -0.7, 2.0);
    const auto r = local_minimize<3>([](const V3 &) { return 4.0; }, x0, OptimizerSettings{});
    CHECK(r.converged);
    CHECK(r.x == x0);
    CHECK(r.f == 4.0);
}

TEST_CASE("Rosenbrock from near the optimum", "[optimizer]")
{
    const auto r = local_minimize<3>(rosenbrock3, V3(0.9, 1.1, 1.05), OptimizerSettings{});
    CHECK((r.x - V3(1, 1, 1)).norm() < 1e-6);
}

TEST_CASE("multi_start with one start equals local_minimize", "[optimizer]")
{
    const V3 x0(-0.5, 0.8, 1.3);
    OptimizerSettings s;
    const auto a = local_minimize<3>(rosenbrock3, x0, s);
    const auto b = multi_start<3>(rosenbrock3, {x0}, s);
    CHECK(a.x == b.x);
    CHECK(a.f == b.f);
    CHECK(b.best_index == 0);
    const auto c = multi_start<3>(rosenbrock3, {x0, x0, x0}, s);
    CHECK(c.x == a.x);
    CHECK(c.best_index == 0);
}

TEST_CASE("two-basin objective: the global basin wins", "[optimizer]")
{
    // f(x) = (x0^2 - 1)^2 + 0.3 x0 + |x1|^2 + |x2|^2 : deeper basin near x0 = -1
    auto f = [](const V3 &x) { return std::pow(x[0] * x[0] - 1, 2) + 0.3 * x[0] + x[1] * x[1] + x[2] * x[2]; };
    OptimizerSettings s;
    const auto r = multi_start<3>(f, {V3(1.2, 0.1, 0.1), V3(-1.2, 0.1, -0.1)}, s);
    CHECK(r.best_index == 1);
    CHECK(r.x[0] < -0.9);
    CHECK(r.log[0].x[0] > 0.9);
    for (const auto &l : r.log)
        CHECK(r.f <= l.f);
}

TEST_CASE("monotone improvement and reproducibility", "[optimizer]")
{
    auto f = [](const V3 &x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.1 * x.squaredNorm() + x[2] * x[2]; };
    std::vector<V3> starts{V3(2, 1, -1), V3(-3, 4, 0.5), V3(0.1, 0.2, 0.3)};
    OptimizerSettings s;
    const auto a = multi_start<3>(f, starts, s);
    const auto b = multi_start<3>(f, starts, s);
    CHECK(a.x == b.x);
    CHECK(a.f == b.f);
    for (const auto &x0 : starts)
        CHECK(a.f <= f(x0));
}

TEST_CASE("non-finite values flag divergence", "[optimizer]")
{
    auto f = [](const V3 &x) { return x[0] < 0 ? std::numeric_limits<double>::quiet_NaN() : (x - V3(0.5, 0, 0)).squaredNorm(); };
    const auto r = local_minimize<3>(f, V3(0.01, 0.3, 0.3), OptimizerSettings{});
    CHECK(std::isfinite(r.f));
    CHECK(r.x[0] >= 0.0);

    auto bad = [](const V3 &) { return std::numeric_limits<double>::infinity(); };
    const auto d = local_minimize<3>(bad, V3(1, 2, 3), OptimizerSettings{});
    CHECK(d.diverged);
    CHECK(!std::isfinite(d.f));
    CHECK_THROWS_AS(multi_start<3>(bad, {V3(1, 2, 3), V3(0, 0, 0)}, OptimizerSettings{}), NoSolution);
    CHECK_THROWS_AS(multi_start<3>(bad, {}, OptimizerSettings{}), InvalidArgument);
}

TEST_CASE("gradient refinement keeps or improves the simplex result", "[optimizer]")
{
    OptimizerSettings s;
    s.x_tol = 1e-4;
    const auto a = local_minimize<3>(rosenbrock3, V3(0.5, 0.5, 0.5), s);
    s.gradient_refine = true;
    const auto b = local_minimize<3>(rosenbrock3, V3(0.5, 0.5, 0.5), s);
    CHECK(b.f <= a.f);
}

TEST_CASE("settings validation", "[optimizer]")
{
    OptimizerSettings s;
    s.x_tol = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.n_starts = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("works in other dimensions", "[optimizer]")
{
    using V2 = Eigen::Vector2d;
    const auto r = local_minimize<2>([](const V2 &x) { return (x - V2(3, -1)).squaredNorm(); }, V2(0, 0), OptimizerSettings{});
    CHECK((r.x - V2(3, -1)).norm() < 1e-6);
}
