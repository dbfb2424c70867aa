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

#include <cmath>

#include "rismcrb/geometry.hpp"

using namespace rismcrb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    SceneConfig reference_scene()
    {
        return SceneConfig::make(28e9, 50, 50, 0.0, Vec3::Zero(), 5.77 * Vec3(-1, 1, 1), 5.0 * Vec3(1, 1, 1).normalized());
    }

    // Independent scalar evaluation of one steering entry.
    cplx steering_entry(double lambda, const Vec3 &p, const Vec3 &pm, const Vec3 &pris)
    {
        const long double dm = std::sqrt((long double)(p.x() - pm.x()) * (p.x() - pm.x()) +
                                         (long double)(p.y() - pm.y()) * (p.y() - pm.y()) +
                                         (long double)(p.z() - pm.z()) * (p.z() - pm.z()));
        const long double dr = std::sqrt((long double)(p.x() - pris.x()) * (p.x() - pris.x()) +
                                         (long double)(p.y() - pris.y()) * (p.y() - pris.y()) +
                                         (long double)(p.z() - pris.z()) * (p.z() - pris.z()));
        const long double ph = -2.0L * 3.14159265358979323846264338327950288L * (dm - dr) / lambda;
        return {static_cast<double>(std::cos(ph)), static_cast<double>(std::sin(ph))};
    }
}

TEST_CASE("single-element grid sits at the center", "[geometry]")
{
    const auto g = build_ris_grid(1, 1, 0.005, Vec3::Zero());
    REQUIRE(g.rows() == 1);
    CHECK(g.row(0).norm() == 0.0);
}

TEST_CASE("2x2 grid is centered and row-major", "[geometry]")
{
    const auto g = build_ris_grid(2, 2, 1.0, Vec3::Zero());
    const double expect[4][3] = {{-0.5, -0.5, 0}, {-0.5, 0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}};
    for (int m = 0; m < 4; ++m)
        for (int k = 0; k < 3; ++k)
            CHECK(g(m, k) == expect[m][k]);
}

TEST_CASE("reference 50x50 lattice", "[geometry]")
{
    const auto s = reference_scene();
    CHECK(s.n_elements() == 2500);
    CHECK_THAT(s.wavelength_m() * s.carrier_hz(), WithinRel(speed_of_light, 1e-6));
    CHECK_THAT(s.spacing_m(), WithinRel(0.5 * speed_of_light / 28e9, 1e-15));
    const auto &p = s.element_positions();
    CHECK(p.col(2).cwiseAbs().maxCoeff() == 0.0);
    const Vec3 centroid = p.colwise().mean().transpose();
    CHECK(centroid.norm() < 1e-12 * s.spacing_m());
    // neighbors along rows (x) and columns (y)
    for (int r = 0; r < 49; ++r)
        for (int c = 0; c < 49; ++c)
        {
            const int m = r * 50 + c;
            CHECK_THAT((p.row(m + 1) - p.row(m)).norm(), WithinRel(s.spacing_m(), 1e-12));
            CHECK_THAT((p.row(m + 50) - p.row(m)).norm(), WithinRel(s.spacing_m(), 1e-12));
            CHECK(p(m + 50, 0) > p(m, 0));
            CHECK(p(m + 1, 1) > p(m, 1));
        }
}

TEST_CASE("grid rejects bad dimensions", "[geometry]")
{
    CHECK_THROWS_AS(build_ris_grid(0, 3, 1.0, Vec3::Zero()), InvalidArgument);
    CHECK_THROWS_AS(build_ris_grid(3, -1, 1.0, Vec3::Zero()), InvalidArgument);
    CHECK_THROWS_AS(build_ris_grid(3, 3, 0.0, Vec3::Zero()), InvalidArgument);
    CHECK_THROWS_AS(SceneConfig::make(-1.0, 3, 3, 0.0, Vec3::Zero(), Vec3(1, 1, 1), Vec3(1, 2, 3)), InvalidArgument);
}

TEST_CASE("steering entry of a center element is exactly one", "[geometry]")
{
    const auto s = SceneConfig::make(28e9, 3, 3, 0.0, Vec3(0.1, -0.2, 0.3), Vec3(3, 1, 2), Vec3(1, 2, 3));
    const CVec a = steering_vector(s, Vec3(0.7, -1.1, 4.0));
    CHECK(a[4] == cplx(1.0, 0.0));
}

TEST_CASE("steering phase for a hand-computed toy", "[geometry]")
{
    // lambda = 2, p_m = (1, 0, 0), p = (0, 0, 1): phase = -pi (sqrt(2) - 1)
    const double lambda = 2.0;
    const auto s = SceneConfig::make(speed_of_light / lambda, 1, 2, 2.0, Vec3(0, 0, 0), Vec3(0, 5, 5), Vec3(0, 0, 1));
    // elements at y = -1 and y = +1; rotate the toy onto the y axis
    const CVec a = steering_vector(s, Vec3(0, 0, 1));
    CHECK_THAT(std::arg(a[1]), WithinAbs(-std::numbers::pi * (std::sqrt(2.0) - 1.0), 1e-12));
    CHECK_THAT(std::arg(a[1]), WithinAbs(-1.30129, 1e-5));
}

TEST_CASE("steering matches an independent long-double evaluation", "[geometry]")
{
    const auto s = reference_scene();
    const Vec3 p(1.3, 2.9, 4.1);
    const CVec a = steering_vector(s, p);
    double worst = 0.0;
    for (Eigen::Index m = 0; m < s.n_elements(); ++m)
    {
        CHECK_THAT(std::abs(a[m]), WithinAbs(1.0, 1e-14));
        worst = std::max(worst, std::abs(a[m] - steering_entry(s.wavelength_m(), p, s.element_positions().row(m), s.p_ris())));
    }
    // phases of O(k * aperture) ~ 1e2 rad: 1e-14 relative to the phase magnitude
    CHECK(worst < 1e-12);
}

TEST_CASE("translation leaves the steering vector unchanged", "[geometry]")
{
    const Vec3 shift(0.37, -1.25, 2.5);
    const auto s0 = SceneConfig::make(28e9, 8, 6, 0.0, Vec3::Zero(), Vec3(-3, 2, 4), Vec3(1, 2, 3));
    const auto s1 = SceneConfig::make(28e9, 8, 6, 0.0, shift, Vec3(-3, 2, 4) + shift, Vec3(1, 2, 3) + shift);
    const Vec3 p(0.4, 0.9, 2.2);
    CHECK((steering_vector(s0, p) - steering_vector(s1, p + shift)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((combined_response(s0, p) - combined_response(s1, p + shift)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("combined response", "[geometry]")
{
    const auto s = SceneConfig::make(28e9, 4, 5, 0.0, Vec3::Zero(), Vec3(-2, 1, 3), Vec3(1, 1, 2));
    const CVec at_bs = combined_response(s, s.p_bs());
    CHECK((at_bs - s.bs_response().cwiseProduct(s.bs_response())).cwiseAbs().maxCoeff() < 1e-15);
    const CVec b = combined_response(s, Vec3(0.3, 0.2, 1.7));
    CHECK((b.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("combined response of a 2-element toy", "[geometry]")
{
    const double lambda = 0.01;
    const auto s = SceneConfig::make(speed_of_light / lambda, 1, 2, lambda / 2, Vec3::Zero(), Vec3(0, 0.2, 0.3),
                                     Vec3(0.1, 0, 0.2));
    const Vec3 p(0.1, 0.0, 0.2);
    const CVec b = combined_response(s, p);
    const auto &e = s.element_positions();
    for (int m = 0; m < 2; ++m)
    {
        const cplx want = steering_entry(lambda, p, e.row(m), s.p_ris()) * steering_entry(lambda, s.p_bs(), e.row(m), s.p_ris());
        CHECK(std::abs(b[m] - want) < 1e-12);
    }
}

TEST_CASE("position on an element is singular", "[geometry]")
{
    const auto s = SceneConfig::make(28e9, 2, 2, 0.0, Vec3::Zero(), Vec3(-2, 1, 3), Vec3(1, 1, 2));
    CHECK_THROWS_AS(steering_vector(s, s.element_positions().row(2).transpose()), SingularGeometry);
    CHECK_THROWS_AS(relative_geometry(s, s.p_ris()), SingularGeometry);
}

TEST_CASE("relative geometry is consistent", "[geometry]")
{
    const auto s = SceneConfig::make(28e9, 5, 4, 0.0, Vec3::Zero(), Vec3(-2, 1, 3), Vec3(1, 1, 2));
    const Vec3 p(0.5, -0.4, 1.2);
    const auto g = relative_geometry(s, p);
    for (Eigen::Index m = 0; m < s.n_elements(); ++m)
    {
        CHECK_THAT(g.unit.row(m).norm(), WithinAbs(1.0, 1e-15));
        const Vec3 back = s.element_positions().row(m).transpose() + g.dist[m] * g.unit.row(m).transpose();
        CHECK((back - p).norm() < 1e-14);
    }
    CHECK_THAT(g.dist_center, WithinRel(p.norm(), 1e-15));
}

TEST_CASE("with_ue keeps the lattice", "[geometry]")
{
    const auto s = reference_scene();
    const auto t = s.with_ue(Vec3(1, 2, 3));
    CHECK(t.p_ue_true() == Vec3(1, 2, 3));
    CHECK(t.element_positions() == s.element_positions());
    CHECK(t.bs_response() == s.bs_response());
}
