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

#include <sstream>

#include "rismcrb/ris_model.hpp"

using namespace rismcrb;
using Catch::Matchers::WithinAbs;

constexpr double pi = std::numbers::pi;

TEST_CASE("amplitude closed-form values", "[ris_model]")
{
    CHECK(amplitude({1.0, 0.0, 2.0}, 0.7) == 1.0);
    CHECK_THAT(amplitude({0.2, 0.0, 2.0}, 0.0), WithinAbs(0.4, 1e-15));
    const AmplitudeModel m{0.3, 0.4, 1.7};
    CHECK_THAT(amplitude(m, m.phi + pi / 2), WithinAbs(1.0, 1e-15));
    CHECK_THAT(amplitude(m, m.phi - pi / 2), WithinAbs(0.3, 1e-15));
}

TEST_CASE("amplitude stays in [beta_min, 1] and is 2pi periodic", "[ris_model]")
{
    for (double bm : {0.0, 0.3, 0.8})
        for (double kappa : {0.5, 2.0, 6.0})
        {
            const AmplitudeModel m{bm, 1.1, kappa};
            for (int i = 0; i < 1000; ++i)
            {
                const double th = -pi + 2 * pi * i / 1000.0;
                const double a = amplitude(m, th);
                CHECK(a >= bm - 1e-15);
                CHECK(a <= 1.0 + 1e-15);
                CHECK_THAT(amplitude(m, th + 2 * pi), WithinAbs(a, 1e-12));
            }
        }
}

TEST_CASE("kappa = 0 gives unit amplitude", "[ris_model]")
{
    for (double th : {-3.0, -1.0, 0.0, 0.5, 2.9})
        CHECK(amplitude({0.1, 0.3, 0.0}, th) == 1.0);
}

TEST_CASE("model validation", "[ris_model]")
{
    CHECK_NOTHROW(AmplitudeModel{0.0, 0.0, 0.0}.validate());
    CHECK_THROWS_AS((AmplitudeModel{1.1, 0.0, 2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((AmplitudeModel{-0.1, 0.0, 2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((AmplitudeModel{0.5, -0.1, 2.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((AmplitudeModel{0.5, 0.0, -1.0}.validate()), InvalidArgument);
}

TEST_CASE("true and assumed weights", "[ris_model]")
{
    const PhaseProfile p = random_profile(7, 13, 42);
    const AmplitudeModel m{0.4, 0.0, 2.0};
    const CMat wt = make_weights(p, m, ModelMode::True);
    const CMat wa = make_weights(p, m, ModelMode::Assumed);
    for (Eigen::Index t = 0; t < 7; ++t)
        for (Eigen::Index k = 0; k < 13; ++k)
        {
            CHECK_THAT(std::abs(wa(t, k)), WithinAbs(1.0, 1e-15));
            CHECK_THAT(std::abs(wt(t, k)), WithinAbs(amplitude(m, p.theta(t, k)), 1e-15));
            CHECK_THAT(std::arg(wt(t, k)), WithinAbs(p.theta(t, k), 1e-14));
            CHECK_THAT(std::arg(wa(t, k)), WithinAbs(p.theta(t, k), 1e-14));
        }
    CHECK(make_weights(p, {1.0, 0.0, 2.0}, ModelMode::True) == make_weights(p, {1.0, 0.0, 2.0}, ModelMode::Assumed));

    PhaseProfile zero;
    zero.theta = Eigen::MatrixXd::Zero(1, 1);
    CHECK(std::abs(make_weights(zero, {0.2, 0.0, 2.0}, ModelMode::True)(0, 0) - cplx(0.4, 0.0)) < 1e-15);
}

TEST_CASE("random profiles are deterministic and uniform", "[ris_model]")
{
    const PhaseProfile a = random_profile(50, 2500, 9);
    const PhaseProfile b = random_profile(50, 2500, 9);
    CHECK(a.theta == b.theta);
    CHECK(a.seed == 9);
    CHECK(a.theta != random_profile(50, 2500, 10).theta);
    CHECK(a.theta.minCoeff() >= -pi);
    CHECK(a.theta.maxCoeff() < pi);

    const PhaseProfile big = random_profile(400, 2500, 123);
    CHECK(std::abs(big.theta.mean()) < 0.01);
    // variance of U(-pi, pi) is pi^2 / 3
    const double var = (big.theta.array() - big.theta.mean()).square().mean();
    CHECK_THAT(var, WithinAbs(pi * pi / 3.0, 0.01));
    // entry (t, m) does not depend on T
    CHECK(random_profile(3, 2500, 9).theta == a.theta.topRows(3));
    CHECK_THROWS_AS(random_profile(0, 3, 1), InvalidArgument);
}

TEST_CASE("profile csv round trip", "[ris_model]")
{
    const PhaseProfile a = random_profile(4, 6, 77);
    std::stringstream ss;
    write_profile_csv(a, ss);
    const PhaseProfile b = read_profile_csv(ss);
    CHECK(b.theta == a.theta);
    CHECK(b.seed == 77);
}

TEST_CASE("profile csv rejects malformed input", "[ris_model]")
{
    std::istringstream no_header("0,0,0.1\n");
    CHECK_THROWS_AS(read_profile_csv(no_header), InvalidArgument);
    std::istringstream missing("t,m,theta\n0,0,0.1\n1,1,0.2\n");
    CHECK_THROWS_AS(read_profile_csv(missing), InvalidArgument);
    std::istringstream dup("t,m,theta\n0,0,0.1\n0,0,0.2\n");
    CHECK_THROWS_AS(read_profile_csv(dup), InvalidArgument);
    std::istringstream range("t,m,theta\n0,0,3.5\n");
    CHECK_THROWS_AS(read_profile_csv(range), InvalidArgument);
}
