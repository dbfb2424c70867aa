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

#include "rismcrb/experiments/config.hpp"
#include "rismcrb/experiments/sweeps.hpp"
#include "rismcrb/experiments/verify.hpp"

using namespace rismcrb;
using namespace rismcrb::experiments;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace
{
    const char *small_cfg = R"(# a 12x12 surface, half a meter away
[scene]
ris_rows = 12
ris_cols = 12
ue_distance = 0.5
p_bs = -1.5, 1.2, 1.4

[model]
beta_min = 0.5

[signal]
transmissions = 12
snr_db = 30

[run]
n_profiles = 2
n_trials = 3
)";

    std::string csv(const Table &t)
    {
        std::ostringstream os;
        t.write_csv(os);
        return os.str();
    }

    int error_line(const std::string &text)
    {
        try
        {
            (void)parse_config_string(text);
        }
        catch (const ConfigError &e)
        {
            return e.line;
        }
        return -1;
    }

    double column(const Table &t, std::size_t row, const std::string &name)
    {
        for (std::size_t i = 0; i < t.header.size(); ++i)
            if (t.header[i] == name)
                return std::stod(t.rows.at(row)[i]);
        throw std::out_of_range(name);
    }
}

TEST_CASE("default configuration", "[experiments][config]")
{
    const auto c = parse_config_string("");
    CHECK(c.scene.carrier_hz == 28e9);
    CHECK(c.scene.ris_rows * c.scene.ris_cols == 2500);
    CHECK(c.scene.p_bs.isApprox(5.77 * Vec3(-1, 1, 1)));
    CHECK(c.scene.ue_distance == std::vector<double>{5.0});
    CHECK(c.model.kappa == 2.0);
    CHECK(c.model.phi == 0.0);
    CHECK(c.model.beta_min.size() == 11);
    CHECK(c.signal.transmissions == 50);
    CHECK(c.run.n_profiles == 20);
    CHECK(c.run.n_trials == 100);
    CHECK(c.run.master_seed == 1);
    CHECK(c.run.estimator.optimizer.n_starts == 10);
    CHECK(c.run.estimator.max_start_distance == 1000.0);
    const auto sc = c.scene_at(5.0);
    CHECK((sc.p_ue_true() - 5.0 * Vec3(1, 1, 1).normalized()).norm() < 1e-15);
}

TEST_CASE("config parsing", "[experiments][config]")
{
    const auto c = parse_config_string(R"(
[scene]
ris_rows = 10   # trailing comment
ris_cols=20
ue_distance = 2, 5.5
ris_sides = 30, 40
[model]
beta_min = 0.25,0.75
kappa = 3
[signal]
alpha = 0.5, -0.5
snr_db = -10, 0, 10
[run]
master_seed = 18446744073709551615
n_starts = 4
jacobi_order = 8
[output]
formats = csv, gnuplot
trial_log = true
)");
    CHECK(c.scene.ris_rows == 10);
    CHECK(c.scene.ris_cols == 20);
    CHECK(c.scene.ue_distance == std::vector<double>{2.0, 5.5});
    CHECK(c.scene.ris_sides == std::vector<int>{30, 40});
    CHECK(c.model.beta_min == std::vector<double>{0.25, 0.75});
    CHECK(c.model.kappa == 3.0);
    CHECK(c.signal.alpha == cplx(0.5, -0.5));
    CHECK(c.signal.snr_db.size() == 3);
    CHECK(c.run.master_seed == 18446744073709551615ULL);
    CHECK(c.run.optimizer.n_starts == 4);
    CHECK(c.run.estimator.optimizer.n_starts == 4);
    CHECK(c.run.estimator.angles.jacobi_order == 8);
    CHECK(c.wants_format("gnuplot"));
    CHECK(c.output.trial_log);

    const auto w = parse_config_string("[scene]\nwavelength_m = 0.01\n");
    CHECK_THAT(w.scene.carrier_hz, WithinRel(speed_of_light / 0.01, 1e-15));
}

TEST_CASE("config errors carry line numbers", "[experiments][config]")
{
    CHECK(error_line("[scene]\nris_rows = 10\nbetamin = 0.3\n") == 3);
    CHECK(error_line("\n\n[nosuch]\n") == 3);
    CHECK(error_line("ris_rows = 3\n") == 1);
    CHECK(error_line("[model]\nkappa = 2\nkappa = 3\n") == 3);
    CHECK(error_line("[model]\nkappa =\n") == 2);
    CHECK(error_line("[model]\nkappa 2\n") == 2);
    CHECK(error_line("[model]\nbeta_min = 0.5, 1.5\n") == 2);
    CHECK(error_line("[model]\nbeta_min = 0.5,,1\n") == 2);
    CHECK(error_line("[scene]\n\nris_rows = ten\n") == 3);
    CHECK(error_line("[signal]\nsnr_db = 1e999\n") == 2);
    CHECK(error_line("[run]\nn_trials = 0\n") == 2);
    CHECK(error_line("[output]\nformats = csv, png\n") == 2);
    CHECK(error_line("[scene\n") == 1);
    CHECK(error_line("[scene]\ncarrier_hz = 1e9\nwavelength_m = 0.3\n") > 0);
    CHECK(error_line("[model]\nkappa = 2\n") == -1);
    try
    {
        (void)parse_config_string("[scene]\nbetamin = 1\n");
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK_THAT(e.what(), ContainsSubstring("line 2"));
        CHECK_THAT(e.what(), ContainsSubstring("betamin"));
    }
    CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("number formatting", "[experiments][table]")
{
    CHECK(fmt(0.12345678912345) == "0.123456789");
    CHECK(fmt(123456789012.0) == "1.23456789e+11");
    CHECK(fmt(1.0) == "1");
    CHECK(fmt(-0.0) == "0");
    CHECK(fmt(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(fmt(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(fmt(std::uint64_t{18446744073709551615ULL}) == "18446744073709551615");
}

TEST_CASE("table writers", "[experiments][table]")
{
    Table t;
    t.header = {"a", "b"};
    t.add(1, 0.5);
    t.add(1, 0.25);
    t.add(2, 1.0);
    CHECK(csv(t) == "a,b\n1,0.5\n1,0.25\n2,1\n");
    std::ostringstream g;
    t.write_gnuplot(g);
    CHECK(g.str() == "# a b\n1 0.5\n1 0.25\n\n2 1\n");
    CHECK_THROWS_AS(t.add(1), InvalidArgument);
}

TEST_CASE("parallel loop rethrows the lowest failing index", "[experiments][parallel]")
{
    ParallelFor pf(4);
    std::vector<int> out(100, 0);
    pf(100, [&](int i) { out[static_cast<std::size_t>(i)] = i * i; });
    for (int i = 0; i < 100; ++i)
        CHECK(out[static_cast<std::size_t>(i)] == i * i);
    try
    {
        pf(50, [](int i)
           {
               if (i % 7 == 3)
                   throw std::runtime_error(std::to_string(i));
           });
        FAIL("expected an exception");
    }
    catch (const std::runtime_error &e)
    {
        CHECK(std::string(e.what()) == "3");
    }
}

TEST_CASE("single-point sweep", "[experiments][sweep]")
{
    auto c = parse_config_string(small_cfg);
    c.run.n_profiles = 1;
    const Table t = run_sweep_beta(c, ParallelFor(1));
    REQUIRE(t.rows.size() == 1);
    CHECK(t.header[0] == "beta_min");
    CHECK(column(t, 0, "beta_min") == 0.5);
    CHECK(column(t, 0, "peb_lb") >= column(t, 0, "peb_mcrb"));
    CHECK(column(t, 0, "profile_seed") == static_cast<double>(profile_seed(1, 0)));

    // one-profile average is the single-profile value
    c.scene.ris_sides = {12};
    const Table s = run_sweep_size(c, ParallelFor(1));
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0][0] == "144");
    CHECK(s.rows[0][2] == t.rows[0][2]);
    CHECK(s.rows[0][3] == t.rows[0][5]);
}

TEST_CASE("sweeps are byte-identical across thread counts", "[experiments][sweep]")
{
    auto c = parse_config_string(small_cfg);
    c.model.beta_min = {0.3, 1.0};
    c.signal.snr_db = {10, 30};
    const std::string a = csv(run_sweep_beta(c, ParallelFor(1)));
    const std::string b = csv(run_sweep_beta(c, ParallelFor(3)));
    CHECK(a == b);
    CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 2 * 2 * 2);
    CHECK(csv(run_pseudo_true(c, ParallelFor(1))) == csv(run_pseudo_true(c, ParallelFor(4))));

    c.model.beta_min = {0.5};
    const auto s1 = run_sweep_snr(c, ParallelFor(1));
    const auto s2 = run_sweep_snr(c, ParallelFor(3));
    CHECK(csv(s1.summary) == csv(s2.summary));
    CHECK(csv(s1.trials) == csv(s2.trials));
    CHECK(s1.trials.rows.size() == 2 * 3);

    // a different seed changes the output
    c.set_seed(2);
    CHECK(csv(run_sweep_snr(c, ParallelFor(1)).summary) != csv(s1.summary));
}

TEST_CASE("SNR sweep columns follow the bound scaling", "[experiments][sweep]")
{
    auto c = parse_config_string(small_cfg);
    c.signal.snr_db = {10, 30};
    const auto s = run_sweep_snr(c, ParallelFor(1)).summary;
    REQUIRE(s.rows.size() == 2);
    CHECK_THAT(column(s, 1, "peb_mcrb") / column(s, 0, "peb_mcrb"), WithinRel(0.1, 1e-6));
    CHECK(column(s, 1, "bias_norm") == column(s, 0, "bias_norm"));
    CHECK(column(s, 0, "n_trials") == 3);
    CHECK(column(s, 1, "rmse") > 0.0);
}

TEST_CASE("verify passes on a small scene", "[experiments][verify]")
{
    auto c = parse_config_string(small_cfg);
    c.model.beta_min = {0.3, 1.0};
    const auto rep = run_verify(c, ParallelFor(1));
    std::ostringstream os;
    rep.print(os);
    INFO(os.str());
    CHECK(rep.ok());
    CHECK(rep.checks.size() == 4 + 2 * 4 + 3);
}

TEST_CASE("sweep validation", "[experiments][sweep]")
{
    auto c = parse_config_string(small_cfg);
    c.model.beta_min.clear();
    CHECK_THROWS_AS(run_sweep_beta(c, ParallelFor(1)), ConfigError);
}

TEST_CASE("ill-conditioned cells become NaN rows", "[experiments][sweep]")
{
    // With 64 elements at 0.8 m the first profile's pseudo-true point runs off
    // to the far field at beta_min 0.3, leaving A singular.
    auto c = parse_config_string(small_cfg);
    c.scene.p_bs = ExperimentConfig{}.scene.p_bs;
    c.scene.ue_distance = {0.8};
    c.scene.ris_rows = c.scene.ris_cols = 8;
    c.scene.ris_sides = {8};
    c.model.beta_min = {0.3};
    c.run.n_profiles = 3;
    const Table t = run_sweep_beta(c, ParallelFor(1));
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][2] == "nan");
    CHECK(column(t, 0, "condition_A") > 1e12);
    CHECK(column(t, 0, "bias_norm") > 1e3);
    CHECK(std::isfinite(column(t, 1, "peb_lb")));

    const Table s = run_sweep_size(c, ParallelFor(1));
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0][4] == "2");
    CHECK_THAT(column(s, 0, "avg_peb_lb"), WithinRel(0.5 * (column(t, 1, "peb_lb") + column(t, 2, "peb_lb")), 1e-8));
}
