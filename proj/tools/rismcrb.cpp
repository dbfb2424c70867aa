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

// rismcrb command line: sweep-beta | sweep-size | sweep-snr | pseudo-true | verify

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rismcrb/experiments/verify.hpp"

namespace fs = std::filesystem;
using namespace rismcrb;
using namespace rismcrb::experiments;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_verify_failed = 1;
    constexpr int exit_config_error = 2;
    constexpr int exit_runtime_error = 3;

    struct Options
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<int> profiles;
        std::optional<int> trials;
        std::optional<int> threads;
        bool full_scale = false;
    };

    ExperimentConfig resolve(const Options &o)
    {
        ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
        if (o.full_scale)
        {
            cfg.run.n_profiles = cfg.run.full_scale_profiles;
            cfg.run.n_trials = cfg.run.full_scale_trials;
        }
        if (o.seed)
            cfg.set_seed(*o.seed);
        if (o.profiles)
            cfg.run.n_profiles = *o.profiles;
        if (o.trials)
            cfg.run.n_trials = *o.trials;
        if (o.threads)
            cfg.run.threads = *o.threads;
        if (!o.out.empty())
            cfg.output.directory = o.out;
        if (cfg.run.n_profiles < 1 || cfg.run.n_trials < 1 || cfg.run.threads < 1)
            throw ConfigError("profiles, trials and threads must be >= 1");
        return cfg;
    }

    void emit(const ExperimentConfig &cfg, const std::string &stem, const Table &t)
    {
        fs::create_directories(cfg.output.directory);
        const fs::path base = fs::path(cfg.output.directory) / stem;
        if (cfg.wants_format("csv"))
        {
            write_file(base.string() + ".csv", t);
            std::cout << "wrote " << base.string() << ".csv (" << t.rows.size() << " rows)\n";
        }
        if (cfg.wants_format("gnuplot"))
        {
            write_file(base.string() + ".dat", t, true);
            std::cout << "wrote " << base.string() << ".dat\n";
        }
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Localization bounds and MML estimation under RIS amplitude-model mismatch"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *sub)
    {
        sub->add_option("--config", opt.config, "experiment config file");
        sub->add_option("--out", opt.out, "output directory (overrides [output] directory)");
        sub->add_option("--seed", opt.seed, "master seed (overrides [run] master_seed)");
        sub->add_option("--profiles", opt.profiles, "number of random phase profiles")->check(CLI::PositiveNumber);
        sub->add_option("--trials", opt.trials, "Monte Carlo trials per SNR point")->check(CLI::PositiveNumber);
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--full-scale", opt.full_scale, "use full_scale_profiles / full_scale_trials");
    };
    auto *beta = app.add_subcommand("sweep-beta", "LB, MCRB, bias and CRB versus beta_min and SNR");
    auto *size = app.add_subcommand("sweep-size", "profile-averaged LB and CRB versus RIS size");
    auto *snr = app.add_subcommand("sweep-snr", "MML RMSE and bounds versus SNR");
    auto *pseudo = app.add_subcommand("pseudo-true", "pseudo-true parameters per profile and beta_min");
    auto *verify = app.add_subcommand("verify", "derivative, KL, stationarity and degeneracy checks");
    for (auto *s : {beta, size, snr, pseudo, verify})
        add_common(s);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config_error;
    }

    try
    {
        const ExperimentConfig cfg = resolve(opt);
        const ParallelFor pf(cfg.run.threads);
        if (beta->parsed())
            emit(cfg, "sweep_beta", run_sweep_beta(cfg, pf));
        else if (size->parsed())
            emit(cfg, "sweep_size", run_sweep_size(cfg, pf));
        else if (snr->parsed())
        {
            const SnrSweep r = run_sweep_snr(cfg, pf);
            emit(cfg, "sweep_snr", r.summary);
            if (cfg.output.trial_log)
                emit(cfg, "sweep_snr_trials", r.trials);
        }
        else if (pseudo->parsed())
            emit(cfg, "pseudo_true", run_pseudo_true(cfg, pf));
        else if (verify->parsed())
        {
            const VerifyReport rep = run_verify(cfg, pf);
            rep.print(std::cout);
            emit(cfg, "verify", rep.table());
            return rep.ok() ? exit_ok : exit_verify_failed;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << (opt.config.empty() ? "" : opt.config + ": ") << e.what() << '\n';
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime_error;
    }
    return exit_ok;
}
