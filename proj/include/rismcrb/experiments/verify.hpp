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

#ifndef RISMCRB_EXPERIMENTS_VERIFY_HPP
#define RISMCRB_EXPERIMENTS_VERIFY_HPP

#include <ostream>
#include <string>
#include <vector>

#include "sweeps.hpp"

namespace rismcrb::experiments
{
    struct Check
    {
        std::string name;
        double value = 0.0;
        double threshold = 0.0;
        bool pass = false;
    };

    struct VerifyReport
    {
        std::vector<Check> checks;

        bool ok() const
        {
            for (const auto &c : checks)
                if (!c.pass)
                    return false;
            return true;
        }

        void expect_below(std::string name, double value, double threshold)
        {
            checks.push_back({std::move(name), value, threshold, value < threshold});
        }

        Table table() const
        {
            Table t;
            t.header = {"check", "value", "threshold", "pass"};
            for (const auto &c : checks)
                t.rows.push_back({c.name, fmt(c.value), fmt(c.threshold), c.pass ? "1" : "0"});
            return t;
        }

        void print(std::ostream &os) const
        {
            for (const auto &c : checks)
                os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << fmt(c.value)
                   << " threshold=" << fmt(c.threshold) << '\n';
        }
    };

    // Monte Carlo mean of ln p(y) - ln p~(y) for y ~ p, with its standard error.
    inline std::pair<double, double> kl_monte_carlo(const CVec &mu, const CVec &mu_assumed, double noise_var,
                                                    int n_samples, std::uint64_t seed)
    {
        Stream rng(seed);
        const double sd = std::sqrt(0.5 * noise_var);
        double sum = 0.0;
        double sum2 = 0.0;
        CVec y(mu.size());
        for (int i = 0; i < n_samples; ++i)
        {
            for (Eigen::Index t = 0; t < mu.size(); ++t)
            {
                const double re = rng.normal();
                const double im = rng.normal();
                y[t] = mu[t] + cplx(sd * re, sd * im);
            }
            const double v = ((y - mu_assumed).squaredNorm() - (y - mu).squaredNorm()) / noise_var;
            sum += v;
            sum2 += v * v;
        }
        const double n = n_samples;
        const double mean = sum / n;
        const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
        return {mean, std::sqrt(var / n)};
    }

    // Derivative, KL, stationarity, scaling and no-mismatch checks on the
    // configured scene (first distance, first profile, every beta_min).
    inline VerifyReport run_verify(const ExperimentConfig &cfg, const ParallelFor &pf)
    {
        validate(cfg);
        VerifyReport rep;
        const SceneConfig sc = cfg.scene_at(cfg.scene.ue_distance.front());
        const PhaseProfile prof = make_profile(cfg, 0, sc.n_elements());
        const ParameterVector eta = cfg.eta_true(sc);
        const double es = cfg.signal.pilot_energy;
        const double snr = cfg.signal.snr_db.front();

        // Derivatives at the true point, assumed and true weights.
        for (const auto &[label, beta] : {std::pair<const char *, double>{"assumed", 1.0}, {"true_beta0.3", 0.3}})
        {
            const CMat w = make_weights(prof, cfg.model_for(beta), beta < 1.0 ? ModelMode::True : ModelMode::Assumed);
            const FiniteDiffReport fd = finite_diff_check(sc, eta, w, 1e-6, 1e-4, es);
            rep.expect_below(std::string("jacobian_fd_") + label, fd.max_jacobian_rel_err, 1e-5);
            rep.expect_below(std::string("hessian_fd_") + label, fd.max_hessian_rel_err, 1e-4);
        }

        std::vector<Cell> cells;
        for (int b = 0; b < static_cast<int>(cfg.model.beta_min.size()); ++b)
            cells.push_back({0, 0, b, 0, 0, {}});
        pf(static_cast<int>(cells.size()), [&](int i) { analyze_cell(cfg, cells[static_cast<std::size_t>(i)]); });

        for (const Cell &c : cells)
        {
            const double beta = cfg.model.beta_min[static_cast<std::size_t>(c.beta_index)];
            const std::string tag = "_beta" + fmt(beta);
            const auto &a = c.analysis;
            rep.expect_below("stationarity" + tag, stationarity_residuals(a.terms).maxCoeff(), 1e-6);

            const double n0 = a.noise_var_for(snr);
            BoundsReport r, r20;
            try
            {
                r = bounds_at(a, eta, n0);
                r20 = bounds_at(a, eta, a.noise_var_for(snr + 20.0));
            }
            catch (const IllConditioned &e)
            {
                rep.expect_below("condition_A" + tag, e.condition_number, max_condition);
                continue;
            }
            rep.expect_below("mcrb_snr_scaling" + tag, std::abs(r20.peb_mcrb / r.peb_mcrb - 0.1) / 0.1, 1e-6);
            rep.expect_below("lb_ordering" + tag, std::max(r.peb_mcrb, r.bias_norm) - r.peb_lb, 1e-12 * r.peb_lb);

            const CMat w_true = make_weights(prof, cfg.model_for(beta), ModelMode::True);
            const CMat w_assumed = make_weights(prof, cfg.model_for(beta), ModelMode::Assumed);
            const CVec mu = noise_free_mean(sc, eta, w_true, es);
            const CVec mu_a = noise_free_mean(sc, eta, w_assumed, es);
            const double kl = kl_divergence(sc, eta, eta, w_true, w_assumed, n0, es);
            const auto [mc, se] = kl_monte_carlo(mu, mu_a, n0, 20000, derive_key(cfg.run.master_seed, {0x6b6cULL}));
            rep.expect_below("kl_closed_form_sigmas" + tag, se > 0.0 ? std::abs(kl - mc) / se : std::abs(kl - mc), 3.0);

            if (beta == 1.0)
            {
                const CrbResult crb = crb_from_gram(a.true_gram, n0);
                rep.expect_below("no_mismatch_bias_m", r.bias_norm, 1e-6);
                rep.expect_below("no_mismatch_A_plus_B", (r.A + r.B).norm() / r.A.norm(), 1e-9);
                rep.expect_below("no_mismatch_lb_vs_crb", std::abs(r.peb_lb - crb.peb_crb) / crb.peb_crb, 1e-6);
            }
        }
        return rep;
    }
}

#endif
