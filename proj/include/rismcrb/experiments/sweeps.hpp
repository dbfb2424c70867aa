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

#ifndef RISMCRB_EXPERIMENTS_SWEEPS_HPP
#define RISMCRB_EXPERIMENTS_SWEEPS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "parallel.hpp"
#include "table.hpp"

namespace rismcrb::experiments
{
    inline std::uint64_t profile_seed(std::uint64_t master_seed, int index)
    {
        return derive_key(master_seed, {0x70726f66696c65ULL, static_cast<std::uint64_t>(index)});
    }

    inline PhaseProfile make_profile(const ExperimentConfig &cfg, int index, Eigen::Index n_elements)
    {
        return random_profile(cfg.signal.transmissions, n_elements, profile_seed(cfg.run.master_seed, index));
    }

    inline void validate(const ExperimentConfig &cfg)
    {
        if (cfg.model.beta_min.empty() || cfg.signal.snr_db.empty() || cfg.scene.ue_distance.empty() ||
            cfg.scene.ris_sides.empty())
            throw ConfigError("every list in the config must be non-empty");
        cfg.run.optimizer.validate();
        cfg.run.estimator.validate();
    }

    // Bounds for one (distance, profile, beta_min) cell, reused for every SNR.
    struct Cell
    {
        int distance_index = 0;
        int profile_index = 0;
        int beta_index = 0;
        int side = 0; // RIS side length; 0 means the configured rows x cols
        std::uint64_t seed = 0;
        MismatchAnalysis analysis;
    };

    inline void analyze_cell(const ExperimentConfig &cfg, Cell &c)
    {
        const int rows = c.side > 0 ? c.side : cfg.scene.ris_rows;
        const int cols = c.side > 0 ? c.side : cfg.scene.ris_cols;
        const SceneConfig sc = cfg.scene_at(cfg.scene.ue_distance[static_cast<std::size_t>(c.distance_index)], rows, cols);
        const PhaseProfile prof = make_profile(cfg, c.profile_index, sc.n_elements());
        c.seed = prof.seed;
        c.analysis = analyze_mismatch(sc, cfg.eta_true(sc), prof,
                                      cfg.model_for(cfg.model.beta_min[static_cast<std::size_t>(c.beta_index)]),
                                      cfg.run.optimizer, cfg.signal.pilot_energy);
    }

    inline ParameterVector eta_true_for(const ExperimentConfig &cfg, const Cell &c)
    {
        const Vec3 u = cfg.scene.ue_direction.normalized();
        return {cfg.signal.alpha, cfg.scene.p_ris + cfg.scene.ue_distance[static_cast<std::size_t>(c.distance_index)] * u};
    }

    // Scalar bounds of one cell. An ill-conditioned A (typically a pseudo-true
    // point that ran off to the far field) yields NaN bounds and the condition
    // number instead of aborting the sweep.
    struct CellBounds
    {
        double peb_lb = 0.0;
        double peb_mcrb = 0.0;
        double bias_norm = 0.0;
        double condition_A = 0.0;
    };

    inline CellBounds cell_bounds(const MismatchAnalysis &a, const ParameterVector &eta, double noise_var)
    {
        try
        {
            const BoundsReport r = bounds_at(a, eta, noise_var);
            return {r.peb_lb, r.peb_mcrb, r.bias_norm, r.condition_A};
        }
        catch (const IllConditioned &e)
        {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {nan, nan, (eta.position - a.pseudo.eta0.position).norm(), e.condition_number};
        }
    }

    inline double cell_crb(const MismatchAnalysis &a, double noise_var)
    {
        try
        {
            return crb_from_gram(a.true_gram, noise_var).peb_crb;
        }
        catch (const IllConditioned &)
        {
            return std::numeric_limits<double>::quiet_NaN();
        }
    }

    // LB, MCRB, bias and perfect-knowledge CRB per (beta_min, SNR, profile).
    inline Table run_sweep_beta(const ExperimentConfig &cfg, const ParallelFor &pf)
    {
        validate(cfg);
        const int nd = static_cast<int>(cfg.scene.ue_distance.size());
        const int nb = static_cast<int>(cfg.model.beta_min.size());
        const int np = cfg.run.n_profiles;
        std::vector<Cell> cells;
        for (int d = 0; d < nd; ++d)
            for (int b = 0; b < nb; ++b)
                for (int p = 0; p < np; ++p)
                    cells.push_back({d, p, b, 0, 0, {}});
        pf(static_cast<int>(cells.size()), [&](int i) { analyze_cell(cfg, cells[static_cast<std::size_t>(i)]); });

        Table t;
        t.header = {"beta_min", "snr_db", "peb_lb", "peb_mcrb", "bias_norm", "peb_crb_perfect", "profile_seed",
                    "profile_index", "ue_distance_m", "condition_A"};
        for (int d = 0; d < nd; ++d)
            for (int b = 0; b < nb; ++b)
                for (double snr : cfg.signal.snr_db)
                    for (int p = 0; p < np; ++p)
                    {
                        const Cell &c = cells[static_cast<std::size_t>((d * nb + b) * np + p)];
                        const double n0 = c.analysis.noise_var_for(snr);
                        const CellBounds r = cell_bounds(c.analysis, eta_true_for(cfg, c), n0);
                        t.add(cfg.model.beta_min[static_cast<std::size_t>(b)], snr, r.peb_lb, r.peb_mcrb, r.bias_norm,
                              cell_crb(c.analysis, n0), c.seed, p, cfg.scene.ue_distance[static_cast<std::size_t>(d)],
                              r.condition_A);
                    }
        return t;
    }

    // Profile-averaged LB and perfect-knowledge CRB against RIS size.
    // Profiles with an ill-conditioned A are left out of both averages and
    // n_profiles counts the ones kept.
    inline Table run_sweep_size(const ExperimentConfig &cfg, const ParallelFor &pf)
    {
        validate(cfg);
        const int nd = static_cast<int>(cfg.scene.ue_distance.size());
        const int ns = static_cast<int>(cfg.scene.ris_sides.size());
        const int nb = static_cast<int>(cfg.model.beta_min.size());
        const int np = cfg.run.n_profiles;
        std::vector<Cell> cells;
        for (int d = 0; d < nd; ++d)
            for (int s = 0; s < ns; ++s)
                for (int b = 0; b < nb; ++b)
                    for (int p = 0; p < np; ++p)
                        cells.push_back({d, p, b, cfg.scene.ris_sides[static_cast<std::size_t>(s)], 0, {}});
        pf(static_cast<int>(cells.size()), [&](int i) { analyze_cell(cfg, cells[static_cast<std::size_t>(i)]); });

        Table t;
        t.header = {"M", "beta_min", "avg_peb_lb", "avg_peb_crb", "n_profiles", "snr_db", "ue_distance_m"};
        for (int d = 0; d < nd; ++d)
            for (int s = 0; s < ns; ++s)
                for (int b = 0; b < nb; ++b)
                    for (double snr : cfg.signal.snr_db)
                    {
                        double lb = 0.0;
                        double crb = 0.0;
                        int kept = 0;
                        for (int p = 0; p < np; ++p)
                        {
                            const Cell &c = cells[static_cast<std::size_t>(((d * ns + s) * nb + b) * np + p)];
                            const double n0 = c.analysis.noise_var_for(snr);
                            const double v = cell_bounds(c.analysis, eta_true_for(cfg, c), n0).peb_lb;
                            const double w = cell_crb(c.analysis, n0);
                            if (std::isfinite(v) && std::isfinite(w))
                            {
                                lb += v;
                                crb += w;
                                ++kept;
                            }
                        }
                        const double nan = std::numeric_limits<double>::quiet_NaN();
                        const int side = cfg.scene.ris_sides[static_cast<std::size_t>(s)];
                        t.add(side * side, cfg.model.beta_min[static_cast<std::size_t>(b)], kept ? lb / kept : nan,
                              kept ? crb / kept : nan, kept, snr, cfg.scene.ue_distance[static_cast<std::size_t>(d)]);
                    }
        return t;
    }

    struct SnrSweep
    {
        Table summary;
        Table trials;
    };

    inline std::uint64_t trial_seed(std::uint64_t master_seed, int d, int b, int s)
    {
        return derive_key(master_seed, {0x6d6d6cULL, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(b),
                                        static_cast<std::uint64_t>(s)});
    }

    // MML RMSE against the bounds for one fixed profile.
    inline SnrSweep run_sweep_snr(const ExperimentConfig &cfg, const ParallelFor &pf)
    {
        validate(cfg);
        const int nd = static_cast<int>(cfg.scene.ue_distance.size());
        const int nb = static_cast<int>(cfg.model.beta_min.size());
        std::vector<Cell> cells;
        for (int d = 0; d < nd; ++d)
            for (int b = 0; b < nb; ++b)
                cells.push_back({d, cfg.run.snr_profile, b, 0, 0, {}});
        pf(static_cast<int>(cells.size()), [&](int i) { analyze_cell(cfg, cells[static_cast<std::size_t>(i)]); });

        SnrSweep out;
        out.summary.header = {"snr_db", "beta_min", "rmse", "rmse_stderr", "peb_lb", "peb_mcrb", "bias_norm",
                              "n_trials", "n_failed", "profile_seed", "ue_distance_m"};
        out.trials.header = {"trial", "snr_db", "beta_min", "error_m", "residual", "start_used", "ue_distance_m"};
        for (int d = 0; d < nd; ++d)
        {
            const double dist = cfg.scene.ue_distance[static_cast<std::size_t>(d)];
            const SceneConfig sc = cfg.scene_at(dist);
            const PhaseProfile prof = make_profile(cfg, cfg.run.snr_profile, sc.n_elements());
            const ParameterVector eta = cfg.eta_true(sc);
            for (int s = 0; s < static_cast<int>(cfg.signal.snr_db.size()); ++s)
                for (int b = 0; b < nb; ++b)
                {
                    const double snr = cfg.signal.snr_db[static_cast<std::size_t>(s)];
                    const double beta = cfg.model.beta_min[static_cast<std::size_t>(b)];
                    const Cell &c = cells[static_cast<std::size_t>(d * nb + b)];
                    const CellBounds r = cell_bounds(c.analysis, eta, c.analysis.noise_var_for(snr));
                    const RmseResult mc =
                        monte_carlo_rmse(sc, eta, prof, cfg.model_for(beta), snr, cfg.run.n_trials,
                                         trial_seed(cfg.run.master_seed, d, b, s), cfg.run.estimator, pf,
                                         cfg.signal.pilot_energy);
                    out.summary.add(snr, beta, mc.rmse, mc.stderr_rmse, r.peb_lb, r.peb_mcrb, r.bias_norm, mc.n_trials,
                                    mc.n_failed, prof.seed, dist);
                    for (const auto &tr : mc.trials)
                        out.trials.add(tr.trial, snr, beta, tr.error_m, tr.residual, tr.start_used, dist);
                }
        }
        return out;
    }

    // Pseudo-true parameters and fit diagnostics per (profile, beta_min).
    inline Table run_pseudo_true(const ExperimentConfig &cfg, const ParallelFor &pf)
    {
        validate(cfg);
        const int nd = static_cast<int>(cfg.scene.ue_distance.size());
        const int nb = static_cast<int>(cfg.model.beta_min.size());
        const int np = cfg.run.n_profiles;
        std::vector<Cell> cells;
        for (int d = 0; d < nd; ++d)
            for (int b = 0; b < nb; ++b)
                for (int p = 0; p < np; ++p)
                    cells.push_back({d, p, b, 0, 0, {}});
        pf(static_cast<int>(cells.size()), [&](int i) { analyze_cell(cfg, cells[static_cast<std::size_t>(i)]); });

        Table t;
        t.header = {"beta_min", "profile_index", "profile_seed", "ue_distance_m", "alpha0_re", "alpha0_im", "x0",
                    "y0", "z0", "bias_norm", "objective", "residual_norm", "stationarity_max", "condition_A"};
        for (const Cell &c : cells)
        {
            const auto &e0 = c.analysis.pseudo.eta0;
            const ParameterVector eta = eta_true_for(cfg, c);
            t.add(cfg.model.beta_min[static_cast<std::size_t>(c.beta_index)], c.profile_index, c.seed,
                  cfg.scene.ue_distance[static_cast<std::size_t>(c.distance_index)], e0.alpha.real(), e0.alpha.imag(),
                  e0.position.x(), e0.position.y(), e0.position.z(), (e0.position - eta.position).norm(),
                  c.analysis.pseudo.objective, c.analysis.pseudo.residual_norm,
                  stationarity_residuals(c.analysis.terms).maxCoeff(), condition_number(matrix_A(c.analysis.terms, 1.0)));
        }
        return t;
    }
}

#endif
