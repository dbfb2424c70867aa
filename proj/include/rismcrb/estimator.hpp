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

#ifndef RISMCRB_ESTIMATOR_HPP
#define RISMCRB_ESTIMATOR_HPP

#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "bounds.hpp"

namespace rismcrb
{
    inline constexpr int max_bessel_order = 64;

    // Bessel function of the first kind of integer order. Negative orders and
    // arguments are reduced with J_{-n}(x) = J_n(-x) = (-1)^n J_n(x).
    inline double bessel_j(int n, double x)
    {
        if (n < -max_bessel_order || n > max_bessel_order || !std::isfinite(x))
            throw UnsupportedRange("bessel_j: need |n| <= 64 and finite x");
        const bool odd = (n % 2) != 0;
        double sign = 1.0;
        if (n < 0 && odd)
            sign = -sign;
        if (x < 0.0 && odd)
            sign = -sign;
        const auto order = static_cast<double>(n < 0 ? -n : n);
        return sign * std::cyl_bessel_j(order, std::abs(x));
    }

    struct AngleEstimate
    {
        double elevation = 0.0; // from the RIS normal (+z), [0, pi]
        double azimuth = 0.0;   // [-pi, pi)
        double objective = 0.0; // |c^H y|^2 / (|c|^2 |y|^2), in [0, 1]
    };

    inline Vec3 direction(double elevation, double azimuth)
    {
        return {std::sin(elevation) * std::cos(azimuth), std::sin(elevation) * std::sin(azimuth), std::cos(elevation)};
    }

    namespace detail
    {
        inline void require_planar_ris(const SceneConfig &config)
        {
            const auto &pos = config.element_positions();
            if ((pos.col(2).array() - config.p_ris().z()).abs().maxCoeff() > 1e-12 * config.spacing_m())
                throw InvalidArgument("angle model needs the RIS in a z = const plane");
        }

        // Per element: radial distance and angle psi_m in the RIS plane, relative to the RIS center.
        struct PolarElements
        {
            Eigen::VectorXd radius;
            Eigen::VectorXd psi;
        };

        inline PolarElements polar_elements(const SceneConfig &config)
        {
            require_planar_ris(config);
            const auto &pos = config.element_positions();
            PolarElements pe{Eigen::VectorXd(pos.rows()), Eigen::VectorXd(pos.rows())};
            for (Eigen::Index m = 0; m < pos.rows(); ++m)
            {
                const double dx = pos(m, 0) - config.p_ris().x();
                const double dy = pos(m, 1) - config.p_ris().y();
                pe.radius[m] = std::hypot(dx, dy);
                pe.psi[m] = pe.radius[m] > 0.0 ? std::atan2(dy, dx) : 0.0;
            }
            return pe;
        }

        // [G]_{n,m} = j^n J_n(k |p_m| sin(elevation)) e^{-j n psi_m}, rows n = -N..N.
        inline CMat jacobi_table(const SceneConfig &config, const PolarElements &pe, double elevation, int N)
        {
            const double k = config.wavenumber();
            const double s = std::sin(elevation);
            const Eigen::Index M = pe.radius.size();
            CMat G(2 * N + 1, M);
            static const cplx jpow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double z = k * pe.radius[m] * s;
                for (int n = -N; n <= N; ++n)
                    G(n + N, m) = jpow[((n % 4) + 4) % 4] * bessel_j(n, z) * std::polar(1.0, -n * pe.psi[m]);
            }
            return G;
        }

        inline CVec jacobi_combine(const CMat &G, double azimuth)
        {
            const int N = static_cast<int>(G.rows() / 2);
            Eigen::RowVectorXcd h(G.rows());
            for (int n = -N; n <= N; ++n)
                h[n + N] = std::polar(1.0, n * azimuth);
            return (h * G).transpose();
        }

        // Plane-wave response exp(j k u . (p_m - p_ris)): the N -> infinity limit of the expansion.
        inline CVec plane_wave(const SceneConfig &config, double elevation, double azimuth)
        {
            const Vec3 u = direction(elevation, azimuth);
            const auto &pos = config.element_positions();
            const double k = config.wavenumber();
            CVec a(pos.rows());
            for (Eigen::Index m = 0; m < pos.rows(); ++m)
            {
                const Vec3 d = pos.row(m).transpose() - config.p_ris();
                a[m] = std::polar(1.0, k * u.dot(d));
            }
            return a;
        }

        // |c^H y|^2 / (|c|^2 |y|^2) with c = W~ (a ⊙ a(p_bs)).
        inline double angle_fit(const CMat &w_assumed_bs, const CVec &a, const CVec &y, double y_norm2)
        {
            const CVec c = w_assumed_bs * a;
            const double cc = c.squaredNorm();
            return cc > 0.0 ? std::norm(c.dot(y)) / (cc * y_norm2) : 0.0;
        }
    }

    // Jacobi-Anger approximation of the RIS steering vector toward a far
    // direction: [a]_m ~ sum_{n=-N}^{N} j^n J_n(k |p_m| sin el) e^{j n (az - psi_m)}.
    inline CVec jacobi_basis(const SceneConfig &config, double elevation, double azimuth, int N)
    {
        if (N < 1 || N > max_bessel_order)
            throw InvalidArgument("jacobi_basis: N must be in [1, 64]");
        const auto pe = detail::polar_elements(config);
        return detail::jacobi_combine(detail::jacobi_table(config, pe, elevation, N), azimuth);
    }

    struct AngleSettings
    {
        int jacobi_order = 0;       // 0 selects the plane-wave limit
        int coarse_points = 121;    // per direction-cosine axis
        int azimuth_points = 721;   // over [-pi, pi)
        int elevation_points = 721; // over [0, pi/2]

        void validate() const
        {
            if (jacobi_order < 0 || jacobi_order > max_bessel_order)
                throw InvalidArgument("AngleSettings: jacobi_order must be in [0, 64]");
            if (coarse_points < 3 || azimuth_points < 4 || elevation_points < 2)
                throw InvalidArgument("AngleSettings: grids too small");
        }
    };

    // Two 1D line searches for the UE direction seen from the RIS. A coarse
    // direction-cosine scan (separable over the rectangular lattice) seeds the
    // elevation for the azimuth search; the elevation search then runs at the
    // estimated azimuth. Elevation is restricted to the half space in front
    // of the RIS, where the planar response is unambiguous.
    inline AngleEstimate init_angles(const SceneConfig &config, const ObservationSet &obs, const PhaseProfile &profile,
                                     const AngleSettings &settings = {})
    {
        settings.validate();
        detail::require_planar_ris(config);
        const Eigen::Index T = obs.y.size();
        if (T < 2)
            throw InvalidArgument("init_angles: need at least 2 transmissions");
        if (profile.n_transmissions() != T || profile.n_elements() != config.n_elements())
            throw InvalidArgument("init_angles: profile does not match observations / scene");
        const double y2 = obs.y.squaredNorm();
        if (!(y2 > 0.0))
            throw NoInit("init_angles: observations are identically zero");

        const CMat w = make_weights(profile, AmplitudeModel{}, ModelMode::Assumed);
        const CMat wb = w * config.bs_response().asDiagonal();
        const int rows = config.ris_rows();
        const int cols = config.ris_cols();
        const double k = config.wavenumber();
        const auto &pos = config.element_positions();

        // Coarse scan: C_t(ux, uy) = E_x^T D_t E_y with D_t the lattice-shaped row t of wb.
        const int nc = settings.coarse_points;
        Eigen::VectorXd grid(nc);
        for (int i = 0; i < nc; ++i)
            grid[i] = -1.0 + 2.0 * i / (nc - 1);
        CMat Ex(rows, nc);
        CMat Ey(cols, nc);
        for (int r = 0; r < rows; ++r)
            for (int i = 0; i < nc; ++i)
                Ex(r, i) = std::polar(1.0, k * grid[i] * (pos(static_cast<Eigen::Index>(r) * cols, 0) - config.p_ris().x()));
        for (int c = 0; c < cols; ++c)
            for (int i = 0; i < nc; ++i)
                Ey(c, i) = std::polar(1.0, k * grid[i] * (pos(c, 1) - config.p_ris().y()));
        CMat num = CMat::Zero(nc, nc);
        Eigen::MatrixXd den = Eigen::MatrixXd::Zero(nc, nc);
        CMat D(rows, cols);
        for (Eigen::Index t = 0; t < T; ++t)
        {
            for (int r = 0; r < rows; ++r)
                D.row(r) = wb.row(t).segment(static_cast<Eigen::Index>(r) * cols, cols);
            const CMat C = Ex.transpose() * D * Ey;
            num += C.conjugate() * obs.y[t];
            den += C.cwiseAbs2();
        }
        double best = -1.0;
        double el_c = 0.0;
        double az_c = 0.0;
        for (int i = 0; i < nc; ++i)
            for (int j = 0; j < nc; ++j)
            {
                const double rr = grid[i] * grid[i] + grid[j] * grid[j];
                if (rr > 1.0 || !(den(i, j) > 0.0))
                    continue;
                const double v = std::norm(num(i, j)) / (den(i, j) * y2);
                if (v > best)
                {
                    best = v;
                    el_c = std::asin(std::min(1.0, std::sqrt(rr)));
                    az_c = std::atan2(grid[j], grid[i]);
                }
            }

        const auto pe = settings.jacobi_order > 0 ? detail::polar_elements(config) : detail::PolarElements{};
        AngleEstimate est{el_c, az_c, best};

        // Azimuth line search at the coarse elevation.
        CMat G;
        if (settings.jacobi_order > 0)
            G = detail::jacobi_table(config, pe, el_c, settings.jacobi_order);
        best = -1.0;
        for (int i = 0; i < settings.azimuth_points; ++i)
        {
            const double az = -std::numbers::pi + 2.0 * std::numbers::pi * i / settings.azimuth_points;
            const CVec a = settings.jacobi_order > 0 ? detail::jacobi_combine(G, az) : detail::plane_wave(config, el_c, az);
            const double v = detail::angle_fit(wb, a, obs.y, y2);
            if (v > best)
            {
                best = v;
                est.azimuth = az;
            }
        }

        // Elevation line search at the estimated azimuth.
        best = -1.0;
        for (int i = 0; i < settings.elevation_points; ++i)
        {
            const double el = 0.5 * std::numbers::pi * i / (settings.elevation_points - 1);
            const CVec a = settings.jacobi_order > 0
                               ? detail::jacobi_combine(detail::jacobi_table(config, pe, el, settings.jacobi_order), est.azimuth)
                               : detail::plane_wave(config, el, est.azimuth);
            const double v = detail::angle_fit(wb, a, obs.y, y2);
            if (v > best)
            {
                best = v;
                est.elevation = el;
            }
        }
        est.objective = best;
        return est;
    }

    struct EstimatorSettings
    {
        OptimizerSettings optimizer{};
        AngleSettings angles{};
        double max_start_distance = 1000.0; // d~ ~ uniform(0, max) m
        double max_range = 1000.0;          // search ball around the RIS center, m; <= 0 disables
        bool polish = true;                 // Newton polish of the best start

        void validate() const
        {
            optimizer.validate();
            angles.validate();
            if (!(max_start_distance > 0.0))
                throw InvalidArgument("EstimatorSettings: max_start_distance must be positive");
        }
    };

    struct StartRecord
    {
        Vec3 start = Vec3::Zero();
        Vec3 end = Vec3::Zero();
        double residual = 0.0; // |y - mu~| at the end point, inf if diverged
        bool diverged = false;
        int evals = 0;
    };

    struct EstimationResult
    {
        ParameterVector eta_hat;
        double residual = 0.0;
        AngleEstimate angles;
        std::vector<StartRecord> starts_log;
        int start_used = -1;
        int redraws = 0;
    };

    inline std::vector<Vec3> mml_starts(const AngleEstimate &angles, int n_starts, double max_distance,
                                        std::uint64_t key)
    {
        const Vec3 u = direction(angles.elevation, angles.azimuth);
        std::vector<Vec3> starts;
        for (int s = 0; s < n_starts; ++s)
        {
            Stream rng(derive_key(key, {static_cast<std::uint64_t>(s)}));
            starts.push_back(rng.uniform(0.0, max_distance) * u);
        }
        return starts;
    }

    // |y - mu~| after the closed-form gain, from the concentrated objective value.
    inline double concentrated_residual(double objective, double y_norm2)
    {
        return std::sqrt(std::max(0.0, y_norm2 + objective));
    }

    // Mismatched ML: argmin over eta of |y - mu~(eta)| under unit amplitudes.
    // `start_key` seeds the start distances; start s uses derive_key(start_key, {s}).
    inline EstimationResult mml_estimate(const SceneConfig &config, const ObservationSet &obs,
                                         const PhaseProfile &profile, const EstimatorSettings &settings,
                                         std::uint64_t start_key)
    {
        settings.validate();
        const CMat w = make_weights(profile, AmplitudeModel{}, ModelMode::Assumed);
        const double y2 = obs.y.squaredNorm();
        EstimationResult out;
        out.angles = init_angles(config, obs, profile, settings.angles);

        auto base = make_concentrated_objective(config, obs.y, w, obs.pilot_energy);
        auto objective = [&](const Vec3 &p)
        {
            if (settings.max_range > 0.0 && (p - config.p_ris()).norm() > settings.max_range)
                return std::numeric_limits<double>::infinity();
            return base(p);
        };
        MultiStartResult<3> search;
        std::vector<Vec3> starts;
        for (int attempt = 0; attempt < 2; ++attempt)
        {
            starts = mml_starts(out.angles, settings.optimizer.n_starts, settings.max_start_distance,
                                derive_key(start_key, {static_cast<std::uint64_t>(attempt)}));
            try
            {
                search = multi_start<3>(objective, starts, settings.optimizer);
                break;
            }
            catch (const NoSolution &)
            {
                if (attempt == 1)
                    throw;
                ++out.redraws;
            }
        }

        for (std::size_t s = 0; s < starts.size(); ++s)
        {
            const auto &r = search.log[s];
            StartRecord rec;
            rec.start = starts[s];
            rec.end = r.x;
            rec.diverged = r.diverged || !std::isfinite(r.f);
            rec.residual = std::isfinite(r.f) ? concentrated_residual(r.f, y2) : std::numeric_limits<double>::infinity();
            rec.evals = r.evals;
            out.starts_log.push_back(rec);
        }
        out.start_used = search.best_index;
        ParameterVector eta{optimal_alpha(config, search.x, obs.y, w, obs.pilot_energy), search.x};
        out.residual = (obs.y - noise_free_mean(config, eta, w, obs.pilot_energy)).norm();
        if (settings.polish)
        {
            const FitPolish pol = polish_fit(config, obs.y, eta, w, 1e-9, 50, obs.pilot_energy);
            const double res = (obs.y - noise_free_mean(config, pol.eta, w, obs.pilot_energy)).norm();
            const bool inside = settings.max_range <= 0.0
                || (pol.eta.position - config.p_ris()).norm() <= settings.max_range;
            if (inside && res <= out.residual)
            {
                eta = pol.eta;
                out.residual = res;
            }
        }
        out.eta_hat = eta;
        return out;
    }

    struct TrialRecord
    {
        int trial = 0;
        double error_m = 0.0;
        double residual = 0.0;
        int start_used = -1;
        bool failed = false;
    };

    struct RmseResult
    {
        double rmse = 0.0;
        double stderr_rmse = 0.0;
        int n_trials = 0;
        int n_failed = 0;
        std::vector<TrialRecord> trials;
    };

    // Mean-square statistic and its delta-method standard error.
    inline RmseResult summarize_trials(std::vector<TrialRecord> trials)
    {
        RmseResult out;
        out.trials = std::move(trials);
        out.n_trials = static_cast<int>(out.trials.size());
        std::vector<double> sq;
        for (const auto &t : out.trials)
        {
            if (t.failed)
                ++out.n_failed;
            else
                sq.push_back(t.error_m * t.error_m);
        }
        if (sq.empty())
        {
            out.rmse = std::numeric_limits<double>::quiet_NaN();
            out.stderr_rmse = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        const double n = static_cast<double>(sq.size());
        double mean = 0.0;
        for (double v : sq)
            mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : sq)
            var += (v - mean) * (v - mean);
        var = sq.size() > 1 ? var / (n - 1.0) : 0.0;
        out.rmse = std::sqrt(mean);
        out.stderr_rmse = out.rmse > 0.0 ? std::sqrt(var / n) / (2.0 * out.rmse) : 0.0;
        return out;
    }

    // One Monte Carlo trial: noise from derive_key(seed, {trial, 0}), starts from derive_key(seed, {trial, 1}).
    inline TrialRecord run_trial(const SceneConfig &config, const ParameterVector &eta_true, const PhaseProfile &profile,
                                 const CMat &w_true, double noise_var, int trial, std::uint64_t seed,
                                 const EstimatorSettings &settings, double pilot_energy = 1.0)
    {
        const auto t = static_cast<std::uint64_t>(trial);
        Stream noise(derive_key(seed, {t, 0}));
        const ObservationSet obs = simulate(config, eta_true, w_true, noise_var, noise, pilot_energy);
        TrialRecord rec;
        rec.trial = trial;
        try
        {
            const EstimationResult est = mml_estimate(config, obs, profile, settings, derive_key(seed, {t, 1}));
            rec.error_m = (est.eta_hat.position - eta_true.position).norm();
            rec.residual = est.residual;
            rec.start_used = est.start_used;
        }
        catch (const NoSolution &)
        {
            rec.failed = true;
            rec.error_m = std::numeric_limits<double>::quiet_NaN();
            rec.residual = std::numeric_limits<double>::quiet_NaN();
        }
        return rec;
    }

    // RMSE of the MML position estimate about the true position. Trials are
    // independent; pass a parallel `for_each(n, fn)` to spread them over threads.
    template <class ForEach>
    RmseResult monte_carlo_rmse(const SceneConfig &config, const ParameterVector &eta_true, const PhaseProfile &profile,
                                const AmplitudeModel &model, double snr_db, int n_trials, std::uint64_t seed,
                                const EstimatorSettings &settings, ForEach &&for_each, double pilot_energy = 1.0)
    {
        if (n_trials < 1)
            throw InvalidArgument("monte_carlo_rmse: n_trials must be >= 1");
        model.validate();
        const CMat w_true = make_weights(profile, model, ModelMode::True);
        const double n0 = noise_var_for_snr(config, eta_true, w_true, snr_db, pilot_energy);
        std::vector<TrialRecord> trials(static_cast<std::size_t>(n_trials));
        for_each(n_trials, [&](int i)
                 { trials[static_cast<std::size_t>(i)] =
                       run_trial(config, eta_true, profile, w_true, n0, i, seed, settings, pilot_energy); });
        return summarize_trials(std::move(trials));
    }

    inline RmseResult monte_carlo_rmse(const SceneConfig &config, const ParameterVector &eta_true,
                                       const PhaseProfile &profile, const AmplitudeModel &model, double snr_db,
                                       int n_trials, std::uint64_t seed, const EstimatorSettings &settings = {},
                                       double pilot_energy = 1.0)
    {
        auto serial = [](int n, const auto &fn)
        {
            for (int i = 0; i < n; ++i)
                fn(i);
        };
        return monte_carlo_rmse(config, eta_true, profile, model, snr_db, n_trials, seed, settings, serial,
                                pilot_energy);
    }

    inline void write_trials_csv_header(std::ostream &os)
    {
        os << "trial,snr_db,beta_min,error_m,residual,start_used\n";
    }
}

#endif
