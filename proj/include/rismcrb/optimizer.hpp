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

#ifndef RISMCRB_OPTIMIZER_HPP
#define RISMCRB_OPTIMIZER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace rismcrb
{
    struct OptimizerSettings
    {
        int max_iters = 2000;           // per simplex run
        double x_tol = 1e-7;            // simplex size, same units as x
        double f_tol = 1e-12;           // relative spread of objective values
        int n_starts = 10;
        std::uint64_t start_seed = 1;   // used by callers that generate starts
        double initial_step_rel = 0.05; // initial simplex edge, relative to |x_i|
        double initial_step_abs = 2.5e-4;
        int restarts = 2;               // fresh simplex at the converged point
        bool gradient_refine = false;   // BFGS polish with numerical gradients

        void validate() const
        {
            if (!(x_tol > 0.0) || !(f_tol > 0.0))
                throw InvalidArgument("OptimizerSettings: tolerances must be positive");
            if (n_starts < 1 || max_iters < 1)
                throw InvalidArgument("OptimizerSettings: n_starts and max_iters must be >= 1");
        }
    };

    template <int Dim>
    struct LocalResult
    {
        Eigen::Matrix<double, Dim, 1> x;
        double f = std::numeric_limits<double>::infinity();
        bool converged = false;
        bool diverged = false; // a non-finite objective value was seen
        int iters = 0;
        int evals = 0;
    };

    template <int Dim>
    struct MultiStartResult
    {
        Eigen::Matrix<double, Dim, 1> x;
        double f = std::numeric_limits<double>::infinity();
        int best_index = -1;
        std::vector<LocalResult<Dim>> log; // one entry per start, in start order
    };

    namespace detail
    {
        template <int Dim>
        struct Simplex
        {
            using Vec = Eigen::Matrix<double, Dim, 1>;
            std::array<Vec, Dim + 1> x;
            std::array<double, Dim + 1> f;

            void sort()
            {
                std::array<int, Dim + 1> idx;
                std::iota(idx.begin(), idx.end(), 0);
                std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
                auto x2 = x;
                auto f2 = f;
                for (int i = 0; i <= Dim; ++i)
                {
                    x[i] = x2[idx[i]];
                    f[i] = f2[idx[i]];
                }
            }

            double size() const
            {
                double s = 0.0;
                for (int i = 1; i <= Dim; ++i)
                    s = std::max(s, (x[i] - x[0]).cwiseAbs().maxCoeff());
                return s;
            }
        };

        // One Nelder-Mead run with standard coefficients (1, 2, 1/2, 1/2).
        template <int Dim, class F>
        void nelder_mead(F &&eval, LocalResult<Dim> &res, const OptimizerSettings &s)
        {
            using Vec = Eigen::Matrix<double, Dim, 1>;
            Simplex<Dim> sx;
            sx.x[0] = res.x;
            sx.f[0] = res.f;
            for (int i = 0; i < Dim; ++i)
            {
                Vec v = res.x;
                v[i] += v[i] != 0.0 ? s.initial_step_rel * v[i] : s.initial_step_abs;
                sx.x[i + 1] = v;
                sx.f[i + 1] = eval(v);
            }

            int it = 0;
            bool converged = false;
            for (; it < s.max_iters; ++it)
            {
                sx.sort();
                const double spread = sx.f[Dim] - sx.f[0];
                const double fscale = std::max(std::abs(sx.f[0]), std::numeric_limits<double>::min());
                if (sx.size() <= s.x_tol || (std::isfinite(spread) && spread <= s.f_tol * fscale))
                {
                    converged = true;
                    break;
                }

                Vec centroid = Vec::Zero();
                for (int i = 0; i < Dim; ++i)
                    centroid += sx.x[i];
                centroid /= Dim;

                const Vec xr = centroid + (centroid - sx.x[Dim]);
                const double fr = eval(xr);
                if (fr < sx.f[0])
                {
                    const Vec xe = centroid + 2.0 * (centroid - sx.x[Dim]);
                    const double fe = eval(xe);
                    if (fe < fr)
                        sx.x[Dim] = xe, sx.f[Dim] = fe;
                    else
                        sx.x[Dim] = xr, sx.f[Dim] = fr;
                    continue;
                }
                if (fr < sx.f[Dim - 1])
                {
                    sx.x[Dim] = xr, sx.f[Dim] = fr;
                    continue;
                }
                // contraction, outside or inside
                const bool outside = fr < sx.f[Dim];
                const Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid))
                                       : Vec(centroid + 0.5 * (sx.x[Dim] - centroid));
                const double fc = eval(xc);
                if (fc < (outside ? fr : sx.f[Dim]))
                {
                    sx.x[Dim] = xc, sx.f[Dim] = fc;
                    continue;
                }
                for (int i = 1; i <= Dim; ++i)
                {
                    sx.x[i] = sx.x[0] + 0.5 * (sx.x[i] - sx.x[0]);
                    sx.f[i] = eval(sx.x[i]);
                }
            }
            sx.sort();
            res.iters += it;
            res.converged = converged;
            if (sx.f[0] <= res.f)
            {
                res.x = sx.x[0];
                res.f = sx.f[0];
            }
        }

        template <int Dim, class F>
        Eigen::Matrix<double, Dim, 1> central_gradient(F &&eval, const Eigen::Matrix<double, Dim, 1> &x)
        {
            Eigen::Matrix<double, Dim, 1> g;
            for (int i = 0; i < Dim; ++i)
            {
                const double h = std::max(1e-7 * std::abs(x[i]), 1e-9);
                auto xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                g[i] = (eval(xp) - eval(xm)) / (2.0 * h);
            }
            return g;
        }

        // BFGS with backtracking; only ever lowers res.f.
        template <int Dim, class F>
        void bfgs_refine(F &&eval, LocalResult<Dim> &res, const OptimizerSettings &s)
        {
            using Vec = Eigen::Matrix<double, Dim, 1>;
            using Mat = Eigen::Matrix<double, Dim, Dim>;
            Mat Hinv = Mat::Identity();
            Vec x = res.x;
            double f = res.f;
            Vec g = central_gradient<Dim>(eval, x);
            // Scale the first step to the simplex tolerance region.
            Hinv *= 1.0 / std::max(g.norm(), 1.0);
            for (int it = 0; it < 50; ++it)
            {
                Vec dir = -Hinv * g;
                if (!dir.allFinite() || dir.dot(g) >= 0.0)
                {
                    Hinv = Mat::Identity() / std::max(g.norm(), 1.0);
                    dir = -Hinv * g;
                }
                double step = 1.0, fn = f;
                Vec xn = x;
                bool ok = false;
                for (int ls = 0; ls < 30; ++ls, step *= 0.5)
                {
                    xn = x + step * dir;
                    fn = eval(xn);
                    if (std::isfinite(fn) && fn < f)
                    {
                        ok = true;
                        break;
                    }
                }
                if (!ok)
                    break;
                const Vec gn = central_gradient<Dim>(eval, xn);
                const Vec sk = xn - x, yk = gn - g;
                const double sy = sk.dot(yk);
                if (sy > 0.0)
                {
                    const double rho = 1.0 / sy;
                    const Mat I = Mat::Identity();
                    Hinv = (I - rho * sk * yk.transpose()) * Hinv * (I - rho * yk * sk.transpose()) + rho * sk * sk.transpose();
                }
                const bool small = sk.cwiseAbs().maxCoeff() <= s.x_tol;
                x = xn, f = fn, g = gn;
                if (small)
                    break;
            }
            if (f < res.f)
            {
                res.x = x;
                res.f = f;
            }
        }
    }

    // Derivative-free local minimization: Nelder-Mead from x0, restarted with
    // a fresh simplex at the converged point, then an optional BFGS polish.
    // The returned f never exceeds objective(x0).
    template <int Dim = 3, class Objective>
    LocalResult<Dim> local_minimize(Objective &&objective, const Eigen::Matrix<double, Dim, 1> &x0,
                                    const OptimizerSettings &settings)
    {
        settings.validate();
        LocalResult<Dim> res;
        res.x = x0;
        auto eval = [&](const Eigen::Matrix<double, Dim, 1> &x)
        {
            ++res.evals;
            const double v = objective(x);
            if (!std::isfinite(v))
            {
                res.diverged = true;
                return std::numeric_limits<double>::infinity();
            }
            return v;
        };
        res.f = eval(x0);
        if (!std::isfinite(res.f))
            return res;

        detail::nelder_mead<Dim>(eval, res, settings);
        for (int r = 0; r < settings.restarts; ++r)
        {
            const double before = res.f;
            const bool conv = res.converged;
            detail::nelder_mead<Dim>(eval, res, settings);
            res.converged = res.converged || conv;
            if (!(res.f < before))
                break;
        }
        if (settings.gradient_refine)
            detail::bfgs_refine<Dim>(eval, res, settings);
        return res;
    }

    // Runs local_minimize from every start and keeps the lowest finite
    // objective; ties go to the earliest start.
    template <int Dim = 3, class Objective>
    MultiStartResult<Dim> multi_start(Objective &&objective, const std::vector<Eigen::Matrix<double, Dim, 1>> &starts,
                                      const OptimizerSettings &settings)
    {
        if (starts.empty())
            throw InvalidArgument("multi_start: at least one start is required");
        MultiStartResult<Dim> out;
        out.log.reserve(starts.size());
        for (std::size_t i = 0; i < starts.size(); ++i)
        {
            out.log.push_back(local_minimize<Dim>(objective, starts[i], settings));
            const auto &r = out.log.back();
            if (std::isfinite(r.f) && r.f < out.f)
            {
                out.f = r.f;
                out.x = r.x;
                out.best_index = static_cast<int>(i);
            }
        }
        if (out.best_index < 0)
            throw NoSolution("multi_start: every start diverged");
        return out;
    }
}

#endif
