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

#ifndef RISMCRB_DERIVATIVES_HPP
#define RISMCRB_DERIVATIVES_HPP

#include <algorithm>
#include <array>

#include "signal.hpp"

namespace rismcrb
{
    using JacobianMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, 5>;

    // d mu_t / d eta_i, one column per component of eta.
    struct Jacobian
    {
        JacobianMatrix d_mu;
    };

    // d^2 mu_t / d eta_i d eta_j, stored as T x 25 with column 5 i + j.
    struct Hessian
    {
        Eigen::Matrix<cplx, Eigen::Dynamic, 25> d2_mu;

        auto operator()(int i, int j) const { return d2_mu.col(5 * i + j); }
    };

    namespace detail
    {
        // Per-element factors shared by the first and second derivatives at p:
        // b(p), du = u_m - u and the unit-vector derivatives
        // d u_{m,a} / d p_b = (delta_ab - u_{m,a} u_{m,b}) / |p - p_m|.
        struct DerivativeTerms
        {
            CVec b;
            ElementMatrix du;
            RelativeGeometry geo;
        };

        inline DerivativeTerms derivative_terms(const SceneConfig &config, const Vec3 &p)
        {
            DerivativeTerms d;
            d.geo = relative_geometry(config, p);
            d.b = combined_response(config, p);
            d.du = d.geo.unit.rowwise() - d.geo.unit_center.transpose();
            return d;
        }

        inline void check_weights(const SceneConfig &config, const CMat &weights)
        {
            if (weights.cols() != config.n_elements())
                throw InvalidArgument("weights must have one column per RIS element");
        }
    }

    // Analytic first derivatives of mu(eta) for the weight matrix `weights`
    // (assumed weights for the mismatched model, true weights for the CRB).
    inline Jacobian jacobian_mu(const SceneConfig &config, const ParameterVector &eta, const CMat &weights,
                                double pilot_energy = 1.0)
    {
        detail::check_weights(config, weights);
        const auto d = detail::derivative_terms(config, eta.position);
        const double s = std::sqrt(pilot_energy);
        const double k = config.wavenumber();
        const cplx j(0.0, 1.0);
        const Eigen::Index M = config.n_elements();

        CMat V(M, 4);
        V.col(0) = d.b;
        for (int nu = 0; nu < 3; ++nu)
            V.col(1 + nu) = d.b.cwiseProduct(d.du.col(nu).cast<cplx>());
        const CMat WV = (weights * V) * s;

        Jacobian J;
        J.d_mu.resize(weights.rows(), 5);
        J.d_mu.col(0) = WV.col(0);
        J.d_mu.col(1) = j * WV.col(0);
        for (int nu = 0; nu < 3; ++nu)
            J.d_mu.col(2 + nu) = (-j * k * eta.alpha) * WV.col(1 + nu);
        return J;
    }

    inline Hessian hessian_mu(const SceneConfig &config, const ParameterVector &eta, const CMat &weights,
                              double pilot_energy = 1.0)
    {
        detail::check_weights(config, weights);
        const auto d = detail::derivative_terms(config, eta.position);
        const double s = std::sqrt(pilot_energy);
        const double k = config.wavenumber();
        const cplx j(0.0, 1.0);
        const Eigen::Index M = config.n_elements();
        const auto &u = d.geo.unit;
        const auto &uc = d.geo.unit_center;

        // Columns 0..2: b .* du_nu. Columns 3..8: pairs (a, b) with a <= b of
        // the two position terms combined,
        //   -k^2 b .* du_a du_b - j k b .* (du_{m,a}/dp_b - du_a/dp_b).
        static constexpr std::array<std::array<int, 2>, 6> pairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
        CMat V(M, 9);
        for (int nu = 0; nu < 3; ++nu)
            V.col(nu) = d.b.cwiseProduct(d.du.col(nu).cast<cplx>());
        for (int q = 0; q < 6; ++q)
        {
            const int a = pairs[q][0], bb = pairs[q][1];
            const double delta = a == bb ? 1.0 : 0.0;
            const double curv_c = (delta - uc[a] * uc[bb]) / d.geo.dist_center;
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double curv_m = (delta - u(m, a) * u(m, bb)) / d.geo.dist[m];
                V(m, 3 + q) = d.b[m] * cplx(-k * k * d.du(m, a) * d.du(m, bb), -k * (curv_m - curv_c));
            }
        }
        const CMat WV = (weights * V) * s;

        Hessian H;
        H.d2_mu.setZero(weights.rows(), 25);
        auto set = [&](int i, int jj, const CVec &v)
        {
            H.d2_mu.col(5 * i + jj) = v;
            H.d2_mu.col(5 * jj + i) = v;
        };
        for (int nu = 0; nu < 3; ++nu)
        {
            const CVec ar = (-j * k) * WV.col(nu);
            set(0, 2 + nu, ar);
            set(1, 2 + nu, j * ar);
        }
        for (int q = 0; q < 6; ++q)
            set(2 + pairs[q][0], 2 + pairs[q][1], eta.alpha * WV.col(3 + q));
        return H;
    }

    struct FiniteDiffReport
    {
        std::array<double, 5> jacobian_rel_err{};
        std::array<std::array<double, 5>, 5> hessian_rel_err{};
        double max_jacobian_rel_err = 0.0;
        double max_hessian_rel_err = 0.0;
    };

    // Compares the analytic derivatives against central differences of
    // noise_free_mean. Each column's error is taken relative to the largest
    // entry of that column; identically-zero columns are measured against the
    // largest entry of the whole Jacobian / Hessian instead.
    // `step` is used for first differences, `hessian_step` for second ones.
    inline FiniteDiffReport finite_diff_check(const SceneConfig &config, const ParameterVector &eta, const CMat &weights,
                                              double step, double hessian_step = 1e-4, double pilot_energy = 1.0)
    {
        if (!(step >= 1e-8 && step <= 1e-3) || !(hessian_step >= 1e-8 && hessian_step <= 1e-3))
            throw InvalidArgument("finite_diff_check: step must lie in [1e-8, 1e-3]");

        const Eta e0 = eta.to_eta();
        auto mu_at = [&](const Eta &e)
        { return noise_free_mean(config, ParameterVector::from_eta(e), weights, pilot_energy); };
        auto unit = [](int i)
        { Eta u = Eta::Zero(); u[i] = 1.0; return u; };

        const Jacobian J = jacobian_mu(config, eta, weights, pilot_energy);
        const Hessian H = hessian_mu(config, eta, weights, pilot_energy);

        FiniteDiffReport rep;
        const double jscale = J.d_mu.cwiseAbs().maxCoeff();
        for (int i = 0; i < 5; ++i)
        {
            const CVec num = (mu_at(e0 + step * unit(i)) - mu_at(e0 - step * unit(i))) / (2.0 * step);
            const double cmax = J.d_mu.col(i).cwiseAbs().maxCoeff();
            const double denom = cmax > 0.0 ? cmax : jscale;
            rep.jacobian_rel_err[i] = (num - J.d_mu.col(i)).cwiseAbs().maxCoeff() / denom;
            rep.max_jacobian_rel_err = std::max(rep.max_jacobian_rel_err, rep.jacobian_rel_err[i]);
        }

        const double h = hessian_step;
        const double hscale = H.d2_mu.cwiseAbs().maxCoeff();
        const CVec f0 = mu_at(e0);
        for (int i = 0; i < 5; ++i)
            for (int jj = i; jj < 5; ++jj)
            {
                CVec num;
                if (i == jj)
                    num = (mu_at(e0 + h * unit(i)) - 2.0 * f0 + mu_at(e0 - h * unit(i))) / (h * h);
                else
                {
                    const Eta ui = h * unit(i), uj = h * unit(jj);
                    num = (mu_at(e0 + ui + uj) - mu_at(e0 + ui - uj) - mu_at(e0 - ui + uj) + mu_at(e0 - ui - uj)) /
                          (4.0 * h * h);
                }
                const CVec ana = H(i, jj);
                const double amax = ana.cwiseAbs().maxCoeff();
                const double denom = amax > 0.0 ? amax : hscale;
                const double err = (num - ana).cwiseAbs().maxCoeff() / denom;
                rep.hessian_rel_err[i][jj] = rep.hessian_rel_err[jj][i] = err;
                rep.max_hessian_rel_err = std::max(rep.max_hessian_rel_err, err);
            }
        return rep;
    }
}

#endif
