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

#ifndef RISMCRB_BOUNDS_HPP
#define RISMCRB_BOUNDS_HPP

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "derivatives.hpp"
#include "optimizer.hpp"
#include "ris_model.hpp"

namespace rismcrb
{
    using Mat5 = Eigen::Matrix<double, 5, 5>;

    struct BoundsReport
    {
        ParameterVector eta0;
        Mat5 A = Mat5::Zero();
        Mat5 B = Mat5::Zero();
        Mat5 mcrb = Mat5::Zero();
        Mat5 lb = Mat5::Zero();
        Mat5 bias_matrix = Mat5::Zero();
        double peb_mcrb = 0.0;
        double peb_lb = 0.0;
        double bias_norm = 0.0;
        double condition_A = 0.0;
    };

    // Least-squares gain alpha = c^H(p) mu / c^H(p) c(p) for the assumed model.
    inline cplx optimal_alpha(const SceneConfig &config, const Vec3 &p, const CVec &mu_true, const CMat &assumed_weights,
                              double pilot_energy = 1.0)
    {
        const CVec c = gain_response(config, p, assumed_weights, pilot_energy);
        const double cc = c.squaredNorm();
        if (!(cc > 0.0))
            throw DegenerateChannel("optimal_alpha: c(p) is identically zero");
        return c.dot(mu_true) / cc; // Eigen's dot conjugates the first argument
    }

    // -mu^H P_c(p) mu: the negated power of mu captured by the model response at p.
    inline double concentrated_objective(const SceneConfig &config, const Vec3 &p, const CVec &mu_true,
                                         const CMat &assumed_weights, double pilot_energy = 1.0)
    {
        const CVec c = gain_response(config, p, assumed_weights, pilot_energy);
        const double cc = c.squaredNorm();
        if (!(cc > 0.0))
            throw DegenerateChannel("concentrated_objective: c(p) is identically zero");
        return -std::norm(c.dot(mu_true)) / cc;
    }

    // Objective wrapper for the optimizer: singular geometry maps to +inf.
    inline auto make_concentrated_objective(const SceneConfig &config, const CVec &target, const CMat &assumed_weights,
                                            double pilot_energy = 1.0)
    {
        return [&config, &target, &assumed_weights, pilot_energy](const Vec3 &p)
        {
            try
            {
                return concentrated_objective(config, p, target, assumed_weights, pilot_energy);
            }
            catch (const SingularGeometry &)
            {
                return std::numeric_limits<double>::infinity();
            }
            catch (const DegenerateChannel &)
            {
                return std::numeric_limits<double>::infinity();
            }
        };
    }

    struct FitPolish
    {
        ParameterVector eta;
        int iters = 0;
        bool converged = false;
    };

    // Newton iterations on 0.5 |target - mu~(eta)|^2 over all five components,
    // using the analytic Jacobian and Hessian. Falls back to Gauss-Newton when
    // the full Hessian is not positive definite. Stops once the position step
    // drops below x_tol (meters).
    inline FitPolish polish_fit(const SceneConfig &config, const CVec &target, const ParameterVector &start,
                                const CMat &assumed_weights, double x_tol = 1e-9, int max_iters = 50,
                                double pilot_energy = 1.0)
    {
        FitPolish out{start, 0, false};
        Eta e = start.to_eta();
        auto cost = [&](const Eta &x)
        {
            try
            {
                return (target - noise_free_mean(config, ParameterVector::from_eta(x), assumed_weights, pilot_energy))
                    .squaredNorm();
            }
            catch (const SingularGeometry &)
            {
                return std::numeric_limits<double>::infinity();
            }
        };
        double f = cost(e);
        for (int it = 0; it < max_iters; ++it)
        {
            const ParameterVector pv = ParameterVector::from_eta(e);
            const CVec r = target - noise_free_mean(config, pv, assumed_weights, pilot_energy);
            const Jacobian J = jacobian_mu(config, pv, assumed_weights, pilot_energy);
            const Hessian H = hessian_mu(config, pv, assumed_weights, pilot_energy);
            Eta g;
            Mat5 gn;
            Mat5 curv;
            for (int i = 0; i < 5; ++i)
            {
                g[i] = -(J.d_mu.col(i).dot(r)).real();
                for (int j = 0; j < 5; ++j)
                {
                    gn(i, j) = J.d_mu.col(i).dot(J.d_mu.col(j)).real();
                    curv(i, j) = r.dot(H(i, j)).real();
                }
            }
            Mat5 hess = gn - curv;
            Eigen::LDLT<Mat5> ldlt(hess);
            Eta step;
            if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0.0).all())
                step = -ldlt.solve(g);
            else
                step = -gn.ldlt().solve(g);
            if (!step.allFinite())
                break;

            double t = 1.0;
            Eta en = e + step;
            double fn = cost(en);
            for (int ls = 0; ls < 30 && !(fn <= f); ++ls)
            {
                t *= 0.5;
                en = e + t * step;
                fn = cost(en);
            }
            ++out.iters;
            if (!(fn <= f))
            {
                out.converged = (t * step).segment<3>(2).cwiseAbs().maxCoeff() <= x_tol;
                break;
            }
            const double pos_step = (en - e).segment<3>(2).cwiseAbs().maxCoeff();
            e = en;
            f = fn;
            if (pos_step <= x_tol)
            {
                out.converged = true;
                break;
            }
        }
        out.eta = ParameterVector::from_eta(e);
        return out;
    }

    struct PseudoTrueResult
    {
        ParameterVector eta0;
        double objective = 0.0;     // concentrated objective at p0
        double residual_norm = 0.0; // |mu(eta_true) - mu~(eta0)|
        MultiStartResult<3> search;
        FitPolish polish;
    };

    // Starts for the pseudo-true search: p_true itself, then points whose
    // coordinates are those of p_true scaled by independent uniform(0, 1) draws.
    inline std::vector<Vec3> pseudo_true_starts(const Vec3 &p_true, int n_starts, std::uint64_t seed)
    {
        std::vector<Vec3> starts{p_true};
        Stream rng(derive_key(seed, {0x7374617274ULL}));
        for (int i = 1; i < n_starts; ++i)
            starts.emplace_back(p_true.x() * rng.uniform(), p_true.y() * rng.uniform(), p_true.z() * rng.uniform());
        return starts;
    }

    // Pseudo-true parameter: the assumed-model parameter whose noise-free mean
    // is closest to the true-model mean. Solved as the concentrated 3D search
    // followed by the closed-form gain and a Newton polish.
    inline PseudoTrueResult pseudo_true(const SceneConfig &config, const ParameterVector &eta_true,
                                        const PhaseProfile &profile, const AmplitudeModel &model,
                                        const OptimizerSettings &settings, double pilot_energy = 1.0)
    {
        model.validate();
        const CMat w_true = make_weights(profile, model, ModelMode::True);
        const CMat w_assumed = make_weights(profile, model, ModelMode::Assumed);
        const CVec mu = noise_free_mean(config, eta_true, w_true, pilot_energy);

        PseudoTrueResult out;
        const auto starts = pseudo_true_starts(eta_true.position, settings.n_starts, settings.start_seed ^ profile.seed);
        auto objective = make_concentrated_objective(config, mu, w_assumed, pilot_energy);
        out.search = multi_start<3>(objective, starts, settings);

        const Vec3 p0 = out.search.x;
        ParameterVector coarse{optimal_alpha(config, p0, mu, w_assumed, pilot_energy), p0};
        out.polish = polish_fit(config, mu, coarse, w_assumed, 1e-9, 50, pilot_energy);
        out.eta0 = out.polish.eta;
        out.objective = concentrated_objective(config, out.eta0.position, mu, w_assumed, pilot_energy);
        out.residual_norm = (mu - noise_free_mean(config, out.eta0, w_assumed, pilot_energy)).norm();
        return out;
    }

    // Derivatives of the assumed mean and the residual eps = mu(eta_true) - mu~(eta0),
    // everything the A and B matrices need apart from N0.
    struct MismatchTerms
    {
        JacobianMatrix J;
        Hessian H;
        CVec eps;
        Mat5 gram = Mat5::Zero();      // Re{J_i^H J_j}
        Mat5 curvature = Mat5::Zero(); // Re{eps^H d2 mu~ / d eta_i d eta_j}
        Eta score = Eta::Zero();       // Re{eps^H J_i}
        double mu_norm = 0.0;          // |mu(eta_true)|
    };

    inline MismatchTerms mismatch_terms(const SceneConfig &config, const ParameterVector &eta0,
                                        const ParameterVector &eta_true, const PhaseProfile &profile,
                                        const AmplitudeModel &model, double pilot_energy = 1.0)
    {
        const CMat w_true = make_weights(profile, model, ModelMode::True);
        const CMat w_assumed = make_weights(profile, model, ModelMode::Assumed);
        MismatchTerms m;
        const CVec mu = noise_free_mean(config, eta_true, w_true, pilot_energy);
        m.mu_norm = mu.norm();
        m.eps = mu - noise_free_mean(config, eta0, w_assumed, pilot_energy);
        m.J = jacobian_mu(config, eta0, w_assumed, pilot_energy).d_mu;
        m.H = hessian_mu(config, eta0, w_assumed, pilot_energy);
        for (int i = 0; i < 5; ++i)
        {
            m.score[i] = m.eps.dot(m.J.col(i)).real();
            for (int j = 0; j < 5; ++j)
            {
                m.gram(i, j) = m.J.col(i).dot(m.J.col(j)).real();
                m.curvature(i, j) = m.eps.dot(m.H(i, j)).real();
            }
        }
        return m;
    }

    // [A]_ij = (2/N0) Re{eps^H d2mu~_ij - d mu~_i^H d mu~_j}
    inline Mat5 matrix_A(const MismatchTerms &m, double noise_var)
    {
        return (2.0 / noise_var) * (m.curvature - m.gram);
    }

    // [B]_ij = (2/N0) [(2/N0) Re{eps^H d mu~_i} Re{eps^H d mu~_j} + Re{d mu~_i^H d mu~_j}]
    inline Mat5 matrix_B(const MismatchTerms &m, double noise_var)
    {
        return (2.0 / noise_var) * ((2.0 / noise_var) * m.score * m.score.transpose() + m.gram);
    }

    inline Mat5 matrix_A(const SceneConfig &config, const ParameterVector &eta0, const ParameterVector &eta_true,
                         const PhaseProfile &profile, const AmplitudeModel &model, double noise_var,
                         double pilot_energy = 1.0)
    {
        return matrix_A(mismatch_terms(config, eta0, eta_true, profile, model, pilot_energy), noise_var);
    }

    inline Mat5 matrix_B(const SceneConfig &config, const ParameterVector &eta0, const ParameterVector &eta_true,
                         const PhaseProfile &profile, const AmplitudeModel &model, double noise_var,
                         double pilot_energy = 1.0)
    {
        return matrix_B(mismatch_terms(config, eta0, eta_true, profile, model, pilot_energy), noise_var);
    }

    // |Re{eps^H J_i}| / (|eps| |J_i|) per component; zero at an exact stationary point.
    // |eps| is floored at 1e-9 |mu| so an exact fit (no mismatch) is not
    // judged on the direction of round-off noise.
    inline Eta stationarity_residuals(const MismatchTerms &m)
    {
        Eta r;
        const double en = std::max(m.eps.norm(), 1e-9 * m.mu_norm);
        for (int i = 0; i < 5; ++i)
        {
            const double d = en * m.J.col(i).norm();
            r[i] = d > 0.0 ? std::abs(m.score[i]) / d : 0.0;
        }
        return r;
    }

    inline double condition_number(const Mat5 &A)
    {
        Eigen::JacobiSVD<Mat5> svd(A);
        const auto &sv = svd.singularValues();
        return sv[4] > 0.0 ? sv[0] / sv[4] : std::numeric_limits<double>::infinity();
    }

    inline double position_error_bound(const Mat5 &cov)
    {
        return std::sqrt(std::max(0.0, cov.block<3, 3>(2, 2).trace()));
    }

    inline constexpr double max_condition = 1e12;

    // MCRB = A^-1 B A^-1 from two linear solves, LB = MCRB + (eta_true - eta0)(eta_true - eta0)^T.
    inline BoundsReport assemble_bounds(const Mat5 &A, const Mat5 &B, const ParameterVector &eta0,
                                        const ParameterVector &eta_true)
    {
        BoundsReport r;
        r.eta0 = eta0;
        r.A = A;
        r.B = B;
        r.condition_A = condition_number(A);
        if (!(r.condition_A <= max_condition))
            throw IllConditioned("assemble_bounds: A is numerically singular (condition " +
                                     std::to_string(r.condition_A) + ")",
                                 r.condition_A);
        const Eigen::FullPivLU<Mat5> lu(A);
        const Mat5 x = lu.solve(B);               // A^-1 B
        const Mat5 mcrb = lu.solve(x.transpose()); // A^-1 (A^-1 B)^T = A^-1 B A^-1 for symmetric A, B
        r.mcrb = 0.5 * (mcrb + mcrb.transpose());
        const Eta d = eta_true.to_eta() - eta0.to_eta();
        r.bias_matrix = d * d.transpose();
        r.lb = r.mcrb + r.bias_matrix;
        r.peb_mcrb = position_error_bound(r.mcrb);
        r.peb_lb = position_error_bound(r.lb);
        r.bias_norm = (eta_true.position - eta0.position).norm();
        return r;
    }

    struct CrbResult
    {
        Mat5 fim = Mat5::Zero();
        Mat5 crb = Mat5::Zero();
        double peb_crb = 0.0;
        double condition = 0.0;
    };

    // Gram matrix Re{J^H J} of the true-model Jacobian at eta_true, scaled by 2/N0 to give the FIM.
    inline Mat5 true_model_gram(const SceneConfig &config, const ParameterVector &eta_true, const PhaseProfile &profile,
                                const AmplitudeModel &model, double pilot_energy = 1.0)
    {
        const CMat w_true = make_weights(profile, model, ModelMode::True);
        const JacobianMatrix J = jacobian_mu(config, eta_true, w_true, pilot_energy).d_mu;
        Mat5 g;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                g(i, j) = J.col(i).dot(J.col(j)).real();
        return g;
    }

    inline CrbResult crb_from_gram(const Mat5 &gram, double noise_var)
    {
        CrbResult r;
        r.fim = (2.0 / noise_var) * gram;
        r.condition = condition_number(r.fim);
        if (!(r.condition <= max_condition))
            throw IllConditioned("classical_crb: FIM is numerically singular", r.condition);
        r.crb = r.fim.fullPivLu().solve(Mat5::Identity());
        r.crb = 0.5 * (r.crb + r.crb.transpose());
        r.peb_crb = position_error_bound(r.crb);
        return r;
    }

    // Classical CRB with perfect knowledge of the amplitude model.
    inline CrbResult classical_crb(const SceneConfig &config, const ParameterVector &eta_true,
                                   const PhaseProfile &profile, const AmplitudeModel &model, double noise_var,
                                   double pilot_energy = 1.0)
    {
        return crb_from_gram(true_model_gram(config, eta_true, profile, model, pilot_energy), noise_var);
    }

    // Everything that depends on (profile, model) but not on the SNR, so a
    // sweep over SNR reuses the pseudo-true search and the derivatives.
    struct MismatchAnalysis
    {
        PseudoTrueResult pseudo;
        MismatchTerms terms;
        Mat5 true_gram = Mat5::Zero();
        double signal_power = 0.0; // E_s |alpha|^2 sum_t |b^T w_t|^2 under the true model
        Eigen::Index n_transmissions = 0;

        double noise_var_for(double snr_db) const
        {
            return signal_power / (static_cast<double>(n_transmissions) * std::pow(10.0, snr_db / 10.0));
        }
    };

    inline MismatchAnalysis analyze_mismatch(const SceneConfig &config, const ParameterVector &eta_true,
                                             const PhaseProfile &profile, const AmplitudeModel &model,
                                             const OptimizerSettings &settings, double pilot_energy = 1.0)
    {
        MismatchAnalysis a;
        a.pseudo = pseudo_true(config, eta_true, profile, model, settings, pilot_energy);
        a.terms = mismatch_terms(config, a.pseudo.eta0, eta_true, profile, model, pilot_energy);
        a.true_gram = true_model_gram(config, eta_true, profile, model, pilot_energy);
        const CMat w_true = make_weights(profile, model, ModelMode::True);
        a.n_transmissions = w_true.rows();
        // Same quantity noise_var_for_snr() divides by.
        const double n0_at_0db = noise_var_for_snr(config, eta_true, w_true, 0.0, pilot_energy);
        a.signal_power = n0_at_0db * static_cast<double>(a.n_transmissions);
        return a;
    }

    inline BoundsReport bounds_at(const MismatchAnalysis &a, const ParameterVector &eta_true, double noise_var)
    {
        return assemble_bounds(matrix_A(a.terms, noise_var), matrix_B(a.terms, noise_var), a.pseudo.eta0, eta_true);
    }
}

#endif
