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

#ifndef RISMCRB_SIGNAL_HPP
#define RISMCRB_SIGNAL_HPP

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "rng.hpp"

namespace rismcrb
{
    using Eta = Eigen::Matrix<double, 5, 1>;

    // eta = [Re(alpha), Im(alpha), x, y, z]
    struct ParameterVector
    {
        cplx alpha{1.0, 0.0};
        Vec3 position = Vec3::Zero();

        Eta to_eta() const
        {
            Eta e;
            e << alpha.real(), alpha.imag(), position.x(), position.y(), position.z();
            return e;
        }

        static ParameterVector from_eta(const Eta &e)
        {
            return {cplx(e[0], e[1]), Vec3(e[2], e[3], e[4])};
        }
    };

    struct ObservationSet
    {
        CVec y;
        double noise_var = 1.0;    // N0 per complex sample
        double pilot_energy = 1.0; // E_s, with s_t = sqrt(E_s)
    };

    // c(p) = sqrt(E_s) * W b(p), the unit-gain response for the weight matrix W.
    inline CVec gain_response(const SceneConfig &config, const Vec3 &p, const CMat &weights, double pilot_energy = 1.0)
    {
        if (weights.cols() != config.n_elements())
            throw InvalidArgument("weights must have one column per RIS element");
        return (weights * combined_response(config, p)) * std::sqrt(pilot_energy);
    }

    // mu_t(eta) = alpha * sum_m [b(p)]_m w_{t,m} s_t
    inline CVec noise_free_mean(const SceneConfig &config, const ParameterVector &eta, const CMat &weights,
                                double pilot_energy = 1.0)
    {
        return eta.alpha * gain_response(config, eta.position, weights, pilot_energy);
    }

    // N0 giving SNR = E_s |alpha|^2 / (T N0) * sum_t |b^T(p) w_t|^2 at the requested level.
    inline double noise_var_for_snr(const SceneConfig &config, const ParameterVector &eta_true, const CMat &true_weights,
                                    double snr_db, double pilot_energy = 1.0)
    {
        if (!std::isfinite(snr_db))
            throw InvalidArgument("noise_var_for_snr: snr_db must be finite");
        const CVec c = true_weights * combined_response(config, eta_true.position);
        const double power = pilot_energy * std::norm(eta_true.alpha) * c.squaredNorm();
        if (!(power > 0.0))
            throw DegenerateChannel("noise_var_for_snr: effective channel is identically zero");
        const double snr = std::pow(10.0, snr_db / 10.0);
        return power / (static_cast<double>(true_weights.rows()) * snr);
    }

    // y = mu(eta_true) + n with n circular Gaussian, N0 / 2 per real dimension.
    inline ObservationSet simulate(const SceneConfig &config, const ParameterVector &eta_true, const CMat &true_weights,
                                   double noise_var, Stream &rng, double pilot_energy = 1.0)
    {
        if (!(noise_var > 0.0))
            throw InvalidArgument("simulate: noise_var must be positive");
        ObservationSet obs;
        obs.noise_var = noise_var;
        obs.pilot_energy = pilot_energy;
        obs.y = noise_free_mean(config, eta_true, true_weights, pilot_energy);
        const double sd = std::sqrt(0.5 * noise_var);
        for (Eigen::Index t = 0; t < obs.y.size(); ++t)
        {
            const double re = rng.normal();
            const double im = rng.normal();
            obs.y[t] += cplx(sd * re, sd * im);
        }
        return obs;
    }

    // D(p(y|eta_true) || p~(y|eta)) for two complex Gaussians sharing the
    // covariance N0 I: |mu(eta_true) - mu~(eta)|^2 / N0.
    inline double kl_divergence(const SceneConfig &config, const ParameterVector &eta_true, const ParameterVector &eta,
                                const CMat &weights_true, const CMat &weights_assumed, double noise_var,
                                double pilot_energy = 1.0)
    {
        if (!(noise_var > 0.0))
            throw InvalidArgument("kl_divergence: noise_var must be positive");
        const CVec mu = noise_free_mean(config, eta_true, weights_true, pilot_energy);
        const CVec mu_assumed = noise_free_mean(config, eta, weights_assumed, pilot_energy);
        return (mu - mu_assumed).squaredNorm() / noise_var;
    }

    inline void write_observations_csv(const ObservationSet &obs, std::ostream &os)
    {
        os << "# noise_var=" << std::setprecision(17) << obs.noise_var << " pilot_energy=" << obs.pilot_energy << "\n";
        os << "t,re,im\n";
        for (Eigen::Index t = 0; t < obs.y.size(); ++t)
            os << t << ',' << obs.y[t].real() << ',' << obs.y[t].imag() << '\n';
    }

    inline ObservationSet read_observations_csv(std::istream &is)
    {
        ObservationSet obs;
        std::vector<cplx> values;
        std::string line;
        bool header = false;
        int line_no = 0;
        while (std::getline(is, line))
        {
            ++line_no;
            if (line.empty())
                continue;
            if (line[0] == '#')
            {
                std::istringstream ls(line.substr(1));
                std::string tok;
                while (ls >> tok)
                {
                    auto eq = tok.find('=');
                    if (eq == std::string::npos)
                        continue;
                    const std::string key = tok.substr(0, eq);
                    const double v = std::stod(tok.substr(eq + 1));
                    if (key == "noise_var")
                        obs.noise_var = v;
                    else if (key == "pilot_energy")
                        obs.pilot_energy = v;
                }
                continue;
            }
            if (!header)
            {
                if (line != "t,re,im")
                    throw InvalidArgument("observation csv: expected header 't,re,im' at line " + std::to_string(line_no));
                header = true;
                continue;
            }
            std::istringstream ls(line);
            long t = 0;
            double re = 0, im = 0;
            char c1 = 0, c2 = 0;
            if (!(ls >> t >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',' || t != static_cast<long>(values.size()))
                throw InvalidArgument("observation csv: malformed or out-of-order row at line " + std::to_string(line_no));
            values.emplace_back(re, im);
        }
        obs.y = Eigen::Map<CVec>(values.data(), static_cast<Eigen::Index>(values.size()));
        return obs;
    }
}

#endif
