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

#ifndef RISMCRB_RIS_MODEL_HPP
#define RISMCRB_RIS_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "geometry.hpp"
#include "rng.hpp"

namespace rismcrb
{
    // Phase-dependent amplitude of an RIS element,
    //   beta(theta) = (1 - beta_min) * ((sin(theta - phi) + 1) / 2)^kappa + beta_min.
    struct AmplitudeModel
    {
        double beta_min = 1.0;
        double phi = 0.0;
        double kappa = 2.0;

        void validate() const
        {
            if (!(beta_min >= 0.0 && beta_min <= 1.0))
                throw InvalidArgument("AmplitudeModel: beta_min must lie in [0, 1]");
            if (!(phi >= 0.0) || !std::isfinite(phi))
                throw InvalidArgument("AmplitudeModel: phi must be >= 0");
            if (!(kappa >= 0.0) || !std::isfinite(kappa))
                throw InvalidArgument("AmplitudeModel: kappa must be >= 0");
        }
    };

    enum class ModelMode
    {
        True,    // w = beta(theta) exp(j theta)
        Assumed, // w = exp(j theta)
    };

    // T x M phase shifts in [-pi, pi).
    struct PhaseProfile
    {
        Eigen::MatrixXd theta;
        std::uint64_t seed = 0;

        Eigen::Index n_transmissions() const noexcept { return theta.rows(); }
        Eigen::Index n_elements() const noexcept { return theta.cols(); }
    };

    inline double amplitude(const AmplitudeModel &model, double theta)
    {
        const double base = 0.5 * (std::sin(theta - model.phi) + 1.0);
        return (1.0 - model.beta_min) * std::pow(base, model.kappa) + model.beta_min;
    }

    inline CMat make_weights(const PhaseProfile &profile, const AmplitudeModel &model, ModelMode mode)
    {
        const auto &th = profile.theta;
        CMat w(th.rows(), th.cols());
        for (Eigen::Index m = 0; m < th.cols(); ++m)
            for (Eigen::Index t = 0; t < th.rows(); ++t)
            {
                const double mag = mode == ModelMode::True ? amplitude(model, th(t, m)) : 1.0;
                w(t, m) = std::polar(mag, th(t, m));
            }
        return w;
    }

    // Entry (t, m) is a counter-based draw keyed by the seed, so a profile is
    // identical no matter how or in which order it is generated.
    inline PhaseProfile random_profile(Eigen::Index T, Eigen::Index M, std::uint64_t seed)
    {
        if (T < 1 || M < 1)
            throw InvalidArgument("random_profile: T and M must be >= 1");
        constexpr double pi = std::numbers::pi;
        const double upper = std::nextafter(pi, 0.0);
        const std::uint64_t key = derive_key(seed, {0x70726F66ULL});
        PhaseProfile p;
        p.seed = seed;
        p.theta.resize(T, M);
        for (Eigen::Index t = 0; t < T; ++t)
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const auto counter = static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(M) + static_cast<std::uint64_t>(m);
                double v = -pi + 2.0 * pi * uniform_at(key, counter);
                p.theta(t, m) = v < pi ? v : upper;
            }
        return p;
    }

    // CSV with header "t,m,theta"; values are written with 17 significant
    // digits so a reload reproduces the profile bit for bit.
    inline void write_profile_csv(const PhaseProfile &profile, std::ostream &os)
    {
        os << "# seed=" << profile.seed << "\n";
        os << "t,m,theta\n";
        os << std::setprecision(17);
        for (Eigen::Index t = 0; t < profile.theta.rows(); ++t)
            for (Eigen::Index m = 0; m < profile.theta.cols(); ++m)
                os << t << ',' << m << ',' << profile.theta(t, m) << '\n';
    }

    inline PhaseProfile read_profile_csv(std::istream &is)
    {
        struct Entry
        {
            long t, m;
            double v;
        };
        std::vector<Entry> entries;
        std::uint64_t seed = 0;
        long T = 0, M = 0;
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
                auto pos = line.find("seed=");
                if (pos != std::string::npos)
                    seed = std::stoull(line.substr(pos + 5));
                continue;
            }
            if (!header)
            {
                if (line != "t,m,theta")
                    throw InvalidArgument("profile csv: expected header 't,m,theta' at line " + std::to_string(line_no));
                header = true;
                continue;
            }
            std::istringstream ls(line);
            Entry e{};
            char c1 = 0, c2 = 0;
            if (!(ls >> e.t >> c1 >> e.m >> c2 >> e.v) || c1 != ',' || c2 != ',' || e.t < 0 || e.m < 0)
                throw InvalidArgument("profile csv: malformed row at line " + std::to_string(line_no));
            T = std::max(T, e.t + 1);
            M = std::max(M, e.m + 1);
            entries.push_back(e);
        }
        if (entries.empty() || static_cast<long>(entries.size()) != T * M)
            throw InvalidArgument("profile csv: expected a complete T x M table");
        PhaseProfile p;
        p.seed = seed;
        p.theta = Eigen::MatrixXd::Constant(T, M, std::numeric_limits<double>::quiet_NaN());
        for (const auto &e : entries)
            p.theta(e.t, e.m) = e.v;
        if (p.theta.hasNaN())
            throw InvalidArgument("profile csv: duplicate or missing (t, m) entries");
        if ((p.theta.array() < -std::numbers::pi).any() || (p.theta.array() >= std::numbers::pi).any())
            throw InvalidArgument("profile csv: phases must lie in [-pi, pi)");
        return p;
    }
}

#endif
