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

#ifndef RISMCRB_GEOMETRY_HPP
#define RISMCRB_GEOMETRY_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "errors.hpp"

namespace rismcrb
{
    using cplx = std::complex<double>;
    using Vec3 = Eigen::Vector3d;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;
    using ElementMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

    inline constexpr double speed_of_light = 299792458.0;

    // Rectangular RIS lattice centered on `center` in the plane z = center.z.
    // Element index m = r * cols + c, rows run along x and columns along y.
    inline ElementMatrix build_ris_grid(int rows, int cols, double spacing, const Vec3 &center)
    {
        if (rows < 1 || cols < 1)
            throw InvalidArgument("build_ris_grid: rows and cols must be >= 1");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw InvalidArgument("build_ris_grid: spacing must be positive");

        ElementMatrix pos(static_cast<Eigen::Index>(rows) * cols, 3);
        const double r0 = 0.5 * (rows - 1), c0 = 0.5 * (cols - 1);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                const Eigen::Index m = static_cast<Eigen::Index>(r) * cols + c;
                pos(m, 0) = center.x() + (r - r0) * spacing;
                pos(m, 1) = center.y() + (c - c0) * spacing;
                pos(m, 2) = center.z();
            }
        return pos;
    }

    // Carrier, RIS lattice and the BS / RIS / true UE positions. Immutable
    // after construction; element positions and the BS steering vector are
    // computed once here.
    class SceneConfig
    {
    public:
        // `spacing_m <= 0` selects half-wavelength spacing.
        static SceneConfig make(double carrier_hz, int rows, int cols, double spacing_m,
                                const Vec3 &p_ris, const Vec3 &p_bs, const Vec3 &p_ue_true)
        {
            if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
                throw InvalidArgument("SceneConfig: carrier_hz must be positive");
            SceneConfig s;
            s.carrier_hz_ = carrier_hz;
            s.wavelength_m_ = speed_of_light / carrier_hz;
            s.rows_ = rows;
            s.cols_ = cols;
            s.spacing_m_ = spacing_m > 0.0 ? spacing_m : 0.5 * s.wavelength_m_;
            s.p_ris_ = p_ris;
            s.p_bs_ = p_bs;
            s.p_ue_true_ = p_ue_true;
            s.elements_ = build_ris_grid(rows, cols, s.spacing_m_, p_ris);
            s.offsets_ = build_ris_grid(rows, cols, s.spacing_m_, Vec3::Zero());
            s.offset_norm2_ = s.offsets_.rowwise().squaredNorm();
            s.bs_response_ = s.steering(p_bs);
            return s;
        }

        // Same scene with the UE moved.
        SceneConfig with_ue(const Vec3 &p_ue) const
        {
            SceneConfig s = *this;
            s.p_ue_true_ = p_ue;
            return s;
        }

        double carrier_hz() const noexcept { return carrier_hz_; }
        double wavelength_m() const noexcept { return wavelength_m_; }
        double wavenumber() const noexcept { return 2.0 * std::numbers::pi / wavelength_m_; }
        int ris_rows() const noexcept { return rows_; }
        int ris_cols() const noexcept { return cols_; }
        Eigen::Index n_elements() const noexcept { return elements_.rows(); }
        double spacing_m() const noexcept { return spacing_m_; }
        const Vec3 &p_ris() const noexcept { return p_ris_; }
        const Vec3 &p_bs() const noexcept { return p_bs_; }
        const Vec3 &p_ue_true() const noexcept { return p_ue_true_; }
        const ElementMatrix &element_positions() const noexcept { return elements_; }
        // a(p_bs)
        const CVec &bs_response() const noexcept { return bs_response_; }

        // The path difference is formed as (|e|^2 - 2 q.e) / (|q - e| + |q|),
        // q = p - p_ris, e = p_m - p_ris, which avoids cancelling two large
        // distances when p is far from the surface.
        CVec steering(const Vec3 &p) const
        {
            const Eigen::Index M = elements_.rows();
            const double k = wavenumber();
            const Vec3 q = p - p_ris_;
            const double d_ref = q.norm();
            const double eps = 1e-12 * spacing_m_;
            CVec a(M);
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const double ex = offsets_(m, 0), ey = offsets_(m, 1), ez = offsets_(m, 2);
                const double dx = q.x() - ex, dy = q.y() - ey, dz = q.z() - ez;
                const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
                if (d <= eps)
                    throw SingularGeometry("position coincides with RIS element " + std::to_string(m));
                const double diff = (offset_norm2_[m] - 2.0 * (q.x() * ex + q.y() * ey + q.z() * ez)) / (d + d_ref);
                a[m] = std::polar(1.0, -k * diff);
            }
            return a;
        }

    private:
        SceneConfig() = default;

        double carrier_hz_ = 0.0;
        double wavelength_m_ = 0.0;
        int rows_ = 0;
        int cols_ = 0;
        double spacing_m_ = 0.0;
        Vec3 p_ris_ = Vec3::Zero();
        Vec3 p_bs_ = Vec3::Zero();
        Vec3 p_ue_true_ = Vec3::Zero();
        ElementMatrix elements_;
        ElementMatrix offsets_; // p_m - p_ris
        Eigen::VectorXd offset_norm2_;
        CVec bs_response_;
    };

    // Near-field steering vector, [a(p)]_m = exp(-j 2pi (|p - p_m| - |p - p_ris|) / lambda).
    inline CVec steering_vector(const SceneConfig &config, const Vec3 &p)
    {
        return config.steering(p);
    }

    // b(p) = a(p) .* a(p_bs)
    inline CVec combined_response(const SceneConfig &config, const Vec3 &p)
    {
        return config.steering(p).cwiseProduct(config.bs_response());
    }

    // Distances and unit vectors from the RIS center and every element to p.
    struct RelativeGeometry
    {
        Eigen::VectorXd dist;   // |p - p_m|
        ElementMatrix unit;     // u_m = (p - p_m) / |p - p_m|
        double dist_center = 0; // |p - p_ris|
        Vec3 unit_center;       // u
    };

    inline RelativeGeometry relative_geometry(const SceneConfig &config, const Vec3 &p)
    {
        const auto &pos = config.element_positions();
        const Eigen::Index M = pos.rows();
        const double eps = 1e-12 * config.spacing_m();
        RelativeGeometry g;
        g.dist.resize(M);
        g.unit.resize(M, 3);
        for (Eigen::Index m = 0; m < M; ++m)
        {
            const Vec3 d = p - pos.row(m).transpose();
            const double n = d.norm();
            if (n <= eps)
                throw SingularGeometry("position coincides with RIS element " + std::to_string(m));
            g.dist[m] = n;
            g.unit.row(m) = (d / n).transpose();
        }
        const Vec3 dc = p - config.p_ris();
        g.dist_center = dc.norm();
        if (g.dist_center <= eps)
            throw SingularGeometry("position coincides with the RIS center");
        g.unit_center = dc / g.dist_center;
        return g;
    }
}

#endif
