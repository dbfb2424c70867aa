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

// One noisy observation of the reference scene, then the mismatched ML fit.
//   sample_noiseless_fit [beta_min] [snr_db]

#include <cstdlib>
#include <iostream>

#include "rismcrb/estimator.hpp"

using namespace rismcrb;

int main(int argc, char **argv)
{
    const double beta_min = argc > 1 ? std::atof(argv[1]) : 1.0;
    const double snr_db = argc > 2 ? std::atof(argv[2]) : 200.0;

    const Vec3 ue = 5.0 * Vec3(1, 1, 1).normalized();
    const SceneConfig scene = SceneConfig::make(28e9, 50, 50, 0.0, Vec3::Zero(), 5.77 * Vec3(-1, 1, 1), ue);
    const PhaseProfile profile = random_profile(50, scene.n_elements(), 1);
    const ParameterVector eta{{1.0, 0.0}, ue};
    const CMat w = make_weights(profile, AmplitudeModel{beta_min, 0.0, 2.0}, ModelMode::True);

    Stream noise(derive_key(7, {0}));
    const ObservationSet obs = simulate(scene, eta, w, noise_var_for_snr(scene, eta, w, snr_db), noise);
    const EstimationResult est = mml_estimate(scene, obs, profile, EstimatorSettings{}, derive_key(7, {1}));

    std::cout << "angles (deg)  = " << est.angles.elevation * 180 / std::numbers::pi << ", "
              << est.angles.azimuth * 180 / std::numbers::pi << "\n"
              << "p_hat         = " << est.eta_hat.position.transpose() << "\n"
              << "error         = " << (est.eta_hat.position - ue).norm() << " m\n"
              << "residual      = " << est.residual << " (|y| = " << obs.y.norm() << ")\n";
}
