// SPDX-License-Identifier: Apache-2.0
//
// aerothz c++ library for THz UM-MIMO aeronautical channel estimation and tracking
// Copyright (C) 2026 The aerothz authors
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

#ifndef AEROTHZ_CRLB_H
#define AEROTHZ_CRLB_H

#include "aerothz/array_manifold.hpp"

#include <functional>
#include <vector>

namespace aerothz
{
    // Deterministic single-source bound: sigma2 / 2 * {energy * Re(D^H (I - a a^H / |a|^2) D)}^-1
    // where energy = sum |g_t|^2 over snapshots.
    Eigen::MatrixXd deterministic_crb(const CVec &a, const CMat &D, double energy, double sigma2);

    // Bound on (nu_bar, mu_bar) of an i_h x i_v equivalent array, index 0 = nu_bar, 1 = mu_bar.
    // `amplitudes` holds the effective complex amplitude of each snapshot, `va_bar` the scaled virtual angles.
    struct AngleBoundInputs
    {
        int i_h = 5;
        int i_v = 5;
        VirtualAngles va_bar;
        std::vector<cd> amplitudes;
        double sigma2 = 1.0;
    };
    Eigen::Matrix2d crlb_virtual(const AngleBoundInputs &in);

    struct PhysicalBound
    {
        double theta = 0.0; // [rad^2]
        double phi = 0.0;   // [rad^2]
    };

    // Map a (nu_bar, mu_bar) bound to azimuth / elevation. `va` are the unscaled virtual angles.
    PhysicalBound crlb_physical(const Eigen::Matrix2d &C, VirtualAngles va, int omega);      // Full Jacobian
    PhysicalBound crlb_physical_diag(const Eigen::Matrix2d &C, VirtualAngles va, int omega); // Diagonal terms only

    // Doppler bound [Hz^2] from N_do symbols and the per-subcarrier effective amplitudes
    double crlb_doppler(int n_do, const std::vector<cd> &amplitudes, double sigma2, double t_sym);

    // Normalized delay bound [(f_s tau)^2]. `positions` are the 0-based subcarrier indices of the comb,
    // `amplitudes` the effective amplitude of each symbol.
    double crlb_delay(const std::vector<int> &positions, const std::vector<cd> &amplitudes, double sigma2, int K);

    // Fisher information from second differences of the expected log-likelihood of y_t = mean_t(eta) + n,
    // n ~ CN(0, sigma2 I). `mean` maps a real parameter vector to the stacked noiseless data.
    Eigen::MatrixXd fim_numeric(const std::function<CVec(const Eigen::VectorXd &)> &mean,
                                const Eigen::VectorXd &eta0, double sigma2, double step);
}

#endif
