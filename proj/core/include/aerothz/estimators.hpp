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

#ifndef AEROTHZ_ESTIMATORS_H
#define AEROTHZ_ESTIMATORS_H

#include "aerothz/esprit.hpp"
#include "aerothz/selection.hpp"

#include <vector>

namespace aerothz
{
    // Pick mu = wrapped / omega + b pi, b in {-1, -1 + 1/omega, ..., 1}, closest to the prior
    double resolve_ambiguity(double wrapped, double prior, int omega);

    // Prior-aided iterative angle estimation on an equivalent (possibly sparse) array.
    // Y is (i_h i_v) x |subcarriers| with pilots removed; column j belongs to subcarriers[j] (1-based).
    // `prior` resolves sparse-array ambiguity, `ttd_angles` are the angles programmed into the delay units
    // (zero when no delay units are used). Returns the estimate of every iteration, the last one is final.
    // With squint = false the data are taken as squint-free and iterations repeat the first estimate.
    std::vector<VirtualAngles> estimate_angles(const CMat &Y, const std::vector<int> &subcarriers,
                                               const PatternSpec &pat, VirtualAngles prior,
                                               VirtualAngles ttd_angles, const ArrayGeometry &geo, int i_max,
                                               bool squint = true);

    // Iterative Doppler estimation. Y is N_do x |subcarriers| with pilots removed and the transmitter's rough
    // pre-compensation exp(-j 2 pi psi~_k (m - 1) T_sym) still present. Iteration 0 plus i_max refinements.
    // With squint = false the model has a single Doppler for all subcarriers.
    std::vector<double> estimate_doppler(const CMat &Y, const std::vector<int> &subcarriers, double psi_rough,
                                         double v_rough, const ArrayGeometry &geo, int i_max,
                                         bool squint = true);

    // Doppler of subcarrier k given carrier Doppler and radial speed
    double doppler_of(double psi_z, double v, int k, const ArrayGeometry &geo);

    // Delay from a |subcarriers| x N_de matrix on the comb {l, l + L, l + 2L, ...}
    struct DelayEstimate
    {
        double tau = 0.0;   // [s]
        double omega = 0.0; // Rotation per comb step, L mu_tau
    };
    DelayEstimate estimate_delay(const CMat &Y, int L, const ArrayGeometry &geo);

    // Largest delay that stays unambiguous on a comb of stride L
    bool delay_comb_feasible(int L, int n_cp, int K);

    // Mean of elementwise ratios Y ./ model
    cd estimate_gain(const CMat &Y, const CMat &model);

    // Interleaved subcarrier comb of link l (1-based) out of L links: {l, l + L, ...} <= K
    std::vector<int> subcarrier_comb(int l, int L, int K);
}

#endif
