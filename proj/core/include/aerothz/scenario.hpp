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

#ifndef AEROTHZ_SCENARIO_H
#define AEROTHZ_SCENARIO_H

#include "aerothz/channel.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace aerothz
{
    using Rng = std::mt19937_64;

    // Independent stream for (seed, a, b): used to give every trial / stage its own generator
    Rng make_rng(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0);

    // Two aerial BSs at A = (0, 0, d_ab) and B = (0, d_bs, d_ab), aircraft on a disk of radius r_a around
    // C = (d_bs / 2, d_bs / 2, 0), heading uniform inside the angle OCD with D = (0, d_bs, 0).
    struct Scenario
    {
        double d_ab = 10e3;
        double d_bs = 200e3;
        double r_a = 50e3;
        double v_ac = 200.0;
        int L = 2;
        double max_angle = pi / 3.0; // Angles drawn from [-max_angle, max_angle]
        double sigma_alpha2 = 1.0;
        void validate() const;
    };

    struct AircraftState
    {
        double x = 0.0, y = 0.0, z = 0.0;
        double heading = 0.0; // Horizontal direction of flight [rad from +x]
    };

    // Draws one realisation: positions, radial velocities / Doppler, angles, gains and delays
    std::vector<LinkParams> scenario_links(const Scenario &sc, const ArrayGeometry &carrier, Rng &rng,
                                           AircraftState *state = nullptr);

    // Rates of change per second and block length
    struct EvolutionRates
    {
        cd alpha = 0.0;       // [1/s]
        double tau = 0.0;     // [s/s]
        double psi_z = 0.0;   // [Hz/s]
        double theta_ac = 0.0, phi_ac = 0.0, theta_bs = 0.0, phi_bs = 0.0; // [rad/s]
        int n_c = 70;
        double t_sym = 2.176e-6;
        double tau_max = 128e-9; // Delays reflect into [0, tau_max]

        double t_ti() const { return n_c * t_sym; }
    };

    // alpha / 2, tau / 2, 0.01 psi, pi / 4 at the aircraft and pi / 12 at the BS
    EvolutionRates default_rates(const LinkParams &initial, const ArrayGeometry &carrier, int n_c);

    // Signs of the seven parameter steps
    struct EvolutionSigns
    {
        int alpha = 1, tau = 1, psi_z = 1, theta_ac = 1, phi_ac = 1, theta_bs = 1, phi_bs = 1;
    };
    EvolutionSigns draw_signs(Rng &rng);

    LinkParams evolve_ti(const LinkParams &lp, const EvolutionRates &r, const EvolutionSigns &s,
                         const ArrayGeometry &carrier);
    LinkParams evolve_ti(const LinkParams &lp, const EvolutionRates &r, Rng &rng, const ArrayGeometry &carrier);

    // Navigation-grade priors: angles within +-spread_deg, Doppler within +-rel_spread
    struct RoughEstimate
    {
        VirtualAngles bs;
        VirtualAngles ac;
        double psi_z = 0.0;
    };
    RoughEstimate draw_rough(const LinkParams &lp, Rng &rng, double spread_deg = 5.0, double rel_spread = 0.01);

    // Circularly-symmetric complex normal with variance var
    cd complex_normal(Rng &rng, double var = 1.0);
}

#endif
