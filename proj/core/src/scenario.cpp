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

#include "aerothz/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace aerothz
{
    static std::uint64_t splitmix(std::uint64_t &x)
    {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    Rng make_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
    {
        std::uint64_t x = seed;
        std::uint64_t h = splitmix(x);
        x ^= a * 0xD1B54A32D192ED03ull;
        h ^= splitmix(x);
        x ^= b * 0xABC98388FB8FAC03ull;
        h ^= splitmix(x);
        return Rng(h);
    }

    void Scenario::validate() const
    {
        if (!(d_ab > 0.0) || !(d_bs > 0.0) || !(r_a > 0.0) || !(v_ac >= 0.0))
            throw std::invalid_argument("Scenario: distances must be positive and speed non-negative");
        if (L < 1 || L > 2)
            throw std::invalid_argument("Scenario: the geometry supports one or two BSs");
        if (!(max_angle > 0.0) || max_angle >= pi / 2.0)
            throw std::invalid_argument("Scenario: max_angle must be in (0, pi/2)");
        if (!(sigma_alpha2 > 0.0))
            throw std::invalid_argument("Scenario: sigma_alpha2 must be positive");
    }

    cd complex_normal(Rng &rng, double var)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * var));
        double re = n(rng);
        double im = n(rng);
        return {re, im};
    }

    std::vector<LinkParams> scenario_links(const Scenario &sc, const ArrayGeometry &carrier, Rng &rng,
                                           AircraftState *state)
    {
        sc.validate();
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const double cx = sc.d_bs / 2.0, cy = sc.d_bs / 2.0;

        // Uniform on the disk
        double r = sc.r_a * std::sqrt(u01(rng));
        double a = 2.0 * pi * u01(rng);
        AircraftState ac{cx + r * std::cos(a), cy + r * std::sin(a), 0.0, 0.0};

        // Heading between C->O and C->D
        double h_o = std::atan2(-cy, -cx);
        double h_d = std::atan2(sc.d_bs - cy, -cx);
        if (h_o < 0.0)
            h_o += 2.0 * pi;
        if (h_d < 0.0)
            h_d += 2.0 * pi;
        double lo = std::min(h_o, h_d), hi = std::max(h_o, h_d);
        ac.heading = lo + (hi - lo) * u01(rng);
        double vx = sc.v_ac * std::cos(ac.heading), vy = sc.v_ac * std::sin(ac.heading);

        const double bs_pos[2][3] = {{0.0, 0.0, sc.d_ab}, {0.0, sc.d_bs, sc.d_ab}};
        std::uniform_real_distribution<double> ang(-sc.max_angle, sc.max_angle);
        std::uniform_real_distribution<double> delay(0.0, carrier.n_cp / carrier.f_s);

        std::vector<LinkParams> links(sc.L);
        for (int l = 0; l < sc.L; ++l)
        {
            LinkParams &lp = links[l];
            double dx = bs_pos[l][0] - ac.x, dy = bs_pos[l][1] - ac.y, dz = bs_pos[l][2] - ac.z;
            double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
            lp.v = (vx * dx + vy * dy) / dist; // Closing speed
            lp.psi_z = lp.v * carrier.f_z / speed_of_light;
            lp.bs = {ang(rng), ang(rng)};
            lp.ac = {ang(rng), ang(rng)};
            lp.alpha = complex_normal(rng, sc.sigma_alpha2);
            lp.tau = delay(rng);
        }
        if (state)
            *state = ac;
        return links;
    }

    EvolutionRates default_rates(const LinkParams &initial, const ArrayGeometry &carrier, int n_c)
    {
        EvolutionRates r;
        r.alpha = initial.alpha / 2.0;
        r.tau = initial.tau / 2.0;
        r.psi_z = 0.01 * std::abs(initial.psi_z);
        r.theta_ac = r.phi_ac = pi / 4.0;
        r.theta_bs = r.phi_bs = pi / 12.0;
        r.n_c = n_c;
        r.t_sym = carrier.t_sym();
        r.tau_max = carrier.n_cp / carrier.f_s;
        return r;
    }

    EvolutionSigns draw_signs(Rng &rng)
    {
        std::bernoulli_distribution b(0.5);
        auto s = [&]
        { return b(rng) ? 1 : -1; };
        EvolutionSigns e;
        e.alpha = s();
        e.tau = s();
        e.psi_z = s();
        e.theta_ac = s();
        e.phi_ac = s();
        e.theta_bs = s();
        e.phi_bs = s();
        return e;
    }

    // Fold x into [0, hi]
    static double reflect(double x, double hi)
    {
        if (hi <= 0.0)
            return 0.0;
        double p = std::fmod(std::abs(x), 2.0 * hi);
        return p <= hi ? p : 2.0 * hi - p;
    }

    LinkParams evolve_ti(const LinkParams &lp, const EvolutionRates &r, const EvolutionSigns &s,
                         const ArrayGeometry &carrier)
    {
        const double dt = r.t_ti();
        LinkParams o = lp;
        o.alpha += double(s.alpha) * r.alpha * dt;
        o.tau = reflect(lp.tau + s.tau * r.tau * dt, r.tau_max);
        o.psi_z += s.psi_z * r.psi_z * dt;
        o.v = o.psi_z * speed_of_light / carrier.f_z;
        o.ac.theta += s.theta_ac * r.theta_ac * dt;
        o.ac.phi += s.phi_ac * r.phi_ac * dt;
        o.bs.theta += s.theta_bs * r.theta_bs * dt;
        o.bs.phi += s.phi_bs * r.phi_bs * dt;
        return o;
    }

    LinkParams evolve_ti(const LinkParams &lp, const EvolutionRates &r, Rng &rng, const ArrayGeometry &carrier)
    {
        return evolve_ti(lp, r, draw_signs(rng), carrier);
    }

    RoughEstimate draw_rough(const LinkParams &lp, Rng &rng, double spread_deg, double rel_spread)
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double sp = spread_deg * pi / 180.0;
        auto jitter = [&](PhysicalAngles pa)
        { return to_virtual({pa.theta + sp * u(rng), pa.phi + sp * u(rng)}); };
        RoughEstimate re;
        re.bs = jitter(lp.bs);
        re.ac = jitter(lp.ac);
        re.psi_z = lp.psi_z * (1.0 + rel_spread * u(rng));
        return re;
    }
}
