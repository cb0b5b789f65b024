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


#include <catch_amalgamated.hpp>
#include <aerothz/channel.hpp>
#include <aerothz/scenario.hpp>

#include <cmath>

// Covered tests:
// - Per-subcarrier Doppler
// - Rank-1 DL channel against element-wise evaluation
// - Matched-beam gain and UL scalar form
// - Parameter evolution per TI
// - Scenario draws stay in range

using namespace aerothz;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

static ArrayGeometry carrier(int n_h, int n_v)
{
    ArrayGeometry g;
    g.n_h = n_h;
    g.n_v = n_v;
    return g;
}

TEST_CASE("Doppler per subcarrier")
{
    ArrayGeometry g = carrier(4, 4);
    LinkParams lp;
    lp.v = 200.0;
    lp.psi_z = lp.v * g.f_z / speed_of_light;
    CHECK_THAT(lp.psi_z, WithinAbs(66712.81903963041, 1e-6));
    ChannelOptions opt;
    CHECK(doppler_at(lp, g.K / 2 + 1, g, opt) == lp.psi_z);
    CHECK_THAT(doppler_at(lp, 1, g, opt) - lp.psi_z, WithinAbs(-333.56409519815206, 1e-9));
    opt.doppler_squint = false;
    CHECK(doppler_at(lp, 1, g, opt) == lp.psi_z);
}

TEST_CASE("DL channel matches element-wise evaluation")
{
    SystemGeometry sys;
    sys.bs = carrier(2, 2);
    sys.ac_sub = carrier(2, 2);
    sys.sub_v = 1;
    LinkParams lp{{0.4, -0.2}, {-0.9, 0.3}, cd(0.3, -1.1), 71e-9, -4.2e4, -126.0};
    ChannelOptions opt;
    for (int k : {1, 333, 1025, 2048})
        for (int n : {1, 4})
        {
            CMat H = dl_channel(lp, sys, k, n, opt).dense();
            double off = double(k - 1) / 2048 - 0.5;
            double g = 1.0 + off * 0.01;
            double psi = lp.psi_z + lp.v / speed_of_light * off * 1e9;
            cd c = lp.alpha * std::exp(cd(0, 2 * pi * psi * (n - 1) * 2176e-9 - 2 * pi * off * 1e9 * lp.tau));
            double mu_a = pi * std::sin(lp.ac.theta) * std::cos(lp.ac.phi), nu_a = pi * std::sin(lp.ac.phi);
            double mu_b = pi * std::sin(lp.bs.theta) * std::cos(lp.bs.phi), nu_b = pi * std::sin(lp.bs.phi);
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s)
                {
                    double ph = g * (mu_a * (r % 2) + nu_a * (r / 2)) - g * (mu_b * (s % 2) + nu_b * (s / 2));
                    CHECK(std::abs(H(r, s) - c * std::polar(1.0, ph)) < 1e-12);
                }
        }

    // Centre subcarrier carries no squint
    Rank1 H = dl_channel(lp, sys, 1025, 1, opt);
    CHECK((H.rx.dense() - steering_upa(to_virtual(lp.ac), 2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Matched beams and the UL scalar form")
{
    SystemGeometry sys;
    sys.bs = carrier(12, 10);
    sys.ac_sub = carrier(8, 6);
    sys.sub_v = 1;
    LinkParams lp{{0.2, 0.5}, {-0.3, -0.1}, cd(0.5, 0.2), 0.0, 0.0, 0.0};
    ChannelOptions flat{false, false};
    VirtualAngles va_bs = to_virtual(lp.bs), va_ac = to_virtual(lp.ac);

    Rank1 H = dl_channel(lp, sys, 100, 1, flat);
    UpaVector w = steering_upa_ramp(va_ac, 8, 6);
    w = {w.h.scaled(1.0 / std::sqrt(48.0)), w.v};
    UpaVector f = steering_upa_ramp(va_bs, 12, 10);
    CHECK_THAT(std::abs(effective_gain(H, w, f)), WithinRel(std::abs(lp.alpha) * std::sqrt(48.0) * 120.0, 1e-12));

    Rank1 U = ul_channel(lp, sys, 100, 1, ChannelOptions{});
    CVec wb = steering_upa(to_virtual({0.21, 0.48}), 12, 10) / std::sqrt(120.0);
    CVec p = steering_upa(to_virtual({-0.31, -0.12}), 8, 6) / std::sqrt(48.0);
    cd dense = wb.dot(U.dense() * p);
    cd scalar = U.c * wb.dot(U.rx.dense()) * U.tx.dense().dot(p);
    CHECK(std::abs(dense - scalar) < 1e-12);
    // Same path in both directions
    CMat D = dl_channel(lp, sys, 100, 1, ChannelOptions{}).dense();
    CHECK((U.dense().transpose() - D.conjugate() * (U.c / std::conj(U.c))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Evolution per TI")
{
    ArrayGeometry g = carrier(4, 4);
    LinkParams lp{{0.2, 0.1}, {0.3, -0.4}, cd(0.7, 0.1), 60e-9, 5e4, 150.0};
    EvolutionRates zero;
    zero.t_sym = g.t_sym();
    Rng rng = make_rng(5);
    LinkParams same = evolve_ti(lp, zero, rng, g);
    CHECK(same.alpha == lp.alpha);
    CHECK(same.tau == lp.tau);
    CHECK(same.psi_z == lp.psi_z);
    CHECK(same.ac.theta == lp.ac.theta);
    CHECK(same.bs.phi == lp.bs.phi);

    EvolutionRates r = default_rates(lp, g, 70);
    CHECK_THAT(r.t_ti(), WithinRel(152.32e-6, 1e-12));
    LinkParams next = evolve_ti(lp, r, EvolutionSigns{}, g);
    CHECK_THAT((next.ac.theta - lp.ac.theta) * 180.0 / pi, WithinAbs(0.0069, 5e-5));
    CHECK_THAT(next.v, WithinRel(next.psi_z * speed_of_light / g.f_z, 1e-12));

    LinkParams x = lp;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i)
    {
        x = evolve_ti(x, r, rng, g);
        lo = std::min(lo, x.tau);
        hi = std::max(hi, x.tau);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 128e-9);
}

TEST_CASE("Scenario draws")
{
    Scenario sc;
    ArrayGeometry g = carrier(4, 4);
    Rng rng = make_rng(2026, 1, 2);
    double bound = sc.v_ac * g.f_z / speed_of_light;
    for (int t = 0; t < 2000; ++t)
    {
        AircraftState st;
        std::vector<LinkParams> links = scenario_links(sc, g, rng, &st);
        REQUIRE(links.size() == 2);
        CHECK(std::hypot(st.x - 100e3, st.y - 100e3) <= sc.r_a);
        for (const LinkParams &lp : links)
        {
            for (double a : {lp.bs.theta, lp.bs.phi, lp.ac.theta, lp.ac.phi})
                CHECK(std::abs(a) <= pi / 3);
            CHECK(std::abs(lp.psi_z) <= bound * (1 + 1e-12));
            CHECK_THAT(lp.psi_z, WithinRel(lp.v * g.f_z / speed_of_light, 1e-12));
            CHECK(lp.tau >= 0.0);
            CHECK(lp.tau <= 128e-9);
        }
    }

    // Same stream for the same (seed, a, b)
    Rng a = make_rng(9, 3, 4), b = make_rng(9, 3, 4), c = make_rng(9, 4, 3);
    CHECK(a() == b());
    CHECK(a() != c());

    LinkParams lp{{0.2, 0.1}, {0.3, -0.4}, 1.0, 0.0, 5e4, 150.0};
    for (int t = 0; t < 200; ++t)
    {
        RoughEstimate re = draw_rough(lp, rng, 5.0, 0.01);
        PhysicalAngles pa = to_physical(re.bs);
        CHECK(std::abs(pa.theta - lp.bs.theta) <= 5.0 * pi / 180 + 1e-12);
        CHECK(std::abs(re.psi_z / lp.psi_z - 1.0) <= 0.01 + 1e-12);
    }
}
