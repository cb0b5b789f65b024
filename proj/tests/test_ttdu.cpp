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
#include <aerothz/ttdu.hpp>

#include <cmath>

// Covered tests:
// - Ideal delay units at the true angles remove the squint
// - Residual squint with mismatched angles
// - Grouped delay units: 1x1 groups, centre subcarrier, worst residual phase
// - Compensation of both ends of a rank-1 channel
// - Mode names

using namespace aerothz;
using Catch::Matchers::WithinAbs;

static ArrayGeometry geometry(int n_h, int n_v)
{
    ArrayGeometry g;
    g.n_h = n_h;
    g.n_v = n_v;
    g.f_z = 1e11;
    g.f_s = 1e9;
    g.K = 2048;
    return g;
}

TEST_CASE("Ideal delay units remove the squint at the true angles")
{
    ArrayGeometry g = geometry(64, 64);
    VirtualAngles va{2.1, -1.4};
    CVec a = steering_upa(va, g.n_h, g.n_v);
    double worst = 0.0;
    for (int k = 1; k <= g.K; k += 97)
    {
        CVec c = a.cwiseProduct(squint_upa(va, k, g)).cwiseProduct(ideal_ttdu(va, g, k).dense().conjugate());
        worst = std::max(worst, (c - a).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);

    CHECK((ideal_ttdu(va, g, g.K / 2 + 1).dense() - CVec::Ones(g.size())).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Residual squint with mismatched angles")
{
    ArrayGeometry g = geometry(16, 1);
    double mu = 1.2, mu_t = 1.05;
    int k = 300;
    CVec r = squint_1d(mu, 16, k, g).cwiseProduct(ideal_ttdu({mu_t, 0.0}, g, k).h.dense().conjugate());
    double off = double(k - 1) / g.K - 0.5;
    for (int n = 0; n < 16; ++n)
        CHECK(std::abs(r[n] - std::polar(1.0, off * 0.01 * n * (mu - mu_t))) < 1e-14);
}

TEST_CASE("Grouped delay units")
{
    ArrayGeometry g = geometry(20, 10);
    VirtualAngles va{0.9, 2.3};
    for (int k : {1, 512, 1025, 2048})
    {
        CVec ideal = ideal_ttdu(va, g, k).dense();
        CHECK((gttdu(va, g, {1, 1}, k).dense() - ideal).cwiseAbs().maxCoeff() < 1e-15);
    }
    CHECK((gttdu(va, g, {5, 5}, g.K / 2 + 1).dense() - ideal_ttdu(va, g, g.K / 2 + 1).dense())
              .cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(gttdu(va, g, {3, 5}, 1), std::invalid_argument);

    // 200 elements in groups of 5 at the band edge: the centre element of each group is exact and the
    // group ends are two elements away
    ArrayGeometry big = geometry(200, 200);
    double mu_t = 2.5;
    RampVector grp = gttdu({mu_t, 0.0}, big, {5, 5}, 1).h;
    RampVector id = ideal_ttdu({mu_t, 0.0}, big, 1).h;
    CVec ratio = grp.dense().cwiseProduct(id.dense().conjugate());
    double worst = 0.0;
    for (int n = 0; n < 200; ++n)
        worst = std::max(worst, std::abs(std::arg(ratio[n])));
    CHECK_THAT(worst, WithinAbs(0.5 * 0.01 * 2 * mu_t, 1e-12));
}

TEST_CASE("Compensation pair on a rank-1 channel")
{
    SystemGeometry sys;
    sys.bs = geometry(8, 6);
    sys.ac_sub = geometry(6, 4);
    sys.sub_v = 1;
    LinkParams lp{{0.5, -0.3}, {-0.7, 0.4}, cd(0.6, 0.8), 40e-9, 3e4, 90.0};
    ChannelOptions squinted{true, true}, flat{false, true};
    int k = 77;
    Rank1 H = dl_channel(lp, sys, k, 3, squinted);

    CompensationPair none;
    CHECK((apply_pair(H, none, sys.ac_sub, sys.bs, k).dense() - H.dense()).cwiseAbs().maxCoeff() == 0.0);

    CompensationPair perfect{TtduMode::ideal, TtduMode::ideal, to_virtual(lp.ac), to_virtual(lp.bs), {}, {}};
    Rank1 C = apply_pair(H, perfect, sys.ac_sub, sys.bs, k);
    Rank1 ref = dl_channel(lp, sys, k, 3, flat);
    CHECK((C.dense() - ref.dense()).cwiseAbs().maxCoeff() < 1e-12);

    // Two pairs in a row equal one pair of elementwise products
    CompensationPair p1{TtduMode::ideal, TtduMode::grouped, {0.3, 0.1}, {-0.2, 0.5}, {}, {2, 2}};
    CompensationPair p2{TtduMode::grouped, TtduMode::ideal, {1.0, -0.4}, {0.8, 0.2}, {3, 2}, {}};
    Rank1 twice = apply_pair(apply_pair(H, p1, sys.ac_sub, sys.bs, k), p2, sys.ac_sub, sys.bs, k);
    UpaVector crx = ttdu_vector(p1.mode_rx, p1.rx, sys.ac_sub, p1.grp_rx, k)
                        .hadamard(ttdu_vector(p2.mode_rx, p2.rx, sys.ac_sub, p2.grp_rx, k));
    UpaVector ctx = ttdu_vector(p1.mode_tx, p1.tx, sys.bs, p1.grp_tx, k)
                        .hadamard(ttdu_vector(p2.mode_tx, p2.tx, sys.bs, p2.grp_tx, k));
    CMat once = crx.dense().conjugate().asDiagonal() * H.dense() * ctx.dense().asDiagonal();
    CHECK((twice.dense() - once).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Mode names")
{
    for (TtduMode m : {TtduMode::none, TtduMode::ideal, TtduMode::grouped})
        CHECK(parse_ttdu_mode(to_string(m)) == m);
    CHECK(parse_ttdu_mode("grouped") == TtduMode::grouped);
    CHECK_THROWS_AS(parse_ttdu_mode("analog"), std::invalid_argument);
}
