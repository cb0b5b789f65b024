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
#include <aerothz/dadd.hpp>
#include <aerothz/scenario.hpp>
#include <aerothz/selection.hpp>

#include <algorithm>
#include <cmath>

// Covered tests:
// - Convolutional code and QPSK round trips
// - Monitor counts
// - Decision-directed update on static and drifting toy channels
// - Tracker validity rule
// - Cross-beam leakage between links at full array size

using namespace aerothz;

static Bits random_bits(int n, Rng &rng)
{
    Bits b(n);
    for (auto &x : b)
        x = std::uint8_t(rng() & 1u);
    return b;
}

TEST_CASE("Codec round trips")
{
    Rng rng = make_rng(1);
    ConvCode cc;
    Bits info = random_bits(100, rng);
    Bits coded = cc.encode(info);
    CHECK(coded.size() == 2 * (100 + 6));
    CHECK(cc.decode(coded) == info);

    // Hard Viterbi corrects isolated errors
    Bits hit = coded;
    for (size_t i = 5; i < hit.size(); i += 40)
        hit[i] ^= 1u;
    CHECK(cc.decode(hit) == info);

    Bits pairs = random_bits(64, rng);
    CVec s = qpsk_modulate(pairs);
    CHECK(s.size() == 32);
    CHECK(std::abs(s.squaredNorm() - 32.0) < 1e-12);
    CHECK(qpsk_demodulate(s) == pairs);

    SymbolCodec codec(64, 7);
    CHECK(codec.info_bits() == 58);
    Bits msg = random_bits(58, rng);
    CVec x = codec.encode(msg);
    CHECK(x.size() == 64);
    CHECK(codec.decode(x) == msg);
    CHECK(codec.decode(x * cd(3.0, 0.0)) == msg);
}

TEST_CASE("Monitor counts")
{
    CVec h(8);
    for (int k = 0; k < 8; ++k)
        h[k] = std::polar(1.0 + 0.1 * k, 0.3 * k);
    CHECK(monitor_count(h, h, 0.2) == 0);
    CHECK(monitor_count(h * (1.0 + 1e-9), h, 0.0) == 8);
    CVec moved = h;
    moved[3] *= 1.5;
    CHECK(monitor_count(moved, h, 0.2) == 1);
    CHECK_THROWS_AS(monitor_count(h.head(3), h, 0.2), std::invalid_argument);
}

TEST_CASE("Decision-directed update")
{
    Rng rng = make_rng(2);
    const int K = 16;
    SymbolCodec codec(K, 3);
    CVec h(K);
    for (int k = 0; k < K; ++k)
        h[k] = std::polar(0.5 + 0.05 * k, -0.4 * k);

    // Static channel: exact bits and exact estimate every symbol
    CVec est = h;
    for (int r = 0; r < 20; ++r)
    {
        Bits info = random_bits(codec.info_bits(), rng);
        DaddUpdate u = dadd_update(h.cwiseProduct(codec.encode(info)), est, codec, 0.2);
        CHECK(u.info == info);
        CHECK((u.h - h).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(u.flagged == 0);
        est = u.h;
    }

    // Channel drifting by 1 % per symbol
    CVec drift = h;
    est = h;
    double worst = 0.0;
    for (int r = 0; r < 30; ++r)
    {
        for (int k = 0; k < K; ++k)
            drift[k] *= std::polar(1.01, 0.01);
        Bits info = random_bits(codec.info_bits(), rng);
        DaddUpdate u = dadd_update(drift.cwiseProduct(codec.encode(info)), est, codec, 0.2);
        REQUIRE(u.info == info);
        est = u.h;
        worst = std::max(worst, ((est - drift).cwiseAbs().cwiseQuotient(drift.cwiseAbs())).maxCoeff());
    }
    CHECK(worst < 0.02);
}

TEST_CASE("Tracker validity")
{
    const int K = 16;
    SymbolCodec codec(K, 3);
    Rng rng = make_rng(3);
    CVec h = CVec::Constant(K, cd(1.0, 0.0));

    DaddTracker all({h, h}, {0.2, 2, false});
    Bits info = random_bits(codec.info_bits(), rng);
    CVec good = h.cwiseProduct(codec.encode(info));
    CVec bad = (2.0 * h).cwiseProduct(codec.encode(info)); // Every subcarrier jumps
    all.step({good, bad}, codec);
    CHECK(all.flagged()[0] == 0);
    CHECK(all.flagged()[1] == K);
    CHECK(all.valid());

    DaddTracker any({h, h}, {0.2, 2, true});
    any.step({good, bad}, codec);
    CHECK_FALSE(any.valid());

    all.reset({h, h});
    all.step({bad, bad}, codec);
    CHECK_FALSE(all.valid());
}

TEST_CASE("Cross-beam leakage between links")
{
    // Combiner of one aircraft sub-array aimed at its BS, evaluated on the path from the other BS
    SystemGeometry sys;
    Rng rng = make_rng(4);
    std::vector<double> leak;
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<LinkParams> lp = scenario_links(Scenario{}, sys.bs, rng);
        ArrayGeometry ac = sys.ac();
        ArrayBlock blk{sys.ac_offset_h(1), sys.ac_offset_v(1), sys.ac_sub.n_h, sys.ac_sub.n_v};
        UpaVector w = unit_block_beam(to_virtual(lp[0].ac), ac, blk);
        UpaVector own = steering_upa_ramp(to_virtual(lp[0].ac), ac.n_h, ac.n_v);
        UpaVector other = steering_upa_ramp(to_virtual(lp[1].ac), ac.n_h, ac.n_v);
        leak.push_back(10 * std::log10(std::norm(w.dot(other)) / std::norm(w.dot(own))));
    }
    std::sort(leak.begin(), leak.end());
    INFO("median " << leak[500] << " dB, 99th percentile " << leak[990] << " dB");
    CHECK(leak[990] < -40.0);
}
