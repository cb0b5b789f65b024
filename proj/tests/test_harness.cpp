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
#include <aerothz/harness.hpp>

#include <cmath>
#include <limits>
#include <sstream>

// Covered tests:
// - NMSE of exact and zero estimates, rank-1 against dense matrices
// - Spectral efficiency and throughput bookkeeping
// - CSV schema and status column
// - Config parsing, rejection of unknown keys, round trip of the resolved config
// - Single noiseless trial of the initial sweep
// - Bounds-only sweep

using namespace aerothz;
using Catch::Matchers::WithinRel;

static const char *tiny = R"({
  "seed": 5, "trials": 1, "threads": 1,
  "geometry": {"K": 256, "n_cp": 16, "bs": {"n_h": 24, "n_v": 24}, "ac_sub": {"n_h": 24, "n_v": 24}},
  "channel": {"beam_squint": false, "doppler_squint": false},
  "variants": [{"name": "plain", "ttdu": "none", "i_max_bs": 1, "i_max_ac": 1}],
  "snr_db": [0], "noiseless": true
})";

TEST_CASE("NMSE")
{
    SystemGeometry sys;
    sys.bs.n_h = sys.bs.n_v = 4;
    sys.ac_sub = sys.bs;
    ChannelOptions opt;
    std::vector<LinkParams> truth{{{0.3, 0.2}, {-0.4, 0.1}, cd(0.8, -0.3), 3e-8, 5e4, 150.0},
                                  {{-0.1, 0.5}, {0.2, -0.3}, cd(-0.2, 0.6), 9e-8, -2e4, -60.0}};
    std::vector<int> ks{1, 100, 1025, 2048};
    CHECK(nmse(truth, truth, ks, sys, opt) == 0.0);
    CHECK(nmse_db(0.0) == -std::numeric_limits<double>::infinity());

    std::vector<LinkParams> zero = truth;
    for (auto &lp : zero)
        lp.alpha = 0.0;
    CHECK_THAT(nmse_db(nmse(truth, zero, ks, sys, opt)), Catch::Matchers::WithinAbs(0.0, 1e-12));

    std::vector<LinkParams> off = truth;
    off[0].bs.theta += 0.01;
    off[1].tau += 1e-9;
    double dense_err = 0.0, dense_ref = 0.0;
    for (int l = 0; l < 2; ++l)
        for (int k : ks)
        {
            CMat H = dl_channel(truth[l], sys, k, 2, opt).dense();
            CMat E = dl_channel(off[l], sys, k, 2, opt).dense();
            dense_err += (H - E).squaredNorm();
            dense_ref += H.squaredNorm();
        }
    CHECK_THAT(nmse(truth, off, ks, sys, opt), WithinRel(dense_err / dense_ref, 1e-10));
}

TEST_CASE("Spectral efficiency and throughput")
{
    const int K = 2048;
    std::vector<std::vector<double>> g(2, std::vector<double>(K, 1.0)), n = g;
    RateResult r = ase_and_throughput(g, n, 1e9, K);
    CHECK_THAT(r.ase, WithinRel(2.0, 1e-12));
    CHECK_THAT(r.throughput, WithinRel(2e9, 1e-12));

    std::vector<std::vector<double>> g2(2, std::vector<double>(512, 7.0)), n2(2, std::vector<double>(512, 1.0));
    std::vector<std::vector<double>> g4(2, std::vector<double>(1024, 7.0)), n4(2, std::vector<double>(1024, 1.0));
    CHECK_THAT(ase_and_throughput(g4, n4, 1e9, K).throughput,
               WithinRel(2.0 * ase_and_throughput(g2, n2, 1e9, K).throughput, 1e-12));

    std::vector<int> occ = occupied_subcarriers(4, 16);
    CHECK(occ == std::vector<int>{7, 8, 9, 10});
    CHECK_THROWS_AS(occupied_subcarriers(0, 16), std::invalid_argument);
}

TEST_CASE("CSV schema")
{
    std::vector<MetricRecord> rows(2);
    rows[0] = {"rmse_theta_bs", "gttdu", -10.0, std::nullopt, 1e9, std::nullopt, 200, std::nullopt, 1.5e-3, 200,
               2.25e-7, false};
    rows[1] = {"nmse_db", "ideal", 20.0, std::nullopt, 1e9, std::nullopt, 200, std::nullopt,
               -std::numeric_limits<double>::infinity(), 1, 0.0, false};
    std::ostringstream os;
    write_csv(os, rows);
    std::string want = std::string(csv_header) + "\n" +
                       "rmse_theta_bs,gttdu,-10,,1000000000,,200,,0.0015,200,2.25e-07,ok\n"
                       "nmse_db,ideal,20,,1000000000,,200,,-inf,1,0,sentinel\n";
    CHECK(os.str() == want);
    CHECK(std::string(csv_header) ==
          "metric,variant,snr_db,omega,f_s_hz,ti,array_n,occupied,value,trials,variance,status");
}

TEST_CASE("Config parsing")
{
    ExperimentConfig cfg = parse_config(tiny);
    CHECK(cfg.geometry.bs.K == 256);
    CHECK(cfg.geometry.ac_sub.n_h == 24);
    CHECK(cfg.variants.size() == 1);
    CHECK(cfg.variants[0].ttdu == TtduMode::none);
    CHECK(cfg.noiseless);
    CHECK_FALSE(cfg.prior_snr_db.has_value());

    // The resolved config parses back to itself
    ExperimentConfig again = parse_config(config_json(cfg));
    CHECK(config_json(again) == config_json(cfg));

    ExperimentConfig sp = parse_config(R"({"experiments": ["sparse"], "omegas": [1, 4], "prior_snr_db": "noiseless"})");
    REQUIRE(sp.prior_snr_db.has_value());
    CHECK(std::isinf(*sp.prior_snr_db));
    CHECK(sp.omegas == std::vector<int>{1, 4});

    CHECK_THROWS(parse_config(R"({"trails": 3})"));
    CHECK_THROWS(parse_config(R"({"variants": [{"name": "x", "ttdu": "analog"}]})"));
    CHECK_THROWS(parse_config(R"({"experiments": ["warp"]})"));
    CHECK_THROWS(parse_config("{"));
}

TEST_CASE("Single noiseless trial")
{
    ExperimentConfig cfg = parse_config(tiny);
    std::vector<MetricRecord> rows = run_sweep(cfg);
    REQUIRE_FALSE(rows.empty());
    int seen = 0;
    for (const MetricRecord &r : rows)
    {
        INFO(r.metric << " = " << r.value);
        if (r.metric.rfind("rmse_", 0) == 0 && r.metric.find("_gn") == std::string::npos)
        {
            double scale = r.metric == "rmse_psi_hz" ? 66712.8 : r.metric == "rmse_tau_s" ? 128e-9 : 1.0;
            CHECK(r.value / scale < 1e-6);
            ++seen;
        }
        if (r.metric == "nmse_db")
        {
            CHECK(r.value < -120.0);
            ++seen;
        }
    }
    CHECK(seen >= 8);
}

TEST_CASE("Bounds-only sweep")
{
    ExperimentConfig cfg = parse_config(tiny);
    cfg.noiseless = false;
    cfg.snr_db = {0.0, 10.0};
    cfg.trials = 3;
    std::vector<MetricRecord> rows = crlb_sweep(cfg);
    double at0 = 0.0, at10 = 0.0;
    for (const MetricRecord &r : rows)
        if (r.metric == "crlb_theta_bs")
            (r.snr_db == 0.0 ? at0 : at10) = r.value;
    REQUIRE(at0 > 0.0);
    CHECK_THAT(at0 / at10, WithinRel(std::sqrt(10.0), 1e-9));
}
