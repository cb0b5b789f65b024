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

#include "smoke.hpp"

#include <aerothz/harness.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

namespace aerothz::tools
{
    namespace
    {
        struct Checker
        {
            std::ostream &log;
            int failed = 0;

            void operator()(const char *name, bool ok, double value)
            {
                log << (ok ? "ok      " : "FAILED  ") << name << "  (" << value << ")\n";
                failed += ok ? 0 : 1;
            }
        };

        PipelineConfig small_pipeline()
        {
            PipelineConfig pc;
            ArrayGeometry g;
            g.n_h = g.n_v = 40;
            g.K = 256;
            g.n_cp = 16;
            g.f_s = 1e9;
            pc.sys.bs = g;
            pc.sys.ac_sub = g;
            pc.channel.beam_squint = false;
            pc.channel.doppler_squint = false;
            pc.ttdu = TtduMode::none;
            return pc;
        }

        double rel(double est, double truth)
        {
            return std::abs(est - truth) / std::max(std::abs(truth), 1e-300);
        }
    }

    int run_smoke(std::ostream &log)
    {
        Checker check{log};

        // Squint-free noiseless pipeline recovers every parameter
        {
            PipelineConfig pc = small_pipeline();
            Scenario sc;
            Rng rng = make_rng(11, 0, 0);
            std::vector<LinkParams> truth = scenario_links(sc, pc.sys.bs, rng);
            std::vector<RoughEstimate> priors;
            for (const LinkParams &lp : truth)
                priors.push_back(draw_rough(lp, rng));
            StageSnr quiet;
            quiet.noiseless = true;
            std::vector<LinkEstimate> est = estimate_links(pc, truth, priors, quiet, rng);
            double worst = 0.0;
            std::vector<LinkParams> ep;
            for (size_t l = 0; l < truth.size(); ++l)
            {
                LinkParams e = est[l].as_params(pc.sys.bs);
                ep.push_back(e);
                for (auto [a, b] : {std::pair{e.bs.theta, truth[l].bs.theta}, std::pair{e.bs.phi, truth[l].bs.phi},
                                    std::pair{e.ac.theta, truth[l].ac.theta}, std::pair{e.ac.phi, truth[l].ac.phi},
                                    std::pair{e.psi_z, truth[l].psi_z}, std::pair{e.tau, truth[l].tau}})
                    worst = std::max(worst, rel(a, b));
                worst = std::max(worst, std::abs(e.alpha - truth[l].alpha) / std::abs(truth[l].alpha));
            }
            check("noiseless parameter recovery, max relative error < 1e-6", worst < 1e-6, worst);
            std::vector<int> ks;
            for (int k = 1; k <= pc.sys.bs.K; k += 4)
                ks.push_back(k);
            double db = nmse_db(nmse(truth, ep, ks, pc.sys, pc.channel, 2));
            check("noiseless NMSE < -120 dB", db < -120.0, db);
        }

        // Ideal delay units at the true angles remove the squint exactly
        {
            ArrayGeometry g;
            g.n_h = g.n_v = 32;
            VirtualAngles va{1.1, -0.7};
            double worst = 0.0;
            for (int k : {1, g.K / 3, g.K})
            {
                CVec a = steering_upa(va, g.n_h, g.n_v);
                CVec c = a.cwiseProduct(squint_upa(va, k, g)).cwiseProduct(ideal_ttdu(va, g, k).conj().dense());
                worst = std::max(worst, (c - a).cwiseAbs().maxCoeff());
            }
            check("ideal delay-unit compensation error < 1e-12", worst < 1e-12, worst);
        }

        // Rank-1 NMSE against dense matrices
        {
            SystemGeometry sys;
            sys.bs.n_h = sys.bs.n_v = 4;
            sys.ac_sub = sys.bs;
            sys.sub_v = 1;
            ChannelOptions opt;
            LinkParams a{{0.3, 0.2}, {-0.4, 0.1}, cd(0.8, -0.3), 3e-8, 5e4, 150.0};
            LinkParams b{{0.31, 0.19}, {-0.42, 0.12}, cd(0.7, -0.2), 3.1e-8, 5.01e4, 150.3};
            Rank1 H = dl_channel(a, sys, 17, 2, opt), Hh = dl_channel(b, sys, 17, 2, opt);
            double dense = (H.dense() - Hh.dense()).squaredNorm() / H.dense().squaredNorm();
            double r1 = frobenius2_diff(H, Hh) / frobenius2(H);
            double err = std::abs(r1 - dense) / dense;
            check("rank-1 NMSE matches dense < 1e-12", err < 1e-12, err);
        }

        // Identical seeds give identical CSV bytes
        {
            ExperimentConfig cfg;
            cfg.geometry.bs.n_h = cfg.geometry.bs.n_v = 20;
            cfg.geometry.ac_sub = cfg.geometry.bs;
            cfg.geometry.bs.K = cfg.geometry.ac_sub.K = 256;
            cfg.geometry.bs.n_cp = cfg.geometry.ac_sub.n_cp = 16;
            cfg.variants = {Variant{"gttdu", TtduMode::grouped}};
            cfg.trials = 3;
            cfg.snr_db = {-40.0};
            cfg.threads = 2;
            std::ostringstream a, b;
            write_csv(a, run_sweep(cfg));
            cfg.threads = 1;
            write_csv(b, run_sweep(cfg));
            check("sweep output independent of thread count and repeatable", a.str() == b.str(),
                  double(a.str().size()));
        }
        return check.failed;
    }
}
