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


// Acceptance checks. Prints one PASS / FAIL line per criterion and exits with the number of failures.
// Usage: aerothz_acceptance [criterion ...]   (no arguments: all criteria)

#include <aerothz/crlb.hpp>
#include <aerothz/harness.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace aerothz;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    std::string fmt(double x, int prec = 3)
    {
        std::ostringstream os;
        os.precision(prec);
        os << x;
        return os.str();
    }

    ExperimentConfig shipped(const std::string &name)
    {
        ExperimentConfig cfg = load_config(std::string(AEROTHZ_CONFIG_DIR) + "/" + name);
        cfg.output = (std::filesystem::temp_directory_path() / ("aerothz_acceptance_" + name)).string();
        return cfg;
    }

    // Index of sweep records by (metric, variant, snr, omega, occupied, ti)
    class Table
    {
    public:
        explicit Table(const std::vector<MetricRecord> &rows)
        {
            for (const MetricRecord &r : rows)
                map_[key(r.metric, r.variant, r.snr_db.value_or(NAN), r.omega.value_or(0), r.occupied.value_or(0),
                         r.ti.value_or(0))] = r.value;
        }

        double at(const std::string &metric, const std::string &variant, double snr, int omega = 0, int occupied = 0,
                  int ti = 0) const
        {
            auto it = map_.find(key(metric, variant, snr, omega, occupied, ti));
            if (it == map_.end())
                throw std::runtime_error("missing record " + metric + " / " + variant);
            return it->second;
        }

    private:
        static std::string key(const std::string &m, const std::string &v, double snr, int omega, int occ, int ti)
        {
            std::ostringstream os;
            os << m << '|' << v << '|' << snr << '|' << omega << '|' << occ << '|' << ti;
            return os.str();
        }
        std::map<std::string, double> map_;
    };

    const char *const angles[] = {"theta_bs", "phi_bs", "theta_ac", "phi_ac"};

    double db20(double a, double b)
    {
        return 20.0 * std::log10(a / b);
    }

    // ---------------------------------------------------------------------------------------------

    Outcome lemma_exactness()
    {
        auto t0 = Clock::now();
        double worst = 0.0;
        int checked = 0;
        Rng rng = make_rng(1, 1);
        std::uniform_real_distribution<double> u(-pi / 3, pi / 3);
        for (auto [n_h, n_v] : {std::pair{64, 64}, std::pair{64, 16}, std::pair{7, 33}})
        {
            ArrayGeometry g;
            g.n_h = n_h;
            g.n_v = n_v;
            for (int trial = 0; trial < 3; ++trial)
            {
                VirtualAngles va = to_virtual({u(rng), u(rng)});
                CVec a = steering_upa(va, n_h, n_v);
                for (int k = 1; k <= g.K; k += (n_h == 64 && n_v == 64 && trial == 0) ? 1 : 31)
                {
                    CVec c = a.cwiseProduct(squint_upa(va, k, g)).cwiseProduct(ideal_ttdu(va, g, k).dense().conjugate());
                    worst = std::max(worst, (c - a).cwiseAbs().maxCoeff());
                    ++checked;
                }
            }
        }
        double t = seconds_since(t0);
        return {worst < 1e-12 && t < 1.0,
                "max |error| " + fmt(worst) + " over " + std::to_string(checked) + " subcarrier checks, " + fmt(t) + " s"};
    }

    Outcome noiseless_pipeline()
    {
        auto t0 = Clock::now();
        ExperimentConfig cfg = shipped("initial_snr.json");
        cfg.channel.beam_squint = false;
        cfg.channel.doppler_squint = false;
        PipelineConfig pc = cfg.pipeline(Variant{"plain", TtduMode::none, 1, 1, 1});
        Rng rng = make_rng(2026, 2);
        std::vector<LinkParams> truth = scenario_links(cfg.scenario, pc.sys.bs, rng);
        std::vector<RoughEstimate> priors;
        for (const LinkParams &lp : truth)
            priors.push_back(draw_rough(lp, rng, 0.25));
        StageSnr quiet;
        quiet.noiseless = true;
        std::vector<LinkEstimate> est = estimate_links(pc, truth, priors, quiet, rng);
        double worst = 0.0;
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
        for (size_t l = 0; l < truth.size(); ++l)
        {
            LinkParams e = est[l].as_params(pc.sys.bs);
            const LinkParams &t = truth[l];
            for (double r : {rel(e.bs.theta, t.bs.theta), rel(e.bs.phi, t.bs.phi), rel(e.ac.theta, t.ac.theta),
                             rel(e.ac.phi, t.ac.phi), rel(e.psi_z, t.psi_z), rel(e.tau, t.tau),
                             std::abs(e.alpha - t.alpha) / std::abs(t.alpha)})
                worst = std::max(worst, r);
        }
        double t = seconds_since(t0);
        return {worst < 1e-6 && t < 5.0, "max relative error " + fmt(worst) + " (200x200 arrays), " + fmt(t) + " s"};
    }

    Outcome sparse_gain()
    {
        // Closed form: same equivalent-array data, scaled angles
        VirtualAngles va{0.9, -0.4};
        std::vector<cd> amp(1024, cd(0.7, 0.2));
        PhysicalBound b1 = crlb_physical(crlb_virtual({5, 5, va, amp, 1.0}), va, 1);
        VirtualAngles va4{std::remainder(4 * va.mu, 2 * pi), std::remainder(4 * va.nu, 2 * pi)};
        PhysicalBound b4 = crlb_physical(crlb_virtual({5, 5, va4, amp, 1.0}), va, 4);
        double ratio = b1.theta / b4.theta;
        bool exact = std::abs(ratio / 16.0 - 1.0) < 1e-12 && std::abs(b1.phi / b4.phi / 16.0 - 1.0) < 1e-12;

        auto t0 = Clock::now();
        ExperimentConfig cfg = shipped("sparse_gain.json");
        Table tab(run_sweep(cfg));
        const double snr = cfg.snr_db.front();
        const std::string v = cfg.variants.front().name;
        bool ok = exact;
        std::string gains;
        for (const char *a : angles)
        {
            std::string x(a);
            double g = db20(tab.at("rmse_" + x + "_gn", v, snr, 1), tab.at("rmse_" + x + "_gn", v, snr, 4));
            double plain = db20(tab.at("rmse_" + x, v, snr, 1), tab.at("rmse_" + x, v, snr, 4));
            ok = ok && std::abs(g - 20.0 * std::log10(4.0)) <= 1.5;
            gains += " " + x + " " + fmt(g) + " dB (unweighted " + fmt(plain) + ")";
        }
        return {ok, "bound ratio " + fmt(ratio, 15) + "; RMSE gain over " + std::to_string(cfg.trials) +
                        " trials at " + fmt(snr) + " dB:" + gains + "; " + fmt(seconds_since(t0)) + " s"};
    }

    Outcome crlb_tightness()
    {
        ExperimentConfig cfg = shipped("crlb_tightness.json");
        Table tab(run_sweep(cfg));
        const std::string v = cfg.variants.front().name;
        double worst = 0.0, worst_plain = 0.0;
        std::string where;
        for (double snr : cfg.snr_db)
            for (const char *a : angles)
            {
                std::string x(a);
                double r = db20(tab.at("rmse_" + x + "_gn", v, snr), tab.at("crlb_" + x + "_gn", v, snr));
                worst_plain = std::max(worst_plain,
                                       std::abs(db20(tab.at("rmse_" + x, v, snr), tab.at("crlb_" + x, v, snr))));
                if (std::abs(r) > std::abs(worst))
                    worst = r, where = x + " at " + fmt(snr) + " dB";
            }
        return {std::abs(worst) <= 3.0, "largest RMSE / sqrt(CRLB) gap " + fmt(worst) + " dB (" + where +
                                            "), unweighted " + fmt(worst_plain) + " dB, " +
                                            std::to_string(cfg.trials) + " trials"};
    }

    Outcome squint_floor()
    {
        ExperimentConfig cfg = shipped("squint_floor.json");
        Table tab(run_sweep(cfg));
        const double snr = cfg.snr_db.front();
        double least = INFINITY;
        std::string detail;
        for (const char *a : angles)
        {
            std::string m = std::string("rmse_") + a;
            double r = tab.at(m, "conventional", snr) / tab.at(m, "gttdu", snr);
            least = std::min(least, r);
            detail += " " + std::string(a) + " x" + fmt(r);
        }
        return {least >= 10.0, "conventional / grouped-unit RMSE:" + detail};
    }

    Outcome doppler_low_snr()
    {
        ExperimentConfig cfg = shipped("doppler_low_snr.json");
        Table tab(run_sweep(cfg));
        const double snr = cfg.snr_db.front();
        const std::string v = cfg.variants.front().name;
        double g = db20(tab.at("rmse_psi_hz_gn", v, snr), tab.at("crlb_psi_hz_gn", v, snr));
        double plain = db20(tab.at("rmse_psi_hz", v, snr), tab.at("crlb_psi_hz", v, snr));
        return {std::abs(g) <= 3.0, "RMSE / sqrt(CRLB) at " + fmt(snr) + " dB: " + fmt(g) + " dB (unweighted " +
                                        fmt(plain) + " dB, RMSE " + fmt(tab.at("rmse_psi_hz", v, snr)) + " Hz)"};
    }

    Outcome delay_feasibility()
    {
        ArrayGeometry g; // K = 2048, N_cp = 128
        const int L = 2;
        Rng rng = make_rng(7, 7);
        std::uniform_real_distribution<double> u(0.0, g.n_cp / g.f_s);
        double max_w = 0.0, max_err = 0.0;
        std::vector<std::vector<int>> combs{subcarrier_comb(1, L, g.K), subcarrier_comb(2, L, g.K)};
        for (int t = 0; t < 10000; ++t)
        {
            double tau = t == 0 ? g.n_cp / g.f_s : u(rng);
            const std::vector<int> &comb = combs[size_t(t % L)];
            CMat Y(Eigen::Index(comb.size()), 10);
            cd alpha = complex_normal(rng);
            for (size_t j = 0; j < comb.size(); ++j)
                for (int n = 0; n < 10; ++n)
                    Y(Eigen::Index(j), n) = alpha * std::polar(1.0, 0.4 * n - 2 * pi * subcarrier_offset(comb[j], g.K) * g.f_s * tau);
            DelayEstimate d = estimate_delay(Y, L, g);
            max_w = std::max(max_w, std::abs(d.omega));
            max_err = std::max(max_err, std::abs(d.tau - tau) * g.f_s);
        }
        return {max_w <= 0.7854 && max_err < 1e-6 && delay_comb_feasible(L, g.n_cp, g.K),
                "max |omega| " + fmt(max_w, 6) + " rad, max delay error " + fmt(max_err) + " samples, 10000 draws"};
    }

    Outcome throughput_shape()
    {
        ExperimentConfig cfg = shipped("throughput.json");
        std::vector<MetricRecord> rows = run_sweep(cfg);
        Table tab(rows);
        const double snr = cfg.snr_db.front();
        std::vector<int> occ;
        for (const MetricRecord &r : rows)
            if (r.metric == "throughput_bps" && r.occupied && std::find(occ.begin(), occ.end(), *r.occupied) == occ.end())
                occ.push_back(*r.occupied);
        std::sort(occ.begin(), occ.end());
        const int full = occ.back(), quarter = full / 4;
        auto tp = [&](const std::string &v, int o) { return tab.at("throughput_bps", v, snr, 0, o); };

        bool ok = true;
        std::string detail;
        for (const char *v : {"ideal", "gttdu"})
        {
            double per0 = tp(v, occ.front()) / occ.front(), dev = 0.0;
            for (int o : occ)
                dev = std::max(dev, std::abs(tp(v, o) / o / per0 - 1.0));
            ok = ok && dev <= 0.05;
            detail += std::string(v) + " max deviation from linear " + fmt(100 * dev) + " %, ";
        }
        double first = tp("conventional", quarter) / quarter;
        double last = (tp("conventional", full) - tp("conventional", full - quarter)) / quarter;
        ok = ok && last < 0.5 * first;
        detail += "no-TTDU final / initial quarter slope " + fmt(last / first) + " (full band " +
                  fmt(tp("conventional", full) / 1e9) + " Gbps vs grouped " + fmt(tp("gttdu", full) / 1e9) + " Gbps)";
        return {ok, detail};
    }

    Outcome dadd_tracking()
    {
        ExperimentConfig cfg = shipped("tracking.json");
        Table tab(run_sweep(cfg));
        const double snr = cfg.snr_db.front();
        const std::string v = cfg.variants.front().name;
        int below = 0;
        bool monotone = true;
        double prev = -INFINITY, worst = -INFINITY;
        for (int ti = 1; ti <= cfg.n_ti; ++ti)
        {
            double d = tab.at("nmse_dadd_db", v, snr, cfg.tracking_omega, 0, ti);
            double f = tab.at("nmse_frozen_db", v, snr, cfg.tracking_omega, 0, ti);
            below += d < -40.0;
            worst = std::max(worst, d);
            monotone = monotone && f > prev;
            prev = f;
        }
        return {below >= 10 && below == cfg.n_ti && monotone,
                std::to_string(below) + " of " + std::to_string(cfg.n_ti) + " TIs below -40 dB (worst " + fmt(worst) +
                    " dB), frozen estimate " + (monotone ? "degrades monotonically" : "not monotone") + " to " +
                    fmt(prev) + " dB"};
    }

    Outcome fim_crosscheck()
    {
        const int I = 3, T = 64;
        const double sigma2 = 0.3;
        double worst = 0.0;
        Rng rng = make_rng(11, 11);
        for (VirtualAngles va : {VirtualAngles{0.0, 0.0}, VirtualAngles{1.2, -0.7}, VirtualAngles{-2.9, 2.2}})
        {
            std::vector<cd> g(T);
            Eigen::VectorXd eta(2 + 2 * T);
            eta[0] = va.nu;
            eta[1] = va.mu;
            for (int t = 0; t < T; ++t)
            {
                g[t] = complex_normal(rng);
                eta[2 + 2 * t] = g[t].real();
                eta[3 + 2 * t] = g[t].imag();
            }
            auto mean = [&](const Eigen::VectorXd &p)
            {
                CVec y(I * I * T);
                for (int t = 0; t < T; ++t)
                    for (int iv = 0; iv < I; ++iv)
                        for (int ih = 0; ih < I; ++ih)
                            y[t * I * I + iv * I + ih] = cd(p[2 + 2 * t], p[3 + 2 * t]) * std::polar(1.0, ih * p[1] + iv * p[0]);
                return y;
            };
            Eigen::MatrixXd C = fim_numeric(mean, eta, sigma2, 1e-4).inverse().topLeftCorner(2, 2);
            Eigen::Matrix2d ref = crlb_virtual({I, I, va, g, sigma2});
            worst = std::max(worst, (C - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff());
        }
        return {worst < 1e-4, "max relative deviation " + fmt(worst) + " (3x3 grid, 64 snapshots)"};
    }

    std::string slurp(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    Outcome determinism()
    {
        ExperimentConfig cfg = shipped("initial_snr.json");
        cfg.trials = 2;
        std::string base = cfg.output;
        std::vector<std::string> files;
        for (const char *pass : {"a", "b"})
        {
            cfg.output = base + "/" + pass;
            write_outputs(cfg, run_sweep(cfg));
            files.push_back(slurp(cfg.output + "/metrics.csv"));
        }
        bool same = !files[0].empty() && files[0] == files[1];
        return {same, "two runs with seed " + std::to_string(cfg.seed) + ": " + std::to_string(files[0].size()) +
                          " bytes, " + (same ? "identical" : "different")};
    }
}

int main(int argc, char **argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"lemma_exactness", lemma_exactness},
        {"noiseless_pipeline", noiseless_pipeline},
        {"sparse_gain", sparse_gain},
        {"crlb_tightness", crlb_tightness},
        {"squint_floor", squint_floor},
        {"doppler_low_snr", doppler_low_snr},
        {"delay_feasibility", delay_feasibility},
        {"throughput_shape", throughput_shape},
        {"dadd_tracking", dadd_tracking},
        {"fim_crosscheck", fim_crosscheck},
        {"determinism", determinism},
    };

    std::vector<std::string> wanted(argv + 1, argv + argc);
    for (const std::string &w : wanted)
        if (std::none_of(criteria.begin(), criteria.end(), [&](const auto &c) { return c.first == w; }))
        {
            std::cerr << "unknown criterion '" << w << "'\n";
            return 2;
        }

    int failed = 0;
    for (const auto &[name, run] : criteria)
    {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end())
            continue;
        Outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
        failed += !o.pass;
    }
    return failed;
}
