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

#include "aerothz/harness.hpp"
#include "aerothz/crlb.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace aerothz
{
    using json = nlohmann::ordered_json;

    StageSnr StageSnrSpec::at(double snr_db, bool noiseless) const
    {
        StageSnr s;
        s.bs_angles = bs_angles.value_or(snr_db);
        s.ac_angles = ac_angles.value_or(snr_db);
        s.doppler = doppler.value_or(snr_db);
        s.delay = delay.value_or(snr_db);
        s.noiseless = noiseless;
        return s;
    }

    void ExperimentConfig::validate() const
    {
        if (trials < 1 || n_do < 2 || n_de < 1 || n_c < 1 || n_ti < 1 || dadd_symbols < 1 || dadd_symbols > n_c ||
            k_tilde_max < 0 || nmse_stride < 1 || tracking_omega < 1 || threads < 0)
            throw std::invalid_argument("ExperimentConfig: counts out of range");
        if (snr_db.empty() || std::any_of(snr_db.begin(), snr_db.end(), [](double x) { return !std::isfinite(x); }))
            throw std::invalid_argument("ExperimentConfig: SNR grid must be finite and non-empty");
        if (omegas.empty() || std::any_of(omegas.begin(), omegas.end(), [](int o) { return o < 1; }))
            throw std::invalid_argument("ExperimentConfig: omegas must be positive");
        if (variants.empty())
            throw std::invalid_argument("ExperimentConfig: no variants");
        if (!(epsilon > 0.0))
            throw std::invalid_argument("ExperimentConfig: epsilon must be positive");
        static const std::set<std::string> kinds{"initial", "sparse", "tracking", "throughput"};
        for (const std::string &e : experiments)
            if (!kinds.count(e))
                throw std::invalid_argument("ExperimentConfig: unknown experiment '" + e + "'");
        for (int o : occupied)
            if (o < 1 || o > geometry.bs.K)
                throw std::invalid_argument("ExperimentConfig: occupied count out of range");
        scenario.validate();
        if (scenario.L != geometry.links())
            throw std::invalid_argument("ExperimentConfig: scenario L differs from the aircraft sub-array count");
        for (const Variant &v : variants)
            pipeline(v).validate();
    }

    PipelineConfig ExperimentConfig::pipeline(const Variant &v) const
    {
        PipelineConfig p;
        p.sys = geometry;
        p.channel = channel;
        p.ttdu = v.ttdu;
        p.grp_bs = group_bs;
        p.grp_ac = group_ac;
        p.pat_bs = pattern_bs;
        p.pat_ac = pattern_ac;
        p.i_max_bs = v.i_max_bs;
        p.i_max_ac = v.i_max_ac;
        p.i_max_do = v.i_max_do;
        p.n_do = n_do;
        p.n_de = n_de;
        p.unit_norm_precoder = unit_norm_precoder;
        p.angle_stage_doppler = angle_stage_doppler;
        return p;
    }

    // ---------------------------------------------------------------- config I/O

    namespace
    {
        void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where)
        {
            if (!j.is_object())
                throw std::invalid_argument("config: '" + where + "' must be an object");
            for (auto it = j.begin(); it != j.end(); ++it)
                if (std::none_of(allowed.begin(), allowed.end(), [&](const char *k) { return it.key() == k; }))
                    throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
        }

        template <class T>
        void get(const json &j, const char *key, T &out)
        {
            if (j.contains(key))
                out = j.at(key).get<T>();
        }

        void get_array(const json &j, ArrayGeometry &g, const std::string &where)
        {
            check_keys(j, {"n_h", "n_v", "f_z", "f_s", "K", "n_cp"}, where);
            get(j, "n_h", g.n_h);
            get(j, "n_v", g.n_v);
            get(j, "f_z", g.f_z);
            get(j, "f_s", g.f_s);
            get(j, "K", g.K);
            get(j, "n_cp", g.n_cp);
        }

        json array_json(const ArrayGeometry &g)
        {
            return {{"n_h", g.n_h}, {"n_v", g.n_v}, {"f_z", g.f_z}, {"f_s", g.f_s}, {"K", g.K}, {"n_cp", g.n_cp}};
        }

        std::optional<double> opt_snr(const json &j, const char *key)
        {
            if (!j.contains(key) || j.at(key).is_null() || j.at(key) == "sweep")
                return std::nullopt;
            return j.at(key).get<double>();
        }

        json snr_json(const std::optional<double> &v)
        {
            return v ? json(*v) : json("sweep");
        }

        Variant parse_variant(const json &j)
        {
            Variant v;
            if (j.is_string())
            {
                v.ttdu = parse_ttdu_mode(j.get<std::string>());
                v.name = to_string(v.ttdu);
                return v;
            }
            check_keys(j, {"name", "ttdu", "i_max_bs", "i_max_ac", "i_max_do"}, "variants");
            v.ttdu = parse_ttdu_mode(j.value("ttdu", std::string("gttdu")));
            v.name = j.value("name", to_string(v.ttdu));
            get(j, "i_max_bs", v.i_max_bs);
            get(j, "i_max_ac", v.i_max_ac);
            get(j, "i_max_do", v.i_max_do);
            return v;
        }
    }

    ExperimentConfig parse_config(const std::string &json_text)
    {
        json j = json::parse(json_text, nullptr, true, true);
        check_keys(j,
                   {"seed", "trials", "threads", "output", "experiments", "scenario", "geometry", "pattern_bs",
                    "pattern_ac", "omegas", "prior_snr_db", "group_bs", "group_ac", "channel", "variants", "snr_db", "stage_snr",
                    "noiseless", "bandwidths_hz", "array_sizes", "occupied", "n_do", "n_de", "n_c", "n_ti",
                    "dadd_symbols", "epsilon", "k_tilde_max", "any_link", "tracking_omega", "interleaver_seed",
                    "dl_interference", "rough_angle_deg", "rough_doppler_rel", "signs", "nmse_stride",
                    "unit_norm_precoder", "angle_stage_doppler", "notes"},
                   "top level");
        ExperimentConfig c;
        get(j, "seed", c.seed);
        get(j, "trials", c.trials);
        get(j, "threads", c.threads);
        get(j, "output", c.output);
        get(j, "experiments", c.experiments);
        if (j.contains("scenario"))
        {
            const json &s = j.at("scenario");
            check_keys(s, {"d_ab", "d_bs", "r_a", "v_ac", "L", "max_angle", "sigma_alpha2"}, "scenario");
            get(s, "d_ab", c.scenario.d_ab);
            get(s, "d_bs", c.scenario.d_bs);
            get(s, "r_a", c.scenario.r_a);
            get(s, "v_ac", c.scenario.v_ac);
            get(s, "L", c.scenario.L);
            get(s, "max_angle", c.scenario.max_angle);
            get(s, "sigma_alpha2", c.scenario.sigma_alpha2);
        }
        if (j.contains("geometry"))
        {
            const json &g = j.at("geometry");
            check_keys(g, {"bs", "ac_sub", "sub_h", "sub_v", "f_z", "f_s", "K", "n_cp"}, "geometry");
            for (ArrayGeometry *a : {&c.geometry.bs, &c.geometry.ac_sub})
            {
                get(g, "f_z", a->f_z);
                get(g, "f_s", a->f_s);
                get(g, "K", a->K);
                get(g, "n_cp", a->n_cp);
            }
            if (g.contains("bs"))
                get_array(g.at("bs"), c.geometry.bs, "geometry.bs");
            if (g.contains("ac_sub"))
                get_array(g.at("ac_sub"), c.geometry.ac_sub, "geometry.ac_sub");
            get(g, "sub_h", c.geometry.sub_h);
            get(g, "sub_v", c.geometry.sub_v);
        }
        for (auto [key, pat] : {std::pair{"pattern_bs", &c.pattern_bs}, std::pair{"pattern_ac", &c.pattern_ac}})
            if (j.contains(key))
            {
                check_keys(j.at(key), {"i_h", "i_v", "omega"}, key);
                get(j.at(key), "i_h", pat->i_h);
                get(j.at(key), "i_v", pat->i_v);
                get(j.at(key), "omega", pat->omega);
            }
        for (auto [key, grp] : {std::pair{"group_bs", &c.group_bs}, std::pair{"group_ac", &c.group_ac}})
            if (j.contains(key))
            {
                check_keys(j.at(key), {"m_h", "m_v"}, key);
                get(j.at(key), "m_h", grp->m_h);
                get(j.at(key), "m_v", grp->m_v);
            }
        get(j, "omegas", c.omegas);
        if (j.contains("channel"))
        {
            check_keys(j.at("channel"), {"beam_squint", "doppler_squint"}, "channel");
            get(j.at("channel"), "beam_squint", c.channel.beam_squint);
            get(j.at("channel"), "doppler_squint", c.channel.doppler_squint);
        }
        if (j.contains("variants"))
            for (const json &v : j.at("variants"))
                c.variants.push_back(parse_variant(v));
        else
            c.variants.push_back(parse_variant(json("gttdu")));
        get(j, "snr_db", c.snr_db);
        if (j.contains("stage_snr"))
        {
            const json &s = j.at("stage_snr");
            check_keys(s, {"bs_angles", "ac_angles", "doppler", "delay"}, "stage_snr");
            c.stage_snr.bs_angles = opt_snr(s, "bs_angles");
            c.stage_snr.ac_angles = opt_snr(s, "ac_angles");
            c.stage_snr.doppler = opt_snr(s, "doppler");
            c.stage_snr.delay = opt_snr(s, "delay");
        }
        get(j, "noiseless", c.noiseless);
        get(j, "bandwidths_hz", c.bandwidths_hz);
        get(j, "array_sizes", c.array_sizes);
        get(j, "occupied", c.occupied);
        get(j, "n_do", c.n_do);
        get(j, "n_de", c.n_de);
        get(j, "n_c", c.n_c);
        get(j, "n_ti", c.n_ti);
        get(j, "dadd_symbols", c.dadd_symbols);
        get(j, "epsilon", c.epsilon);
        get(j, "k_tilde_max", c.k_tilde_max);
        get(j, "any_link", c.any_link);
        get(j, "tracking_omega", c.tracking_omega);
        get(j, "interleaver_seed", c.interleaver_seed);
        get(j, "dl_interference", c.dl_interference);
        get(j, "rough_angle_deg", c.rough_angle_deg);
        get(j, "rough_doppler_rel", c.rough_doppler_rel);
        if (j.contains("signs"))
        {
            std::string s = j.at("signs").get<std::string>();
            if (s == "per_step")
                c.signs = SignMode::per_step;
            else if (s == "per_trajectory")
                c.signs = SignMode::per_trajectory;
            else
                throw std::invalid_argument("config: signs must be per_step or per_trajectory");
        }
        if (j.contains("prior_snr_db") && j.at("prior_snr_db") == "noiseless")
            c.prior_snr_db = std::numeric_limits<double>::infinity();
        else
            c.prior_snr_db = opt_snr(j, "prior_snr_db");
        get(j, "nmse_stride", c.nmse_stride);
        get(j, "unit_norm_precoder", c.unit_norm_precoder);
        get(j, "angle_stage_doppler", c.angle_stage_doppler);
        c.validate();
        return c;
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::string config_json(const ExperimentConfig &c)
    {
        json j;
        j["seed"] = c.seed;
        j["trials"] = c.trials;
        j["threads"] = c.threads;
        j["output"] = c.output;
        j["experiments"] = c.experiments;
        j["scenario"] = {{"d_ab", c.scenario.d_ab},   {"d_bs", c.scenario.d_bs},
                         {"r_a", c.scenario.r_a},     {"v_ac", c.scenario.v_ac},
                         {"L", c.scenario.L},         {"max_angle", c.scenario.max_angle},
                         {"sigma_alpha2", c.scenario.sigma_alpha2}};
        j["geometry"] = {{"bs", array_json(c.geometry.bs)},
                         {"ac_sub", array_json(c.geometry.ac_sub)},
                         {"sub_h", c.geometry.sub_h},
                         {"sub_v", c.geometry.sub_v}};
        j["pattern_bs"] = {{"i_h", c.pattern_bs.i_h}, {"i_v", c.pattern_bs.i_v}, {"omega", c.pattern_bs.omega}};
        j["pattern_ac"] = {{"i_h", c.pattern_ac.i_h}, {"i_v", c.pattern_ac.i_v}, {"omega", c.pattern_ac.omega}};
        j["omegas"] = c.omegas;
        j["group_bs"] = {{"m_h", c.group_bs.m_h}, {"m_v", c.group_bs.m_v}};
        j["group_ac"] = {{"m_h", c.group_ac.m_h}, {"m_v", c.group_ac.m_v}};
        j["channel"] = {{"beam_squint", c.channel.beam_squint}, {"doppler_squint", c.channel.doppler_squint}};
        j["variants"] = json::array();
        for (const Variant &v : c.variants)
            j["variants"].push_back({{"name", v.name},
                                     {"ttdu", to_string(v.ttdu)},
                                     {"i_max_bs", v.i_max_bs},
                                     {"i_max_ac", v.i_max_ac},
                                     {"i_max_do", v.i_max_do}});
        j["snr_db"] = c.snr_db;
        j["stage_snr"] = {{"bs_angles", snr_json(c.stage_snr.bs_angles)},
                          {"ac_angles", snr_json(c.stage_snr.ac_angles)},
                          {"doppler", snr_json(c.stage_snr.doppler)},
                          {"delay", snr_json(c.stage_snr.delay)}};
        j["noiseless"] = c.noiseless;
        j["bandwidths_hz"] = c.bandwidths_hz;
        j["array_sizes"] = c.array_sizes;
        j["occupied"] = c.occupied;
        j["n_do"] = c.n_do;
        j["n_de"] = c.n_de;
        j["n_c"] = c.n_c;
        j["n_ti"] = c.n_ti;
        j["dadd_symbols"] = c.dadd_symbols;
        j["epsilon"] = c.epsilon;
        j["k_tilde_max"] = c.k_tilde_max;
        j["any_link"] = c.any_link;
        j["tracking_omega"] = c.tracking_omega;
        j["interleaver_seed"] = c.interleaver_seed;
        j["dl_interference"] = c.dl_interference;
        j["rough_angle_deg"] = c.rough_angle_deg;
        j["rough_doppler_rel"] = c.rough_doppler_rel;
        j["signs"] = c.signs == SignMode::per_step ? "per_step" : "per_trajectory";
        j["prior_snr_db"] = c.prior_snr_db && std::isinf(*c.prior_snr_db) ? json("noiseless") : snr_json(c.prior_snr_db);
        j["nmse_stride"] = c.nmse_stride;
        j["unit_norm_precoder"] = c.unit_norm_precoder;
        j["angle_stage_doppler"] = c.angle_stage_doppler;
        j["notes"] = {
            {"csv_columns", csv_header},
            {"rmse_units", "angles rad (physical azimuth / elevation), doppler Hz, delay s, gain linear"},
            {"nmse", "DL channel of the 2nd symbol after the pilot stage, mean ratio over trials in dB; "
                     "-inf marks an exact estimate (status sentinel)"},
            {"crlb", "sqrt of the mean bound, same units as the matching rmse metric"},
            {"gain_weighted", "rmse_x_gn / crlb_x_gn: squared error and bound weighted by |alpha|^2 / sigma_alpha^2 "
                              "before averaging; efficiency_x: mean per-trial squared error over bound"},
            {"occupied_axis", "centred block of occupied subcarriers at fixed K, delta_f = f_s / K"},
            {"throughput", "delta_f * sum over links and occupied subcarriers of log2(1 + SINR)"},
            {"ase", "sum over links of (1 / K) sum over occupied subcarriers of log2(1 + SINR)"},
            {"angles", "BS and aircraft angles drawn uniform in [-max_angle, max_angle]"},
            {"heading", "uniform between the C->O and C->D directions"},
            {"time_origin", "symbol index restarts at 1 in every pilot stage; data symbols count from the end "
                            "of initial estimation"},
            {"stage_snr", "'sweep' follows the snr_db axis, a number fixes the stage SNR"},
            {"tracking", "nmse of the per-subcarrier effective channel of the last decoded symbol in each TI"}};
        return j.dump(2) + "\n";
    }

    // ---------------------------------------------------------------- trial plumbing

    namespace
    {
        // Runs f(t) for t in [0, n) on a small pool; failures become empty slots
        template <class R>
        std::vector<std::optional<R>> run_trials(int n, int threads, const std::function<R(int)> &f)
        {
            std::vector<std::optional<R>> out(static_cast<size_t>(n));
            auto body = [&](int t)
            {
                try
                {
                    out[size_t(t)] = f(t);
                }
                catch (const std::exception &)
                {
                    out[size_t(t)].reset();
                }
            };
            int nt = threads > 0 ? threads : int(std::max(1u, std::thread::hardware_concurrency()));
            nt = std::min(nt, n);
            if (nt <= 1)
            {
                for (int t = 0; t < n; ++t)
                    body(t);
                return out;
            }
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            for (int w = 0; w < nt; ++w)
                pool.emplace_back([&]
                                  {
                                      for (int t = next++; t < n; t = next++)
                                          body(t);
                                  });
            for (std::thread &th : pool)
                th.join();
            return out;
        }

        struct SweepPoint
        {
            ExperimentConfig cfg;
            int index = 0;
        };

        std::vector<SweepPoint> sweep_points(const ExperimentConfig &base)
        {
            std::vector<double> fs = base.bandwidths_hz;
            if (fs.empty())
                fs.push_back(base.geometry.bs.f_s);
            std::vector<int> ns = base.array_sizes;
            if (ns.empty())
                ns.push_back(0);
            std::vector<SweepPoint> pts;
            for (double f : fs)
                for (int n : ns)
                {
                    SweepPoint p{base, int(pts.size())};
                    p.cfg.geometry.bs.f_s = p.cfg.geometry.ac_sub.f_s = f;
                    if (n > 0)
                    {
                        p.cfg.geometry.bs.n_h = p.cfg.geometry.bs.n_v = n;
                        p.cfg.geometry.ac_sub.n_h = p.cfg.geometry.ac_sub.n_v = n;
                    }
                    p.cfg.validate();
                    pts.push_back(p);
                }
            return pts;
        }

        std::uint64_t stream_id(int experiment, int point, int variant, int snr, int extra = 0)
        {
            return 1 + ((((std::uint64_t(experiment) * 256 + std::uint64_t(point)) * 256 + std::uint64_t(variant)) *
                             1024 +
                         std::uint64_t(snr)) *
                        64) +
                   std::uint64_t(extra);
        }

        struct Draw
        {
            std::vector<LinkParams> truth;
            std::vector<RoughEstimate> priors;
        };

        // Scenario realisation shared by every variant / SNR of a trial
        Draw draw_trial(const ExperimentConfig &cfg, int trial)
        {
            Rng rng = make_rng(cfg.seed, 0, std::uint64_t(trial));
            Draw d;
            d.truth = scenario_links(cfg.scenario, cfg.geometry.bs, rng);
            for (const LinkParams &lp : d.truth)
                d.priors.push_back(draw_rough(lp, rng, cfg.rough_angle_deg, cfg.rough_doppler_rel));
            return d;
        }

        MetricRecord record(const std::string &metric, const std::string &variant, const ExperimentConfig &cfg)
        {
            MetricRecord r;
            r.metric = metric;
            r.variant = variant;
            r.f_s_hz = cfg.geometry.bs.f_s;
            r.array_n = cfg.geometry.bs.n_h;
            return r;
        }

        // Named accumulators kept in insertion order
        class Accumulators
        {
        public:
            RunningStat &operator[](const std::string &name)
            {
                for (auto &[n, s] : items_)
                    if (n == name)
                        return s;
                items_.emplace_back(name, RunningStat{});
                return items_.back().second;
            }
            const std::vector<std::pair<std::string, RunningStat>> &items() const { return items_; }

        private:
            std::vector<std::pair<std::string, RunningStat>> items_;
        };

        using Samples = std::vector<std::pair<std::string, double>>;

        void merge_samples(Accumulators &acc, const Samples &s)
        {
            for (const auto &[n, x] : s)
                acc[n].add(x);
        }

        // rmse_* and crlb_* hold squared values, nmse_* ratios. ok counts successful trials.
        void emit(std::vector<MetricRecord> &out, const Accumulators &acc, const MetricRecord &proto, long ok,
                  long failed)
        {
            for (const auto &[name, st] : acc.items())
            {
                MetricRecord r = proto;
                r.metric = name;
                r.trials = ok;
                r.variance = st.variance();
                if (name.rfind("rmse", 0) == 0 || name.rfind("crlb", 0) == 0)
                    r.value = std::sqrt(st.mean());
                else if (name.rfind("nmse", 0) == 0)
                {
                    r.metric = name + "_db";
                    r.value = nmse_db(st.mean());
                }
                else
                    r.value = st.mean();
                r.diverged = std::isnan(r.value) || (std::isinf(r.value) && r.value > 0);
                out.push_back(r);
            }
            if (failed > 0)
            {
                MetricRecord r = proto;
                r.metric = "failed_trials";
                r.value = double(failed);
                r.trials = failed;
                out.push_back(r);
            }
        }

        double angle_err2(PhysicalAngles a, PhysicalAngles b, bool theta)
        {
            double d = theta ? a.theta - b.theta : a.phi - b.phi;
            return d * d;
        }

        std::vector<LinkParams> params_of(const std::vector<LinkEstimate> &est, const ArrayGeometry &carrier)
        {
            std::vector<LinkParams> p;
            for (const LinkEstimate &e : est)
                p.push_back(e.as_params(carrier));
            return p;
        }

        std::vector<int> strided(int K, int stride)
        {
            std::vector<int> ks;
            for (int k = 1; k <= K; k += stride)
                ks.push_back(k);
            return ks;
        }

        // Bounds for one link given its captured amplitudes, as squared native units
        void link_bounds(const PipelineConfig &pc, const LinkParams &lp, const LinkEstimate &e, int l, double sigma2,
                         int omega, Samples &s, const std::string &suffix = "")
        {
            const ArrayGeometry &bs = pc.sys.bs;
            VirtualAngles vb = to_virtual(lp.bs), va = to_virtual(lp.ac);
            auto angle = [&](VirtualAngles v, const PatternSpec &pat, const std::vector<cd> &amps, const char *side)
            {
                AngleBoundInputs in{pat.i_h, pat.i_v, {omega * v.mu, omega * v.nu}, amps, sigma2};
                PhysicalBound pb = crlb_physical(crlb_virtual(in), v, omega);
                s.emplace_back(std::string("crlb_theta_") + side + suffix, pb.theta);
                s.emplace_back(std::string("crlb_phi_") + side + suffix, pb.phi);
            };
            angle(vb, pc.pat_bs, e.amp_bs, "bs");
            angle(va, pc.pat_ac, e.amp_ac, "ac");
            if (!e.amp_do.empty())
                s.emplace_back("crlb_psi_hz" + suffix, crlb_doppler(pc.n_do, e.amp_do, sigma2, bs.t_sym()));
            if (!e.amp_de.empty())
            {
                std::vector<int> pos;
                for (int k : subcarrier_comb(l, pc.sys.links(), bs.K))
                    pos.push_back(k - 1);
                s.emplace_back("crlb_tau_s" + suffix, crlb_delay(pos, e.amp_de, sigma2, bs.K) / (bs.f_s * bs.f_s));
            }
        }

        void estimate_errors(const std::vector<LinkParams> &truth, const std::vector<LinkEstimate> &est,
                             Samples &s)
        {
            for (size_t l = 0; l < truth.size(); ++l)
            {
                const LinkParams &t = truth[l];
                const LinkEstimate &e = est[l];
                PhysicalAngles pb = to_physical_clamped(e.bs), pa = to_physical_clamped(e.ac);
                s.emplace_back("rmse_theta_bs", angle_err2(pb, t.bs, true));
                s.emplace_back("rmse_phi_bs", angle_err2(pb, t.bs, false));
                s.emplace_back("rmse_theta_ac", angle_err2(pa, t.ac, true));
                s.emplace_back("rmse_phi_ac", angle_err2(pa, t.ac, false));
                s.emplace_back("rmse_psi_hz", (e.psi_z - t.psi_z) * (e.psi_z - t.psi_z));
                s.emplace_back("rmse_tau_s", (e.tau - t.tau) * (e.tau - t.tau));
                s.emplace_back("rmse_alpha", std::norm(e.alpha - t.alpha));
                for (size_t i = 0; i < e.bs_iter.size(); ++i)
                {
                    PhysicalAngles p = to_physical_clamped(e.bs_iter[i]);
                    s.emplace_back("rmse_theta_bs_it" + std::to_string(i + 1), angle_err2(p, t.bs, true));
                    s.emplace_back("rmse_phi_bs_it" + std::to_string(i + 1), angle_err2(p, t.bs, false));
                }
                for (size_t i = 0; i < e.ac_iter.size(); ++i)
                {
                    PhysicalAngles p = to_physical_clamped(e.ac_iter[i]);
                    s.emplace_back("rmse_theta_ac_it" + std::to_string(i + 1), angle_err2(p, t.ac, true));
                    s.emplace_back("rmse_phi_ac_it" + std::to_string(i + 1), angle_err2(p, t.ac, false));
                }
                for (size_t i = 0; i < e.psi_iter.size(); ++i)
                {
                    double d = e.psi_iter[i] - t.psi_z;
                    s.emplace_back("rmse_psi_hz_it" + std::to_string(i), d * d);
                }
            }
        }

        // Per-link derived samples. efficiency_x is the squared error over the same trial's bound.
        // *_gn weight error and bound by |alpha|^2 / sigma_alpha^2 of the link: with Rayleigh gains the plain
        // mean bound has no finite expectation, the weighted one does.
        void add_derived(Samples &s, const std::vector<LinkParams> &truth, double sigma_alpha2)
        {
            for (const char *x : {"theta_bs", "phi_bs", "theta_ac", "phi_ac", "mu_bs", "nu_bs", "psi_hz", "tau_s"})
            {
                const std::string rn = std::string("rmse_") + x, cn = std::string("crlb_") + x;
                std::vector<double> e, c;
                for (const auto &[n, v] : s)
                {
                    if (n == rn)
                        e.push_back(v);
                    else if (n == cn)
                        c.push_back(v);
                }
                for (size_t i = 0; i < e.size() && i < truth.size(); ++i)
                {
                    double w = std::norm(truth[i].alpha) / sigma_alpha2;
                    s.emplace_back(rn + "_gn", e[i] * w);
                    if (i < c.size())
                    {
                        s.emplace_back(cn + "_gn", c[i] * w);
                        if (c[i] > 0.0)
                            s.emplace_back(std::string("efficiency_") + x, e[i] / c[i]);
                    }
                }
            }
        }

        double stage_var(double db, bool noiseless, double sigma_alpha2)
        {
            return noiseless ? 0.0 : noise_variance(db, sigma_alpha2);
        }

        // ------------------------------------------------------------ experiments

        void initial_experiment(const SweepPoint &pt, std::vector<MetricRecord> &out)
        {
            const ExperimentConfig &cfg = pt.cfg;
            for (size_t vi = 0; vi < cfg.variants.size(); ++vi)
            {
                const Variant &v = cfg.variants[vi];
                PipelineConfig pc = cfg.pipeline(v);
                const std::vector<int> ks = strided(cfg.geometry.bs.K, cfg.nmse_stride);
                for (size_t si = 0; si < cfg.snr_db.size(); ++si)
                {
                    const double snr = cfg.snr_db[si];
                    const StageSnr ss = cfg.stage_snr.at(snr, cfg.noiseless);
                    std::function<Samples(int)> trial = [&](int t)
                    {
                        Draw d = draw_trial(cfg, t);
                        Rng rng = make_rng(cfg.seed, stream_id(1, pt.index, int(vi), int(si)), std::uint64_t(t));
                        std::vector<LinkEstimate> est = estimate_links(pc, d.truth, d.priors, ss, rng);
                        Samples s;
                        estimate_errors(d.truth, est, s);
                        s.emplace_back("nmse", nmse(d.truth, params_of(est, cfg.geometry.bs), ks, cfg.geometry,
                                                    cfg.channel, 2));
                        if (!cfg.noiseless)
                        {
                            const double sa = cfg.scenario.sigma_alpha2;
                            for (int l = 1; l <= cfg.geometry.links(); ++l)
                            {
                                Samples b;
                                const LinkEstimate &e = est[size_t(l - 1)];
                                // Each stage at its own SNR
                                link_bounds(pc, d.truth[size_t(l - 1)], e, l, 1.0, 1, b);
                                for (auto &[n, x] : b)
                                {
                                    double db = n.find("_bs") != std::string::npos   ? ss.bs_angles
                                                : n.find("_ac") != std::string::npos ? ss.ac_angles
                                                : n.find("psi") != std::string::npos ? ss.doppler
                                                                                     : ss.delay;
                                    s.emplace_back(n, x * stage_var(db, false, sa));
                                }
                            }
                        }
                        add_derived(s, d.truth, cfg.scenario.sigma_alpha2);
                        return s;
                    };
                    auto res = run_trials<Samples>(cfg.trials, cfg.threads, trial);
                    Accumulators acc;
                    long failed = 0;
                    for (auto &r : res)
                        r ? merge_samples(acc, *r) : void(++failed);
                    MetricRecord proto = record("", v.name, cfg);
                    proto.snr_db = snr;
                    emit(out, acc, proto, cfg.trials - failed, failed);
                }
            }
        }

        void sparse_experiment(const SweepPoint &pt, std::vector<MetricRecord> &out)
        {
            const ExperimentConfig &cfg = pt.cfg;
            for (size_t vi = 0; vi < cfg.variants.size(); ++vi)
            {
                const Variant &v = cfg.variants[vi];
                PipelineConfig pc = cfg.pipeline(v);
                for (size_t si = 0; si < cfg.snr_db.size(); ++si)
                {
                    const double snr = cfg.snr_db[si];
                    const StageSnr ss = cfg.stage_snr.at(snr, cfg.noiseless);
                    const StageSnr ss_prior =
                        !cfg.prior_snr_db ? ss
                        : std::isinf(*cfg.prior_snr_db) ? cfg.stage_snr.at(0.0, true)
                                                        : cfg.stage_snr.at(*cfg.prior_snr_db, cfg.noiseless);
                    for (size_t oi = 0; oi < cfg.omegas.size(); ++oi)
                    {
                        const int omega = cfg.omegas[oi];
                        PipelineConfig sp = pc;
                        sp.pat_bs.omega = omega;
                        sp.pat_ac.omega = omega;
                        sp.validate();
                        std::function<Samples(int)> trial = [&](int t)
                        {
                            Draw d = draw_trial(cfg, t);
                            // Priors from an initial estimation
                            Rng rng0 = make_rng(cfg.seed, stream_id(2, pt.index, int(vi), int(si)), std::uint64_t(t));
                            std::vector<LinkEstimate> init = estimate_links(pc, d.truth, d.priors, ss_prior, rng0);
                            // Same stage noise for every spacing, so spacings are compared pairwise
                            Rng rng = make_rng(cfg.seed, stream_id(2, pt.index, int(vi), int(si), 1), std::uint64_t(t));
                            Samples s;
                            for (int l = 1; l <= cfg.geometry.links(); ++l)
                            {
                                const LinkParams &lp = d.truth[size_t(l - 1)];
                                RoughEstimate prior = prior_from(init[size_t(l - 1)]);
                                double vb = stage_var(ss.bs_angles, cfg.noiseless, cfg.scenario.sigma_alpha2);
                                double va = stage_var(ss.ac_angles, cfg.noiseless, cfg.scenario.sigma_alpha2);
                                LinkEstimate e = bs_angle_stage(sp, lp, l, prior, vb, rng);
                                ac_angle_stage(sp, lp, l, prior, va, rng, e);
                                PhysicalAngles pb = to_physical_clamped(e.bs), pa = to_physical_clamped(e.ac);
                                s.emplace_back("rmse_theta_bs", angle_err2(pb, lp.bs, true));
                                s.emplace_back("rmse_phi_bs", angle_err2(pb, lp.bs, false));
                                s.emplace_back("rmse_theta_ac", angle_err2(pa, lp.ac, true));
                                s.emplace_back("rmse_phi_ac", angle_err2(pa, lp.ac, false));
                                VirtualAngles tb = to_virtual(lp.bs);
                                s.emplace_back("rmse_mu_bs", (e.bs.mu - tb.mu) * (e.bs.mu - tb.mu));
                                s.emplace_back("rmse_nu_bs", (e.bs.nu - tb.nu) * (e.bs.nu - tb.nu));
                                if (!cfg.noiseless)
                                {
                                    Samples b;
                                    link_bounds(sp, lp, e, l, 1.0, omega, b);
                                    for (auto &[n, x] : b)
                                        s.emplace_back(n, x * (n.find("_bs") != std::string::npos ? vb : va));
                                    AngleBoundInputs in{sp.pat_bs.i_h, sp.pat_bs.i_v,
                                                        {omega * tb.mu, omega * tb.nu}, e.amp_bs, vb};
                                    Eigen::Matrix2d C = crlb_virtual(in);
                                    s.emplace_back("crlb_mu_bs", C(1, 1) / double(omega * omega));
                                    s.emplace_back("crlb_nu_bs", C(0, 0) / double(omega * omega));
                                }
                            }
                            add_derived(s, d.truth, cfg.scenario.sigma_alpha2);
                            return s;
                        };
                        auto res = run_trials<Samples>(cfg.trials, cfg.threads, trial);
                        Accumulators acc;
                        long failed = 0;
                        for (auto &r : res)
                            r ? merge_samples(acc, *r) : void(++failed);
                        MetricRecord proto = record("", v.name, cfg);
                        proto.snr_db = snr;
                        proto.omega = omega;
                        emit(out, acc, proto, cfg.trials - failed, failed);
                    }
                }
            }
        }

        // Per-subcarrier effective DL channel of every (rx link, tx BS) pair
        using GainTable = std::vector<std::vector<CVec>>;

        GainTable gain_table(const PipelineConfig &pc, const std::vector<LinkParams> &truth,
                             const std::vector<BeamState> &beams, bool interference)
        {
            const int L = pc.sys.links(), K = pc.sys.bs.K;
            GainTable g(static_cast<size_t>(L), std::vector<CVec>(static_cast<size_t>(L)));
            for (int l = 0; l < L; ++l)
                for (int t = 0; t < L; ++t)
                {
                    if (t != l && !interference)
                        continue;
                    CVec &v = g[size_t(l)][size_t(t)];
                    v.resize(K);
                    for (int k = 1; k <= K; ++k)
                        v[k - 1] = dl_data_gain(pc, truth[size_t(t)], l + 1, beams[size_t(l)], beams[size_t(t)], k);
                }
            return g;
        }

        // Residual Doppler rotation of BS t's signal at data symbol n (1-based, counted from the frame start)
        CVec doppler_rotation(const PipelineConfig &pc, const LinkParams &lp, double psi_hat, long n)
        {
            const ArrayGeometry &g = pc.sys.bs;
            CVec r(g.K);
            for (int k = 1; k <= g.K; ++k)
            {
                double psi_tx = pc.channel.doppler_squint
                                    ? doppler_of(psi_hat, psi_hat * g.lambda(), k, g)
                                    : psi_hat;
                r[k - 1] = std::polar(1.0, 2.0 * pi * (doppler_at(lp, k, g, pc.channel) - psi_tx) *
                                               double(n - 1) * g.t_sym());
            }
            return r;
        }

        std::vector<CVec> model_channels(const PipelineConfig &pc, const std::vector<LinkEstimate> &est)
        {
            std::vector<CVec> h;
            for (int l = 1; l <= pc.sys.links(); ++l)
            {
                const LinkEstimate &e = est[size_t(l - 1)];
                LinkParams m = e.as_params(pc.sys.bs);
                BeamState b = e.data_beams();
                CVec v(pc.sys.bs.K);
                for (int k = 1; k <= pc.sys.bs.K; ++k)
                    v[k - 1] = dl_data_gain(pc, m, l, b, b, k);
                h.push_back(v);
            }
            return h;
        }

        struct TrackingTrial
        {
            std::vector<double> nmse_dadd, nmse_frozen, reest, ber;
        };

        void tracking_experiment(const SweepPoint &pt, std::vector<MetricRecord> &out)
        {
            const ExperimentConfig &cfg = pt.cfg;
            const SymbolCodec codec(cfg.geometry.bs.K, cfg.interleaver_seed);
            for (size_t vi = 0; vi < cfg.variants.size(); ++vi)
            {
                const Variant &v = cfg.variants[vi];
                PipelineConfig pc = cfg.pipeline(v);
                PipelineConfig sparse = pc;
                sparse.pat_bs.omega = sparse.pat_ac.omega = cfg.tracking_omega;
                sparse.validate();
                for (size_t si = 0; si < cfg.snr_db.size(); ++si)
                {
                    const double snr = cfg.snr_db[si];
                    const StageSnr ss = cfg.stage_snr.at(snr, cfg.noiseless);
                    const double sigma2 = stage_var(snr, cfg.noiseless, cfg.scenario.sigma_alpha2);
                    std::function<TrackingTrial(int)> trial = [&](int t)
                    {
                        Draw d = draw_trial(cfg, t);
                        Rng rng = make_rng(cfg.seed, stream_id(3, pt.index, int(vi), int(si)), std::uint64_t(t));
                        const int L = cfg.geometry.links(), K = cfg.geometry.bs.K;
                        std::vector<LinkEstimate> est = estimate_links(pc, d.truth, d.priors, ss, rng);
                        std::vector<CVec> frozen = model_channels(pc, est);
                        DaddTracker tracker(frozen, {cfg.epsilon, cfg.k_tilde_max, cfg.any_link});

                        std::vector<LinkParams> truth = d.truth;
                        std::vector<EvolutionRates> rates;
                        std::vector<EvolutionSigns> signs;
                        for (const LinkParams &lp : truth)
                        {
                            rates.push_back(default_rates(lp, cfg.geometry.bs, cfg.n_c));
                            signs.push_back(draw_signs(rng));
                        }
                        std::uniform_int_distribution<int> bit(0, 1);
                        TrackingTrial r;
                        for (int q = 1; q <= cfg.n_ti; ++q)
                        {
                            for (int l = 0; l < L; ++l)
                                truth[size_t(l)] =
                                    cfg.signs == SignMode::per_trajectory
                                        ? evolve_ti(truth[size_t(l)], rates[size_t(l)], signs[size_t(l)], cfg.geometry.bs)
                                        : evolve_ti(truth[size_t(l)], rates[size_t(l)], rng, cfg.geometry.bs);
                            std::vector<BeamState> beams;
                            for (const LinkEstimate &e : est)
                                beams.push_back(e.data_beams());
                            GainTable g = gain_table(pc, truth, beams, cfg.dl_interference);

                            double err_d = 0.0, err_f = 0.0, ref = 0.0, bit_err = 0.0, bits = 0.0;
                            bool reestimated = false;
                            for (int n = cfg.n_c - cfg.dadd_symbols + 1; n <= cfg.n_c; ++n)
                            {
                                long nn = long(q - 1) * cfg.n_c + n;
                                std::vector<Bits> info(size_t(L), Bits(size_t(codec.info_bits())));
                                std::vector<CVec> sym(static_cast<size_t>(L)), rot(static_cast<size_t>(L));
                                for (int l = 0; l < L; ++l)
                                {
                                    for (auto &b : info[size_t(l)])
                                        b = std::uint8_t(bit(rng));
                                    sym[size_t(l)] = codec.encode(info[size_t(l)]);
                                    rot[size_t(l)] = doppler_rotation(pc, truth[size_t(l)], est[size_t(l)].psi_z, nn);
                                }
                                std::vector<CVec> y(static_cast<size_t>(L)), h(static_cast<size_t>(L));
                                for (int l = 0; l < L; ++l)
                                {
                                    CVec acc = CVec::Zero(K);
                                    for (int tx = 0; tx < L; ++tx)
                                    {
                                        const CVec &gl = g[size_t(l)][size_t(tx)];
                                        if (gl.size() == 0)
                                            continue;
                                        acc += (gl.array() * rot[size_t(tx)].array() * sym[size_t(tx)].array()).matrix();
                                    }
                                    for (int k = 0; k < K && sigma2 > 0.0; ++k)
                                        acc[k] += complex_normal(rng, sigma2);
                                    y[size_t(l)] = acc;
                                    h[size_t(l)] = (g[size_t(l)][size_t(l)].array() * rot[size_t(l)].array()).matrix();
                                }
                                std::vector<Bits> dec = tracker.step(y, codec);
                                for (int l = 0; l < L; ++l)
                                    for (size_t b = 0; b < dec[size_t(l)].size(); ++b)
                                    {
                                        bit_err += dec[size_t(l)][b] != info[size_t(l)][b];
                                        bits += 1.0;
                                    }
                                if (n == cfg.n_c)
                                    for (int l = 0; l < L; ++l)
                                    {
                                        err_d += (tracker.estimate(l) - h[size_t(l)]).squaredNorm();
                                        err_f += (frozen[size_t(l)] - h[size_t(l)]).squaredNorm();
                                        ref += h[size_t(l)].squaredNorm();
                                    }
                                if (!tracker.valid() && !reestimated)
                                {
                                    // Pilot-aided tracking on the sparse pattern with the current estimates as priors
                                    std::vector<RoughEstimate> priors;
                                    for (const LinkEstimate &e : est)
                                        priors.push_back(prior_from(e));
                                    est = estimate_links(sparse, truth, priors, ss, rng);
                                    tracker.reset(model_channels(pc, est));
                                    reestimated = true;
                                }
                            }
                            r.nmse_dadd.push_back(err_d / ref);
                            r.nmse_frozen.push_back(err_f / ref);
                            r.reest.push_back(reestimated ? 1.0 : 0.0);
                            r.ber.push_back(bits > 0 ? bit_err / bits : 0.0);
                        }
                        return r;
                    };
                    auto res = run_trials<TrackingTrial>(cfg.trials, cfg.threads, trial);
                    long failed = 0;
                    std::vector<Accumulators> per_ti(size_t(cfg.n_ti));
                    for (auto &r : res)
                    {
                        if (!r)
                        {
                            ++failed;
                            continue;
                        }
                        for (int q = 0; q < cfg.n_ti; ++q)
                        {
                            per_ti[size_t(q)]["nmse_dadd"].add(r->nmse_dadd[size_t(q)]);
                            per_ti[size_t(q)]["nmse_frozen"].add(r->nmse_frozen[size_t(q)]);
                            per_ti[size_t(q)]["reestimation_rate"].add(r->reest[size_t(q)]);
                            per_ti[size_t(q)]["ber"].add(r->ber[size_t(q)]);
                        }
                    }
                    for (int q = 0; q < cfg.n_ti; ++q)
                    {
                        MetricRecord proto = record("", v.name, cfg);
                        proto.snr_db = snr;
                        proto.ti = q + 1;
                        proto.omega = cfg.tracking_omega;
                        emit(out, per_ti[size_t(q)], proto, cfg.trials - failed, q == 0 ? failed : 0);
                    }
                }
            }
        }

        void throughput_experiment(const SweepPoint &pt, std::vector<MetricRecord> &out)
        {
            const ExperimentConfig &cfg = pt.cfg;
            const int K = cfg.geometry.bs.K;
            std::vector<int> occ = cfg.occupied;
            if (occ.empty())
                for (int i = 1; i <= 8; ++i)
                    occ.push_back(K * i / 8);
            for (size_t vi = 0; vi < cfg.variants.size(); ++vi)
            {
                const Variant &v = cfg.variants[vi];
                PipelineConfig pc = cfg.pipeline(v);
                for (size_t si = 0; si < cfg.snr_db.size(); ++si)
                {
                    const double snr = cfg.snr_db[si];
                    const StageSnr ss = cfg.stage_snr.at(snr, cfg.noiseless);
                    const double sigma2 = noise_variance(snr, cfg.scenario.sigma_alpha2);
                    std::function<Samples(int)> trial = [&](int t)
                    {
                        Draw d = draw_trial(cfg, t);
                        Rng rng = make_rng(cfg.seed, stream_id(4, pt.index, int(vi), int(si)), std::uint64_t(t));
                        std::vector<LinkEstimate> est = estimate_links(pc, d.truth, d.priors, ss, rng);
                        std::vector<BeamState> beams;
                        for (const LinkEstimate &e : est)
                            beams.push_back(e.data_beams());
                        std::vector<std::vector<double>> g2, in;
                        std::vector<int> all(static_cast<size_t>(K));
                        for (int k = 0; k < K; ++k)
                            all[size_t(k)] = k + 1;
                        if (cfg.dl_interference)
                            dl_sinr_terms(pc, d.truth, beams, all, sigma2, g2, in);
                        else
                        {
                            g2.assign(d.truth.size(), std::vector<double>(size_t(K)));
                            in.assign(d.truth.size(), std::vector<double>(size_t(K), sigma2));
                            for (size_t l = 0; l < d.truth.size(); ++l)
                                for (int k = 1; k <= K; ++k)
                                    g2[l][size_t(k - 1)] =
                                        std::norm(dl_data_gain(pc, d.truth[l], int(l) + 1, beams[l], beams[l], k));
                        }
                        Samples s;
                        for (int o : occ)
                        {
                            std::vector<int> ks = occupied_subcarriers(o, K);
                            std::vector<std::vector<double>> gs(g2.size()), is(in.size());
                            for (size_t l = 0; l < g2.size(); ++l)
                                for (int k : ks)
                                {
                                    gs[l].push_back(g2[l][size_t(k - 1)]);
                                    is[l].push_back(in[l][size_t(k - 1)]);
                                }
                            RateResult rr = ase_and_throughput(gs, is, cfg.geometry.bs.f_s, K);
                            s.emplace_back("ase@" + std::to_string(o), rr.ase);
                            s.emplace_back("throughput_bps@" + std::to_string(o), rr.throughput);
                        }
                        return s;
                    };
                    auto res = run_trials<Samples>(cfg.trials, cfg.threads, trial);
                    long failed = 0;
                    Accumulators acc;
                    for (auto &r : res)
                        r ? merge_samples(acc, *r) : void(++failed);
                    for (int o : occ)
                    {
                        Accumulators one;
                        for (const char *m : {"ase", "throughput_bps"})
                            one[m] = acc[std::string(m) + "@" + std::to_string(o)];
                        MetricRecord proto = record("", v.name, cfg);
                        proto.snr_db = snr;
                        proto.occupied = o;
                        emit(out, one, proto, cfg.trials - failed, o == occ.front() ? failed : 0);
                    }
                }
            }
        }
    }

    std::vector<MetricRecord> run_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<MetricRecord> out;
        for (const SweepPoint &pt : sweep_points(cfg))
            for (const std::string &e : cfg.experiments)
            {
                if (e == "initial")
                    initial_experiment(pt, out);
                else if (e == "sparse")
                    sparse_experiment(pt, out);
                else if (e == "tracking")
                    tracking_experiment(pt, out);
                else if (e == "throughput")
                    throughput_experiment(pt, out);
            }
        return out;
    }

    std::vector<MetricRecord> crlb_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        std::vector<MetricRecord> out;
        for (const SweepPoint &pt : sweep_points(cfg))
        {
            const ExperimentConfig &c = pt.cfg;
            for (size_t vi = 0; vi < c.variants.size(); ++vi)
            {
                const Variant &v = c.variants[vi];
                PipelineConfig pc = c.pipeline(v);
                for (int omega : c.omegas)
                {
                    PipelineConfig sp = pc;
                    sp.pat_bs.omega = sp.pat_ac.omega = omega;
                    sp.validate();
                    // Unit-noise bounds per trial; they scale linearly with the noise variance
                    std::function<Samples(int)> trial = [&](int t)
                    {
                        Draw d = draw_trial(c, t);
                        Rng rng = make_rng(c.seed, stream_id(5, pt.index, int(vi), 0, omega), std::uint64_t(t));
                        StageSnr quiet;
                        quiet.noiseless = true;
                        std::vector<LinkEstimate> est = estimate_links(sp, d.truth, d.priors, quiet, rng);
                        Samples s;
                        for (int l = 1; l <= c.geometry.links(); ++l)
                            link_bounds(sp, d.truth[size_t(l - 1)], est[size_t(l - 1)], l, 1.0, omega, s);
                        return s;
                    };
                    auto res = run_trials<Samples>(c.trials, c.threads, trial);
                    long failed = 0;
                    Accumulators unit;
                    for (auto &r : res)
                        r ? merge_samples(unit, *r) : void(++failed);
                    for (double snr : c.snr_db)
                    {
                        const StageSnr ss = c.stage_snr.at(snr, false);
                        Accumulators acc;
                        for (const auto &[n, st] : unit.items())
                        {
                            double db = n.find("_bs") != std::string::npos   ? ss.bs_angles
                                        : n.find("_ac") != std::string::npos ? ss.ac_angles
                                        : n.find("psi") != std::string::npos ? ss.doppler
                                                                             : ss.delay;
                            double s2 = noise_variance(db, c.scenario.sigma_alpha2);
                            RunningStat scaled;
                            // Mean scales exactly; keep count and scaled variance
                            for (auto &r : res)
                                if (r)
                                    for (const auto &[m, x] : *r)
                                        if (m == n)
                                            scaled.add(x * s2);
                            acc[n] = scaled;
                        }
                        MetricRecord proto = record("", v.name, c);
                        proto.snr_db = snr;
                        proto.omega = omega;
                        emit(out, acc, proto, c.trials - failed, failed);
                    }
                }
            }
        }
        return out;
    }

    void write_outputs(const ExperimentConfig &cfg, const std::vector<MetricRecord> &rows)
    {
        std::filesystem::create_directories(cfg.output);
        std::ofstream csv(std::filesystem::path(cfg.output) / "metrics.csv", std::ios::binary);
        write_csv(csv, rows);
        std::ofstream side(std::filesystem::path(cfg.output) / "config.json", std::ios::binary);
        side << config_json(cfg);
        if (!csv || !side)
            throw std::runtime_error("cannot write outputs under '" + cfg.output + "'");
    }
}
