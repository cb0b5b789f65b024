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

#include "aerothz/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aerothz
{
    void PipelineConfig::validate() const
    {
        sys.validate();
        pat_bs.validate();
        pat_ac.validate();
        if (i_max_bs < 1 || i_max_ac < 1 || i_max_do < 0)
            throw std::invalid_argument("PipelineConfig: invalid iteration counts");
        if (n_do < 2 || n_de < 1)
            throw std::invalid_argument("PipelineConfig: need N_do >= 2 and N_de >= 1");
        if (!delay_comb_feasible(sys.links(), sys.bs.n_cp, sys.bs.K))
            throw std::invalid_argument("PipelineConfig: delay comb aliases (L N_cp / K >= 1/2)");
        if (ttdu == TtduMode::grouped)
        {
            ArrayGeometry ac = sys.ac();
            if (sys.bs.n_h % grp_bs.m_h || sys.bs.n_v % grp_bs.m_v || ac.n_h % grp_ac.m_h || ac.n_v % grp_ac.m_v ||
                sys.ac_sub.n_h % grp_ac.m_h || sys.ac_sub.n_v % grp_ac.m_v)
                throw std::invalid_argument("PipelineConfig: TTD groups must tile the arrays");
        }
        if (!channel.beam_squint && ttdu != TtduMode::none)
            throw std::invalid_argument("PipelineConfig: delay units require the squinted channel model");
        subarray_size(sys.bs.n_h, pat_bs.i_h, pat_bs.omega);
        subarray_size(sys.bs.n_v, pat_bs.i_v, pat_bs.omega);
        subarray_size(sys.ac_sub.n_h, pat_ac.i_h, pat_ac.omega);
        subarray_size(sys.ac_sub.n_v, pat_ac.i_v, pat_ac.omega);
    }

    double noise_variance(double snr_db, double sigma_alpha2)
    {
        return sigma_alpha2 / std::pow(10.0, snr_db / 10.0);
    }

    PhysicalAngles to_physical_clamped(VirtualAngles va)
    {
        double nu = std::clamp(va.nu, -pi, pi);
        double phi = std::asin(nu / pi);
        double c = pi * std::cos(phi);
        double x = c > 0.0 ? std::clamp(va.mu / c, -1.0, 1.0) : 0.0;
        return {std::asin(x), phi};
    }

    LinkParams LinkEstimate::as_params(const ArrayGeometry &carrier) const
    {
        LinkParams lp;
        lp.bs = to_physical_clamped(bs);
        lp.ac = to_physical_clamped(ac);
        lp.alpha = alpha;
        lp.tau = tau;
        lp.psi_z = psi_z;
        lp.v = psi_z * carrier.lambda();
        return lp;
    }

    RoughEstimate prior_from(const LinkEstimate &est)
    {
        return {est.bs, est.ac, est.psi_z};
    }

    namespace
    {
        ArrayBlock ac_block(const SystemGeometry &sys, int l)
        {
            return {sys.ac_offset_h(l), sys.ac_offset_v(l), sys.ac_sub.n_h, sys.ac_sub.n_v};
        }

        double precoder_amp(const PipelineConfig &cfg)
        {
            return cfg.unit_norm_precoder ? 1.0 / std::sqrt(double(cfg.sys.bs.size())) : 1.0;
        }

        cd pilot(Rng &rng)
        {
            std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
            return std::polar(1.0, u(rng));
        }

        cd noise(Rng &rng, double sigma2)
        {
            return sigma2 > 0.0 ? complex_normal(rng, sigma2) : cd(0.0);
        }

        // Doppler a transmitter pre-compensates with, given its estimate
        double tx_doppler(const PipelineConfig &cfg, double psi_hat, int k)
        {
            if (!cfg.channel.doppler_squint)
                return psi_hat;
            return doppler_of(psi_hat, psi_hat * cfg.sys.bs.lambda(), k, cfg.sys.bs);
        }

        VirtualAngles ttd_or_zero(const PipelineConfig &cfg, VirtualAngles va)
        {
            return cfg.ttdu == TtduMode::none ? VirtualAngles{0.0, 0.0} : va;
        }

        // DL channel of lp after both ends' delay units, symbol 1
        Rank1 compensated_dl(const PipelineConfig &cfg, const LinkParams &lp, VirtualAngles ac_ttd,
                             VirtualAngles bs_ttd, int k)
        {
            const ArrayGeometry ac = cfg.sys.ac();
            Rank1 H = dl_channel(lp, cfg.sys, k, 1, cfg.channel);
            CompensationPair cp{cfg.ttdu, cfg.ttdu, ac_ttd, bs_ttd, cfg.grp_ac, cfg.grp_bs};
            return apply_pair(H, cp, ac, cfg.sys.bs, k);
        }
    }

    cd dl_data_gain(const PipelineConfig &cfg, const LinkParams &lp_tx, int l_rx, const BeamState &rx,
                    const BeamState &tx, int k)
    {
        const ArrayGeometry ac = cfg.sys.ac();
        Rank1 H = compensated_dl(cfg, lp_tx, rx.ac_ttd, tx.bs_ttd, k);
        UpaVector w = unit_block_beam(rx.ac_steer, ac, ac_block(cfg.sys, l_rx));
        UpaVector f = block_beam(tx.bs_steer, cfg.sys.bs, full_block(cfg.sys.bs), precoder_amp(cfg));
        return effective_gain(H, w, f);
    }

    LinkEstimate bs_angle_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                                double sigma2, Rng &rng)
    {
        const SystemGeometry &sys = cfg.sys;
        const ArrayGeometry ac = sys.ac();
        const std::vector<int> comb = subcarrier_comb(l, sys.links(), sys.bs.K);
        const int I = cfg.pat_bs.size();
        const double T = sys.bs.t_sym();

        UpaVector p = unit_block_beam(prior.ac, ac, ac_block(sys, l));
        CompensationPair cp{cfg.ttdu, cfg.ttdu, prior.bs, prior.ac, cfg.grp_bs, cfg.grp_ac};

        LinkEstimate est;
        est.amp_bs.resize(comb.size());
        CMat Y(I, Eigen::Index(comb.size()));
        for (size_t j = 0; j < comb.size(); ++j)
        {
            int k = comb[j];
            Rank1 H = apply_pair(ul_channel(lp, sys, k, 1, cfg.channel), cp, sys.bs, ac, k);
            cd tx = H.c * H.tx.dot(p);
            CVec r = selection_response(cfg.pat_bs, prior.bs, sys.bs, full_block(sys.bs), H.rx);
            est.amp_bs[j] = tx * r[0];
            double dpsi = doppler_at(lp, k, sys.bs, cfg.channel) - tx_doppler(cfg, prior.psi_z, k);
            for (int m = 0; m < I; ++m)
            {
                cd g = tx * r[m];
                if (cfg.angle_stage_doppler)
                    g *= std::polar(1.0, 2.0 * pi * dpsi * m * T);
                cd s = pilot(rng);
                Y(m, Eigen::Index(j)) = (g * s + noise(rng, sigma2)) / s;
            }
        }
        est.bs_iter = estimate_angles(Y, comb, cfg.pat_bs, prior.bs, ttd_or_zero(cfg, prior.bs), sys.bs,
                                      cfg.i_max_bs, cfg.channel.beam_squint);
        est.bs = est.bs_iter.back();
        return est;
    }

    void ac_angle_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                        double sigma2, Rng &rng, LinkEstimate &est)
    {
        const SystemGeometry &sys = cfg.sys;
        const ArrayGeometry ac = sys.ac();
        const std::vector<int> comb = subcarrier_comb(l, sys.links(), sys.bs.K);
        const int I = cfg.pat_ac.size();
        const double T = sys.bs.t_sym();

        UpaVector f = block_beam(est.bs, sys.bs, full_block(sys.bs), precoder_amp(cfg));
        est.amp_ac.resize(comb.size());
        CMat Y(I, Eigen::Index(comb.size()));
        for (size_t j = 0; j < comb.size(); ++j)
        {
            int k = comb[j];
            Rank1 H = compensated_dl(cfg, lp, prior.ac, est.bs, k);
            cd tx = H.c * H.tx.dot(f);
            CVec r = selection_response(cfg.pat_ac, prior.ac, ac, ac_block(sys, l), H.rx);
            est.amp_ac[j] = tx * r[0];
            double dpsi = doppler_at(lp, k, sys.bs, cfg.channel) - tx_doppler(cfg, prior.psi_z, k);
            for (int m = 0; m < I; ++m)
            {
                cd g = tx * r[m];
                if (cfg.angle_stage_doppler)
                    g *= std::polar(1.0, 2.0 * pi * dpsi * m * T);
                cd s = pilot(rng);
                Y(m, Eigen::Index(j)) = (g * s + noise(rng, sigma2)) / s;
            }
        }
        est.ac_iter = estimate_angles(Y, comb, cfg.pat_ac, prior.ac, ttd_or_zero(cfg, prior.ac), sys.ac_sub,
                                      cfg.i_max_ac, cfg.channel.beam_squint);
        est.ac = est.ac_iter.back();
    }

    void doppler_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                       double sigma2, Rng &rng, LinkEstimate &est)
    {
        const SystemGeometry &sys = cfg.sys;
        const std::vector<int> comb = subcarrier_comb(l, sys.links(), sys.bs.K);
        const double T = sys.bs.t_sym();
        BeamState b = est.data_beams();

        est.amp_do.resize(comb.size());
        CMat Y(cfg.n_do, Eigen::Index(comb.size()));
        for (size_t j = 0; j < comb.size(); ++j)
        {
            int k = comb[j];
            cd g = dl_data_gain(cfg, lp, l, b, b, k);
            est.amp_do[j] = g;
            double psi = doppler_at(lp, k, sys.bs, cfg.channel);
            double psi_tx = tx_doppler(cfg, prior.psi_z, k);
            for (int m = 0; m < cfg.n_do; ++m)
            {
                cd s = pilot(rng);
                cd y = g * std::polar(1.0, 2.0 * pi * (psi - psi_tx) * m * T) * s + noise(rng, sigma2);
                Y(m, Eigen::Index(j)) = y / s;
            }
        }
        est.psi_iter = estimate_doppler(Y, comb, prior.psi_z, prior.psi_z * sys.bs.lambda(), sys.bs, cfg.i_max_do,
                                        cfg.channel.doppler_squint);
        est.psi_z = est.psi_iter.back();
    }

    void delay_gain_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, double sigma2, Rng &rng,
                          LinkEstimate &est)
    {
        const SystemGeometry &sys = cfg.sys;
        const std::vector<int> comb = subcarrier_comb(l, sys.links(), sys.bs.K);
        const double T = sys.bs.t_sym();
        BeamState b = est.data_beams();

        CMat Y(Eigen::Index(comb.size()), cfg.n_de);
        std::vector<cd> g(comb.size());
        double energy = 0.0;
        for (size_t j = 0; j < comb.size(); ++j)
        {
            int k = comb[j];
            g[j] = dl_data_gain(cfg, lp, l, b, b, k);
            energy += std::norm(g[j]);
            double dpsi = doppler_at(lp, k, sys.bs, cfg.channel) - tx_doppler(cfg, est.psi_z, k);
            for (int n = 0; n < cfg.n_de; ++n)
            {
                cd s = pilot(rng);
                cd y = g[j] * std::polar(1.0, 2.0 * pi * dpsi * n * T) * s + noise(rng, sigma2);
                Y(Eigen::Index(j), n) = y / s;
            }
        }
        est.amp_de.assign(cfg.n_de, cd(std::sqrt(energy / double(comb.size()))));

        DelayEstimate d = estimate_delay(Y, sys.links(), sys.bs);
        est.tau = d.tau;
        est.delay_omega = d.omega;

        // Gain from the reconstructed model with unit path gain
        LinkEstimate unit = est;
        unit.alpha = 1.0;
        LinkParams model = unit.as_params(sys.bs);
        CMat M(Y.rows(), Y.cols());
        for (size_t j = 0; j < comb.size(); ++j)
            M.row(Eigen::Index(j)).setConstant(dl_data_gain(cfg, model, l, b, b, comb[j]));
        est.alpha = estimate_gain(Y, M);
    }

    std::vector<LinkEstimate> estimate_links(const PipelineConfig &cfg, const std::vector<LinkParams> &truth,
                                             const std::vector<RoughEstimate> &priors, const StageSnr &snr,
                                             Rng &rng)
    {
        cfg.validate();
        const int L = cfg.sys.links();
        if (int(truth.size()) != L || int(priors.size()) != L)
            throw std::invalid_argument("estimate_links: one parameter set and prior per link required");
        auto var = [&](double db)
        { return snr.noiseless ? 0.0 : noise_variance(db); };

        std::vector<LinkEstimate> est(L);
        for (int l = 1; l <= L; ++l)
            est[l - 1] = bs_angle_stage(cfg, truth[l - 1], l, priors[l - 1], var(snr.bs_angles), rng);
        for (int l = 1; l <= L; ++l)
            ac_angle_stage(cfg, truth[l - 1], l, priors[l - 1], var(snr.ac_angles), rng, est[l - 1]);
        for (int l = 1; l <= L; ++l)
            doppler_stage(cfg, truth[l - 1], l, priors[l - 1], var(snr.doppler), rng, est[l - 1]);
        for (int l = 1; l <= L; ++l)
            delay_gain_stage(cfg, truth[l - 1], l, var(snr.delay), rng, est[l - 1]);
        return est;
    }
}
