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

#ifndef AEROTHZ_PIPELINE_H
#define AEROTHZ_PIPELINE_H

#include "aerothz/estimators.hpp"
#include "aerothz/scenario.hpp"
#include "aerothz/ttdu.hpp"

#include <vector>

namespace aerothz
{
    struct PipelineConfig
    {
        SystemGeometry sys;
        ChannelOptions channel;
        TtduMode ttdu = TtduMode::grouped;
        GroupSpec grp_bs;
        GroupSpec grp_ac;
        PatternSpec pat_bs;
        PatternSpec pat_ac;
        int i_max_bs = 2;
        int i_max_ac = 2;
        int i_max_do = 2;
        int n_do = 6;
        int n_de = 10;
        bool unit_norm_precoder = false;   // Otherwise f = a_BS(mu, nu)
        bool angle_stage_doppler = false;  // Residual Doppler across the angle-stage symbols

        void validate() const;
    };

    // Transmit SNR of each pilot stage [dB]; noiseless switches noise off
    struct StageSnr
    {
        double bs_angles = 0.0;
        double ac_angles = 0.0;
        double doppler = 0.0;
        double delay = 0.0;
        bool noiseless = false;

        static StageSnr all(double db) { return {db, db, db, db, false}; }
    };

    double noise_variance(double snr_db, double sigma_alpha2 = 1.0);

    // Beam and delay-unit settings of one link during a stage
    struct BeamState
    {
        VirtualAngles bs_steer;
        VirtualAngles ac_steer;
        VirtualAngles bs_ttd;
        VirtualAngles ac_ttd;
    };

    struct LinkEstimate
    {
        VirtualAngles bs;
        VirtualAngles ac;
        std::vector<VirtualAngles> bs_iter;
        std::vector<VirtualAngles> ac_iter;
        double psi_z = 0.0;
        std::vector<double> psi_iter;
        double tau = 0.0;
        double delay_omega = 0.0;
        cd alpha = 0.0;

        // Effective per-snapshot amplitudes seen by each estimator (for bounds)
        std::vector<cd> amp_bs;
        std::vector<cd> amp_ac;
        std::vector<cd> amp_do;
        std::vector<cd> amp_de;

        LinkParams as_params(const ArrayGeometry &carrier) const;
        BeamState data_beams() const { return {bs, ac, bs, ac}; }
    };

    // Physical angles from virtual ones, clamped into the visible region (for noisy estimates)
    PhysicalAngles to_physical_clamped(VirtualAngles va);

    // DL gain seen by combiner of link l_rx from BS l_tx: w^H H' f at subcarrier k, symbol 1.
    // `rx` / `tx` give the beam settings of the receiving link and of the transmitting BS.
    cd dl_data_gain(const PipelineConfig &cfg, const LinkParams &lp_tx, int l_rx, const BeamState &rx,
                    const BeamState &tx, int k);

    // Initial estimation (or pilot-aided re-estimation when the patterns are sparse and the priors are
    // previous estimates) of every link, stages in frame order.
    std::vector<LinkEstimate> estimate_links(const PipelineConfig &cfg, const std::vector<LinkParams> &truth,
                                             const std::vector<RoughEstimate> &priors, const StageSnr &snr,
                                             Rng &rng);

    // Individual stages, exposed for experiments that only need part of the frame
    LinkEstimate bs_angle_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                                double sigma2, Rng &rng);
    void ac_angle_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                        double sigma2, Rng &rng, LinkEstimate &est);
    void doppler_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, const RoughEstimate &prior,
                       double sigma2, Rng &rng, LinkEstimate &est);
    void delay_gain_stage(const PipelineConfig &cfg, const LinkParams &lp, int l, double sigma2, Rng &rng,
                          LinkEstimate &est);

    RoughEstimate prior_from(const LinkEstimate &est);
}

#endif
