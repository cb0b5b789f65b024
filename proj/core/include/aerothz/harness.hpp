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

#ifndef AEROTHZ_HARNESS_H
#define AEROTHZ_HARNESS_H

#include "aerothz/dadd.hpp"
#include "aerothz/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aerothz
{
    // One estimator configuration compared in a sweep
    struct Variant
    {
        std::string name;
        TtduMode ttdu = TtduMode::grouped;
        int i_max_bs = 2;
        int i_max_ac = 2;
        int i_max_do = 2;
    };

    // SNR of one pilot stage: follows the sweep point unless fixed
    struct StageSnrSpec
    {
        std::optional<double> bs_angles;
        std::optional<double> ac_angles;
        std::optional<double> doppler;
        std::optional<double> delay;
        StageSnr at(double snr_db, bool noiseless) const;
    };

    enum class SignMode
    {
        per_step,       // Fresh random sign every TI
        per_trajectory  // One sign per parameter and trial
    };

    struct ExperimentConfig
    {
        std::uint64_t seed = 1;
        int trials = 20;
        int threads = 0; // 0: hardware concurrency
        std::string output = "out";
        std::vector<std::string> experiments{"initial"};

        Scenario scenario;
        SystemGeometry geometry;
        PatternSpec pattern_bs;
        PatternSpec pattern_ac;
        std::vector<int> omegas{1}; // Spacings of the sparse pilot-aided stage
        std::optional<double> prior_snr_db; // SNR of the estimate feeding the sparse stage; unset: the sweep SNR
        GroupSpec group_bs;
        GroupSpec group_ac;
        ChannelOptions channel;
        std::vector<Variant> variants;

        std::vector<double> snr_db{0.0};
        StageSnrSpec stage_snr;
        bool noiseless = false;
        std::vector<double> bandwidths_hz; // Empty: geometry f_s only
        std::vector<int> array_sizes;      // Square BS and aircraft sub-array size; empty: geometry as given
        std::vector<int> occupied;         // Occupied subcarrier counts of the throughput sweep

        int n_do = 6;
        int n_de = 10;
        int n_c = 70;
        int n_ti = 20;
        int dadd_symbols = 1; // Data symbols decoded per TI (the last ones of the TI)
        double epsilon = 0.2;
        int k_tilde_max = 1024;
        bool any_link = false;
        int tracking_omega = 4;
        std::uint64_t interleaver_seed = 7;
        bool dl_interference = true;

        double rough_angle_deg = 5.0;
        double rough_doppler_rel = 0.01;
        SignMode signs = SignMode::per_step;
        int nmse_stride = 8; // Subcarrier decimation of NMSE sums
        bool unit_norm_precoder = false;
        bool angle_stage_doppler = false;

        void validate() const;
        PipelineConfig pipeline(const Variant &v) const;
    };

    ExperimentConfig parse_config(const std::string &json_text);
    ExperimentConfig load_config(const std::string &path);
    std::string config_json(const ExperimentConfig &cfg); // Fully resolved, with interpretation notes

    // Monte-Carlo sweeps; deterministic given seed regardless of thread count
    std::vector<MetricRecord> run_sweep(const ExperimentConfig &cfg);

    // Bounds only (no estimation noise): sqrt of mean CRLB per SNR point
    std::vector<MetricRecord> crlb_sweep(const ExperimentConfig &cfg);

    // Writes <output>/metrics.csv and <output>/config.json
    void write_outputs(const ExperimentConfig &cfg, const std::vector<MetricRecord> &rows);
}

#endif
