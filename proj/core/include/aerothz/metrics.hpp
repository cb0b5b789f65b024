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

#ifndef AEROTHZ_METRICS_H
#define AEROTHZ_METRICS_H

#include "aerothz/pipeline.hpp"

#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aerothz
{
    // Streaming mean / variance (Welford); merge() makes accumulation order-independent up to rounding
    class RunningStat
    {
    public:
        void add(double x);
        void merge(const RunningStat &o);
        long count() const { return n_; }
        double mean() const { return mean_; }
        double variance() const { return n_ > 1 ? m2_ / double(n_ - 1) : 0.0; }

    private:
        long n_ = 0;
        double mean_ = 0.0;
        double m2_ = 0.0;
    };

    inline double to_db(double x) { return 10.0 * std::log10(x); }

    // Sum over subcarriers of ||H_k - H^_k||_F^2 and ||H_k||_F^2 for rank-1 channels
    struct ErrorEnergy
    {
        double err = 0.0;
        double ref = 0.0;
        void add(const Rank1 &H, const Rank1 &Hh);
        double ratio() const;
    };

    double frobenius2(const Rank1 &H);
    double frobenius2_diff(const Rank1 &H, const Rank1 &Hh);

    // NMSE of the DL channel of symbol n over the given subcarriers. Returns the ratio (not dB);
    // zero means an exact estimate.
    double nmse(const std::vector<LinkParams> &truth, const std::vector<LinkParams> &est,
                const std::vector<int> &subcarriers, const SystemGeometry &sys, const ChannelOptions &opt, int n = 2);
    // In dB; -inf for an exact estimate
    double nmse_db(double ratio);

    struct RateResult
    {
        double ase = 0.0;        // [bit/s/Hz]
        double throughput = 0.0; // [bit/s]
    };

    // gain(l, k) and interference_plus_noise(l, k) per link and occupied subcarrier (row per link)
    RateResult ase_and_throughput(const std::vector<std::vector<double>> &gain2,
                                  const std::vector<std::vector<double>> &int_noise, double f_s, int K);

    // Centred block of `occupied` subcarriers out of K (1-based)
    std::vector<int> occupied_subcarriers(int occupied, int K);

    // Per-link SINR terms for DL data with the given beams: interference from the other BSs through the
    // combiners of each link. Rows per link, columns per subcarrier.
    void dl_sinr_terms(const PipelineConfig &cfg, const std::vector<LinkParams> &truth,
                       const std::vector<BeamState> &beams, const std::vector<int> &subcarriers, double sigma2,
                       std::vector<std::vector<double>> &gain2, std::vector<std::vector<double>> &int_noise);

    struct MetricRecord
    {
        std::string metric;
        std::string variant;
        std::optional<double> snr_db;
        std::optional<int> omega;
        std::optional<double> f_s_hz;
        std::optional<int> ti;
        std::optional<int> array_n;
        std::optional<int> occupied;
        double value = 0.0;
        long trials = 0;
        double variance = 0.0;
        bool diverged = false;
    };

    // Fixed column schema
    extern const char *const csv_header;
    void write_csv(std::ostream &os, const std::vector<MetricRecord> &rows);
    std::string format_number(double x);
}

#endif
