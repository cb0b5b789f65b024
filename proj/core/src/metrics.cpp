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

#include "aerothz/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace aerothz
{
    void RunningStat::add(double x)
    {
        ++n_;
        double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
    }

    void RunningStat::merge(const RunningStat &o)
    {
        if (o.n_ == 0)
            return;
        if (n_ == 0)
        {
            *this = o;
            return;
        }
        long n = n_ + o.n_;
        double d = o.mean_ - mean_;
        mean_ += d * double(o.n_) / double(n);
        m2_ += o.m2_ + d * d * double(n_) * double(o.n_) / double(n);
        n_ = n;
    }

    double frobenius2(const Rank1 &H)
    {
        return std::norm(H.c) * H.rx.norm2() * H.tx.norm2();
    }

    double frobenius2_diff(const Rank1 &H, const Rank1 &Hh)
    {
        // ||c u w^H - c^ u^ w^^H||^2 with the cross term through inner products
        cd cross = H.c * std::conj(Hh.c) * Hh.rx.dot(H.rx) * H.tx.dot(Hh.tx);
        double e = frobenius2(H) + frobenius2(Hh) - 2.0 * cross.real();
        return std::max(e, 0.0);
    }

    void ErrorEnergy::add(const Rank1 &H, const Rank1 &Hh)
    {
        err += frobenius2_diff(H, Hh);
        ref += frobenius2(H);
    }

    double ErrorEnergy::ratio() const
    {
        if (!(ref > 0.0))
            throw std::domain_error("nmse: zero-norm channel");
        return err / ref;
    }

    double nmse(const std::vector<LinkParams> &truth, const std::vector<LinkParams> &est,
                const std::vector<int> &subcarriers, const SystemGeometry &sys, const ChannelOptions &opt, int n)
    {
        if (truth.size() != est.size())
            throw std::invalid_argument("nmse: link count mismatch");
        ErrorEnergy acc;
        for (size_t l = 0; l < truth.size(); ++l)
            for (int k : subcarriers)
                acc.add(dl_channel(truth[l], sys, k, n, opt), dl_channel(est[l], sys, k, n, opt));
        return acc.ratio();
    }

    double nmse_db(double ratio)
    {
        if (ratio <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return to_db(ratio);
    }

    RateResult ase_and_throughput(const std::vector<std::vector<double>> &gain2,
                                  const std::vector<std::vector<double>> &int_noise, double f_s, int K)
    {
        if (gain2.size() != int_noise.size())
            throw std::invalid_argument("ase_and_throughput: shape mismatch");
        RateResult r;
        double sum = 0.0;
        for (size_t l = 0; l < gain2.size(); ++l)
        {
            if (gain2[l].size() != int_noise[l].size())
                throw std::invalid_argument("ase_and_throughput: shape mismatch");
            for (size_t k = 0; k < gain2[l].size(); ++k)
                sum += std::log2(1.0 + gain2[l][k] / int_noise[l][k]);
        }
        r.ase = sum / double(K);
        r.throughput = sum * f_s / double(K);
        return r;
    }

    std::vector<int> occupied_subcarriers(int occupied, int K)
    {
        if (occupied < 1 || occupied > K)
            throw std::invalid_argument("occupied_subcarriers: count out of range");
        int first = (K - occupied) / 2 + 1;
        std::vector<int> ks(occupied);
        for (int i = 0; i < occupied; ++i)
            ks[i] = first + i;
        return ks;
    }

    void dl_sinr_terms(const PipelineConfig &cfg, const std::vector<LinkParams> &truth,
                       const std::vector<BeamState> &beams, const std::vector<int> &subcarriers, double sigma2,
                       std::vector<std::vector<double>> &gain2, std::vector<std::vector<double>> &int_noise)
    {
        const size_t L = truth.size();
        if (beams.size() != L)
            throw std::invalid_argument("dl_sinr_terms: one beam state per link required");
        gain2.assign(L, std::vector<double>(subcarriers.size()));
        int_noise.assign(L, std::vector<double>(subcarriers.size()));
        for (size_t l = 0; l < L; ++l)
            for (size_t j = 0; j < subcarriers.size(); ++j)
            {
                int k = subcarriers[j];
                double in = sigma2;
                for (size_t t = 0; t < L; ++t)
                {
                    double p = std::norm(dl_data_gain(cfg, truth[t], int(l) + 1, beams[l], beams[t], k));
                    if (t == l)
                        gain2[l][j] = p;
                    else
                        in += p;
                }
                int_noise[l][j] = in;
            }
    }

    const char *const csv_header = "metric,variant,snr_db,omega,f_s_hz,ti,array_n,occupied,value,trials,variance,status";

    std::string format_number(double x)
    {
        if (std::isnan(x))
            return "nan";
        if (std::isinf(x))
            return x > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", x);
        return buf;
    }

    namespace
    {
        template <class T>
        std::string opt(const std::optional<T> &v)
        {
            if (!v)
                return "";
            if constexpr (std::is_integral_v<T>)
                return std::to_string(*v);
            else
                return format_number(*v);
        }
    }

    void write_csv(std::ostream &os, const std::vector<MetricRecord> &rows)
    {
        os << csv_header << '\n';
        for (const MetricRecord &r : rows)
        {
            const char *status = r.diverged ? "diverged" : std::isfinite(r.value) ? "ok" : "sentinel";
            os << r.metric << ',' << r.variant << ',' << opt(r.snr_db) << ',' << opt(r.omega) << ','
               << opt(r.f_s_hz) << ',' << opt(r.ti) << ',' << opt(r.array_n) << ',' << opt(r.occupied) << ','
               << format_number(r.value) << ',' << r.trials << ',' << format_number(r.variance) << ','
               << status << '\n';
        }
    }
}
