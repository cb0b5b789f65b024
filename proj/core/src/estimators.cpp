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

#include "aerothz/estimators.hpp"

#include <cmath>
#include <limits>

namespace aerothz
{
    double resolve_ambiguity(double wrapped, double prior, int omega)
    {
        if (omega < 1)
            throw std::invalid_argument("resolve_ambiguity: spacing must be positive");
        double base = wrapped / omega;
        double best = base, best_err = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 2 * omega; ++i)
        {
            double b = -1.0 + double(i) / omega;
            double cand = base + b * pi;
            double err = std::abs(cand - prior);
            if (err < best_err)
                best_err = err, best = cand;
        }
        return best;
    }

    std::vector<VirtualAngles> estimate_angles(const CMat &Y, const std::vector<int> &subcarriers,
                                               const PatternSpec &pat, VirtualAngles prior,
                                               VirtualAngles ttd_angles, const ArrayGeometry &geo, int i_max,
                                               bool squint)
    {
        pat.validate();
        if (i_max < 1)
            throw std::invalid_argument("estimate_angles: i_max must be at least 1");
        if (Y.rows() != pat.size() || Y.cols() != Eigen::Index(subcarriers.size()))
            throw std::invalid_argument("estimate_angles: data does not match pattern / subcarrier list");

        std::vector<VirtualAngles> history;
        CMat Yi = Y;
        for (int it = 1; it <= i_max; ++it)
        {
            if (it > 1)
            {
                // Residual squint across the equivalent array at the previous estimate
                const VirtualAngles &prev = history.back();
                double dmu = pat.omega * (prev.mu - ttd_angles.mu);
                double dnu = pat.omega * (prev.nu - ttd_angles.nu);
                for (Eigen::Index j = 0; j < Y.cols(); ++j)
                {
                    double dr = squint ? subcarrier_offset(subcarriers[j], geo.K) * geo.squint_ratio() : 0.0;
                    for (int iv = 0; iv < pat.i_v; ++iv)
                        for (int ih = 0; ih < pat.i_h; ++ih)
                        {
                            int m = iv * pat.i_h + ih;
                            Yi(m, j) = Y(m, j) * std::polar(1.0, -dr * (ih * dmu + iv * dnu));
                        }
                }
            }
            auto est = unitary_esprit_2d(Yi, pat.i_h, pat.i_v, 1);
            VirtualAngles va;
            va.mu = resolve_ambiguity(est[0].mu, prior.mu, pat.omega);
            va.nu = resolve_ambiguity(est[0].nu, prior.nu, pat.omega);
            history.push_back(va);
        }
        return history;
    }

    double doppler_of(double psi_z, double v, int k, const ArrayGeometry &geo)
    {
        return psi_z + v / speed_of_light * subcarrier_offset(k, geo.K) * geo.f_s;
    }

    std::vector<double> estimate_doppler(const CMat &Y, const std::vector<int> &subcarriers, double psi_rough,
                                         double v_rough, const ArrayGeometry &geo, int i_max, bool squint)
    {
        if (i_max < 0)
            throw std::invalid_argument("estimate_doppler: negative iteration count");
        if (Y.cols() != Eigen::Index(subcarriers.size()))
            throw std::invalid_argument("estimate_doppler: column count does not match subcarriers");
        const double T = geo.t_sym();
        CMat Y0(Y.rows(), Y.cols());
        for (Eigen::Index j = 0; j < Y.cols(); ++j)
        {
            double psi_k = squint ? doppler_of(psi_rough, v_rough, subcarriers[j], geo) : psi_rough;
            for (Eigen::Index m = 0; m < Y.rows(); ++m)
                Y0(m, j) = Y(m, j) * std::polar(1.0, 2.0 * pi * psi_k * double(m) * T);
        }

        std::vector<double> history;
        CMat Yi = Y0;
        for (int it = 0; it <= i_max; ++it)
        {
            if (it > 0)
            {
                double v_hat = squint ? history.back() * geo.lambda() : 0.0;
                for (Eigen::Index j = 0; j < Y.cols(); ++j)
                {
                    double sq = v_hat / speed_of_light * subcarrier_offset(subcarriers[j], geo.K) * geo.f_s;
                    for (Eigen::Index m = 0; m < Y.rows(); ++m)
                        Yi(m, j) = Y0(m, j) * std::polar(1.0, -2.0 * pi * sq * double(m) * T);
                }
            }
            double nu_psi = tls_esprit(Yi, 1)[0];
            history.push_back(nu_psi / (2.0 * pi * T));
        }
        return history;
    }

    DelayEstimate estimate_delay(const CMat &Y, int L, const ArrayGeometry &geo)
    {
        if (L < 1)
            throw std::invalid_argument("estimate_delay: comb stride must be positive");
        DelayEstimate d;
        d.omega = tls_esprit(Y, 1)[0];
        d.tau = -d.omega * geo.K / (2.0 * pi * geo.f_s * L);
        return d;
    }

    bool delay_comb_feasible(int L, int n_cp, int K)
    {
        return L >= 1 && K > 0 && double(L) * n_cp / K < 0.5;
    }

    cd estimate_gain(const CMat &Y, const CMat &model)
    {
        if (Y.rows() != model.rows() || Y.cols() != model.cols() || Y.size() == 0)
            throw std::invalid_argument("estimate_gain: shape mismatch");
        cd acc = 0.0;
        for (Eigen::Index i = 0; i < Y.size(); ++i)
        {
            cd m = model.data()[i];
            if (m == 0.0)
                throw std::invalid_argument("estimate_gain: zero model entry");
            acc += Y.data()[i] / m;
        }
        cd g = acc / double(Y.size());
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            throw EstimationError("gain", "non-finite gain");
        return g;
    }

    std::vector<int> subcarrier_comb(int l, int L, int K)
    {
        if (L < 1 || l < 1 || l > L || K < 1)
            throw std::invalid_argument("subcarrier_comb: invalid link or stride");
        std::vector<int> out;
        for (int k = l; k <= K; k += L)
            out.push_back(k);
        return out;
    }
}
