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

#include "aerothz/channel.hpp"

#include <stdexcept>

namespace aerothz
{
    ArrayGeometry SystemGeometry::ac() const
    {
        ArrayGeometry g = ac_sub;
        g.n_h = ac_sub.n_h * sub_h;
        g.n_v = ac_sub.n_v * sub_v;
        return g;
    }

    int SystemGeometry::ac_offset_h(int l) const
    {
        if (l < 1 || l > links())
            throw std::invalid_argument("SystemGeometry: link index out of range");
        return ((l - 1) % sub_h) * ac_sub.n_h;
    }

    int SystemGeometry::ac_offset_v(int l) const
    {
        if (l < 1 || l > links())
            throw std::invalid_argument("SystemGeometry: link index out of range");
        return ((l - 1) / sub_h) * ac_sub.n_v;
    }

    void SystemGeometry::validate() const
    {
        bs.validate();
        ac_sub.validate();
        if (sub_h < 1 || sub_v < 1)
            throw std::invalid_argument("SystemGeometry: sub-array counts must be positive");
        if (bs.f_z != ac_sub.f_z || bs.f_s != ac_sub.f_s || bs.K != ac_sub.K || bs.n_cp != ac_sub.n_cp)
            throw std::invalid_argument("SystemGeometry: BS and aircraft carriers differ");
    }

    CMat Rank1::dense() const
    {
        return c * rx.dense() * tx.dense().adjoint();
    }

    double doppler_at(const LinkParams &lp, int k, const ArrayGeometry &geo, const ChannelOptions &opt)
    {
        if (!opt.doppler_squint)
            return lp.psi_z;
        return lp.psi_z + lp.v / speed_of_light * subcarrier_offset(k, geo.K) * geo.f_s;
    }

    cd channel_coeff(const LinkParams &lp, int k, int n, const ArrayGeometry &geo, const ChannelOptions &opt)
    {
        if (k < 1 || k > geo.K)
            throw std::invalid_argument("channel_coeff: subcarrier index out of range");
        double ph = 2.0 * pi * doppler_at(lp, k, geo, opt) * (n - 1) * geo.t_sym() -
                    2.0 * pi * subcarrier_offset(k, geo.K) * geo.f_s * lp.tau;
        return lp.alpha * std::polar(1.0, ph);
    }

    UpaVector array_response(VirtualAngles va, int k, const ArrayGeometry &geo, const ChannelOptions &opt)
    {
        if (k < 1 || k > geo.K)
            throw std::invalid_argument("array_response: subcarrier index out of range");
        double g = 1.0 + (opt.beam_squint ? subcarrier_offset(k, geo.K) * geo.squint_ratio() : 0.0);
        return {RampVector::ramp(geo.n_h, g * va.mu), RampVector::ramp(geo.n_v, g * va.nu)};
    }

    Rank1 dl_channel(const LinkParams &lp, const SystemGeometry &sys, int k, int n, const ChannelOptions &opt)
    {
        Rank1 H;
        H.c = channel_coeff(lp, k, n, sys.bs, opt);
        H.rx = array_response(to_virtual(lp.ac), k, sys.ac(), opt);
        H.tx = array_response(to_virtual(lp.bs), k, sys.bs, opt);
        return H;
    }

    Rank1 ul_channel(const LinkParams &lp, const SystemGeometry &sys, int k, int n, const ChannelOptions &opt)
    {
        Rank1 H;
        H.c = channel_coeff(lp, k, n, sys.bs, opt);
        H.rx = array_response(to_virtual(lp.bs), k, sys.bs, opt);
        H.tx = array_response(to_virtual(lp.ac), k, sys.ac(), opt);
        return H;
    }
}
