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

#include "aerothz/ttdu.hpp"

#include <stdexcept>
#include <string>

namespace aerothz
{
    UpaVector ideal_ttdu(VirtualAngles va, const ArrayGeometry &geo, int k)
    {
        return squint_upa_ramp(va, k, geo);
    }

    // Every element of a group gets the squint phase of the group centre
    static RampVector grouped_axis(double angle, int N, int m, double delta_ratio)
    {
        if (m < 1 || N % m != 0)
            throw std::invalid_argument("gttdu: group size must divide the array dimension");
        int centre = (m - 1) / 2;
        std::vector<RampSegment> segs;
        segs.reserve(N / m);
        for (int g = 0; g < N; g += m)
            segs.push_back({g, g + m, 1.0, delta_ratio * double(g + centre) * angle, 0.0});
        return RampVector(N, std::move(segs));
    }

    UpaVector gttdu(VirtualAngles va, const ArrayGeometry &geo, GroupSpec grp, int k)
    {
        if (k < 1 || k > geo.K)
            throw std::invalid_argument("gttdu: subcarrier index out of range");
        double dr = subcarrier_offset(k, geo.K) * geo.squint_ratio();
        return {grouped_axis(va.mu, geo.n_h, grp.m_h, dr), grouped_axis(va.nu, geo.n_v, grp.m_v, dr)};
    }

    UpaVector ttdu_vector(TtduMode mode, VirtualAngles va, const ArrayGeometry &geo, GroupSpec grp, int k)
    {
        switch (mode)
        {
        case TtduMode::ideal:
            return ideal_ttdu(va, geo, k);
        case TtduMode::grouped:
            return gttdu(va, geo, grp, k);
        default:
            return {RampVector::ramp(geo.n_h, 0.0), RampVector::ramp(geo.n_v, 0.0)};
        }
    }

    Rank1 apply_pair(const Rank1 &H, const CompensationPair &cp, const ArrayGeometry &geo_rx,
                     const ArrayGeometry &geo_tx, int k)
    {
        if (H.rx.size() != geo_rx.size() || H.tx.size() != geo_tx.size())
            throw std::invalid_argument("apply_pair: geometry does not match the channel");
        Rank1 out = H;
        if (cp.mode_rx != TtduMode::none)
            out.rx = H.rx.hadamard(ttdu_vector(cp.mode_rx, cp.rx, geo_rx, cp.grp_rx, k).conj());
        if (cp.mode_tx != TtduMode::none)
            out.tx = H.tx.hadamard(ttdu_vector(cp.mode_tx, cp.tx, geo_tx, cp.grp_tx, k).conj());
        return out;
    }

    TtduMode parse_ttdu_mode(const std::string &s)
    {
        if (s == "none")
            return TtduMode::none;
        if (s == "ideal")
            return TtduMode::ideal;
        if (s == "grouped" || s == "gttdu")
            return TtduMode::grouped;
        throw std::invalid_argument("unknown TTDU mode '" + s + "'");
    }

    std::string to_string(TtduMode m)
    {
        switch (m)
        {
        case TtduMode::ideal:
            return "ideal";
        case TtduMode::grouped:
            return "gttdu";
        default:
            return "none";
        }
    }
}
