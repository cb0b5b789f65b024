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

#ifndef AEROTHZ_CHANNEL_H
#define AEROTHZ_CHANNEL_H

#include "aerothz/array_manifold.hpp"

namespace aerothz
{
    struct ChannelOptions
    {
        bool beam_squint = true;    // Frequency-dependent array response
        bool doppler_squint = true; // Frequency-dependent Doppler
    };

    // Parameters of one BS-aircraft link
    struct LinkParams
    {
        PhysicalAngles bs;    // Angles seen by the BS array
        PhysicalAngles ac;    // Angles seen by the aircraft array
        cd alpha = 1.0;       // Path gain (transmit power and large-scale gain folded in)
        double tau = 0.0;     // Delay [s]
        double psi_z = 0.0;   // Doppler at the carrier [Hz]
        double v = 0.0;       // Radial velocity [m/s], psi_z = v f_z / c
    };

    // Aircraft array built from sub_h x sub_v identical sub-arrays; sub-array l serves link l.
    struct SystemGeometry
    {
        ArrayGeometry bs;      // Each BS array
        ArrayGeometry ac_sub;  // One aircraft sub-array
        int sub_h = 1;
        int sub_v = 2;

        int links() const { return sub_h * sub_v; }
        ArrayGeometry ac() const; // Full aircraft array
        int ac_offset_h(int l) const; // 0-based first horizontal element of sub-array l (1-based)
        int ac_offset_v(int l) const;
        void validate() const;
    };

    // H = c * rx * tx^H
    struct Rank1
    {
        cd c = 0.0;
        UpaVector rx;
        UpaVector tx;

        CMat dense() const;
    };

    double doppler_at(const LinkParams &lp, int k, const ArrayGeometry &geo, const ChannelOptions &opt);

    // alpha * exp(j 2 pi psi_k (n-1) T_sym) * exp(-j 2 pi ((k-1)/K - 1/2) f_s tau)
    cd channel_coeff(const LinkParams &lp, int k, int n, const ArrayGeometry &geo, const ChannelOptions &opt);

    // Steering times squint vector of one array at subcarrier k
    UpaVector array_response(VirtualAngles va, int k, const ArrayGeometry &geo, const ChannelOptions &opt);

    // Downlink (BS -> aircraft) and uplink channels at subcarrier k of symbol n
    Rank1 dl_channel(const LinkParams &lp, const SystemGeometry &sys, int k, int n, const ChannelOptions &opt);
    Rank1 ul_channel(const LinkParams &lp, const SystemGeometry &sys, int k, int n, const ChannelOptions &opt);

    // comb^H H prec
    inline cd effective_gain(const Rank1 &H, const UpaVector &comb, const UpaVector &prec)
    {
        return H.c * comb.dot(H.rx) * H.tx.dot(prec);
    }
}

#endif
