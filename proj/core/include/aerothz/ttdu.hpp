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

#ifndef AEROTHZ_TTDU_H
#define AEROTHZ_TTDU_H

#include "aerothz/channel.hpp"

#include <string>

namespace aerothz
{
    enum class TtduMode
    {
        none,    // Phase shifters only
        ideal,   // One true-time-delay unit per element
        grouped  // One true-time-delay unit per m_h x m_v group
    };

    struct GroupSpec
    {
        int m_h = 5;
        int m_v = 5;
    };

    // Squint compensation vectors at subcarrier k. The compensated channel is
    // diag(conj(c_rx)) * H * diag(c_tx).
    UpaVector ideal_ttdu(VirtualAngles va, const ArrayGeometry &geo, int k);
    UpaVector gttdu(VirtualAngles va, const ArrayGeometry &geo, GroupSpec grp, int k);
    UpaVector ttdu_vector(TtduMode mode, VirtualAngles va, const ArrayGeometry &geo, GroupSpec grp, int k);

    // Compensation applied on both ends of one channel
    struct CompensationPair
    {
        TtduMode mode_rx = TtduMode::none;
        TtduMode mode_tx = TtduMode::none;
        VirtualAngles rx;  // Angles programmed into the receive-side units
        VirtualAngles tx;  // Angles programmed into the transmit-side units
        GroupSpec grp_rx;
        GroupSpec grp_tx;
    };

    Rank1 apply_pair(const Rank1 &H, const CompensationPair &cp, const ArrayGeometry &geo_rx,
                     const ArrayGeometry &geo_tx, int k);

    TtduMode parse_ttdu_mode(const std::string &s);
    std::string to_string(TtduMode m);
}

#endif
