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

#ifndef AEROTHZ_DADD_H
#define AEROTHZ_DADD_H

#include "aerothz/codec.hpp"

#include <vector>

namespace aerothz
{
    struct DaddConfig
    {
        double epsilon = 0.2;     // Relative change threshold of the monitor
        int k_tilde_max = 1024;   // Tolerated number of flagged subcarriers
        bool any_link = false;    // Re-estimate when any link fails (default: all links)
    };

    // Number of subcarriers whose estimate moved by more than (epsilon / K) sum |h_prev|
    int monitor_count(const CVec &h_new, const CVec &h_prev, double epsilon);

    // Decision-directed update on one link: equalize with h_prev, decode, re-encode, divide out
    struct DaddUpdate
    {
        CVec h;          // New estimate
        Bits info;       // Decoded information bits
        int flagged = 0; // Monitor count against h_prev
    };
    DaddUpdate dadd_update(const CVec &y, const CVec &h_prev, const SymbolCodec &codec, double epsilon);

    // Tracker over L links
    class DaddTracker
    {
    public:
        DaddTracker(std::vector<CVec> initial, DaddConfig cfg);

        // y[l] is the received data symbol of link l; returns the decoded bits per link
        std::vector<Bits> step(const std::vector<CVec> &y, const SymbolCodec &codec);

        const CVec &estimate(int l) const { return h_.at(size_t(l)); }
        const std::vector<int> &flagged() const { return flagged_; }
        int links() const { return int(h_.size()); }
        bool valid() const; // False once the monitor requests pilot-aided re-estimation
        void reset(std::vector<CVec> initial);

    private:
        std::vector<CVec> h_;
        std::vector<int> flagged_;
        DaddConfig cfg_;
    };
}

#endif
