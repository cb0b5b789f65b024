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

#include "aerothz/dadd.hpp"

#include <stdexcept>

namespace aerothz
{
    int monitor_count(const CVec &h_new, const CVec &h_prev, double epsilon)
    {
        if (h_new.size() != h_prev.size() || h_prev.size() == 0)
            throw std::invalid_argument("monitor_count: size mismatch");
        double thr = epsilon / double(h_prev.size()) * h_prev.cwiseAbs().sum();
        int n = 0;
        for (Eigen::Index k = 0; k < h_new.size(); ++k)
            n += std::abs(h_new[k] - h_prev[k]) > thr;
        return n;
    }

    DaddUpdate dadd_update(const CVec &y, const CVec &h_prev, const SymbolCodec &codec, double epsilon)
    {
        if (y.size() != h_prev.size() || y.size() != codec.subcarriers())
            throw std::invalid_argument("dadd_update: size mismatch");
        CVec eq = h_prev.conjugate().cwiseProduct(y);
        DaddUpdate u;
        u.info = codec.decode(eq);
        CVec s = codec.encode(u.info);
        u.h = y.cwiseQuotient(s);
        u.flagged = monitor_count(u.h, h_prev, epsilon);
        return u;
    }

    DaddTracker::DaddTracker(std::vector<CVec> initial, DaddConfig cfg) : cfg_(cfg)
    {
        if (cfg.epsilon <= 0.0 || cfg.k_tilde_max < 0)
            throw std::invalid_argument("DaddTracker: invalid monitor settings");
        reset(std::move(initial));
    }

    void DaddTracker::reset(std::vector<CVec> initial)
    {
        if (initial.empty())
            throw std::invalid_argument("DaddTracker: need at least one link");
        h_ = std::move(initial);
        flagged_.assign(h_.size(), 0);
    }

    std::vector<Bits> DaddTracker::step(const std::vector<CVec> &y, const SymbolCodec &codec)
    {
        if (y.size() != h_.size())
            throw std::invalid_argument("DaddTracker::step: link count mismatch");
        std::vector<Bits> bits(h_.size());
        for (size_t l = 0; l < h_.size(); ++l)
        {
            DaddUpdate u = dadd_update(y[l], h_[l], codec, cfg_.epsilon);
            h_[l] = std::move(u.h);
            flagged_[l] = u.flagged;
            bits[l] = std::move(u.info);
        }
        return bits;
    }

    bool DaddTracker::valid() const
    {
        int bad = 0;
        for (int f : flagged_)
            bad += f > cfg_.k_tilde_max;
        return cfg_.any_link ? bad == 0 : bad < int(flagged_.size());
    }
}
