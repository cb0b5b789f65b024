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

#include "aerothz/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aerothz
{
    void PatternSpec::validate() const
    {
        if (i_h < 1 || i_v < 1 || omega < 1)
            throw std::invalid_argument("PatternSpec: sizes and spacing must be positive");
        if (i_h < 2 && i_v < 2)
            throw std::invalid_argument("PatternSpec: equivalent array needs at least two elements along one axis");
    }

    ArrayBlock full_block(const ArrayGeometry &geo)
    {
        return {0, 0, geo.n_h, geo.n_v};
    }

    int subarray_size(int N, int I, int omega)
    {
        int M = N - omega * (I - 1);
        if (M < 1)
            throw std::invalid_argument("subarray_size: pattern does not fit the array");
        return M;
    }

    static void check_block(const ArrayGeometry &geo, const ArrayBlock &blk)
    {
        if (blk.off_h < 0 || blk.off_v < 0 || blk.n_h < 1 || blk.n_v < 1 ||
            blk.off_h + blk.n_h > geo.n_h || blk.off_v + blk.n_v > geo.n_v)
            throw std::invalid_argument("block outside the array");
    }

    // conj(e^{j n steer}) x_n summed over each sliding window of the block, rephased to the window start
    static std::vector<cd> window_dots(const RampVector &x, double steer, int b, int len, int count, int omega)
    {
        int M = subarray_size(len, count, omega);
        int span = omega * (count - 1);
        auto term = [&](int n) {
            for (const auto &s : x.segments())
                if (n >= s.begin && n < s.end)
                    return std::polar(s.amp, s.phase0 + (s.slope - steer) * n);
            return cd(0.0);
        };
        cd total = RampVector(x.size(), {{b, b + len, 1.0, 0.0, steer}}).dot(x);
        std::vector<cd> pre(span + 1, cd(0.0)), suf(span + 1, cd(0.0));
        for (int s = 0; s < span; ++s)
            pre[s + 1] = pre[s] + term(b + s);
        // suf[s] covers [b + s + M, b + len)
        for (int s = span; s > 0; --s)
            suf[s - 1] = suf[s] + term(b + s - 1 + M);
        std::vector<cd> out(static_cast<size_t>(count));
        double a = 1.0 / std::sqrt(double(M));
        for (int i = 0; i < count; ++i)
        {
            int sh = omega * i;
            out[i] = a * std::polar(1.0, sh * steer) * (total - pre[sh] - suf[sh]);
        }
        return out;
    }

    UpaVector selection_beam(const PatternSpec &pat, int m, VirtualAngles steer, const ArrayGeometry &geo,
                             const ArrayBlock &blk)
    {
        pat.validate();
        check_block(geo, blk);
        if (m < 1 || m > pat.size())
            throw std::invalid_argument("selection_beam: pattern index out of range");
        int mh = subarray_size(blk.n_h, pat.i_h, pat.omega);
        int mv = subarray_size(blk.n_v, pat.i_v, pat.omega);
        int ih = (m - 1) % pat.i_h, iv = (m - 1) / pat.i_h;
        int sh = pat.omega * ih, sv = pat.omega * iv;
        int bh = blk.off_h + sh, bv = blk.off_v + sv;
        RampVector h(geo.n_h, {{bh, bh + mh, 1.0 / std::sqrt(double(mh)), -sh * steer.mu, steer.mu}});
        RampVector v(geo.n_v, {{bv, bv + mv, 1.0 / std::sqrt(double(mv)), -sv * steer.nu, steer.nu}});
        return {h, v};
    }

    CVec selection_response(const PatternSpec &pat, VirtualAngles steer, const ArrayGeometry &geo,
                            const ArrayBlock &blk, const UpaVector &x)
    {
        pat.validate();
        check_block(geo, blk);
        if (x.h.size() != geo.n_h || x.v.size() != geo.n_v)
            throw std::invalid_argument("selection_response: vector does not match the array");
        std::vector<cd> hd = window_dots(x.h, steer.mu, blk.off_h, blk.n_h, pat.i_h, pat.omega);
        std::vector<cd> vd = window_dots(x.v, steer.nu, blk.off_v, blk.n_v, pat.i_v, pat.omega);
        CVec out(pat.size());
        for (int iv = 0; iv < pat.i_v; ++iv)
            for (int ih = 0; ih < pat.i_h; ++ih)
                out[iv * pat.i_h + ih] = hd[ih] * vd[iv];
        return out;
    }

    UpaVector block_beam(VirtualAngles steer, const ArrayGeometry &geo, const ArrayBlock &blk, double amp)
    {
        check_block(geo, blk);
        RampVector h(geo.n_h, {{blk.off_h, blk.off_h + blk.n_h, 1.0, 0.0, steer.mu}});
        RampVector v(geo.n_v, {{blk.off_v, blk.off_v + blk.n_v, amp, 0.0, steer.nu}});
        return {h, v};
    }

    UpaVector unit_block_beam(VirtualAngles steer, const ArrayGeometry &geo, const ArrayBlock &blk)
    {
        return block_beam(steer, geo, blk, 1.0 / std::sqrt(double(blk.n_h) * blk.n_v));
    }
}
