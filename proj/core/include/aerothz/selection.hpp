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

#ifndef AEROTHZ_SELECTION_H
#define AEROTHZ_SELECTION_H

#include "aerothz/array_manifold.hpp"

namespace aerothz
{
    // Equivalent low-dimensional array of i_h x i_v sub-arrays shifted by omega elements
    struct PatternSpec
    {
        int i_h = 5;
        int i_v = 5;
        int omega = 1;

        int size() const { return i_h * i_v; }
        void validate() const;
    };

    // Rectangular block of a (possibly larger) array: first element and extent
    struct ArrayBlock
    {
        int off_h = 0;
        int off_v = 0;
        int n_h = 0;
        int n_v = 0;
    };

    ArrayBlock full_block(const ArrayGeometry &geo);

    // Sub-array side length N - omega (I - 1), throws when it is not positive
    int subarray_size(int N, int I, int omega);

    // Combiner for pattern element m (1-based, m = (i_v - 1) i_h + i_h): unit norm, steered to `steer`
    // with the phases of the first selected sub-array
    UpaVector selection_beam(const PatternSpec &pat, int m, VirtualAngles steer, const ArrayGeometry &geo,
                             const ArrayBlock &blk);

    // q_m^H x for every pattern element m, evaluated axis by axis
    CVec selection_response(const PatternSpec &pat, VirtualAngles steer, const ArrayGeometry &geo,
                            const ArrayBlock &blk, const UpaVector &x);

    // Beam over a whole block with amplitude `amp` per element
    UpaVector block_beam(VirtualAngles steer, const ArrayGeometry &geo, const ArrayBlock &blk, double amp);

    // Unit-norm beam over a block
    UpaVector unit_block_beam(VirtualAngles steer, const ArrayGeometry &geo, const ArrayBlock &blk);
}

#endif
