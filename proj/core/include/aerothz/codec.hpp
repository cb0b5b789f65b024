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

#ifndef AEROTHZ_CODEC_H
#define AEROTHZ_CODEC_H

#include "aerothz/array_manifold.hpp"

#include <cstdint>
#include <vector>

namespace aerothz
{
    using Bits = std::vector<std::uint8_t>;

    // Rate-1/2 convolutional code, constraint length 7, generators 133 / 171 (octal), zero-tail
    class ConvCode
    {
    public:
        static constexpr int memory = 6;
        Bits encode(const Bits &info) const;  // 2 (n + 6) coded bits
        Bits decode(const Bits &coded) const; // Hard-decision Viterbi, returns n info bits
    };

    // Gray-mapped unit-energy QPSK
    CVec qpsk_modulate(const Bits &bits);
    Bits qpsk_demodulate(const CVec &sym);

    // One OFDM symbol worth of coded QPSK over n_sub subcarriers with a fixed random interleaver
    class SymbolCodec
    {
    public:
        SymbolCodec(int n_sub, std::uint64_t interleaver_seed);

        int info_bits() const { return n_sub_ - ConvCode::memory; }
        int subcarriers() const { return n_sub_; }

        CVec encode(const Bits &info) const;
        Bits decode(const CVec &equalized) const;

    private:
        int n_sub_;
        std::vector<int> perm_; // coded bit i is sent at position perm_[i]
        ConvCode code_;
    };
}

#endif
