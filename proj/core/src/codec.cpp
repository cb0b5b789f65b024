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

#include "aerothz/codec.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace aerothz
{
    static constexpr unsigned g0 = 0133, g1 = 0171;

    static inline int parity(unsigned x)
    {
        return __builtin_parity(x);
    }

    Bits ConvCode::encode(const Bits &info) const
    {
        Bits out;
        out.reserve(2 * (info.size() + memory));
        unsigned reg = 0;
        auto push = [&](unsigned b)
        {
            reg = ((reg << 1) | (b & 1u)) & 0x7Fu;
            out.push_back(std::uint8_t(parity(reg & g0)));
            out.push_back(std::uint8_t(parity(reg & g1)));
        };
        for (auto b : info)
            push(b);
        for (int i = 0; i < memory; ++i)
            push(0);
        return out;
    }

    Bits ConvCode::decode(const Bits &coded) const
    {
        if (coded.size() % 2 != 0 || coded.size() < 2 * memory)
            throw std::invalid_argument("ConvCode::decode: invalid coded length");
        const int steps = int(coded.size() / 2);
        const int states = 1 << memory;
        const int inf = std::numeric_limits<int>::max() / 4;

        // Output pair of each (state, input) transition
        std::array<std::array<int, 2>, 64> out{};
        for (int s = 0; s < states; ++s)
            for (int b = 0; b < 2; ++b)
            {
                unsigned reg = (unsigned(s) << 1) | unsigned(b);
                out[s][b] = (parity(reg & g0) << 1) | parity(reg & g1);
            }

        std::vector<int> metric(states, inf), next(states);
        metric[0] = 0;
        std::vector<std::uint8_t> from(size_t(steps) * states);
        for (int t = 0; t < steps; ++t)
        {
            int rx = (coded[2 * t] << 1) | coded[2 * t + 1];
            std::fill(next.begin(), next.end(), inf);
            for (int s = 0; s < states; ++s)
            {
                if (metric[s] >= inf)
                    continue;
                for (int b = 0; b < 2; ++b)
                {
                    int ns = ((s << 1) | b) & (states - 1);
                    int m = metric[s] + __builtin_popcount(unsigned(out[s][b] ^ rx));
                    if (m < next[ns])
                    {
                        next[ns] = m;
                        from[size_t(t) * states + ns] = std::uint8_t(s);
                    }
                }
            }
            metric.swap(next);
        }

        Bits bits(steps);
        int s = 0; // Zero-tail termination
        for (int t = steps - 1; t >= 0; --t)
        {
            bits[t] = std::uint8_t(s & 1);
            s = from[size_t(t) * states + s];
        }
        bits.resize(steps - memory);
        return bits;
    }

    CVec qpsk_modulate(const Bits &bits)
    {
        if (bits.size() % 2 != 0)
            throw std::invalid_argument("qpsk_modulate: odd number of bits");
        const double s = 1.0 / std::sqrt(2.0);
        CVec out(bits.size() / 2);
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out[i] = cd(bits[2 * i] ? -s : s, bits[2 * i + 1] ? -s : s);
        return out;
    }

    Bits qpsk_demodulate(const CVec &sym)
    {
        Bits out(2 * sym.size());
        for (Eigen::Index i = 0; i < sym.size(); ++i)
        {
            out[2 * i] = sym[i].real() < 0.0;
            out[2 * i + 1] = sym[i].imag() < 0.0;
        }
        return out;
    }

    SymbolCodec::SymbolCodec(int n_sub, std::uint64_t interleaver_seed) : n_sub_(n_sub), perm_(2 * n_sub)
    {
        if (n_sub <= ConvCode::memory)
            throw std::invalid_argument("SymbolCodec: too few subcarriers for the code tail");
        std::iota(perm_.begin(), perm_.end(), 0);
        std::mt19937_64 rng(interleaver_seed);
        std::shuffle(perm_.begin(), perm_.end(), rng);
    }

    CVec SymbolCodec::encode(const Bits &info) const
    {
        if (int(info.size()) != info_bits())
            throw std::invalid_argument("SymbolCodec::encode: wrong number of info bits");
        Bits coded = code_.encode(info);
        Bits tx(coded.size());
        for (size_t i = 0; i < coded.size(); ++i)
            tx[perm_[i]] = coded[i];
        return qpsk_modulate(tx);
    }

    Bits SymbolCodec::decode(const CVec &equalized) const
    {
        if (equalized.size() != n_sub_)
            throw std::invalid_argument("SymbolCodec::decode: wrong symbol length");
        Bits rx = qpsk_demodulate(equalized);
        Bits coded(rx.size());
        for (size_t i = 0; i < rx.size(); ++i)
            coded[i] = rx[perm_[i]];
        return code_.decode(coded);
    }
}
