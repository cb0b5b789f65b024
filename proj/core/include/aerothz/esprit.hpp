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

#ifndef AEROTHZ_ESPRIT_H
#define AEROTHZ_ESPRIT_H

#include "aerothz/array_manifold.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace aerothz
{
    // Raised when an estimator cannot produce a finite, well-posed result
    class EstimationError : public std::runtime_error
    {
    public:
        EstimationError(const std::string &stage, const std::string &what)
            : std::runtime_error(stage + ": " + what), stage_(stage) {}
        const std::string &stage() const { return stage_; }

    private:
        std::string stage_;
    };

    // Dominant `sources`-dimensional column space of Y (elements x snapshots)
    CMat signal_subspace(const CMat &Y, int sources);

    // Least-squares / total-least-squares ESPRIT on a uniform linear aperture.
    // Returns the phase increment per element (-pi, pi] of each source.
    std::vector<double> ls_esprit(const CMat &Y, int sources = 1);
    std::vector<double> tls_esprit(const CMat &Y, int sources = 1);

    // Left Pi-real unitary matrix of order n
    CMat left_pi_real(int n);

    // 2-D unitary ESPRIT with forward-backward averaging on an i_h x i_v grid.
    // Rows of Y follow m = (i_v - 1) i_h + i_h. Returns (mu, nu) per source, each in (-pi, pi).
    std::vector<VirtualAngles> unitary_esprit_2d(const CMat &Y, int i_h, int i_v, int sources = 1);
}

#endif
