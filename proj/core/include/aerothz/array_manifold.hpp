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

#ifndef AEROTHZ_ARRAY_MANIFOLD_H
#define AEROTHZ_ARRAY_MANIFOLD_H

#include <complex>
#include <vector>
#include <Eigen/Dense>

namespace aerothz
{
    using cd = std::complex<double>;
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;

    constexpr double speed_of_light = 299792458.0;
    constexpr double pi = 3.14159265358979323846;

    // Uniform planar array together with the OFDM carrier it operates on.
    // Element index n = (n_v - 1) * n_h + n_h (horizontal index runs fastest).
    struct ArrayGeometry
    {
        int n_h = 200;       // Horizontal elements
        int n_v = 200;       // Vertical elements
        double f_z = 1e11;   // Carrier frequency [Hz]
        double f_s = 1e9;    // Bandwidth / sampling rate [Hz]
        int K = 2048;        // Number of subcarriers
        int n_cp = 128;      // Cyclic prefix length [samples]

        int size() const { return n_h * n_v; }
        double spacing() const { return speed_of_light / (2.0 * f_z); } // Half wavelength
        double squint_ratio() const { return f_s / f_z; }
        double t_sym() const { return double(K + n_cp) / f_s; } // OFDM symbol duration [s]
        double lambda() const { return speed_of_light / f_z; }
        void validate() const;
    };

    struct VirtualAngles
    {
        double mu = 0.0; // pi * sin(theta) * cos(phi)
        double nu = 0.0; // pi * sin(phi)
    };

    struct PhysicalAngles
    {
        double theta = 0.0; // Azimuth [rad]
        double phi = 0.0;   // Elevation [rad]
    };

    VirtualAngles to_virtual(PhysicalAngles pa);
    PhysicalAngles to_physical(VirtualAngles va); // Throws if |nu| > pi or |mu| > pi cos(phi)

    // Relative frequency offset of subcarrier k (1-based): (k-1)/K - 1/2
    inline double subcarrier_offset(int k, int K) { return double(k - 1) / double(K) - 0.5; }

    // Dense 1-D and UPA manifolds
    CVec steering_1d(double mu, int N);
    CVec squint_1d(double mu, int N, int k, const ArrayGeometry &geo);
    CVec steering_upa(VirtualAngles va, int n_h, int n_v);
    CVec squint_upa(VirtualAngles va, int k, const ArrayGeometry &geo);

    // Propagation delay of element (n_h, n_v) (1-based) relative to element (1,1) [s]
    double antenna_delay(int n_h, int n_v, PhysicalAngles pa, const ArrayGeometry &geo);

    // Piece of a vector with linear phase: amp * exp(j(phase0 + slope * n)) for n in [begin, end)
    struct RampSegment
    {
        int begin = 0;
        int end = 0;
        double amp = 1.0;
        double phase0 = 0.0;
        double slope = 0.0;
    };

    // Sparse 1-D vector made of non-overlapping linear-phase segments, zero elsewhere.
    // All array vectors used here (steering, squint, TTD compensation, selected beams) are of this form,
    // which lets inner products be evaluated with closed-form geometric sums.
    class RampVector
    {
    public:
        RampVector() = default;
        explicit RampVector(int n) : n_(n) {}
        RampVector(int n, std::vector<RampSegment> segs);

        static RampVector ramp(int n, double slope, double amp = 1.0, double phase0 = 0.0);

        int size() const { return n_; }
        const std::vector<RampSegment> &segments() const { return segs_; }

        RampVector restrict(int begin, int end) const; // Zero outside [begin, end)
        RampVector conj() const;
        RampVector hadamard(const RampVector &b) const;
        RampVector scaled(double a) const;
        cd dot(const RampVector &b) const; // this^H * b
        double norm2() const;
        CVec dense() const;

    private:
        int n_ = 0;
        std::vector<RampSegment> segs_; // Sorted by begin
    };

    // Kronecker pair v (x) h with horizontal index fastest, matching the UPA element order
    struct UpaVector
    {
        RampVector h;
        RampVector v;

        int size() const { return h.size() * v.size(); }
        UpaVector conj() const { return {h.conj(), v.conj()}; }
        UpaVector hadamard(const UpaVector &b) const { return {h.hadamard(b.h), v.hadamard(b.v)}; }
        cd dot(const UpaVector &b) const { return h.dot(b.h) * v.dot(b.v); }
        double norm2() const { return h.norm2() * v.norm2(); }
        CVec dense() const;
    };

    // Sum_{n=0}^{N-1} exp(j x n)
    cd geometric_sum(double x, int N);

    // Separable forms of the manifolds
    RampVector steering_ramp(double mu, int N);
    RampVector squint_ramp(double mu, int N, double delta_ratio); // delta_ratio = ((k-1)/K - 1/2) f_s/f_z
    UpaVector steering_upa_ramp(VirtualAngles va, int n_h, int n_v);
    UpaVector squint_upa_ramp(VirtualAngles va, int k, const ArrayGeometry &geo);
}

#endif
