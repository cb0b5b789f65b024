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

#include "aerothz/array_manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aerothz
{
    void ArrayGeometry::validate() const
    {
        if (n_h < 1 || n_v < 1)
            throw std::invalid_argument("ArrayGeometry: array dimensions must be positive");
        if (!(f_z > 0.0) || !(f_s > 0.0) || f_s >= f_z)
            throw std::invalid_argument("ArrayGeometry: require 0 < f_s < f_z");
        if (K < 2)
            throw std::invalid_argument("ArrayGeometry: K must be at least 2");
        if (n_cp < 0)
            throw std::invalid_argument("ArrayGeometry: negative cyclic prefix");
    }

    VirtualAngles to_virtual(PhysicalAngles pa)
    {
        return {pi * std::sin(pa.theta) * std::cos(pa.phi), pi * std::sin(pa.phi)};
    }

    // Clamp values that overshoot the unit interval by rounding only
    static double safe_asin(double x, const char *what)
    {
        constexpr double tol = 1e-12;
        if (!std::isfinite(x) || std::abs(x) > 1.0 + tol)
            throw std::domain_error(std::string("to_physical: ") + what + " outside the visible region");
        return std::asin(std::clamp(x, -1.0, 1.0));
    }

    PhysicalAngles to_physical(VirtualAngles va)
    {
        PhysicalAngles pa;
        pa.phi = safe_asin(va.nu / pi, "nu");
        double c = pi * std::cos(pa.phi);
        if (c <= 0.0)
            throw std::domain_error("to_physical: elevation at +-90 deg, azimuth undefined");
        pa.theta = safe_asin(va.mu / c, "mu");
        return pa;
    }

    CVec steering_1d(double mu, int N)
    {
        if (N < 1)
            throw std::invalid_argument("steering_1d: N must be positive");
        CVec a(N);
        for (int n = 0; n < N; ++n)
            a[n] = std::polar(1.0, mu * n);
        return a;
    }

    CVec squint_1d(double mu, int N, int k, const ArrayGeometry &geo)
    {
        if (k < 1 || k > geo.K)
            throw std::invalid_argument("squint_1d: subcarrier index out of range");
        return steering_1d(subcarrier_offset(k, geo.K) * geo.squint_ratio() * mu, N);
    }

    static CVec kron(const CVec &v, const CVec &h)
    {
        CVec out(v.size() * h.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            out.segment(i * h.size(), h.size()) = v[i] * h;
        return out;
    }

    CVec steering_upa(VirtualAngles va, int n_h, int n_v)
    {
        return kron(steering_1d(va.nu, n_v), steering_1d(va.mu, n_h));
    }

    CVec squint_upa(VirtualAngles va, int k, const ArrayGeometry &geo)
    {
        return kron(squint_1d(va.nu, geo.n_v, k, geo), squint_1d(va.mu, geo.n_h, k, geo));
    }

    double antenna_delay(int n_h, int n_v, PhysicalAngles pa, const ArrayGeometry &geo)
    {
        if (n_h < 1 || n_h > geo.n_h || n_v < 1 || n_v > geo.n_v)
            throw std::invalid_argument("antenna_delay: element index out of range");
        double d = geo.spacing();
        return ((n_h - 1) * d * std::sin(pa.theta) * std::cos(pa.phi) + (n_v - 1) * d * std::sin(pa.phi)) / speed_of_light;
    }

    // ---------------------------------------------------------------------------------------------
    // RampVector

    RampVector::RampVector(int n, std::vector<RampSegment> segs) : n_(n), segs_(std::move(segs))
    {
        std::sort(segs_.begin(), segs_.end(), [](const RampSegment &a, const RampSegment &b)
                  { return a.begin < b.begin; });
        int last = 0;
        for (const auto &s : segs_)
        {
            if (s.begin < last || s.end > n_ || s.begin > s.end)
                throw std::invalid_argument("RampVector: segments overlap or exceed the vector length");
            last = s.end;
        }
    }

    RampVector RampVector::ramp(int n, double slope, double amp, double phase0)
    {
        if (n < 0)
            throw std::invalid_argument("RampVector::ramp: negative length");
        RampVector r(n);
        if (n > 0)
            r.segs_.push_back({0, n, amp, phase0, slope});
        return r;
    }

    RampVector RampVector::restrict(int begin, int end) const
    {
        if (begin < 0 || end > n_ || begin > end)
            throw std::invalid_argument("RampVector::restrict: invalid range");
        RampVector r(n_);
        for (const auto &s : segs_)
        {
            int b = std::max(s.begin, begin), e = std::min(s.end, end);
            if (b < e)
                r.segs_.push_back({b, e, s.amp, s.phase0, s.slope});
        }
        return r;
    }

    RampVector RampVector::conj() const
    {
        RampVector r = *this;
        for (auto &s : r.segs_)
            s.phase0 = -s.phase0, s.slope = -s.slope;
        return r;
    }

    RampVector RampVector::scaled(double a) const
    {
        RampVector r = *this;
        for (auto &s : r.segs_)
            s.amp *= a;
        return r;
    }

    RampVector RampVector::hadamard(const RampVector &b) const
    {
        if (n_ != b.n_)
            throw std::invalid_argument("RampVector::hadamard: length mismatch");
        RampVector r(n_);
        size_t i = 0, j = 0;
        while (i < segs_.size() && j < b.segs_.size())
        {
            const auto &x = segs_[i];
            const auto &y = b.segs_[j];
            int lo = std::max(x.begin, y.begin), hi = std::min(x.end, y.end);
            if (lo < hi)
                r.segs_.push_back({lo, hi, x.amp * y.amp, x.phase0 + y.phase0, x.slope + y.slope});
            if (x.end < y.end)
                ++i;
            else
                ++j;
        }
        return r;
    }

    cd geometric_sum(double x, int N)
    {
        if (N <= 0)
            return 0.0;
        double r = std::remainder(x, 2.0 * pi); // (-pi, pi]
        double s = std::sin(0.5 * r);
        if (std::abs(s) < 1e-14)
            return double(N);
        return std::polar(std::sin(0.5 * N * r) / s, 0.5 * (N - 1) * r);
    }

    cd RampVector::dot(const RampVector &b) const
    {
        if (n_ != b.n_)
            throw std::invalid_argument("RampVector::dot: length mismatch");
        cd acc = 0.0;
        size_t i = 0, j = 0;
        // Grouped vectors repeat the same (slope, length) pair, so the last sum is reused
        double last_ds = std::numeric_limits<double>::quiet_NaN();
        int last_len = -1;
        cd last_sum = 0.0;
        while (i < segs_.size() && j < b.segs_.size())
        {
            const auto &x = segs_[i];
            const auto &y = b.segs_[j];
            int lo = std::max(x.begin, y.begin), hi = std::min(x.end, y.end);
            if (lo < hi)
            {
                double ds = y.slope - x.slope;
                if (ds != last_ds || hi - lo != last_len)
                {
                    last_ds = ds;
                    last_len = hi - lo;
                    last_sum = geometric_sum(ds, last_len);
                }
                acc += x.amp * y.amp * std::polar(1.0, y.phase0 - x.phase0 + ds * lo) * last_sum;
            }
            if (x.end < y.end)
                ++i;
            else
                ++j;
        }
        return acc;
    }

    double RampVector::norm2() const
    {
        double acc = 0.0;
        for (const auto &s : segs_)
            acc += s.amp * s.amp * (s.end - s.begin);
        return acc;
    }

    CVec RampVector::dense() const
    {
        CVec out = CVec::Zero(n_);
        for (const auto &s : segs_)
            for (int n = s.begin; n < s.end; ++n)
                out[n] = std::polar(s.amp, s.phase0 + s.slope * n);
        return out;
    }

    CVec UpaVector::dense() const
    {
        return kron(v.dense(), h.dense());
    }

    RampVector steering_ramp(double mu, int N)
    {
        return RampVector::ramp(N, mu);
    }

    RampVector squint_ramp(double mu, int N, double delta_ratio)
    {
        return RampVector::ramp(N, delta_ratio * mu);
    }

    UpaVector steering_upa_ramp(VirtualAngles va, int n_h, int n_v)
    {
        return {steering_ramp(va.mu, n_h), steering_ramp(va.nu, n_v)};
    }

    UpaVector squint_upa_ramp(VirtualAngles va, int k, const ArrayGeometry &geo)
    {
        if (k < 1 || k > geo.K)
            throw std::invalid_argument("squint_upa_ramp: subcarrier index out of range");
        double dr = subcarrier_offset(k, geo.K) * geo.squint_ratio();
        return {squint_ramp(va.mu, geo.n_h, dr), squint_ramp(va.nu, geo.n_v, dr)};
    }
}
