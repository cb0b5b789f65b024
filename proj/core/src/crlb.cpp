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

#include "aerothz/crlb.hpp"

#include <cmath>
#include <stdexcept>

namespace aerothz
{
    Eigen::MatrixXd deterministic_crb(const CVec &a, const CMat &D, double energy, double sigma2)
    {
        if (D.rows() != a.size() || a.size() == 0)
            throw std::invalid_argument("deterministic_crb: dimension mismatch");
        if (!(energy > 0.0) || !(sigma2 > 0.0))
            throw std::invalid_argument("deterministic_crb: energy and noise must be positive");
        double na = a.squaredNorm();
        CMat PD = D - a * (a.adjoint() * D) / na;
        Eigen::MatrixXd F = energy * (D.adjoint() * PD).real();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(F);
        if (!lu.isInvertible())
            throw std::domain_error("deterministic_crb: singular Fisher information");
        return 0.5 * sigma2 * lu.inverse();
    }

    static double energy_of(const std::vector<cd> &g)
    {
        double e = 0.0;
        for (auto x : g)
            e += std::norm(x);
        return e;
    }

    Eigen::Matrix2d crlb_virtual(const AngleBoundInputs &in)
    {
        if (in.i_h < 2 || in.i_v < 2)
            throw std::invalid_argument("crlb_virtual: grid must be at least 2 x 2");
        int M = in.i_h * in.i_v;
        CVec a(M);
        CMat D(M, 2);
        const cd j(0.0, 1.0);
        for (int iv = 0; iv < in.i_v; ++iv)
            for (int ih = 0; ih < in.i_h; ++ih)
            {
                int m = iv * in.i_h + ih;
                a[m] = std::polar(1.0, ih * in.va_bar.mu + iv * in.va_bar.nu);
                D(m, 0) = j * double(iv) * a[m];
                D(m, 1) = j * double(ih) * a[m];
            }
        return deterministic_crb(a, D, energy_of(in.amplitudes), in.sigma2);
    }

    // Jacobian of (phi, theta) with respect to (nu_bar, mu_bar)
    static Eigen::Matrix2d physical_jacobian(VirtualAngles va, int omega)
    {
        if (omega < 1)
            throw std::invalid_argument("crlb_physical: spacing must be positive");
        double c_phi = std::sqrt(pi * pi - va.nu * va.nu);   // pi cos(phi)
        double c_th2 = c_phi * c_phi - va.mu * va.mu;         // (pi cos(phi) cos(theta))^2
        if (!(c_phi > 0.0) || !(c_th2 > 0.0))
            throw std::domain_error("crlb_physical: angles at the edge of the visible region");
        double c_th = std::sqrt(c_th2);
        Eigen::Matrix2d J;
        J(0, 0) = 1.0 / (omega * c_phi); // dphi / dnu_bar
        J(0, 1) = 0.0;
        // theta = asin(mu / (pi cos(phi))), d(pi cos(phi))/dnu = -nu / (pi cos(phi))
        J(1, 1) = 1.0 / (omega * c_th);
        J(1, 0) = va.mu * va.nu / (c_phi * c_phi * c_th * omega);
        return J;
    }

    PhysicalBound crlb_physical(const Eigen::Matrix2d &C, VirtualAngles va, int omega)
    {
        Eigen::Matrix2d J = physical_jacobian(va, omega);
        Eigen::Matrix2d P = J * C * J.transpose();
        return {P(1, 1), P(0, 0)};
    }

    PhysicalBound crlb_physical_diag(const Eigen::Matrix2d &C, VirtualAngles va, int omega)
    {
        Eigen::Matrix2d J = physical_jacobian(va, omega);
        return {C(1, 1) * J(1, 1) * J(1, 1), C(0, 0) * J(0, 0) * J(0, 0)};
    }

    static double single_tone_crb(const std::vector<double> &pos, double energy, double sigma2)
    {
        CVec a = CVec::Ones(Eigen::Index(pos.size()));
        CMat D(a.size(), 1);
        for (size_t i = 0; i < pos.size(); ++i)
            D(Eigen::Index(i), 0) = cd(0.0, pos[i]);
        return deterministic_crb(a, D, energy, sigma2)(0, 0);
    }

    double crlb_doppler(int n_do, const std::vector<cd> &amplitudes, double sigma2, double t_sym)
    {
        if (n_do < 2)
            throw std::invalid_argument("crlb_doppler: need at least two symbols");
        std::vector<double> pos(n_do);
        for (int m = 0; m < n_do; ++m)
            pos[m] = m;
        double c_nu = single_tone_crb(pos, energy_of(amplitudes), sigma2);
        return c_nu / std::pow(2.0 * pi * t_sym, 2);
    }

    double crlb_delay(const std::vector<int> &positions, const std::vector<cd> &amplitudes, double sigma2, int K)
    {
        if (positions.size() < 2)
            throw std::invalid_argument("crlb_delay: need at least two subcarriers");
        std::vector<double> pos(positions.begin(), positions.end());
        double c_mu = single_tone_crb(pos, energy_of(amplitudes), sigma2);
        return double(K) * K * c_mu / std::pow(2.0 * pi, 2);
    }

    Eigen::MatrixXd fim_numeric(const std::function<CVec(const Eigen::VectorXd &)> &mean,
                                const Eigen::VectorXd &eta0, double sigma2, double step)
    {
        const CVec m0 = mean(eta0);
        // Expected log-likelihood up to a constant
        auto ell = [&](const Eigen::VectorXd &eta)
        { return -(mean(eta) - m0).squaredNorm() / sigma2; };

        Eigen::Index P = eta0.size();
        Eigen::MatrixXd F(P, P);
        for (Eigen::Index i = 0; i < P; ++i)
            for (Eigen::Index j = i; j < P; ++j)
            {
                Eigen::VectorXd e = eta0;
                double h2;
                if (i == j)
                {
                    e[i] += step;
                    double fp = ell(e);
                    e[i] -= 2.0 * step;
                    double fm = ell(e);
                    h2 = (fp - 2.0 * ell(eta0) + fm) / (step * step);
                }
                else
                {
                    auto at = [&](double si, double sj)
                    {
                        Eigen::VectorXd x = eta0;
                        x[i] += si * step;
                        x[j] += sj * step;
                        return ell(x);
                    };
                    h2 = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step * step);
                }
                F(i, j) = F(j, i) = -h2;
            }
        return F;
    }
}
