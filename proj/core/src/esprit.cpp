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

#include "aerothz/esprit.hpp"

#include <cmath>
#include <complex>

namespace aerothz
{
    static void check_input(const CMat &Y, int sources, const char *stage)
    {
        if (sources < 1)
            throw std::invalid_argument(std::string(stage) + ": need at least one source");
        if (Y.rows() < sources + 1)
            throw std::invalid_argument(std::string(stage) + ": aperture too small for the number of sources");
        if (Y.cols() < sources)
            throw std::invalid_argument(std::string(stage) + ": fewer snapshots than sources");
        if (!Y.allFinite())
            throw EstimationError(stage, "non-finite input");
    }

    CMat signal_subspace(const CMat &Y, int sources)
    {
        if (Y.rows() <= Y.cols())
        {
            CMat R = Y * Y.adjoint() / double(Y.cols());
            Eigen::SelfAdjointEigenSolver<CMat> es(R);
            if (es.info() != Eigen::Success)
                throw EstimationError("esprit", "eigendecomposition failed");
            // Eigen returns ascending order
            return es.eigenvectors().rightCols(sources).rowwise().reverse();
        }
        // Tall data: left singular vectors from the small Gram matrix
        Eigen::SelfAdjointEigenSolver<CMat> es(Y.adjoint() * Y);
        if (es.info() != Eigen::Success)
            throw EstimationError("esprit", "eigendecomposition failed");
        CMat V = es.eigenvectors().rightCols(sources).rowwise().reverse();
        CMat U = Y * V;
        for (Eigen::Index i = 0; i < U.cols(); ++i)
        {
            double n = U.col(i).norm();
            if (!(n > 0.0))
                throw EstimationError("esprit", "rank-deficient data");
            U.col(i) /= n;
        }
        return U;
    }

    static std::vector<double> eig_phases(const CMat &Psi)
    {
        Eigen::ComplexEigenSolver<CMat> ces(Psi, false);
        if (ces.info() != Eigen::Success)
            throw EstimationError("esprit", "rotation eigendecomposition failed");
        std::vector<double> out;
        for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i)
        {
            cd z = ces.eigenvalues()[i];
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) == 0.0)
                throw EstimationError("esprit", "degenerate rotation");
            out.push_back(std::arg(z));
        }
        return out;
    }

    std::vector<double> ls_esprit(const CMat &Y, int sources)
    {
        check_input(Y, sources, "ls_esprit");
        CMat Es = signal_subspace(Y, sources);
        Eigen::Index M = Es.rows();
        CMat E1 = Es.topRows(M - 1), E2 = Es.bottomRows(M - 1);
        CMat Psi = E1.colPivHouseholderQr().solve(E2);
        return eig_phases(Psi);
    }

    std::vector<double> tls_esprit(const CMat &Y, int sources)
    {
        check_input(Y, sources, "tls_esprit");
        CMat Es = signal_subspace(Y, sources);
        Eigen::Index M = Es.rows();
        int d = sources;
        CMat E12(M - 1, 2 * d);
        E12 << Es.topRows(M - 1), Es.bottomRows(M - 1);
        Eigen::SelfAdjointEigenSolver<CMat> es(E12.adjoint() * E12);
        if (es.info() != Eigen::Success)
            throw EstimationError("tls_esprit", "eigendecomposition failed");
        CMat V = es.eigenvectors().rowwise().reverse(); // Descending
        CMat V12 = V.block(0, d, d, d), V22 = V.block(d, d, d, d);
        Eigen::FullPivLU<CMat> lu(V22);
        if (!lu.isInvertible())
            throw EstimationError("tls_esprit", "singular TLS partition");
        CMat Psi = -V12 * lu.inverse();
        return eig_phases(Psi);
    }

    CMat left_pi_real(int n)
    {
        if (n < 1)
            throw std::invalid_argument("left_pi_real: order must be positive");
        const double s = 1.0 / std::sqrt(2.0);
        const cd j(0.0, 1.0);
        int p = n / 2;
        CMat Q = CMat::Zero(n, n);
        for (int i = 0; i < p; ++i)
        {
            Q(i, i) = s;
            Q(i, n - p + i) = j * s;
            Q(n - 1 - i, i) = s;
            Q(n - 1 - i, n - p + i) = -j * s;
        }
        if (n % 2 == 1)
            Q(p, p) = 1.0;
        return Q;
    }

    // Row selection of the second (shifted) sub-aperture along one axis of the grid
    static Eigen::MatrixXd select_second(int i_h, int i_v, bool horizontal)
    {
        int rows = horizontal ? (i_h - 1) * i_v : i_h * (i_v - 1);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(rows, i_h * i_v);
        int r = 0;
        for (int v = 0; v < i_v; ++v)
            for (int h = 0; h < i_h; ++h)
            {
                bool keep = horizontal ? (h >= 1) : (v >= 1);
                if (keep)
                    J(r++, v * i_h + h) = 1.0;
            }
        return J;
    }

    std::vector<VirtualAngles> unitary_esprit_2d(const CMat &Y, int i_h, int i_v, int sources)
    {
        if (i_h < 2 || i_v < 2)
            throw std::invalid_argument("unitary_esprit_2d: grid must be at least 2 x 2");
        if (Y.rows() != i_h * i_v)
            throw std::invalid_argument("unitary_esprit_2d: row count does not match the grid");
        check_input(Y, sources, "unitary_esprit_2d");

        int M = i_h * i_v;
        CMat QM = left_pi_real(M);
        CMat T = QM.adjoint() * Y;
        Eigen::MatrixXd C = (T * T.adjoint()).real() / double(Y.cols());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        if (es.info() != Eigen::Success)
            throw EstimationError("unitary_esprit_2d", "eigendecomposition failed");
        Eigen::MatrixXd Es = es.eigenvectors().rightCols(sources).rowwise().reverse();

        auto solve_axis = [&](bool horizontal) -> Eigen::MatrixXd
        {
            Eigen::MatrixXd J2 = select_second(i_h, i_v, horizontal);
            CMat Qm = left_pi_real(int(J2.rows()));
            CMat G = Qm.adjoint() * J2.cast<cd>() * QM;
            Eigen::MatrixXd K1 = 2.0 * G.real(), K2 = 2.0 * G.imag();
            Eigen::MatrixXd A = K1 * Es, B = K2 * Es;
            if (A.norm() < 1e-12 * (1.0 + B.norm()))
                throw EstimationError("unitary_esprit_2d", "rank-deficient invariance equation");
            return A.colPivHouseholderQr().solve(B);
        };
        Eigen::MatrixXd Ups_mu = solve_axis(true);
        Eigen::MatrixXd Ups_nu = solve_axis(false);

        CMat joint = Ups_mu.cast<cd>() + cd(0.0, 1.0) * Ups_nu.cast<cd>();
        Eigen::ComplexEigenSolver<CMat> ces(joint, false);
        if (ces.info() != Eigen::Success)
            throw EstimationError("unitary_esprit_2d", "joint eigendecomposition failed");
        std::vector<VirtualAngles> out;
        for (Eigen::Index i = 0; i < ces.eigenvalues().size(); ++i)
        {
            cd z = ces.eigenvalues()[i];
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw EstimationError("unitary_esprit_2d", "non-finite rotation");
            out.push_back({2.0 * std::atan(z.real()), 2.0 * std::atan(z.imag())});
        }
        return out;
    }
}
