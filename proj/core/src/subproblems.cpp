// SPDX-License-Identifier: Apache-2.0
//
// cfris - joint time-delay and RIS precoding for wideband THz cell-free MIMO
// Copyright (C) 2026 The cfris authors
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
#include "cfris/subproblems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    Eigen::Index QuadraticSubproblem::dimension() const
    {
        Eigen::Index n = 0;
        for (const auto &b : blocks)
            n += b.rows();
        return n;
    }

    std::vector<Eigen::Index> QuadraticSubproblem::block_offsets() const
    {
        std::vector<Eigen::Index> out;
        out.reserve(blocks.size());
        Eigen::Index n = 0;
        for (const auto &b : blocks)
        {
            out.push_back(n);
            n += b.rows();
        }
        return out;
    }

    CVec QuadraticSubproblem::apply(const CVec &x) const
    {
        if (x.size() != dimension())
            throw std::invalid_argument("QuadraticSubproblem::apply: dimension mismatch");
        CVec out(x.size());
        Eigen::Index off = 0;
        for (const auto &b : blocks)
        {
            out.segment(off, b.rows()).noalias() = b * x.segment(off, b.cols());
            off += b.rows();
        }
        return out;
    }

    double QuadraticSubproblem::objective(const CVec &x) const
    {
        if (linear.size() != x.size())
            throw std::invalid_argument("QuadraticSubproblem::objective: dimension mismatch");
        return std::real(x.dot(apply(x))) - 2.0 * std::real(linear.dot(x)) + constant;
    }

    CMat QuadraticSubproblem::dense_quadratic() const
    {
        const Eigen::Index n = dimension();
        CMat out = CMat::Zero(n, n);
        Eigen::Index off = 0;
        for (const auto &b : blocks)
        {
            out.block(off, off, b.rows(), b.cols()) = b;
            off += b.rows();
        }
        return out;
    }

    void QuadraticSubproblem::check_psd(double tol) const
    {
        for (std::size_t i = 0; i < blocks.size(); ++i)
        {
            const CMat &b = blocks[i];
            if (b.rows() != b.cols())
                throw std::invalid_argument("Quadratic block " + std::to_string(i) + " is not square");
            const double scale = b.norm();
            if (scale == 0.0)
                continue;
            if ((b - b.adjoint()).norm() > tol * scale)
                throw std::invalid_argument("Quadratic block " + std::to_string(i) + " is not Hermitian");
            Eigen::SelfAdjointEigenSolver<CMat> es(b, Eigen::EigenvaluesOnly);
            if (es.eigenvalues().minCoeff() < -tol * scale)
                throw std::invalid_argument("Quadratic block " + std::to_string(i) + " is not positive semidefinite");
        }
    }

    QuadraticSubproblem build_w_subproblem(const LinkModel &model, const RisConfiguration &ris,
                                           const UeScComplex &lambda, const UeScReal &varsigma)
    {
        const int A = model.aps(), K = model.ues(), M = model.subcarriers(), Nrf = model.rf_chains();
        const Eigen::Index len = Eigen::Index(A) * Nrf;
        if (lambda.rows() != K || lambda.cols() != M || varsigma.rows() != K || varsigma.cols() != M)
            throw std::invalid_argument("build_w_subproblem: auxiliary arrays must be K x M");

        QuadraticSubproblem prob;
        prob.blocks.reserve(std::size_t(K) * M);
        prob.linear.resize(model.w_size());

        PowerConstraints pc;
        pc.budgets = model.power_budgets();
        pc.upsilon.assign(std::size_t(A), {});
        for (auto &u : pc.upsilon)
            u.reserve(std::size_t(K) * M);

        double zeta = 0.0;
        for (int m = 0; m < M; ++m)
        {
            const CMat g = analog_channels(model, ris, m);
            CMat xi(len, K);
            for (int k = 0; k < K; ++k)
            {
                xi.col(k) = lambda(k, m) * g.col(k);
                zeta += std::norm(lambda(k, m)) * model.noise(k, m);
            }
            const CMat Xi = xi * xi.adjoint();

            std::vector<CMat> ups(std::size_t(A), CMat::Zero(len, len));
            for (int a = 0; a < A; ++a)
            {
                const CMat &F = model.precoder().fbar(a, m);
                ups[a].block(a * Nrf, a * Nrf, Nrf, Nrf) = F.adjoint() * F;
            }

            for (int k = 0; k < K; ++k)
            {
                prob.blocks.push_back(Xi);
                prob.linear.segment(model.w_block_offset(k, m), len) = varsigma(k, m) * xi.col(k);
                for (int a = 0; a < A; ++a)
                    pc.upsilon[a].push_back(ups[a]);
            }
        }
        prob.constant = zeta;
        prob.constraints = std::move(pc);
        return prob;
    }

    namespace
    {
        // Collects, for one subcarrier, the vectors q_{k,j} (columns, index k*K + j) and scalars
        // c'_{k,j} such that b_kj = c'_kj + q_kj^T v, where v is theta (over_theta) or t_m.
        void reflect_terms(const LinkModel &model, const PrecoderVariables &vars, int m, bool over_theta, CMat &q,
                           CMat &direct)
        {
            const ChannelRealization &ch = model.channels();
            const int A = model.aps(), K = model.ues(), R = ch.ris(), N = ch.ris_elements(),
                      Nrf = model.rf_chains();
            q.resize(Eigen::Index(R) * N, Eigen::Index(K) * K);
            direct.resize(K, K);

            // x_{a,j} = F_bar_{a,m} w_{a,j,m}
            std::vector<CVec> x(std::size_t(A) * K);
            for (int j = 0; j < K; ++j)
                for (int a = 0; a < A; ++a)
                    x[j * A + a] = model.precoder().fbar(a, m) * vars.w.segment(model.w_offset(a, j, m), Nrf);

            for (int j = 0; j < K; ++j)
            {
                std::vector<CVec> gx(std::size_t(R), CVec::Zero(N));
                for (int r = 0; r < R; ++r)
                    for (int a = 0; a < A; ++a)
                        gx[r].noalias() += ch.G(a, r, m) * x[j * A + a];

                for (int k = 0; k < K; ++k)
                {
                    cplx cd(0.0, 0.0);
                    for (int a = 0; a < A; ++a)
                        cd += ch.h_dir(a, k, m).dot(x[j * A + a]);
                    direct(k, j) = cd;

                    for (int r = 0; r < R; ++r)
                    {
                        const CVec &other = over_theta ? vars.ris.t[m] : vars.ris.theta;
                        q.block(r * N, k * K + j, N, 1) =
                            (ch.u(r, k, m).conjugate().array() * other.segment(r * N, N).array() * gx[r].array())
                                .matrix();
                    }
                }
            }
        }

        // Accumulates conj(D), conj(d_tilde) and epsilon of one subcarrier
        void accumulate_ris_block(const LinkModel &model, const CMat &q, const CMat &direct, const UeScComplex &aux,
                                  const UeScReal &varsigma, int m, CMat &Dmat, CVec &dtilde, double &epsilon)
        {
            const int K = model.ues();
            CMat d(q.rows(), q.cols());
            for (int k = 0; k < K; ++k)
            {
                const cplx w = std::conj(aux(k, m));
                for (int j = 0; j < K; ++j)
                {
                    d.col(k * K + j) = w * q.col(k * K + j);
                    const cplx c = w * direct(k, j);
                    epsilon -= std::norm(c);
                    dtilde.noalias() -= std::conj(c) * d.col(k * K + j);
                    if (j == k)
                    {
                        dtilde.noalias() += varsigma(k, m) * d.col(k * K + j);
                        epsilon += 2.0 * varsigma(k, m) * std::real(c);
                    }
                }
                epsilon -= std::norm(aux(k, m)) * model.noise(k, m);
            }
            Dmat.noalias() += d * d.adjoint();
        }

        void check_aux(const LinkModel &model, const PrecoderVariables &vars, const UeScComplex &aux,
                       const UeScReal &varsigma, const char *who)
        {
            const int K = model.ues(), M = model.subcarriers();
            if (aux.rows() != K || aux.cols() != M || varsigma.rows() != K || varsigma.cols() != M)
                throw std::invalid_argument(std::string(who) + ": auxiliary arrays must be K x M");
            if (vars.w.size() != model.w_size())
                throw std::invalid_argument(std::string(who) + ": w has the wrong length");
            if (vars.ris.theta.size() != model.ris_total_elements() || vars.ris.t.size() != std::size_t(M))
                throw std::invalid_argument(std::string(who) + ": RIS configuration has the wrong shape");
            if (model.ris_total_elements() == 0)
                throw std::invalid_argument(std::string(who) + ": the network has no reflecting surface");
        }
    }

    QuadraticSubproblem build_theta_subproblem(const LinkModel &model, const PrecoderVariables &vars,
                                               const UeScComplex &omega, const UeScReal &varsigma, int phase_levels)
    {
        check_aux(model, vars, omega, varsigma, "build_theta_subproblem");
        const Eigen::Index n = model.ris_total_elements();
        CMat Dmat = CMat::Zero(n, n);
        CVec dtilde = CVec::Zero(n);
        double epsilon = 0.0;
        CMat q, direct;
        for (int m = 0; m < model.subcarriers(); ++m)
        {
            reflect_terms(model, vars, m, true, q, direct);
            accumulate_ris_block(model, q, direct, omega, varsigma, m, Dmat, dtilde, epsilon);
        }

        QuadraticSubproblem prob;
        prob.blocks.push_back(Dmat.conjugate());
        prob.linear = dtilde.conjugate();
        prob.constant = -epsilon;
        if (phase_levels >= 2)
            prob.constraints = DiscretePhase{phase_levels};
        else
            prob.constraints = UnitModulus{};
        return prob;
    }

    QuadraticSubproblem build_t_subproblem(const LinkModel &model, const PrecoderVariables &vars,
                                           const UeScComplex &gamma, const UeScReal &varsigma)
    {
        check_aux(model, vars, gamma, varsigma, "build_t_subproblem");
        const Eigen::Index n = model.ris_total_elements();
        const int M = model.subcarriers();
        QuadraticSubproblem prob;
        prob.linear.resize(n * M);
        double epsilon = 0.0;
        CMat q, direct;
        for (int m = 0; m < M; ++m)
        {
            CMat Dmat = CMat::Zero(n, n);
            CVec dtilde = CVec::Zero(n);
            reflect_terms(model, vars, m, false, q, direct);
            accumulate_ris_block(model, q, direct, gamma, varsigma, m, Dmat, dtilde, epsilon);
            prob.blocks.push_back(Dmat.conjugate());
            prob.linear.segment(m * n, n) = dtilde.conjugate();
        }
        prob.constant = -epsilon;
        prob.constraints = UnitModulus{};
        return prob;
    }

    CVec stack_ris_td(const std::vector<CVec> &t)
    {
        Eigen::Index n = 0;
        for (const auto &v : t)
        {
            if (v.size() != t.front().size())
                throw std::invalid_argument("stack_ris_td: subcarrier vectors differ in length");
            n += v.size();
        }
        CVec out(n);
        Eigen::Index off = 0;
        for (const auto &v : t)
        {
            out.segment(off, v.size()) = v;
            off += v.size();
        }
        return out;
    }

    std::vector<CVec> unstack_ris_td(const CVec &t, int subcarriers)
    {
        if (subcarriers < 1 || t.size() % subcarriers != 0)
            throw std::invalid_argument("unstack_ris_td: length is not a multiple of the subcarrier count");
        const Eigen::Index n = t.size() / subcarriers;
        std::vector<CVec> out(static_cast<std::size_t>(subcarriers));
        for (int m = 0; m < subcarriers; ++m)
            out[m] = t.segment(m * n, n);
        return out;
    }
}
