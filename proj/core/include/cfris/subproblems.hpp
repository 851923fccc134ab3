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
#ifndef CFRIS_SUBPROBLEMS_HPP
#define CFRIS_SUBPROBLEMS_HPP

#include "cfris/link_metrics.hpp"
#include "cfris/types.hpp"

#include <variant>
#include <vector>

namespace cfris
{
    // Per-AP quadratic power constraints x^H Upsilon_a x <= budget_a. upsilon[a] shares the block
    // partition of the objective's quadratic coefficient.
    struct PowerConstraints
    {
        std::vector<std::vector<CMat>> upsilon;
        std::vector<double> budgets;
    };

    // |x_i| = 1 for every entry
    struct UnitModulus
    {
    };

    // x_i in { exp(j 2 pi f / levels) : f = 0 .. levels-1 }
    struct DiscretePhase
    {
        int levels = 2;
    };

    using ConstraintSet = std::variant<PowerConstraints, UnitModulus, DiscretePhase>;

    // minimize  x^H Q x - 2 Re{c^H x} + constant,  Q = blkdiag(blocks) Hermitian PSD.
    // The quadratic-transform surrogate of the corresponding block equals -objective(x).
    struct QuadraticSubproblem
    {
        std::vector<CMat> blocks;
        CVec linear;
        double constant = 0.0;
        ConstraintSet constraints = UnitModulus{};

        Eigen::Index dimension() const;
        // Starting offset of each block inside x
        std::vector<Eigen::Index> block_offsets() const;

        CVec apply(const CVec &x) const; // Q x
        double objective(const CVec &x) const;
        double surrogate(const CVec &x) const { return -objective(x); }
        CMat dense_quadratic() const;

        // Throws std::invalid_argument when a block is not Hermitian PSD within tol (relative)
        void check_psd(double tol = 1e-9) const;
    };

    // Baseband block: Q = blkdiag over (m, k) of Xi_m, c = xi_tilde, constant = zeta, per-AP power constraints
    QuadraticSubproblem build_w_subproblem(const LinkModel &model, const RisConfiguration &ris,
                                           const UeScComplex &lambda, const UeScReal &varsigma);

    // RIS phase block over theta (length R N_RIS) with w and t fixed. Hermitian in theta: Q = conj(D),
    // c = conj(d_tilde), constant = -epsilon. Constraint is UnitModulus unless phase_levels >= 2.
    QuadraticSubproblem build_theta_subproblem(const LinkModel &model, const PrecoderVariables &vars,
                                               const UeScComplex &omega, const UeScReal &varsigma,
                                               int phase_levels = 0);

    // RIS TD block over t = [t_1; ...; t_M] with w and theta fixed; one Phi_m block per subcarrier
    QuadraticSubproblem build_t_subproblem(const LinkModel &model, const PrecoderVariables &vars,
                                           const UeScComplex &gamma, const UeScReal &varsigma);

    CVec stack_ris_td(const std::vector<CVec> &t);
    std::vector<CVec> unstack_ris_td(const CVec &t, int subcarriers);
}

#endif
