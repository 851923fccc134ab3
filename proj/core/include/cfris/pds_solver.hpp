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
#ifndef CFRIS_PDS_SOLVER_HPP
#define CFRIS_PDS_SOLVER_HPP

#include "cfris/subproblems.hpp"
#include "cfris/types.hpp"

#include <stdexcept>

namespace cfris
{
    enum class DualUpdate
    {
        newton,      // projected Newton ascent on the multipliers with backtracking
        subgradient, // mu <- [mu + (a / sqrt(k)) (mu + mu0) r]^+
    };

    struct PdsOptions
    {
        DualUpdate dual_update = DualUpdate::newton;
        // Dual step a / sqrt(k), applied to the relative constraint residual
        double step_scale = 0.5;
        int max_iterations = 2000;
        double kkt_tolerance = 1e-6;
        // Projected gradient on the unit-modulus manifold
        int phase_max_iterations = 2000;
        double phase_tolerance = 1e-10; // relative objective change
    };

    struct PdsResult
    {
        CVec x;
        int iterations = 0;
        double objective = 0.0;
        double kkt_residual = 0.0; // power-constrained problems only
        bool converged = false;
    };

    struct SolverError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Power constraints: exact primal minimization of the Lagrangian per block plus projected dual
    // ascent on the multipliers (initialized at zero), see DualUpdate.
    // Unit modulus: projected gradient with step 1/lambda_max per block, entrywise renormalization,
    // polished by exact single-entry updates.
    // Discrete phase: unit-modulus relaxation, quantize_theta, then single-entry updates over the alphabet.
    // Dual iterations also stop when the multipliers stall at working precision.
    // The returned point is feasible and never has a larger objective than x0.
    // Throws std::invalid_argument for an infeasible x0 or a non-PSD quadratic.
    PdsResult solve_pds(const QuadraticSubproblem &prob, const CVec &x0, const PdsOptions &options = {});

    // Nearest point of { exp(j 2 pi f / levels) } in angle, ties go to the smaller index
    CVec quantize_theta(const CVec &theta, int levels);
}

#endif
