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
#ifndef CFRIS_AO_OPTIMIZER_HPP
#define CFRIS_AO_OPTIMIZER_HPP

#include "cfris/link_metrics.hpp"
#include "cfris/pds_solver.hpp"
#include "cfris/subproblems.hpp"

#include <random>
#include <vector>

namespace cfris
{
    struct AoOptions
    {
        int max_iterations = 20;
        double tolerance = 1e-3;     // relative WSR change that counts as converged
        bool optimize_theta = true;  // ignored when the realization has no RIS
        bool optimize_ris_td = true; // false keeps t = all-ones
        int phase_levels = 0;        // 0 = continuous reflection phases, F otherwise
        AuxiliaryForm auxiliary_form = AuxiliaryForm::complex_maximizer;
        PdsOptions solver;
    };

    struct AoIterationRecord
    {
        int iteration = 0;
        double wsr = 0.0;              // bits/s/Hz summed over UEs and subcarriers
        double surrogate_w = 0.0;      // after the baseband update
        double surrogate_theta = 0.0;  // after the RIS phase update
        double surrogate_t = 0.0;      // after the RIS TD update
        double power_residual = 0.0;   // max_a (P_a / P_a,max - 1)^+
        double modulus_residual = 0.0; // max | |x_i| - 1 | over theta and t
        double elapsed_s = 0.0;
    };

    struct AoTrace
    {
        std::vector<AoIterationRecord> records; // records[0] is the initial point
        bool converged = false;
        int iterations = 0;                     // AO iterations executed

        // True when every step is non-decreasing within rel_slack
        bool monotone(double rel_slack = 1e-6) const;
        // First iteration whose relative WSR change is below tol, or -1
        int iterations_to_converge(double tol) const;
    };

    struct AoResult
    {
        PrecoderVariables variables;
        AoTrace trace;
    };

    // Circularly-symmetric Gaussian w scaled per AP to meet its budget with equality; uniform theta
    // phases (grid points when phase_levels >= 2); t = all-ones.
    PrecoderVariables random_initialization(const LinkModel &model, int phase_levels, std::mt19937_64 &rng);

    // Alternating optimization rho -> lambda -> w -> omega -> theta -> gamma -> t, repeated until the
    // relative WSR change drops below options.tolerance or max_iterations is reached. The analog
    // precoder inside the model is held fixed. Throws SolverError on a non-finite WSR.
    AoResult run_ao(const LinkModel &model, const PrecoderVariables &init, const AoOptions &options);
}

#endif
