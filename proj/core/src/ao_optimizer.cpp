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
#include "cfris/ao_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    namespace
    {
        double relative_change(double prev, double next)
        {
            return std::abs(next - prev) / std::max(std::abs(prev), 1e-300);
        }

        double power_residual(const LinkModel &model, const CVec &w)
        {
            const auto p = per_ap_power(model, w);
            double r = 0.0;
            for (int a = 0; a < model.aps(); ++a)
                r = std::max(r, p[a] / model.power_budget(a) - 1.0);
            return r;
        }

        double modulus_residual(const RisConfiguration &ris)
        {
            double r = 0.0;
            for (Eigen::Index i = 0; i < ris.theta.size(); ++i)
                r = std::max(r, std::abs(std::abs(ris.theta[i]) - 1.0));
            for (const auto &t : ris.t)
                for (Eigen::Index i = 0; i < t.size(); ++i)
                    r = std::max(r, std::abs(std::abs(t[i]) - 1.0));
            return r;
        }
    }

    bool AoTrace::monotone(double rel_slack) const
    {
        for (std::size_t i = 1; i < records.size(); ++i)
        {
            const double prev = records[i - 1].wsr;
            if (records[i].wsr < prev - rel_slack * std::abs(prev))
                return false;
        }
        return true;
    }

    int AoTrace::iterations_to_converge(double tol) const
    {
        for (std::size_t i = 1; i < records.size(); ++i)
            if (relative_change(records[i - 1].wsr, records[i].wsr) < tol)
                return int(i);
        return -1;
    }

    PrecoderVariables random_initialization(const LinkModel &model, int phase_levels, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        PrecoderVariables v;
        v.w.resize(model.w_size());
        for (Eigen::Index i = 0; i < v.w.size(); ++i)
        {
            const double re = normal(rng), im = normal(rng);
            v.w[i] = cplx(re, im);
        }
        const auto p = per_ap_power(model, v.w);
        for (int m = 0; m < model.subcarriers(); ++m)
            for (int k = 0; k < model.ues(); ++k)
                for (int a = 0; a < model.aps(); ++a)
                    v.w.segment(model.w_offset(a, k, m), model.rf_chains()) *=
                        std::sqrt(model.power_budget(a) / p[a]);

        const int n = model.ris_total_elements();
        v.ris = RisConfiguration::unity(n, model.subcarriers());
        if (phase_levels >= 2)
        {
            std::uniform_int_distribution<int> level(0, phase_levels - 1);
            for (int i = 0; i < n; ++i)
                v.ris.theta[i] = unit_phasor(2.0 * pi * double(level(rng)) / double(phase_levels));
        }
        else
        {
            std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
            for (int i = 0; i < n; ++i)
                v.ris.theta[i] = unit_phasor(phase(rng));
        }
        return v;
    }

    AoResult run_ao(const LinkModel &model, const PrecoderVariables &init, const AoOptions &options)
    {
        if (options.max_iterations < 0 || !(options.tolerance > 0.0))
            throw std::invalid_argument("run_ao: need a non-negative iteration cap and a positive tolerance");
        if (init.w.size() != model.w_size())
            throw std::invalid_argument("run_ao: initial w has the wrong length");
        if (init.ris.theta.size() != model.ris_total_elements()
            || init.ris.t.size() != std::size_t(model.subcarriers()))
            throw std::invalid_argument("run_ao: initial RIS configuration has the wrong shape");

        const auto t0 = std::chrono::steady_clock::now();
        auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

        AoResult out;
        out.variables = init;
        PrecoderVariables &v = out.variables;
        const bool has_ris = model.ris_total_elements() > 0;

        AoIterationRecord rec0;
        rec0.wsr = wsr(model, v);
        if (!std::isfinite(rec0.wsr))
            throw SolverError("run_ao: initial weighted sum rate is not finite");
        rec0.power_residual = power_residual(model, v.w);
        rec0.modulus_residual = modulus_residual(v.ris);
        out.trace.records.push_back(rec0);

        for (int it = 1; it <= options.max_iterations; ++it)
        {
            AoIterationRecord rec;
            rec.iteration = it;

            const UeScReal rho = update_rho(model, v);
            const UeScReal varsigma = compute_varsigma(model, rho);

            const UeScComplex lambda = update_auxiliary(model, v, varsigma, options.auxiliary_form);
            const QuadraticSubproblem pw = build_w_subproblem(model, v.ris, lambda, varsigma);
            v.w = solve_pds(pw, v.w, options.solver).x;
            rec.surrogate_w = pw.surrogate(v.w);

            if (has_ris && options.optimize_theta)
            {
                const UeScComplex omega = update_auxiliary(model, v, varsigma, options.auxiliary_form);
                const QuadraticSubproblem pt =
                    build_theta_subproblem(model, v, omega, varsigma, options.phase_levels);
                v.ris.theta = solve_pds(pt, v.ris.theta, options.solver).x;
                rec.surrogate_theta = pt.surrogate(v.ris.theta);
            }

            if (has_ris && options.optimize_ris_td)
            {
                const UeScComplex gamma = update_auxiliary(model, v, varsigma, options.auxiliary_form);
                const QuadraticSubproblem pd = build_t_subproblem(model, v, gamma, varsigma);
                const CVec t = solve_pds(pd, stack_ris_td(v.ris.t), options.solver).x;
                v.ris.t = unstack_ris_td(t, model.subcarriers());
                rec.surrogate_t = pd.surrogate(t);
            }

            rec.wsr = wsr(model, v);
            if (!std::isfinite(rec.wsr))
                throw SolverError("run_ao: weighted sum rate became non-finite at iteration " + std::to_string(it));
            rec.power_residual = power_residual(model, v.w);
            rec.modulus_residual = modulus_residual(v.ris);
            rec.elapsed_s = elapsed();

            const double prev = out.trace.records.back().wsr;
            out.trace.records.push_back(rec);
            out.trace.iterations = it;
            if (relative_change(prev, rec.wsr) < options.tolerance)
            {
                out.trace.converged = true;
                break;
            }
        }
        return out;
    }
}
