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
#include "cfris/pds_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace cfris
{
    CVec quantize_theta(const CVec &theta, int levels)
    {
        if (levels < 2)
            throw std::invalid_argument("quantize_theta: need at least 2 phase levels, got " + std::to_string(levels));
        CVec out(theta.size());
        const double step = 2.0 * pi / double(levels);
        for (Eigen::Index i = 0; i < theta.size(); ++i)
        {
            double ang = std::arg(theta[i]);
            if (ang < 0.0)
                ang += 2.0 * pi;
            const double pos = ang / step;
            int f = int(std::floor(pos));
            const double frac = pos - double(f);
            if (f >= levels - 1 && frac >= 0.5)
                f = 0; // tie between the last level and 2 pi wraps to 0
            else if (frac > 0.5)
                f += 1;
            if (f >= levels)
                f = 0;
            out[i] = unit_phasor(step * double(f));
        }
        return out;
    }

    namespace
    {
        constexpr double feasibility_tol = 1e-9;

        // Blocks b and b+1 share the same data when they are bitwise equal. Groups of consecutive equal
        // (Q_b, Upsilon_{a,b}) share one factorization per dual iteration.
        std::vector<std::pair<std::size_t, std::size_t>> group_blocks(const QuadraticSubproblem &p,
                                                                      const PowerConstraints &pc)
        {
            std::vector<std::pair<std::size_t, std::size_t>> groups;
            std::size_t start = 0;
            for (std::size_t b = 1; b <= p.blocks.size(); ++b)
            {
                bool same = b < p.blocks.size() && p.blocks[b].size() == p.blocks[start].size()
                            && p.blocks[b] == p.blocks[start];
                for (std::size_t a = 0; same && a < pc.upsilon.size(); ++a)
                    same = pc.upsilon[a][b] == pc.upsilon[a][start];
                if (!same)
                {
                    groups.emplace_back(start, b);
                    start = b;
                }
            }
            return groups;
        }

        // H = V diag(ev) V^H with small eigenvalues treated as zero
        struct PseudoInverse
        {
            CMat V;
            Eigen::VectorXd inv;

            explicit PseudoInverse(const CMat &H)
            {
                Eigen::SelfAdjointEigenSolver<CMat> es(H);
                V = es.eigenvectors();
                const Eigen::VectorXd &ev = es.eigenvalues();
                const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
                inv.resize(ev.size());
                for (Eigen::Index i = 0; i < ev.size(); ++i)
                    inv[i] = ev[i] > cut ? 1.0 / ev[i] : 0.0;
            }

            CMat solve(const CMat &rhs) const { return V * inv.asDiagonal() * (V.adjoint() * rhs); }
        };

        std::vector<double> constraint_values(const QuadraticSubproblem &p, const PowerConstraints &pc, const CVec &x)
        {
            const auto offs = p.block_offsets();
            std::vector<double> out(pc.budgets.size(), 0.0);
            for (std::size_t a = 0; a < pc.budgets.size(); ++a)
                for (std::size_t b = 0; b < p.blocks.size(); ++b)
                {
                    const auto seg = x.segment(offs[b], p.blocks[b].rows());
                    out[a] += std::real(seg.dot(pc.upsilon[a][b] * seg));
                }
            return out;
        }

        void validate_power(const QuadraticSubproblem &p, const PowerConstraints &pc)
        {
            if (pc.upsilon.size() != pc.budgets.size())
                throw std::invalid_argument("solve_pds: constraint and budget counts differ");
            for (std::size_t a = 0; a < pc.upsilon.size(); ++a)
            {
                if (!(pc.budgets[a] > 0.0))
                    throw std::invalid_argument("solve_pds: power budgets must be positive");
                if (pc.upsilon[a].size() != p.blocks.size())
                    throw std::invalid_argument("solve_pds: constraint block count differs from the objective");
                for (std::size_t b = 0; b < p.blocks.size(); ++b)
                    if (pc.upsilon[a][b].rows() != p.blocks[b].rows() || pc.upsilon[a][b].cols() != p.blocks[b].cols())
                        throw std::invalid_argument("solve_pds: constraint block shape differs from the objective");
            }
        }

        // Lagrangian minimizer and dual function at fixed multipliers
        struct DualPoint
        {
            std::vector<double> mu;
            CVec x;
            std::vector<double> power; // x^H Upsilon_a x
            double dual = 0.0;         // min_x L(x, mu)
            Eigen::MatrixXd hessian;   // d power_a / d mu_c, negative semidefinite
        };

        class PowerDual
        {
        public:
            // A proximal term prox ||x - x0||^2 makes every Lagrangian strictly convex. Without it the
            // rank-deficient blocks leave the multiplier scale undetermined near mu = 0.
            PowerDual(const QuadraticSubproblem &p, const PowerConstraints &pc, const CVec &x0, double prox)
                : p_(p), pc_(pc), offs_(p.block_offsets()), groups_(group_blocks(p, pc)), prox_(prox),
                  linear_(p.linear + prox * x0)
            {
            }

            DualPoint evaluate(const std::vector<double> &mu, bool with_hessian) const
            {
                const std::size_t A = pc_.budgets.size();
                DualPoint d;
                d.mu = mu;
                d.x.resize(p_.dimension());
                d.power.assign(A, 0.0);
                if (with_hessian)
                    d.hessian = Eigen::MatrixXd::Zero(Eigen::Index(A), Eigen::Index(A));

                double value = p_.constant;
                for (const auto &[start, stop] : groups_)
                {
                    CMat H = p_.blocks[start];
                    H.diagonal().array() += prox_;
                    for (std::size_t a = 0; a < A; ++a)
                        if (mu[a] > 0.0)
                            H += mu[a] * pc_.upsilon[a][start];
                    const PseudoInverse pinv(H);
                    const Eigen::Index n = H.rows();
                    CMat rhs(n, Eigen::Index(stop - start));
                    for (std::size_t b = start; b < stop; ++b)
                        rhs.col(Eigen::Index(b - start)) = linear_.segment(offs_[b], n);
                    const CMat sol = pinv.solve(rhs);

                    CMat Y(n, Eigen::Index(A));
                    for (std::size_t b = start; b < stop; ++b)
                    {
                        const auto xb = sol.col(Eigen::Index(b - start));
                        d.x.segment(offs_[b], n) = xb;
                        value -= std::real(rhs.col(Eigen::Index(b - start)).dot(xb));
                        for (std::size_t a = 0; a < A; ++a)
                        {
                            Y.col(Eigen::Index(a)) = pc_.upsilon[a][start] * xb;
                            d.power[a] += std::real(xb.dot(Y.col(Eigen::Index(a))));
                        }
                        if (with_hessian)
                        {
                            const CMat Z = pinv.V.adjoint() * Y;
                            d.hessian -= 2.0 * (Z.adjoint() * pinv.inv.asDiagonal() * Z).real();
                        }
                    }
                }
                // min_x L = constant - Re{c^H x*} - sum_a mu_a P_a
                for (std::size_t a = 0; a < A; ++a)
                    value -= mu[a] * pc_.budgets[a];
                d.dual = value;
                return d;
            }

        private:
            const QuadraticSubproblem &p_;
            const PowerConstraints &pc_;
            std::vector<Eigen::Index> offs_;
            std::vector<std::pair<std::size_t, std::size_t>> groups_;
            double prox_;
            CVec linear_;
        };

        PdsResult solve_power(const QuadraticSubproblem &p, const PowerConstraints &pc, const CVec &x0,
                              const PdsOptions &opt)
        {
            validate_power(p, pc);
            const std::size_t A = pc.budgets.size();
            {
                const auto v0 = constraint_values(p, pc, x0);
                for (std::size_t a = 0; a < A; ++a)
                    if (v0[a] > pc.budgets[a] * (1.0 + feasibility_tol))
                        throw std::invalid_argument("solve_pds: starting point violates power constraint "
                                                    + std::to_string(a));
            }

            const auto offs = p.block_offsets();

            // Dual scale per constraint
            std::vector<double> mu0(A, 0.0);
            for (std::size_t a = 0; a < A; ++a)
            {
                double cn = 0.0, lmax = 0.0;
                for (std::size_t b = 0; b < p.blocks.size(); ++b)
                {
                    const CMat &U = pc.upsilon[a][b];
                    const auto cb = p.linear.segment(offs[b], U.rows());
                    for (Eigen::Index i = 0; i < U.rows(); ++i)
                        if (std::abs(U(i, i)) > 0.0)
                            cn += std::norm(cb[i]);
                    if (U.size() > 0 && U.norm() > 0.0)
                    {
                        Eigen::SelfAdjointEigenSolver<CMat> es(U, Eigen::EigenvaluesOnly);
                        lmax = std::max(lmax, es.eigenvalues().maxCoeff());
                    }
                }
                mu0[a] = lmax > 0.0 ? std::sqrt(cn) / std::sqrt(lmax * pc.budgets[a]) : 1.0;
                if (!(mu0[a] > 0.0))
                    mu0[a] = 1e-12;
            }

            double qscale = 0.0;
            for (const auto &b : p.blocks)
                qscale = std::max(qscale, b.norm());
            const PowerDual dual(p, pc, x0, 1e-10 * qscale);
            const bool newton = opt.dual_update == DualUpdate::newton;
            DualPoint cur = dual.evaluate(std::vector<double>(A, 0.0), newton);

            auto kkt_of = [&](const DualPoint &d, std::vector<double> &r) {
                double kkt = 0.0;
                r.resize(A);
                for (std::size_t a = 0; a < A; ++a)
                {
                    r[a] = d.power[a] / pc.budgets[a] - 1.0;
                    const double slack = d.mu[a] / (d.mu[a] + mu0[a]) * std::abs(r[a]);
                    kkt = std::max(kkt, std::max(std::max(0.0, r[a]), slack));
                }
                return kkt;
            };

            auto subgradient_step = [&](const std::vector<double> &r, int it) {
                const double step = opt.step_scale / std::sqrt(double(it));
                std::vector<double> mu = cur.mu;
                for (std::size_t a = 0; a < A; ++a)
                    mu[a] = std::max(0.0, mu[a] + step * (mu[a] + mu0[a]) * std::clamp(r[a], -1.0, 1.0));
                return mu;
            };

            PdsResult res;
            std::vector<double> r;
            double kkt = kkt_of(cur, r);
            int stalled = 0;
            // The Lagrangian is singular at mu = 0 whenever Q is; Newton starts from the dual scale instead
            if (newton && kkt > opt.kkt_tolerance)
            {
                DualPoint start = dual.evaluate(mu0, true);
                std::vector<double> rs;
                const double ks = kkt_of(start, rs);
                if (std::isfinite(ks))
                {
                    cur = std::move(start);
                    kkt = ks;
                    r = rs;
                }
            }

            for (int it = 1; it <= opt.max_iterations; ++it)
            {
                res.iterations = it;
                res.kkt_residual = kkt;
                if (kkt <= opt.kkt_tolerance)
                {
                    res.converged = true;
                    break;
                }

                const std::vector<double> prev_mu = cur.mu;
                bool accepted = false;
                if (newton)
                {
                    // Projected Newton ascent on the free multipliers
                    Eigen::VectorXd g = Eigen::VectorXd::Zero(Eigen::Index(A));
                    for (std::size_t a = 0; a < A; ++a)
                        g[Eigen::Index(a)] = cur.power[a] - pc.budgets[a];
                    std::vector<Eigen::Index> free;
                    for (std::size_t a = 0; a < A; ++a)
                        if (cur.mu[a] > 0.0 || g[Eigen::Index(a)] > 0.0)
                            free.push_back(Eigen::Index(a));

                    Eigen::VectorXd dir = Eigen::VectorXd::Zero(Eigen::Index(A));
                    bool have_dir = false;
                    if (!free.empty())
                    {
                        const Eigen::Index nf = Eigen::Index(free.size());
                        Eigen::MatrixXd N(nf, nf);
                        Eigen::VectorXd gf(nf);
                        for (Eigen::Index i = 0; i < nf; ++i)
                        {
                            gf[i] = g[free[i]];
                            for (Eigen::Index j = 0; j < nf; ++j)
                                N(i, j) = -cur.hessian(free[i], free[j]);
                        }
                        N.diagonal().array() += 1e-12 * std::max(N.diagonal().cwiseAbs().maxCoeff(), 1e-300);
                        Eigen::LDLT<Eigen::MatrixXd> ldlt(N);
                        if (ldlt.info() == Eigen::Success)
                        {
                            const Eigen::VectorXd df = ldlt.solve(gf);
                            if (df.allFinite() && gf.dot(df) > 0.0)
                            {
                                for (Eigen::Index i = 0; i < nf; ++i)
                                    dir[free[i]] = df[i];
                                have_dir = true;
                            }
                        }
                    }

                    double t = 1.0;
                    for (int ls = 0; have_dir && ls < 40 && !accepted; ++ls, t *= 0.5)
                    {
                        std::vector<double> mu(A);
                        double ascent = 0.0;
                        for (std::size_t a = 0; a < A; ++a)
                        {
                            const double step = cur.mu[a] + t * dir[Eigen::Index(a)];
                            // positive multipliers shrink at most tenfold per step; tiny ones snap to zero
                            mu[a] = cur.mu[a] > 0.0 ? std::max(step, 0.1 * cur.mu[a]) : std::max(step, 0.0);
                            if (mu[a] < 1e-14 * mu0[a] && g[Eigen::Index(a)] < 0.0)
                                mu[a] = 0.0;
                            ascent += g[Eigen::Index(a)] * (mu[a] - cur.mu[a]);
                        }
                        DualPoint next = dual.evaluate(mu, true);
                        // Slope test along the executed step. The dual is concave, so a slope at the new point
                        // that is not much steeper downhill than the initial ascent rate guarantees progress
                        // without differencing two nearly equal dual values.
                        double slope = 0.0;
                        for (std::size_t a = 0; a < A; ++a)
                            slope += (next.power[a] - pc.budgets[a]) * (mu[a] - cur.mu[a]);
                        if (ascent > 0.0 && slope >= -0.5 * ascent)
                        {
                            cur = std::move(next);
                            accepted = true;
                        }
                    }
                }
                if (!accepted)
                    cur = dual.evaluate(subgradient_step(r, it), newton);
                kkt = kkt_of(cur, r);
                // Stop once the multipliers no longer move; the residual is then at working precision
                bool moved = false;
                for (std::size_t a = 0; a < A; ++a)
                    moved = moved || std::abs(cur.mu[a] - prev_mu[a]) > 1e-13 * (prev_mu[a] + mu0[a]);
                stalled = moved ? 0 : stalled + 1;
                if (stalled >= 3)
                    break;
            }
            if (!res.converged && kkt <= opt.kkt_tolerance)
            {
                res.kkt_residual = kkt;
                res.converged = true;
            }

            CVec x = cur.x;
            const auto v = cur.power;
            double scale = 1.0;
            for (std::size_t a = 0; a < A; ++a)
                if (v[a] > pc.budgets[a])
                    scale = std::min(scale, std::sqrt(pc.budgets[a] / v[a]));
            x *= scale;

            res.x = std::move(x);
            res.objective = p.objective(res.x);
            const double obj0 = p.objective(x0);
            if (!std::isfinite(res.objective) || obj0 < res.objective)
            {
                res.x = x0;
                res.objective = obj0;
            }
            return res;
        }

        void validate_unit(const CVec &x0)
        {
            for (Eigen::Index i = 0; i < x0.size(); ++i)
                if (std::abs(std::abs(x0[i]) - 1.0) > 1e-6)
                    throw std::invalid_argument("solve_pds: starting point is not unit modulus at entry "
                                                + std::to_string(i));
        }

        // Majorize-minimize iterations x <- exp(j arg((L I - Q) x + c)), one L per block
        // Largest eigenvalue per block; rejects non-Hermitian or indefinite blocks
        std::vector<double> block_lipschitz(const QuadraticSubproblem &p, double tol)
        {
            std::vector<double> L(p.blocks.size(), 0.0);
            for (std::size_t b = 0; b < p.blocks.size(); ++b)
            {
                const CMat &Q = p.blocks[b];
                if (Q.rows() != Q.cols())
                    throw std::invalid_argument("Quadratic block " + std::to_string(b) + " is not square");
                const double scale = Q.norm();
                if (scale == 0.0)
                    continue;
                if ((Q - Q.adjoint()).norm() > tol * scale)
                    throw std::invalid_argument("Quadratic block " + std::to_string(b) + " is not Hermitian");
                Eigen::SelfAdjointEigenSolver<CMat> es(Q, Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() < -tol * scale)
                    throw std::invalid_argument("Quadratic block " + std::to_string(b)
                                                + " is not positive semidefinite");
                L[b] = std::max(0.0, es.eigenvalues().maxCoeff());
            }
            return L;
        }

        CVec unit_modulus_descent(const QuadraticSubproblem &p, const std::vector<double> &L, CVec x,
                                  const PdsOptions &opt, int &iterations, bool &converged)
        {
            const auto offs = p.block_offsets();

            double obj = p.objective(x);
            iterations = 0;
            converged = false;
            for (int it = 1; it <= opt.phase_max_iterations; ++it)
            {
                iterations = it;
                CVec next(x.size());
                for (std::size_t b = 0; b < p.blocks.size(); ++b)
                {
                    const Eigen::Index n = p.blocks[b].rows();
                    const auto xb = x.segment(offs[b], n);
                    const CVec g = L[b] * xb - p.blocks[b] * xb + p.linear.segment(offs[b], n);
                    for (Eigen::Index i = 0; i < n; ++i)
                        next[offs[b] + i] = std::abs(g[i]) > 0.0 ? g[i] / std::abs(g[i]) : xb[i];
                }
                const double nobj = p.objective(next);
                if (nobj > obj)
                    break; // rounding noise only; the iteration is monotone in exact arithmetic
                const double change = std::abs(obj - nobj);
                x = std::move(next);
                obj = nobj;
                if (change <= opt.phase_tolerance * std::max(1.0, std::abs(obj)))
                {
                    converged = true;
                    break;
                }
            }
            return x;
        }

        // Exact coordinate minimization, one entry at a time; levels == 0 means the continuous circle.
        // Never increases the objective.
        CVec coordinate_sweeps(const QuadraticSubproblem &p, CVec x, int levels, int sweeps, double tol)
        {
            const auto offs = p.block_offsets();
            for (int s = 0; s < sweeps; ++s)
            {
                double moved = 0.0;
                for (std::size_t b = 0; b < p.blocks.size(); ++b)
                {
                    const CMat &Q = p.blocks[b];
                    const Eigen::Index n = Q.rows();
                    for (Eigen::Index i = 0; i < n; ++i)
                    {
                        const Eigen::Index gi = offs[b] + i;
                        const cplx field = p.linear[gi] - Q.row(i).transpose().cwiseProduct(x.segment(offs[b], n)).sum()
                                           + Q(i, i) * x[gi];
                        if (!(std::abs(field) > 0.0))
                            continue;
                        cplx cand = field / std::abs(field);
                        if (levels > 0)
                        {
                            CVec one(1);
                            one[0] = cand;
                            cand = quantize_theta(one, levels)[0];
                        }
                        // keep the current value unless the candidate is strictly better
                        if (cand != x[gi]
                            && std::real(std::conj(cand) * field) > std::real(std::conj(x[gi]) * field) * (1.0 + 1e-14))
                        {
                            moved = std::max(moved, std::abs(cand - x[gi]));
                            x[gi] = cand;
                        }
                    }
                }
                if (moved <= tol)
                    break;
            }
            return x;
        }
    }

    PdsResult solve_pds(const QuadraticSubproblem &prob, const CVec &x0, const PdsOptions &options)
    {
        if (x0.size() != prob.dimension() || prob.linear.size() != prob.dimension())
            throw std::invalid_argument("solve_pds: dimension mismatch");
        if (options.max_iterations < 1 || options.phase_max_iterations < 1 || !(options.step_scale > 0.0))
            throw std::invalid_argument("solve_pds: invalid options");
        if (const auto *pc = std::get_if<PowerConstraints>(&prob.constraints))
        {
            prob.check_psd(1e-8);
            return solve_power(prob, *pc, x0, options);
        }
        const std::vector<double> L = block_lipschitz(prob, 1e-8);

        validate_unit(x0);
        PdsResult res;
        const double obj0 = prob.objective(x0);
        if (std::holds_alternative<UnitModulus>(prob.constraints))
        {
            const CVec relaxed = unit_modulus_descent(prob, L, x0, options, res.iterations, res.converged);
            res.x = coordinate_sweeps(prob, relaxed, 0, 100, 1e-9);
            res.objective = prob.objective(res.x);
        }
        else
        {
            const int levels = std::get<DiscretePhase>(prob.constraints).levels;
            if (levels < 2)
                throw std::invalid_argument("solve_pds: discrete phase needs at least 2 levels");
            const CVec on_grid = quantize_theta(x0, levels);
            if ((on_grid - x0).cwiseAbs().maxCoeff() > 1e-6)
                throw std::invalid_argument("solve_pds: starting point is not on the phase grid");
            const CVec relaxed = unit_modulus_descent(prob, L, x0, options, res.iterations, res.converged);
            res.x = coordinate_sweeps(prob, quantize_theta(relaxed, levels), levels, 50, 0.0);
            res.objective = prob.objective(res.x);
        }
        if (!std::isfinite(res.objective) || obj0 < res.objective)
        {
            res.x = x0;
            res.objective = obj0;
        }
        return res;
    }
}
