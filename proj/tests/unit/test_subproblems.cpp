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

#include "catch_amalgamated.hpp"

#include "cfris/subproblems.hpp"
#include "test_support.hpp"

#include <random>

using namespace cfris;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    double min_eigenvalue(const CMat &Q)
    {
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Q + Q.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    struct Setup
    {
        std::unique_ptr<testing::Instance> inst;
        PrecoderVariables vars;
        UeScReal vs;
        UeScComplex aux;
    };

    Setup setup(std::uint64_t seed, testing::SmallDims d = {})
    {
        Setup s;
        s.inst = testing::make_instance(testing::small_config(d), seed);
        std::mt19937_64 rng(seed + 1000);
        s.vars = testing::random_variables(s.inst->model, rng);
        s.vs = compute_varsigma(s.inst->model, update_rho(s.inst->model, s.vars));
        s.aux = update_auxiliary(s.inst->model, s.vars, s.vs);
        return s;
    }
}

TEST_CASE("Quadratic subproblem - generic operations")
{
    QuadraticSubproblem p;
    CMat a(2, 2), b(1, 1);
    a << 2.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 3.0;
    b << 5.0;
    p.blocks = {a, b};
    p.linear = CVec::Ones(3);
    p.constant = 4.0;
    CHECK(p.dimension() == 3);
    CHECK(p.block_offsets() == std::vector<Eigen::Index>{0, 2});
    const CMat Q = p.dense_quadratic();
    CHECK(Q.block(0, 2, 2, 1).isZero(0.0));
    const CVec x = CVec::Constant(3, cplx(0.5, -0.25));
    CHECK((p.apply(x) - Q * x).norm() <= 1e-15);
    const double direct = std::real(x.dot(Q * x)) - 2.0 * std::real(p.linear.dot(x)) + 4.0;
    CHECK_THAT(p.objective(x), WithinRel(direct, 1e-14));
    CHECK(p.surrogate(x) == -p.objective(x));
    CHECK_NOTHROW(p.check_psd());

    p.blocks[1](0, 0) = -1.0;
    CHECK_THROWS_AS(p.check_psd(), std::invalid_argument);
    p.blocks[1](0, 0) = 1.0;
    p.blocks[0](0, 1) = 7.0;
    CHECK_THROWS_AS(p.check_psd(), std::invalid_argument);
}

TEST_CASE("Baseband block - matrix form equals the direct sum")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto inst = testing::make_instance(testing::small_config({}), 400 + trial);
        CHECK(testing::surrogate_gap(*inst, testing::Block::baseband, 100, rng) <= 1e-9);
    }
}

TEST_CASE("Baseband block - structure and power constraints")
{
    const Setup s = setup(41);
    const QuadraticSubproblem p = build_w_subproblem(s.inst->model, s.vars.ris, s.aux, s.vs);
    REQUIRE(p.dimension() == s.inst->model.w_size());
    REQUIRE(std::holds_alternative<PowerConstraints>(p.constraints));
    for (const CMat &Q : p.blocks)
        CHECK(min_eigenvalue(Q) >= -1e-10 * Q.norm());

    const auto &pc = std::get<PowerConstraints>(p.constraints);
    REQUIRE(pc.upsilon.size() == 2);
    std::mt19937_64 rng(5);
    const auto v = testing::random_variables(s.inst->model, rng);
    const auto power = per_ap_power(s.inst->model, v.w);
    const auto offs = p.block_offsets();
    for (int a = 0; a < 2; ++a)
    {
        double quad = 0.0;
        for (std::size_t b = 0; b < p.blocks.size(); ++b)
        {
            const auto xb = v.w.segment(offs[b], p.blocks[b].rows());
            quad += std::real(xb.dot(pc.upsilon[a][b] * xb));
        }
        CHECK_THAT(quad, WithinRel(power[a], 1e-10));
        CHECK(pc.budgets[a] == s.inst->model.power_budget(a));
    }
}

TEST_CASE("RIS phase block - matrix form equals the direct sum")
{
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto inst = testing::make_instance(testing::small_config({}), 500 + trial);
        CHECK(testing::surrogate_gap(*inst, testing::Block::ris_phase, 100, rng) <= 1e-9);
    }
}

TEST_CASE("RIS phase block - PSD, constraint kind and the no-RIS limit")
{
    const Setup s = setup(43);
    const QuadraticSubproblem p = build_theta_subproblem(s.inst->model, s.vars, s.aux, s.vs);
    REQUIRE(p.dimension() == s.inst->model.ris_total_elements());
    CHECK(std::holds_alternative<UnitModulus>(p.constraints));
    for (const CMat &Q : p.blocks)
        CHECK(min_eigenvalue(Q) >= -1e-10 * Q.norm());
    const auto q = build_theta_subproblem(s.inst->model, s.vars, s.aux, s.vs, 4);
    REQUIRE(std::holds_alternative<DiscretePhase>(q.constraints));
    CHECK(std::get<DiscretePhase>(q.constraints).levels == 4);

    // no reflecting surfaces: there is no phase block to build
    const ChannelRealization bare = s.inst->channels.without_ris();
    const LinkModel model(bare, s.inst->precoder, s.inst->cfg.ue_weights(), s.inst->cfg.noise_w(),
                          s.inst->cfg.power_budget_w());
    PrecoderVariables v = s.vars;
    v.ris.theta.resize(0);
    for (auto &t : v.ris.t)
        t.resize(0);
    const UeScComplex om = update_auxiliary(model, v, s.vs);
    CHECK_THROWS_AS(build_theta_subproblem(model, v, om, s.vs), std::invalid_argument);
}

TEST_CASE("RIS delay block - matrix form equals the direct sum")
{
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 20; ++trial)
    {
        const auto inst = testing::make_instance(testing::small_config({}), 600 + trial);
        CHECK(testing::surrogate_gap(*inst, testing::Block::ris_delay, 100, rng) <= 1e-9);
    }
}

TEST_CASE("RIS delay block - one block per subcarrier, vanishes without reflection")
{
    testing::SmallDims d;
    d.subcarriers = 3;
    const Setup s = setup(53, d);
    const QuadraticSubproblem p = build_t_subproblem(s.inst->model, s.vars, s.aux, s.vs);
    const int n = s.inst->model.ris_total_elements();
    REQUIRE(p.blocks.size() == 3);
    for (const CMat &Q : p.blocks)
        CHECK(Q.rows() == n);
    const CMat dense = p.dense_quadratic();
    for (int m = 0; m < 3; ++m)
        for (int l = 0; l < 3; ++l)
            if (m != l)
                CHECK(dense.block(m * n, l * n, n, n).isZero(0.0));

    PrecoderVariables off = s.vars;
    off.ris.theta.setZero();
    const QuadraticSubproblem z = build_t_subproblem(s.inst->model, off, s.aux, s.vs);
    for (const CMat &Q : z.blocks)
        CHECK(Q.isZero(0.0));
    CHECK(z.linear.isZero(0.0));
}

TEST_CASE("RIS delay stacking round trip")
{
    std::mt19937_64 rng(3);
    std::vector<CVec> t = {testing::random_phasors(4, rng), testing::random_phasors(4, rng)};
    const CVec s = stack_ris_td(t);
    CHECK(s.size() == 8);
    CHECK(s.segment(4, 4) == t[1]);
    CHECK(unstack_ris_td(s, 2) == t);
    CHECK_THROWS_AS(unstack_ris_td(s, 3), std::invalid_argument);
}
