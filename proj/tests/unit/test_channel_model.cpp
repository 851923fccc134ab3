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

#include "cfris/channel_model.hpp"
#include "test_support.hpp"

#include <random>

using namespace cfris;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const SubcarrierGrid grid = make_subcarrier_grid(100e9, 10e9, 8);
    const UlaGeometry ula(4);
    const UpaGeometry upa(2, 3);
}

TEST_CASE("AP-RIS channel - rank one with constant entry modulus")
{
    ApRisPathParams p;
    p.alpha = {3e-5, -4e-5};
    p.delay_s = 80e-9;
    p.aoa_az = 0.4;
    p.aoa_el = 1.2;
    p.aod = -0.7;
    const auto G = gen_ap_ris_channel(p, grid, ula, upa);
    REQUIRE(G.size() == 8);
    for (const CMat &g : G)
    {
        REQUIRE(g.rows() == 6);
        REQUIRE(g.cols() == 4);
        Eigen::JacobiSVD<CMat> svd(g);
        CHECK(svd.singularValues()[1] < 1e-12 * svd.singularValues()[0]);
        for (Eigen::Index i = 0; i < g.size(); ++i)
            CHECK_THAT(std::abs(g.data()[i]), WithinRel(std::abs(p.alpha) / std::sqrt(24.0), 1e-12));
    }

    p.alpha = 0.0;
    for (const CMat &g : gen_ap_ris_channel(p, grid, ula, upa))
        CHECK(g.isZero(0.0));
}

TEST_CASE("RIS-UE channel - norm and delay phase across subcarriers")
{
    RisUePathParams p;
    p.beta = {0.0, 2e-4};
    p.delay_s = 33e-9;
    p.aod_az = 0.2;
    p.aod_el = -0.5;
    const auto u = gen_ris_ue_channel(p, grid, upa);
    for (const CVec &v : u)
        CHECK_THAT(v.norm(), WithinRel(2e-4, 1e-12));

    // entry 0 of the steering vector is real-positive, so entry 0 carries only the delay phase
    for (int m = 1; m < grid.count; ++m)
    {
        const cplx ratio = u[m][0] / u[0][0];
        const cplx expected = std::polar(1.0, -2.0 * pi * p.delay_s * (grid.frequencies[m] - grid.frequencies[0]));
        CHECK_THAT(std::abs(ratio - expected), WithinAbs(0.0, 1e-9));
    }

    RisUePathParams flat;
    flat.beta = 1.0;
    flat.aod_az = 0.0;
    flat.aod_el = 0.9;
    for (const CVec &v : gen_ris_ue_channel(flat, grid, upa))
        CHECK_THAT((v - CVec::Constant(6, 1.0 / std::sqrt(6.0))).norm(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("Direct channel - norm, broadside and null gain")
{
    DirectPathParams p;
    p.gain = {1e-6, 1e-6};
    p.delay_s = 70e-9;
    p.aod = 0.0;
    const auto h = gen_direct_channel(p, grid, ula);
    for (int m = 0; m < grid.count; ++m)
    {
        CHECK_THAT(h[m].norm(), WithinRel(std::abs(p.gain), 1e-12));
        const cplx scale = p.gain * std::polar(1.0, -2.0 * pi * p.delay_s * grid.frequencies[m]) / 2.0;
        for (int n = 0; n < 4; ++n)
            CHECK_THAT(std::abs(h[m][n] - scale), WithinAbs(0.0, 1e-18));
    }
    p.gain = 0.0;
    for (const CVec &v : gen_direct_channel(p, grid, ula))
        CHECK(v.isZero(0.0));
}

TEST_CASE("Effective channel - matches the primitive expansion")
{
    testing::SmallDims d;
    d.subcarriers = 3;
    const auto inst = testing::make_instance(testing::small_config(d), 11);
    std::mt19937_64 rng(3);
    const auto v = testing::random_variables(inst->model, rng);

    for (int a = 0; a < d.aps; ++a)
        for (int k = 0; k < d.ues; ++k)
            for (int m = 0; m < d.subcarriers; ++m)
            {
                const CVec h = effective_channel(inst->channels, v.ris, a, k, m);
                const CVec ref = testing::reference_channel(inst->channels, v.ris, a, k, m);
                CHECK((h - ref).norm() <= 1e-12 * ref.norm());
            }

    // unity configuration: h^H = h_dir^H + sum_r u^H G
    const auto unity = RisConfiguration::unity(inst->model.ris_total_elements(), d.subcarriers);
    const CVec h = effective_channel(inst->channels, unity, 1, 0, 2);
    Eigen::RowVectorXcd hh = inst->channels.h_dir(1, 0, 2).adjoint();
    for (int r = 0; r < d.ris; ++r)
        hh += inst->channels.u(r, 0, 2).adjoint() * inst->channels.G(1, r, 2);
    CHECK((h.adjoint() - hh).norm() <= 1e-12 * hh.norm());
}

TEST_CASE("Effective channel - no RIS and global phase rotation")
{
    const auto inst = testing::make_instance(testing::small_config({}), 5);
    const ChannelRealization bare = inst->channels.without_ris();
    RisConfiguration none;
    none.t.assign(2, CVec());
    for (int a = 0; a < 2; ++a)
        for (int k = 0; k < 2; ++k)
            CHECK(effective_channel(bare, none, a, k, 1) == bare.h_dir(a, k, 1));

    // multiplying theta by c multiplies every reflected term by c
    std::mt19937_64 rng(9);
    auto v = testing::random_variables(inst->model, rng);
    const cplx c = std::polar(1.0, 0.77);
    const CVec reflected = effective_channel(inst->channels, v.ris, 0, 1, 0) - inst->channels.h_dir(0, 1, 0);
    v.ris.theta *= c;
    const CVec rotated = effective_channel(inst->channels, v.ris, 0, 1, 0) - inst->channels.h_dir(0, 1, 0);
    // h carries the conjugate of the reflection coefficients
    CHECK((rotated - std::conj(c) * reflected).norm() <= 1e-12 * reflected.norm());
}

TEST_CASE("Stacked effective channel - layout")
{
    testing::SmallDims d;
    d.aps = 3;
    const auto inst = testing::make_instance(testing::small_config(d), 2);
    std::mt19937_64 rng(4);
    const auto v = testing::random_variables(inst->model, rng);
    const CVec s = stack_effective_channel(inst->channels, v.ris, 1, 1);
    REQUIRE(s.size() == 3 * 4);
    for (int a = 0; a < 3; ++a)
        CHECK(s.segment(4 * a, 4) == effective_channel(inst->channels, v.ris, a, 1, 1));

    testing::SmallDims one;
    one.aps = 1;
    const auto single = testing::make_instance(testing::small_config(one), 2);
    const auto u = testing::random_variables(single->model, rng);
    CHECK(stack_effective_channel(single->channels, u.ris, 0, 0) == effective_channel(single->channels, u.ris, 0, 0, 0));
}

TEST_CASE("CSI perturbation - error statistics")
{
    const auto inst = testing::make_instance(testing::small_config({}), 8);
    std::mt19937_64 rng(1);
    const ChannelRealization same = perturb_csi(inst->channels, 0.0, rng);
    CHECK(same.G(1, 1, 1) == inst->channels.G(1, 1, 1));
    CHECK(same.h_dir(0, 1, 0) == inst->channels.h_dir(0, 1, 0));
    CHECK_THROWS_AS(perturb_csi(inst->channels, -0.1, rng), std::invalid_argument);

    // every coefficient receives its own draw; gather many realizations of two of them
    const double delta = 0.25;
    const cplx h0 = inst->channels.h_dir(0, 0, 0)[0];
    const cplx h1 = inst->channels.h_dir(0, 0, 0)[1];
    const int draws = 10000;
    double ratio0 = 0.0, ratio1 = 0.0;
    cplx cross = 0.0;
    for (int i = 0; i < draws; ++i)
    {
        const ChannelRealization p = perturb_csi(inst->channels, delta, rng);
        const cplx e0 = p.h_dir(0, 0, 0)[0] - h0, e1 = p.h_dir(0, 0, 0)[1] - h1;
        ratio0 += std::norm(e0) / std::norm(h0);
        ratio1 += std::norm(e1) / std::norm(h1);
        cross += e0 * std::conj(e1) / (std::abs(h0) * std::abs(h1));
    }
    ratio0 /= draws;
    ratio1 /= draws;
    cross /= double(draws);
    CHECK(ratio0 >= 0.95 * delta);
    CHECK(ratio0 <= 1.05 * delta);
    CHECK(ratio1 >= 0.95 * delta);
    CHECK(ratio1 <= 1.05 * delta);
    // normalized cross moment has standard deviation delta / sqrt(draws)
    CHECK(std::abs(cross) <= 3.0 * delta / std::sqrt(double(draws)));
}
