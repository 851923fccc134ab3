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
#include "cfris/channel_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    namespace
    {
        cplx delay_phasor(double delay_s, double freq_hz) { return unit_phasor(-2.0 * pi * delay_s * freq_hz); }
    }

    std::vector<CMat> gen_ap_ris_channel(const ApRisPathParams &params, const SubcarrierGrid &grid,
                                         const UlaGeometry &ula, const UpaGeometry &upa)
    {
        std::vector<CMat> out;
        out.reserve(grid.count);
        for (int m = 0; m < grid.count; ++m)
        {
            const CVec b = upa_arv(params.aoa_az, params.aoa_el, grid.eta[m], upa);
            const CVec a = ula_arv(params.aod, grid.eta[m], ula);
            out.push_back((params.alpha * delay_phasor(params.delay_s, grid.frequencies[m])) * b * a.adjoint());
        }
        return out;
    }

    std::vector<CVec> gen_ris_ue_channel(const RisUePathParams &params, const SubcarrierGrid &grid, const UpaGeometry &upa)
    {
        std::vector<CVec> out;
        out.reserve(grid.count);
        for (int m = 0; m < grid.count; ++m)
            out.push_back((params.beta * delay_phasor(params.delay_s, grid.frequencies[m]))
                          * upa_arv(params.aod_az, params.aod_el, grid.eta[m], upa));
        return out;
    }

    std::vector<CVec> gen_direct_channel(const DirectPathParams &params, const SubcarrierGrid &grid, const UlaGeometry &ula)
    {
        std::vector<CVec> out;
        out.reserve(grid.count);
        for (int m = 0; m < grid.count; ++m)
            out.push_back((params.gain * delay_phasor(params.delay_s, grid.frequencies[m]))
                          * ula_arv(params.aod, grid.eta[m], ula));
        return out;
    }

    ChannelRealization::ChannelRealization(SubcarrierGrid grid, UlaGeometry ula, UpaGeometry upa, int aps, int ris, int ues,
                                           std::vector<ApRisPathParams> ap_ris, std::vector<RisUePathParams> ris_ue,
                                           std::vector<DirectPathParams> direct)
        : grid_(std::move(grid)), ula_(ula), upa_(upa), aps_(aps), ris_(ris), ues_(ues), ap_ris_(std::move(ap_ris)),
          ris_ue_(std::move(ris_ue)), direct_(std::move(direct))
    {
        if (aps < 1 || ues < 1 || ris < 0)
            throw std::invalid_argument("Channel realization needs A >= 1, K >= 1 and R >= 0");
        if (ap_ris_.size() != std::size_t(aps * ris) || ris_ue_.size() != std::size_t(ris * ues)
            || direct_.size() != std::size_t(aps * ues))
            throw std::invalid_argument("Path record counts do not match (A, R, K)");

        for (const auto &p : ap_ris_)
            if (p.delay_s < 0.0)
                throw std::invalid_argument("AP-RIS delay must be non-negative");
        for (const auto &p : ris_ue_)
            if (p.delay_s < 0.0)
                throw std::invalid_argument("RIS-UE delay must be non-negative");
        for (const auto &p : direct_)
            if (p.delay_s < 0.0)
                throw std::invalid_argument("Direct-link delay must be non-negative");

        const int M = grid_.count;
        G_.resize(std::size_t(aps * ris * M));
        u_.resize(std::size_t(ris * ues * M));
        h_dir_.resize(std::size_t(aps * ues * M));
        for (int a = 0; a < aps; ++a)
            for (int r = 0; r < ris; ++r)
            {
                auto per_sc = gen_ap_ris_channel(ap_ris_path(a, r), grid_, ula_, upa_);
                for (int m = 0; m < M; ++m)
                    G_[idx_G(a, r, m)] = std::move(per_sc[m]);
            }
        for (int r = 0; r < ris; ++r)
            for (int k = 0; k < ues; ++k)
            {
                auto per_sc = gen_ris_ue_channel(ris_ue_path(r, k), grid_, upa_);
                for (int m = 0; m < M; ++m)
                    u_[idx_u(r, k, m)] = std::move(per_sc[m]);
            }
        for (int a = 0; a < aps; ++a)
            for (int k = 0; k < ues; ++k)
            {
                auto per_sc = gen_direct_channel(direct_path(a, k), grid_, ula_);
                for (int m = 0; m < M; ++m)
                    h_dir_[idx_d(a, k, m)] = std::move(per_sc[m]);
            }

        auto finite = [](const auto &x) { return x.allFinite(); };
        for (const auto &g : G_)
            if (!finite(g))
                throw std::invalid_argument("Non-finite AP-RIS channel entry");
        for (const auto &v : u_)
            if (!finite(v))
                throw std::invalid_argument("Non-finite RIS-UE channel entry");
        for (const auto &v : h_dir_)
            if (!finite(v))
                throw std::invalid_argument("Non-finite direct channel entry");
    }

    std::size_t ChannelRealization::idx_G(int a, int r, int m) const
    {
        if (a < 0 || a >= aps_ || r < 0 || r >= ris_ || m < 0 || m >= grid_.count)
            throw std::out_of_range("G index out of range");
        return std::size_t((a * ris_ + r) * grid_.count + m);
    }

    std::size_t ChannelRealization::idx_u(int r, int k, int m) const
    {
        if (r < 0 || r >= ris_ || k < 0 || k >= ues_ || m < 0 || m >= grid_.count)
            throw std::out_of_range("u index out of range");
        return std::size_t((r * ues_ + k) * grid_.count + m);
    }

    std::size_t ChannelRealization::idx_d(int a, int k, int m) const
    {
        if (a < 0 || a >= aps_ || k < 0 || k >= ues_ || m < 0 || m >= grid_.count)
            throw std::out_of_range("h_dir index out of range");
        return std::size_t((a * ues_ + k) * grid_.count + m);
    }

    ChannelRealization ChannelRealization::without_ris() const
    {
        ChannelRealization out = *this;
        out.ris_ = 0;
        out.ap_ris_.clear();
        out.ris_ue_.clear();
        out.G_.clear();
        out.u_.clear();
        return out;
    }

    RisConfiguration RisConfiguration::unity(int ris_total_elements, int subcarriers)
    {
        RisConfiguration cfg;
        cfg.theta = CVec::Ones(ris_total_elements);
        cfg.t.assign(std::size_t(subcarriers), CVec::Ones(ris_total_elements));
        return cfg;
    }

    CVec effective_channel(const ChannelRealization &real, const RisConfiguration &cfg, int a, int k, int m)
    {
        if (a < 0 || a >= real.aps() || k < 0 || k >= real.ues() || m < 0 || m >= real.subcarriers())
            throw std::out_of_range("effective_channel: index out of range");

        const int R = real.ris(), N = real.ris_elements();
        if (R > 0 && (cfg.theta.size() != R * N || cfg.t.size() != std::size_t(real.subcarriers())))
            throw std::invalid_argument("effective_channel: RIS configuration does not match the realization");

        // h^H = h_dir^H + sum_r u^H diag(theta_r t_r) G  =>  h = h_dir + sum_r G^H conj(theta_r t_r) u
        CVec h = real.h_dir(a, k, m);
        for (int r = 0; r < R; ++r)
        {
            const CVec reflected = (cfg.theta.segment(r * N, N).array() * cfg.t[m].segment(r * N, N).array()).conjugate()
                                   * real.u(r, k, m).array();
            h.noalias() += real.G(a, r, m).adjoint() * reflected;
        }
        return h;
    }

    CVec stack_effective_channel(const ChannelRealization &real, const RisConfiguration &cfg, int k, int m)
    {
        const int n = real.ap_antennas();
        CVec out(real.aps() * n);
        for (int a = 0; a < real.aps(); ++a)
            out.segment(a * n, n) = effective_channel(real, cfg, a, k, m);
        return out;
    }

    ChannelRealization perturb_csi(const ChannelRealization &real, double delta, std::mt19937_64 &rng)
    {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("CSI error ratio must be non-negative, got " + std::to_string(delta));
        if (delta == 0.0)
            return real;

        std::normal_distribution<double> normal(0.0, 1.0);
        return real.transformed([&](cplx h) {
            // CN(0, s^2): real and imaginary parts each N(0, s^2 / 2)
            const double s = std::sqrt(delta * std::norm(h) / 2.0);
            const double re = normal(rng), im = normal(rng);
            return h + cplx(s * re, s * im);
        });
    }
}
