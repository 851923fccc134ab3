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
#ifndef CFRIS_CHANNEL_MODEL_HPP
#define CFRIS_CHANNEL_MODEL_HPP

#include "cfris/array_geometry.hpp"
#include "cfris/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace cfris
{
    // LoS path AP a -> RIS r
    struct ApRisPathParams
    {
        cplx alpha{0.0, 0.0}; // complex gain
        double delay_s = 0.0; // tau_G
        double aoa_az = 0.0;  // vartheta at the RIS, rad
        double aoa_el = 0.0;  // varphi at the RIS, rad
        double aod = 0.0;     // phi at the AP, rad
    };

    // LoS path RIS r -> UE k
    struct RisUePathParams
    {
        cplx beta{0.0, 0.0};
        double delay_s = 0.0; // tau_u
        double aod_az = 0.0;  // mu, rad
        double aod_el = 0.0;  // nu, rad
    };

    // LoS path AP a -> UE k
    struct DirectPathParams
    {
        cplx gain{0.0, 0.0};  // gamma_dir
        double delay_s = 0.0; // tau_d
        double aod = 0.0;     // psi, rad
    };

    std::vector<CMat> gen_ap_ris_channel(const ApRisPathParams &params, const SubcarrierGrid &grid,
                                         const UlaGeometry &ula, const UpaGeometry &upa);
    std::vector<CVec> gen_ris_ue_channel(const RisUePathParams &params, const SubcarrierGrid &grid,
                                         const UpaGeometry &upa);
    std::vector<CVec> gen_direct_channel(const DirectPathParams &params, const SubcarrierGrid &grid,
                                         const UlaGeometry &ula);

    // Per-subcarrier channels of every AP->RIS, RIS->UE and AP->UE link, plus the path records that
    // generated them. Immutable after construction.
    class ChannelRealization
    {
    public:
        // Path records are indexed ap_ris[a*R + r], ris_ue[r*K + k], direct[a*K + k].
        // R = 0 describes a network without reflecting surfaces.
        ChannelRealization(SubcarrierGrid grid, UlaGeometry ula, UpaGeometry upa, int aps, int ris, int ues,
                           std::vector<ApRisPathParams> ap_ris, std::vector<RisUePathParams> ris_ue,
                           std::vector<DirectPathParams> direct);

        int aps() const { return aps_; }
        int ris() const { return ris_; }
        int ues() const { return ues_; }
        int subcarriers() const { return grid_.count; }
        int ap_antennas() const { return ula_.elements(); }
        int ris_elements() const { return upa_.elements(); }

        const SubcarrierGrid &grid() const { return grid_; }
        const UlaGeometry &ula() const { return ula_; }
        const UpaGeometry &upa() const { return upa_; }

        const CMat &G(int a, int r, int m) const { return G_[idx_G(a, r, m)]; }
        const CVec &u(int r, int k, int m) const { return u_[idx_u(r, k, m)]; }
        const CVec &h_dir(int a, int k, int m) const { return h_dir_[idx_d(a, k, m)]; }

        const ApRisPathParams &ap_ris_path(int a, int r) const { return ap_ris_[a * ris_ + r]; }
        const RisUePathParams &ris_ue_path(int r, int k) const { return ris_ue_[r * ues_ + k]; }
        const DirectPathParams &direct_path(int a, int k) const { return direct_[a * ues_ + k]; }

        // Same direct links, reflected links removed (R = 0)
        ChannelRealization without_ris() const;

        // Applies f to every stored complex channel coefficient, in a fixed traversal order
        // (all G, then all u, then all h_dir; each column-major).
        template <typename F>
        ChannelRealization transformed(F &&f) const
        {
            ChannelRealization out = *this;
            for (auto &mat : out.G_)
                for (Eigen::Index i = 0; i < mat.size(); ++i)
                    mat.data()[i] = f(mat.data()[i]);
            for (auto &vec : out.u_)
                for (Eigen::Index i = 0; i < vec.size(); ++i)
                    vec[i] = f(vec[i]);
            for (auto &vec : out.h_dir_)
                for (Eigen::Index i = 0; i < vec.size(); ++i)
                    vec[i] = f(vec[i]);
            return out;
        }

    private:
        std::size_t idx_G(int a, int r, int m) const;
        std::size_t idx_u(int r, int k, int m) const;
        std::size_t idx_d(int a, int k, int m) const;

        SubcarrierGrid grid_;
        UlaGeometry ula_;
        UpaGeometry upa_;
        int aps_, ris_, ues_;
        std::vector<ApRisPathParams> ap_ris_;
        std::vector<RisUePathParams> ris_ue_;
        std::vector<DirectPathParams> direct_;
        std::vector<CMat> G_;    // (a, r, m)
        std::vector<CVec> u_;    // (r, k, m)
        std::vector<CVec> h_dir_; // (a, k, m)
    };

    // Reflection coefficients theta (length R*N_RIS, RIS-major) and per-subcarrier RIS delay phases t[m]
    struct RisConfiguration
    {
        CVec theta;
        std::vector<CVec> t;

        static RisConfiguration unity(int ris_total_elements, int subcarriers);
        bool operator==(const RisConfiguration &) const = default;
    };

    // h_{a,k,m} with h^H = h_dir^H + sum_r u^H diag(theta_r) diag(t_{r,m}) G_{a,r,m}
    CVec effective_channel(const ChannelRealization &real, const RisConfiguration &cfg, int a, int k, int m);

    // [h_{1,k,m}; ...; h_{A,k,m}]
    CVec stack_effective_channel(const ChannelRealization &real, const RisConfiguration &cfg, int k, int m);

    // Adds independent CN(0, delta |h|^2) noise to every primitive channel coefficient.
    // Path records stay untouched. Throws std::invalid_argument for delta < 0.
    ChannelRealization perturb_csi(const ChannelRealization &real, double delta, std::mt19937_64 &rng);
}

#endif
