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
#ifndef CFRIS_TD_PRECODER_HPP
#define CFRIS_TD_PRECODER_HPP

#include "cfris/array_geometry.hpp"
#include "cfris/types.hpp"

#include <vector>

namespace cfris
{
    // D time-delay elements per RF chain, each feeding N_D = N_Tx / D phase shifters
    class TdLayerConfig
    {
    public:
        TdLayerConfig(int antennas, int td_elements);

        int antennas() const { return antennas_; }
        int td_elements() const { return td_elements_; }
        int shifters_per_td() const { return antennas_ / td_elements_; }

    private:
        int antennas_;
        int td_elements_;
    };

    // f_TD = exp(-j pi eta N_D sin(phi) d), d = 0 .. D-1
    CVec ap_td_vector(double phi, double eta, const TdLayerConfig &cfg);

    // Per-element delays t_AP[d] = N_D sin(phi) d / (2 f_c) in seconds. Evaluated at subcarrier m as
    // exp(-j 2 pi f_m t_AP) they reproduce ap_td_vector(phi, eta_m).
    std::vector<double> ap_td_delays(double phi, double carrier_hz, const TdLayerConfig &cfg);

    // Phase-shifter blocks of one RF chain. Block d is the central-frequency steering segment
    // (1/sqrt(N_D)) exp(-j pi sin(phi) [d N_D + 0 .. N_D - 1]); with compensate = true it is
    // multiplied by exp(+j pi d N_D sin(phi)) so that the TD layer carries the inter-block progression.
    std::vector<CVec> ap_rf_blocks(double phi, const TdLayerConfig &cfg, bool compensate = true);

    // Number of carrier periods the TD layer delays per element index
    double delta_periods(double phi, double eta, const TdLayerConfig &cfg);

    // F_RF,a,r applied to f_TD,a,r,m: block d of rf_blocks scaled by exp(-j 2 pi f_m delays[d])
    CVec compose_fbar_column(const std::vector<CVec> &rf_blocks, const std::vector<double> &delays_s, double freq_hz);

    // Compensated PS blocks composed with the TD vector at eta_m (0-based m)
    CVec aligned_fbar_column(double phi, const SubcarrierGrid &grid, int m, const TdLayerConfig &cfg);

    // Frequency-dependent analog beamformers of all APs. Column r of F_bar_{a,m} drives RF chain r.
    class AnalogPrecoder
    {
    public:
        // rf_blocks[a*N_RF + r] holds D blocks of length N_D, delays[a*N_RF + r] holds D delays (s)
        AnalogPrecoder(const SubcarrierGrid &grid, const TdLayerConfig &cfg, int aps, int rf_chains,
                       std::vector<std::vector<CVec>> rf_blocks, std::vector<std::vector<double>> delays);

        int aps() const { return aps_; }
        int rf_chains() const { return rf_chains_; }
        int antennas() const { return antennas_; }
        int subcarriers() const { return static_cast<int>(per_ap_.size()) / (aps_ > 0 ? aps_ : 1); }

        const std::vector<CVec> &rf_blocks(int a, int r) const { return rf_blocks_[a * rf_chains_ + r]; }
        const std::vector<double> &td_delays(int a, int r) const { return delays_[a * rf_chains_ + r]; }

        // N_Tx x N_RF
        const CMat &fbar(int a, int m) const { return per_ap_[m * aps_ + a]; }

        // A N_Tx x A N_RF block-diagonal assembly
        CMat block_diagonal(int m) const;

    private:
        int aps_, rf_chains_, antennas_;
        std::vector<std::vector<CVec>> rf_blocks_;
        std::vector<std::vector<double>> delays_;
        std::vector<CMat> per_ap_; // (m, a)
    };

    AnalogPrecoder assemble_fbar(const std::vector<std::vector<CVec>> &rf_blocks,
                                 const std::vector<std::vector<double>> &delays, const SubcarrierGrid &grid,
                                 const TdLayerConfig &cfg, int aps, int rf_chains);

    // Steers RF chain r of AP a towards aod[a*N_RF + r]. With time_delay = false the TD layer is
    // bypassed (all-ones) and the PS layer steers at the carrier.
    AnalogPrecoder design_analog_precoder(const std::vector<double> &aod, const SubcarrierGrid &grid,
                                          const TdLayerConfig &cfg, int aps, int rf_chains, bool time_delay);
}

#endif
