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
#include "cfris/td_precoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    TdLayerConfig::TdLayerConfig(int antennas, int td_elements) : antennas_(antennas), td_elements_(td_elements)
    {
        if (antennas < 1 || td_elements < 1)
            throw std::invalid_argument("TD layer needs positive antenna and TD element counts");
        if (antennas % td_elements != 0)
            throw std::invalid_argument("TD element count " + std::to_string(td_elements)
                                        + " does not divide the antenna count " + std::to_string(antennas));
    }

    CVec ap_td_vector(double phi, double eta, const TdLayerConfig &cfg)
    {
        const int D = cfg.td_elements();
        const double step = -pi * eta * double(cfg.shifters_per_td()) * std::sin(phi);
        CVec out(D);
        for (int d = 0; d < D; ++d)
            out[d] = unit_phasor(step * double(d));
        return out;
    }

    std::vector<double> ap_td_delays(double phi, double carrier_hz, const TdLayerConfig &cfg)
    {
        // Delta = N_D sin(phi) / 2 carrier periods per element index
        const double per_index = double(cfg.shifters_per_td()) * std::sin(phi) / (2.0 * carrier_hz);
        std::vector<double> out(std::size_t(cfg.td_elements()));
        for (int d = 0; d < cfg.td_elements(); ++d)
            out[d] = per_index * double(d);
        return out;
    }

    std::vector<CVec> ap_rf_blocks(double phi, const TdLayerConfig &cfg, bool compensate)
    {
        const int D = cfg.td_elements(), ND = cfg.shifters_per_td();
        const double s = std::sin(phi);
        const double scale = 1.0 / std::sqrt(double(ND));
        std::vector<CVec> blocks(std::size_t(D), CVec::Zero(ND));
        for (int d = 0; d < D; ++d)
        {
            const double offset = compensate ? pi * double(d) * double(ND) * s : 0.0;
            for (int i = 0; i < ND; ++i)
                blocks[d][i] = scale * unit_phasor(-pi * s * double(d * ND + i) + offset);
        }
        return blocks;
    }

    double delta_periods(double phi, double eta, const TdLayerConfig &cfg)
    {
        return (eta - 1.0) * std::sin(phi) * double(cfg.shifters_per_td()) / (2.0 * eta);
    }

    CVec compose_fbar_column(const std::vector<CVec> &rf_blocks, const std::vector<double> &delays_s, double freq_hz)
    {
        if (rf_blocks.size() != delays_s.size() || rf_blocks.empty())
            throw std::invalid_argument("compose_fbar_column: block and delay counts differ");
        const Eigen::Index nd = rf_blocks.front().size();
        CVec out(Eigen::Index(rf_blocks.size()) * nd);
        for (std::size_t d = 0; d < rf_blocks.size(); ++d)
        {
            if (rf_blocks[d].size() != nd)
                throw std::invalid_argument("compose_fbar_column: PS blocks differ in length");
            out.segment(Eigen::Index(d) * nd, nd) = unit_phasor(-2.0 * pi * freq_hz * delays_s[d]) * rf_blocks[d];
        }
        return out;
    }

    CVec aligned_fbar_column(double phi, const SubcarrierGrid &grid, int m, const TdLayerConfig &cfg)
    {
        if (m < 0 || m >= grid.count)
            throw std::out_of_range("aligned_fbar_column: subcarrier index out of range");
        return compose_fbar_column(ap_rf_blocks(phi, cfg, true), ap_td_delays(phi, grid.carrier_hz, cfg),
                                   grid.frequencies[m]);
    }

    AnalogPrecoder::AnalogPrecoder(const SubcarrierGrid &grid, const TdLayerConfig &cfg, int aps, int rf_chains,
                                   std::vector<std::vector<CVec>> rf_blocks, std::vector<std::vector<double>> delays)
        : aps_(aps), rf_chains_(rf_chains), antennas_(cfg.antennas()), rf_blocks_(std::move(rf_blocks)),
          delays_(std::move(delays))
    {
        if (aps < 1 || rf_chains < 1)
            throw std::invalid_argument("Analog precoder needs A >= 1 and N_RF >= 1");
        const std::size_t chains = std::size_t(aps * rf_chains);
        if (rf_blocks_.size() != chains || delays_.size() != chains)
            throw std::invalid_argument("Analog precoder: expected one PS/TD set per (AP, RF chain)");

        const int D = cfg.td_elements(), ND = cfg.shifters_per_td();
        for (std::size_t c = 0; c < chains; ++c)
        {
            if (rf_blocks_[c].size() != std::size_t(D) || delays_[c].size() != std::size_t(D))
                throw std::invalid_argument("Analog precoder: expected D blocks and D delays per RF chain");
            for (const auto &b : rf_blocks_[c])
                if (b.size() != ND)
                    throw std::invalid_argument("Analog precoder: PS block length must be N_D");
        }

        per_ap_.resize(std::size_t(grid.count * aps));
        for (int m = 0; m < grid.count; ++m)
            for (int a = 0; a < aps; ++a)
            {
                CMat F(antennas_, rf_chains);
                for (int r = 0; r < rf_chains; ++r)
                    F.col(r) = compose_fbar_column(rf_blocks_[a * rf_chains + r], delays_[a * rf_chains + r],
                                                   grid.frequencies[m]);
                per_ap_[std::size_t(m * aps + a)] = std::move(F);
            }
    }

    CMat AnalogPrecoder::block_diagonal(int m) const
    {
        CMat out = CMat::Zero(aps_ * antennas_, aps_ * rf_chains_);
        for (int a = 0; a < aps_; ++a)
            out.block(a * antennas_, a * rf_chains_, antennas_, rf_chains_) = fbar(a, m);
        return out;
    }

    AnalogPrecoder assemble_fbar(const std::vector<std::vector<CVec>> &rf_blocks,
                                 const std::vector<std::vector<double>> &delays, const SubcarrierGrid &grid,
                                 const TdLayerConfig &cfg, int aps, int rf_chains)
    {
        return AnalogPrecoder(grid, cfg, aps, rf_chains, rf_blocks, delays);
    }

    AnalogPrecoder design_analog_precoder(const std::vector<double> &aod, const SubcarrierGrid &grid,
                                          const TdLayerConfig &cfg, int aps, int rf_chains, bool time_delay)
    {
        if (aod.size() != std::size_t(aps * rf_chains))
            throw std::invalid_argument("design_analog_precoder: expected one steering angle per (AP, RF chain)");
        std::vector<std::vector<CVec>> blocks;
        std::vector<std::vector<double>> delays;
        blocks.reserve(aod.size());
        delays.reserve(aod.size());
        for (double phi : aod)
        {
            blocks.push_back(ap_rf_blocks(phi, cfg, time_delay));
            delays.push_back(time_delay ? ap_td_delays(phi, grid.carrier_hz, cfg)
                                        : std::vector<double>(std::size_t(cfg.td_elements()), 0.0));
        }
        return AnalogPrecoder(grid, cfg, aps, rf_chains, std::move(blocks), std::move(delays));
    }
}
