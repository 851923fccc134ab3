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
#ifndef CFRIS_SCENARIO_HPP
#define CFRIS_SCENARIO_HPP

#include "cfris/ao_optimizer.hpp"
#include "cfris/channel_model.hpp"
#include "cfris/td_precoder.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace cfris
{
    using Vec3 = std::array<double, 3>; // meters

    enum class RisMode
    {
        continuous,
        one_bit,
        two_bit,
    };

    // 0 for continuous, F = 2^bits otherwise
    int phase_levels(RisMode mode);

    enum class Scheme
    {
        proposed,    // TD layer at the APs, RIS phases and RIS TDs optimized
        without_ris, // reflected links removed, AP TD layer kept
        without_td,  // RIS kept, AP and RIS TD layers bypassed
    };

    enum class PathlossKind
    {
        log_distance, // reference_loss_db at 1 m, exponent per link type
        free_space,   // Friis at the carrier
    };

    // Per-element large-scale gain. Array factors sqrt(N_tx N_rx) are applied on top, so that the
    // unit-norm steering vectors carry the element-level LoS channel.
    struct PathlossModel
    {
        PathlossKind kind = PathlossKind::log_distance;
        double reference_loss_db = 30.0;
        double ris_exponent = 2.2;    // AP-RIS and RIS-UE links
        double direct_exponent = 3.5; // AP-UE links
        double ris_extra_loss_db = 0.0;    // per reflected path
        double direct_extra_loss_db = 6.0; // blockage on AP-UE links

        bool operator==(const PathlossModel &) const = default;
    };

    struct SolverConfig
    {
        DualUpdate dual_update = DualUpdate::newton;
        double step_scale = 0.5; // subgradient rule only
        int max_iterations = 2000;
        double kkt_tolerance = 1e-6;
        int phase_max_iterations = 50;
        double phase_tolerance = 1e-9;
        AuxiliaryForm auxiliary_form = AuxiliaryForm::complex_maximizer;

        bool operator==(const SolverConfig &) const = default;
    };

    struct SystemConfig
    {
        int aps = 5;
        int ris = 2; // also the RF-chain count per AP
        int ues = 4;
        int subcarriers = 8;
        int ap_antennas = 16;
        int ris_x = 8;
        int ris_y = 8;
        int td_elements = 16;
        double carrier_hz = 100e9;
        double bandwidth_hz = 10e9;
        std::vector<double> noise_dbm{-110.0}; // one value, or K*M values indexed k*M + m
        std::vector<double> power_dbm{0.0};    // one value, or one per AP
        std::vector<double> weights;           // empty = all ones, else one per UE
        RisMode ris_mode = RisMode::continuous;
        Scheme scheme = Scheme::proposed;
        int max_iterations = 20;
        double tolerance = 1e-3;
        std::uint64_t seed = 1;
        PathlossModel pathloss;
        SolverConfig solver;

        // Throws std::invalid_argument describing the first violated invariant
        void validate() const;
        std::vector<double> noise_w() const;       // K*M watts
        std::vector<double> power_budget_w() const; // A watts
        std::vector<double> ue_weights() const;     // K weights

        bool operator==(const SystemConfig &) const = default;
    };

    struct ScenarioGeometry
    {
        std::vector<Vec3> ap_positions;
        std::vector<Vec3> ris_positions;
        double ue_center_distance = 40.0; // L, UE cluster centered at (L, 0)
        double ue_scatter_radius = 5.0;
        double ue_height = 1.5;

        // APs evenly spaced on x in [0, 80] at y = -20, z = 10; RISs at y = +5, z = 3
        static ScenarioGeometry defaults(int aps, int ris);
        void validate(const SystemConfig &cfg) const;

        bool operator==(const ScenarioGeometry &) const = default;
    };

    struct SchemeSpec
    {
        Scheme scheme = Scheme::proposed;
        RisMode mode = RisMode::continuous;

        std::string label() const;
        // "proposed", "proposed-1bit", "proposed-2bit", "without-ris", "without-td"
        static SchemeSpec parse(const std::string &label);
        bool operator==(const SchemeSpec &) const = default;
    };

    // The five compared schemes in reporting order
    std::vector<SchemeSpec> all_schemes();

    // Per-element amplitude of a link of the given length
    double element_gain(const PathlossModel &model, double distance_m, double carrier_hz, bool reflected_link);

    // Uniform in the disc of ue_scatter_radius around (L, 0). UE k only depends on the first k draws.
    std::vector<Vec3> place_ues(const ScenarioGeometry &geom, int ues, std::mt19937_64 &rng);

    // LoS path parameters from node coordinates; gain phases are uniform on [0, 2pi) and drawn from a
    // per-link stream derived from phase_seed. Throws std::invalid_argument on coincident nodes.
    ChannelRealization synthesize_channels(const SystemConfig &cfg, const ScenarioGeometry &geom,
                                           const std::vector<Vec3> &ue_positions, std::uint64_t phase_seed);

    // place_ues followed by synthesize_channels, both streams taken from rng
    ChannelRealization generate_scenario(const SystemConfig &cfg, const ScenarioGeometry &geom, std::mt19937_64 &rng);

    // Analog precoder for a scheme: chains aimed at the RISs (proposed, without-td) or, without RIS,
    // chain r of AP a aimed at UE (a R + r) mod K
    AnalogPrecoder scheme_precoder(const SystemConfig &cfg, const SchemeSpec &scheme, const ChannelRealization &channels);

    AoOptions scheme_options(const SystemConfig &cfg, const SchemeSpec &scheme);

    // Stateless 64-bit mixer used to derive independent RNG streams
    std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0);
}

#endif
