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
#include "cfris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>

namespace cfris
{
    int phase_levels(RisMode mode)
    {
        switch (mode)
        {
        case RisMode::one_bit:
            return 2;
        case RisMode::two_bit:
            return 4;
        default:
            return 0;
        }
    }

    namespace
    {
        void require(bool ok, const std::string &what)
        {
            if (!ok)
                throw std::invalid_argument(what);
        }

        double distance(const Vec3 &a, const Vec3 &b)
        {
            return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
                             + (a[2] - b[2]) * (a[2] - b[2]));
        }

        std::string show(const Vec3 &p)
        {
            return "(" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " + std::to_string(p[2]) + ")";
        }

        // AoD of a ULA along x seen from 'from' towards 'to'
        double ula_angle(const Vec3 &from, const Vec3 &to)
        {
            const double d = distance(from, to);
            return std::asin(std::clamp((to[0] - from[0]) / d, -1.0, 1.0));
        }

        // (vartheta, varphi) of a UPA spanning the x-z plane at 'at' towards 'to'
        std::pair<double, double> upa_angles(const Vec3 &at, const Vec3 &to)
        {
            const double d = distance(at, to);
            const double ux = (to[0] - at[0]) / d, uz = (to[2] - at[2]) / d;
            return {std::asin(std::min(1.0, std::hypot(ux, uz))), std::atan2(uz, ux)};
        }

        double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

        std::uint64_t splitmix(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }

        cplx random_phase(std::uint64_t seed)
        {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
            return unit_phasor(u(rng));
        }
    }

    std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c)
    {
        return splitmix(a ^ splitmix(b ^ splitmix(c)));
    }

    void SystemConfig::validate() const
    {
        require(aps > 0 && ris > 0 && ues > 0 && subcarriers > 0, "AP, RIS, UE and subcarrier counts must be positive");
        require(ap_antennas > 0 && ris_x > 0 && ris_y > 0 && td_elements > 0, "array sizes must be positive");
        require(ap_antennas % td_elements == 0, "TD element count " + std::to_string(td_elements)
                                                    + " must divide the AP antenna count "
                                                    + std::to_string(ap_antennas));
        require(carrier_hz > 0.0 && std::isfinite(carrier_hz), "carrier frequency must be positive");
        require(bandwidth_hz > 0.0 && bandwidth_hz < 2.0 * carrier_hz, "bandwidth must be in (0, 2 f_c)");
        require(noise_dbm.size() == 1 || noise_dbm.size() == std::size_t(ues) * subcarriers,
                "noise_dbm needs 1 or K*M entries");
        require(power_dbm.size() == 1 || power_dbm.size() == std::size_t(aps), "power_dbm needs 1 or A entries");
        require(weights.empty() || weights.size() == std::size_t(ues), "weights needs 0 or K entries");
        for (double v : noise_dbm)
            require(std::isfinite(v), "noise_dbm entries must be finite");
        for (double v : power_dbm)
            require(std::isfinite(v), "power_dbm entries must be finite");
        for (double v : weights)
            require(v > 0.0 && std::isfinite(v), "UE weights must be positive");
        require(max_iterations > 0, "AO iteration cap must be positive");
        require(tolerance > 0.0, "AO tolerance must be positive");
        require(pathloss.ris_exponent > 0.0 && pathloss.direct_exponent > 0.0, "pathloss exponents must be positive");
        require(std::isfinite(pathloss.reference_loss_db) && std::isfinite(pathloss.ris_extra_loss_db)
                    && std::isfinite(pathloss.direct_extra_loss_db),
                "pathloss parameters must be finite");
        require(solver.step_scale > 0.0 && solver.max_iterations > 0 && solver.kkt_tolerance >= 0.0
                    && solver.phase_max_iterations > 0 && solver.phase_tolerance >= 0.0,
                "invalid solver settings");
    }

    std::vector<double> SystemConfig::noise_w() const
    {
        std::vector<double> out(std::size_t(ues) * subcarriers);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = dbm_to_watt(noise_dbm.size() == 1 ? noise_dbm.front() : noise_dbm[i]);
        return out;
    }

    std::vector<double> SystemConfig::power_budget_w() const
    {
        std::vector<double> out(static_cast<std::size_t>(aps));
        for (std::size_t a = 0; a < out.size(); ++a)
            out[a] = dbm_to_watt(power_dbm.size() == 1 ? power_dbm.front() : power_dbm[a]);
        return out;
    }

    std::vector<double> SystemConfig::ue_weights() const
    {
        return weights.empty() ? std::vector<double>(std::size_t(ues), 1.0) : weights;
    }

    ScenarioGeometry ScenarioGeometry::defaults(int aps, int ris)
    {
        ScenarioGeometry g;
        for (int a = 0; a < aps; ++a)
            g.ap_positions.push_back({aps > 1 ? 80.0 * double(a) / double(aps - 1) : 40.0, -20.0, 10.0});
        if (ris == 2)
            g.ris_positions = {{30.0, 5.0, 3.0}, {50.0, 5.0, 3.0}};
        else
            for (int r = 0; r < ris; ++r)
                g.ris_positions.push_back({80.0 * double(r + 1) / double(ris + 1), 5.0, 3.0});
        return g;
    }

    void ScenarioGeometry::validate(const SystemConfig &cfg) const
    {
        require(ap_positions.size() == std::size_t(cfg.aps), "geometry has " + std::to_string(ap_positions.size())
                                                                 + " AP positions, config needs "
                                                                 + std::to_string(cfg.aps));
        require(ris_positions.size() == std::size_t(cfg.ris), "geometry has " + std::to_string(ris_positions.size())
                                                                  + " RIS positions, config needs "
                                                                  + std::to_string(cfg.ris));
        require(ue_scatter_radius >= 0.0 && std::isfinite(ue_scatter_radius), "UE scatter radius must be non-negative");
        require(std::isfinite(ue_center_distance) && std::isfinite(ue_height), "UE placement must be finite");
        std::vector<Vec3> nodes = ap_positions;
        nodes.insert(nodes.end(), ris_positions.begin(), ris_positions.end());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = i + 1; j < nodes.size(); ++j)
                require(distance(nodes[i], nodes[j]) > 0.0, "coincident nodes at " + show(nodes[i]));
    }

    std::string SchemeSpec::label() const
    {
        switch (scheme)
        {
        case Scheme::without_ris:
            return "without-ris";
        case Scheme::without_td:
            return "without-td";
        default:
            break;
        }
        switch (mode)
        {
        case RisMode::one_bit:
            return "proposed-1bit";
        case RisMode::two_bit:
            return "proposed-2bit";
        default:
            return "proposed";
        }
    }

    SchemeSpec SchemeSpec::parse(const std::string &label)
    {
        for (const auto &s : all_schemes())
            if (s.label() == label)
                return s;
        throw std::invalid_argument("unknown scheme '" + label + "'");
    }

    std::vector<SchemeSpec> all_schemes()
    {
        return {{Scheme::proposed, RisMode::continuous},
                {Scheme::proposed, RisMode::two_bit},
                {Scheme::proposed, RisMode::one_bit},
                {Scheme::without_ris, RisMode::continuous},
                {Scheme::without_td, RisMode::continuous}};
    }

    double element_gain(const PathlossModel &model, double distance_m, double carrier_hz, bool reflected_link)
    {
        require(distance_m > 0.0, "link length must be positive");
        const double extra = reflected_link ? model.ris_extra_loss_db : model.direct_extra_loss_db;
        if (model.kind == PathlossKind::free_space)
            return speed_of_light / (4.0 * pi * distance_m * carrier_hz) * db_to_amplitude(-extra);
        const double n = reflected_link ? model.ris_exponent : model.direct_exponent;
        return db_to_amplitude(-(model.reference_loss_db + 10.0 * n * std::log10(distance_m) + extra));
    }

    std::vector<Vec3> place_ues(const ScenarioGeometry &geom, int ues, std::mt19937_64 &rng)
    {
        require(ues >= 0, "UE count must be non-negative");
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Vec3> out;
        out.reserve(std::size_t(ues));
        for (int k = 0; k < ues; ++k)
        {
            const double rad = geom.ue_scatter_radius * std::sqrt(u(rng));
            const double ang = 2.0 * pi * u(rng);
            out.push_back({geom.ue_center_distance + rad * std::cos(ang), rad * std::sin(ang), geom.ue_height});
        }
        return out;
    }

    ChannelRealization synthesize_channels(const SystemConfig &cfg, const ScenarioGeometry &geom,
                                           const std::vector<Vec3> &ue_positions, std::uint64_t phase_seed)
    {
        cfg.validate();
        geom.validate(cfg);
        require(ue_positions.size() == std::size_t(cfg.ues), "UE position count differs from the config");

        const int A = cfg.aps, R = cfg.ris, K = cfg.ues;
        const double n_tx = cfg.ap_antennas, n_ris = double(cfg.ris_x) * cfg.ris_y;
        const auto &pl = cfg.pathloss;

        for (const auto &ue : ue_positions)
        {
            for (const auto &ap : geom.ap_positions)
                require(distance(ue, ap) > 0.0, "UE coincides with an AP at " + show(ap));
            for (const auto &s : geom.ris_positions)
                require(distance(ue, s) > 0.0, "UE coincides with a RIS at " + show(s));
        }

        // Link-type tags keep phase streams of different link families apart
        enum : std::uint64_t { tag_ap_ris = 1, tag_ris_ue = 2, tag_direct = 3 };

        std::vector<ApRisPathParams> ap_ris(std::size_t(A) * R);
        for (int a = 0; a < A; ++a)
            for (int r = 0; r < R; ++r)
            {
                const Vec3 &p = geom.ap_positions[a], &q = geom.ris_positions[r];
                const double d = distance(p, q);
                auto &path = ap_ris[a * R + r];
                path.alpha = element_gain(pl, d, cfg.carrier_hz, true) * std::sqrt(n_tx * n_ris)
                             * random_phase(derive_seed(phase_seed, (tag_ap_ris << 32) | std::uint64_t(a), r));
                path.delay_s = d / speed_of_light;
                path.aod = ula_angle(p, q);
                std::tie(path.aoa_az, path.aoa_el) = upa_angles(q, p);
            }

        std::vector<RisUePathParams> ris_ue(std::size_t(R) * K);
        for (int r = 0; r < R; ++r)
            for (int k = 0; k < K; ++k)
            {
                const Vec3 &q = geom.ris_positions[r], &x = ue_positions[k];
                const double d = distance(q, x);
                auto &path = ris_ue[r * K + k];
                // per-reflection extra loss is carried by the AP-RIS leg
                PathlossModel leg = pl;
                leg.ris_extra_loss_db = 0.0;
                path.beta = element_gain(leg, d, cfg.carrier_hz, true) * std::sqrt(n_ris)
                            * random_phase(derive_seed(phase_seed, (tag_ris_ue << 32) | std::uint64_t(r), k));
                path.delay_s = d / speed_of_light;
                std::tie(path.aod_az, path.aod_el) = upa_angles(q, x);
            }

        std::vector<DirectPathParams> direct(std::size_t(A) * K);
        for (int a = 0; a < A; ++a)
            for (int k = 0; k < K; ++k)
            {
                const Vec3 &p = geom.ap_positions[a], &x = ue_positions[k];
                const double d = distance(p, x);
                auto &path = direct[a * K + k];
                path.gain = element_gain(pl, d, cfg.carrier_hz, false) * std::sqrt(n_tx)
                            * random_phase(derive_seed(phase_seed, (tag_direct << 32) | std::uint64_t(a), k));
                path.delay_s = d / speed_of_light;
                path.aod = ula_angle(p, x);
            }

        return ChannelRealization(make_subcarrier_grid(cfg.carrier_hz, cfg.bandwidth_hz, cfg.subcarriers),
                                  UlaGeometry(cfg.ap_antennas), UpaGeometry(cfg.ris_x, cfg.ris_y), A, R, K,
                                  std::move(ap_ris), std::move(ris_ue), std::move(direct));
    }

    ChannelRealization generate_scenario(const SystemConfig &cfg, const ScenarioGeometry &geom, std::mt19937_64 &rng)
    {
        const auto ues = place_ues(geom, cfg.ues, rng);
        const std::uint64_t phase_seed = rng();
        return synthesize_channels(cfg, geom, ues, phase_seed);
    }

    AnalogPrecoder scheme_precoder(const SystemConfig &cfg, const SchemeSpec &scheme, const ChannelRealization &channels)
    {
        const int A = cfg.aps, R = cfg.ris, K = channels.ues();
        std::vector<double> aod(std::size_t(A) * R);
        for (int a = 0; a < A; ++a)
            for (int r = 0; r < R; ++r)
            {
                if (scheme.scheme == Scheme::without_ris)
                    aod[a * R + r] = channels.direct_path(a, (a * R + r) % K).aod;
                else
                    aod[a * R + r] = channels.ap_ris_path(a, r).aod;
            }
        return design_analog_precoder(aod, channels.grid(), TdLayerConfig(cfg.ap_antennas, cfg.td_elements), A, R,
                                      scheme.scheme != Scheme::without_td);
    }

    AoOptions scheme_options(const SystemConfig &cfg, const SchemeSpec &scheme)
    {
        AoOptions o;
        o.max_iterations = cfg.max_iterations;
        o.tolerance = cfg.tolerance;
        o.optimize_theta = scheme.scheme != Scheme::without_ris;
        o.optimize_ris_td = scheme.scheme == Scheme::proposed;
        o.phase_levels = scheme.scheme == Scheme::proposed ? phase_levels(scheme.mode) : 0;
        o.auxiliary_form = cfg.solver.auxiliary_form;
        o.solver.dual_update = cfg.solver.dual_update;
        o.solver.step_scale = cfg.solver.step_scale;
        o.solver.max_iterations = cfg.solver.max_iterations;
        o.solver.kkt_tolerance = cfg.solver.kkt_tolerance;
        o.solver.phase_max_iterations = cfg.solver.phase_max_iterations;
        o.solver.phase_tolerance = cfg.solver.phase_tolerance;
        return o;
    }
}
