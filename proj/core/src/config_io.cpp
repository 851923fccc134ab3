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
#include "cfris/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cfris
{
    using nlohmann::json;

    std::string to_string(RisMode mode)
    {
        switch (mode)
        {
        case RisMode::one_bit:
            return "1-bit";
        case RisMode::two_bit:
            return "2-bit";
        default:
            return "continuous";
        }
    }

    std::string to_string(Scheme scheme)
    {
        switch (scheme)
        {
        case Scheme::without_ris:
            return "without-ris";
        case Scheme::without_td:
            return "without-td";
        default:
            return "proposed";
        }
    }

    std::string to_string(PathlossKind kind)
    {
        return kind == PathlossKind::free_space ? "free-space" : "log-distance";
    }

    std::string to_string(DualUpdate update)
    {
        return update == DualUpdate::subgradient ? "subgradient" : "newton";
    }

    std::string to_string(AuxiliaryForm form)
    {
        return form == AuxiliaryForm::printed_real ? "printed-real" : "complex-maximizer";
    }

    namespace
    {
        template <typename E, std::size_t N>
        E parse_enum(const std::string &text, const E (&choices)[N], const char *what)
        {
            for (E e : choices)
                if (to_string(e) == text)
                    return e;
            throw std::invalid_argument(std::string("unknown ") + what + " '" + text + "'");
        }

        // Reads members of one JSON object and rejects members nobody asked for
        class ObjectReader
        {
        public:
            ObjectReader(const json &obj, std::string where) : obj_(obj), where_(std::move(where))
            {
                if (!obj.is_object())
                    throw std::invalid_argument(where_ + " must be a JSON object");
            }

            template <typename T>
            void read(const char *key, T &target)
            {
                seen_.insert(key);
                auto it = obj_.find(key);
                if (it == obj_.end())
                    return;
                try
                {
                    target = it->template get<T>();
                }
                catch (const json::exception &e)
                {
                    throw std::invalid_argument(where_ + "." + key + ": " + e.what());
                }
            }

            const json *child(const char *key)
            {
                seen_.insert(key);
                auto it = obj_.find(key);
                return it == obj_.end() ? nullptr : &*it;
            }

            void finish() const
            {
                for (auto it = obj_.begin(); it != obj_.end(); ++it)
                    if (!seen_.count(it.key()))
                        throw std::invalid_argument("unknown key '" + it.key() + "' in " + where_);
            }

        private:
            const json &obj_;
            std::string where_;
            std::set<std::string> seen_;
        };

        std::vector<Vec3> read_positions(const json &j, const std::string &where)
        {
            if (!j.is_array())
                throw std::invalid_argument(where + " must be an array of [x, y, z]");
            std::vector<Vec3> out;
            for (const auto &p : j)
            {
                if (!p.is_array() || p.size() != 3)
                    throw std::invalid_argument(where + " entries must be [x, y, z]");
                out.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
            }
            return out;
        }
    }

    ConfigDocument config_from_json(const json &doc)
    {
        ConfigDocument out;
        ObjectReader top(doc, "config");
        SystemConfig &s = out.system;

        if (const json *sys = top.child("system"))
        {
            ObjectReader r(*sys, "system");
            r.read("aps", s.aps);
            r.read("ris", s.ris);
            r.read("ues", s.ues);
            r.read("subcarriers", s.subcarriers);
            r.read("ap_antennas", s.ap_antennas);
            r.read("ris_x", s.ris_x);
            r.read("ris_y", s.ris_y);
            r.read("td_elements", s.td_elements);
            r.read("carrier_hz", s.carrier_hz);
            r.read("bandwidth_hz", s.bandwidth_hz);
            r.read("noise_dbm", s.noise_dbm);
            r.read("power_dbm", s.power_dbm);
            r.read("weights", s.weights);
            r.read("max_iterations", s.max_iterations);
            r.read("tolerance", s.tolerance);
            r.read("seed", s.seed);

            std::string text = to_string(s.ris_mode);
            r.read("ris_mode", text);
            s.ris_mode = parse_enum(text, {RisMode::continuous, RisMode::one_bit, RisMode::two_bit}, "RIS mode");
            text = to_string(s.scheme);
            r.read("scheme", text);
            s.scheme = parse_enum(text, {Scheme::proposed, Scheme::without_ris, Scheme::without_td}, "scheme");

            if (const json *pl = r.child("pathloss"))
            {
                ObjectReader p(*pl, "system.pathloss");
                text = to_string(s.pathloss.kind);
                p.read("kind", text);
                s.pathloss.kind = parse_enum(text, {PathlossKind::log_distance, PathlossKind::free_space}, "pathloss");
                p.read("reference_loss_db", s.pathloss.reference_loss_db);
                p.read("ris_exponent", s.pathloss.ris_exponent);
                p.read("direct_exponent", s.pathloss.direct_exponent);
                p.read("ris_extra_loss_db", s.pathloss.ris_extra_loss_db);
                p.read("direct_extra_loss_db", s.pathloss.direct_extra_loss_db);
                p.finish();
            }
            if (const json *sv = r.child("solver"))
            {
                ObjectReader p(*sv, "system.solver");
                p.read("step_scale", s.solver.step_scale);
                p.read("max_iterations", s.solver.max_iterations);
                p.read("kkt_tolerance", s.solver.kkt_tolerance);
                p.read("phase_max_iterations", s.solver.phase_max_iterations);
                p.read("phase_tolerance", s.solver.phase_tolerance);
                text = to_string(s.solver.auxiliary_form);
                p.read("auxiliary_form", text);
                s.solver.auxiliary_form = parse_enum(
                    text, {AuxiliaryForm::complex_maximizer, AuxiliaryForm::printed_real}, "auxiliary form");
                text = to_string(s.solver.dual_update);
                p.read("dual_update", text);
                s.solver.dual_update = parse_enum(text, {DualUpdate::newton, DualUpdate::subgradient}, "dual update");
                p.finish();
            }
            r.finish();
        }

        out.geometry = ScenarioGeometry::defaults(s.aps, s.ris);
        if (const json *geo = top.child("geometry"))
        {
            ObjectReader r(*geo, "geometry");
            ScenarioGeometry &g = out.geometry;
            if (const json *p = r.child("ap_positions"))
                g.ap_positions = read_positions(*p, "geometry.ap_positions");
            if (const json *p = r.child("ris_positions"))
                g.ris_positions = read_positions(*p, "geometry.ris_positions");
            r.read("ue_center_distance", g.ue_center_distance);
            r.read("ue_scatter_radius", g.ue_scatter_radius);
            r.read("ue_height", g.ue_height);
            r.finish();
        }
        top.finish();

        s.validate();
        out.geometry.validate(s);
        return out;
    }

    json config_to_json(const ConfigDocument &doc)
    {
        const SystemConfig &s = doc.system;
        const ScenarioGeometry &g = doc.geometry;
        json sys = {
            {"aps", s.aps},
            {"ris", s.ris},
            {"ues", s.ues},
            {"subcarriers", s.subcarriers},
            {"ap_antennas", s.ap_antennas},
            {"ris_x", s.ris_x},
            {"ris_y", s.ris_y},
            {"td_elements", s.td_elements},
            {"carrier_hz", s.carrier_hz},
            {"bandwidth_hz", s.bandwidth_hz},
            {"noise_dbm", s.noise_dbm},
            {"power_dbm", s.power_dbm},
            {"weights", s.weights},
            {"ris_mode", to_string(s.ris_mode)},
            {"scheme", to_string(s.scheme)},
            {"max_iterations", s.max_iterations},
            {"tolerance", s.tolerance},
            {"seed", s.seed},
            {"pathloss",
             {{"kind", to_string(s.pathloss.kind)},
              {"reference_loss_db", s.pathloss.reference_loss_db},
              {"ris_exponent", s.pathloss.ris_exponent},
              {"direct_exponent", s.pathloss.direct_exponent},
              {"ris_extra_loss_db", s.pathloss.ris_extra_loss_db},
              {"direct_extra_loss_db", s.pathloss.direct_extra_loss_db}}},
            {"solver",
             {{"dual_update", to_string(s.solver.dual_update)},
              {"step_scale", s.solver.step_scale},
              {"max_iterations", s.solver.max_iterations},
              {"kkt_tolerance", s.solver.kkt_tolerance},
              {"phase_max_iterations", s.solver.phase_max_iterations},
              {"phase_tolerance", s.solver.phase_tolerance},
              {"auxiliary_form", to_string(s.solver.auxiliary_form)}}},
        };
        json aps = json::array(), ris = json::array();
        for (const auto &p : g.ap_positions)
            aps.push_back({p[0], p[1], p[2]});
        for (const auto &p : g.ris_positions)
            ris.push_back({p[0], p[1], p[2]});
        json geo = {
            {"ap_positions", aps},
            {"ris_positions", ris},
            {"ue_center_distance", g.ue_center_distance},
            {"ue_scatter_radius", g.ue_scatter_radius},
            {"ue_height", g.ue_height},
        };
        return {{"system", sys}, {"geometry", geo}};
    }

    ConfigDocument load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file " + path.string());
        json doc;
        try
        {
            in >> doc;
        }
        catch (const json::exception &e)
        {
            throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
        }
        return config_from_json(doc);
    }

    ConfigDocument default_config()
    {
        ConfigDocument doc;
        doc.geometry = ScenarioGeometry::defaults(doc.system.aps, doc.system.ris);
        return doc;
    }

    std::string config_hash(const ConfigDocument &doc)
    {
        const std::string text = config_to_json(doc).dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
}
