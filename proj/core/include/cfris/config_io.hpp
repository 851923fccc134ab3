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
#ifndef CFRIS_CONFIG_IO_HPP
#define CFRIS_CONFIG_IO_HPP

#include "cfris/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace cfris
{
    struct ConfigDocument
    {
        SystemConfig system;
        ScenarioGeometry geometry;

        bool operator==(const ConfigDocument &) const = default;
    };

    // Layout: { "system": {...}, "geometry": {...} }. Missing keys keep their defaults, missing
    // geometry positions follow ScenarioGeometry::defaults. Unknown keys throw std::invalid_argument.
    ConfigDocument config_from_json(const nlohmann::json &doc);
    nlohmann::json config_to_json(const ConfigDocument &doc);

    ConfigDocument load_config(const std::filesystem::path &path);

    // Default configuration with geometry filled in
    ConfigDocument default_config();

    // FNV-1a 64 of the canonical JSON dump, as 16 hex digits
    std::string config_hash(const ConfigDocument &doc);

    std::string to_string(RisMode mode);
    std::string to_string(Scheme scheme);
    std::string to_string(PathlossKind kind);
    std::string to_string(AuxiliaryForm form);
    std::string to_string(DualUpdate update);
}

#endif
