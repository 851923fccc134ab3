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
#ifndef CFRIS_EXPERIMENTS_HPP
#define CFRIS_EXPERIMENTS_HPP

#include "cfris/config_io.hpp"
#include "cfris/scenario.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace cfris
{
    // One optimized (scheme, sweep point, seed) cell
    struct ExperimentCell
    {
        std::string scheme;
        double sweep_value = 0.0;
        std::uint64_t seed = 0;
        double asr = 0.0;               // WSR / M on the true channel, bits/s/Hz per subcarrier
        int iterations_to_converge = -1; // -1 when the tolerance was never reached
        std::vector<double> trace_asr;  // per AO iteration (index 0 = initial point), optimizer's CSI
        bool monotone = true;
        double power_residual = 0.0;
        double modulus_residual = 0.0;
    };

    struct ExperimentResult
    {
        std::string name;           // converge, sweep-power, ...
        std::string sweep_variable; // column meaning of sweep_value
        std::vector<double> grid;
        std::vector<std::string> schemes;
        std::vector<std::uint64_t> seeds;
        std::vector<ExperimentCell> cells; // ordered (point, scheme, seed)
        ConfigDocument config;

        const ExperimentCell &cell(std::size_t point, std::size_t scheme, std::size_t seed) const;
        std::vector<double> values(std::size_t point, std::size_t scheme) const;
        double median(std::size_t point, std::size_t scheme) const;
        // Lower quartile, median, upper quartile (linear interpolation)
        std::array<double, 3> quartiles(std::size_t point, std::size_t scheme) const;
        std::size_t scheme_index(const std::string &label) const;
    };

    struct ExperimentOptions
    {
        std::vector<SchemeSpec> schemes = all_schemes();
        std::vector<std::uint64_t> seeds{1};
        // Called after every finished cell, in result order
        std::function<void(const ExperimentCell &)> progress;
    };

    // Consecutive seeds first, first + 1, ...
    std::vector<std::uint64_t> seed_list(std::uint64_t first, int count);

    // Runs one scheme on one seed. estimate_delta > 0 optimizes on perturbed CSI drawn from the
    // (seed, point) stream and evaluates on the true channel.
    ExperimentCell run_cell(const ConfigDocument &doc, const SchemeSpec &scheme, std::uint64_t seed,
                            double sweep_value, double estimate_delta = 0.0, std::uint64_t point_index = 0);

    ExperimentResult run_convergence_experiment(const ConfigDocument &doc, const ExperimentOptions &opts);
    ExperimentResult run_power_sweep(const ConfigDocument &doc, const std::vector<double> &power_dbm,
                                     const ExperimentOptions &opts);
    ExperimentResult run_user_sweep(const ConfigDocument &doc, const std::vector<double> &ue_counts,
                                    const ExperimentOptions &opts);
    ExperimentResult run_distance_sweep(const ConfigDocument &doc, const std::vector<double> &distances_m,
                                        const ExperimentOptions &opts);
    ExperimentResult run_csi_sweep(const ConfigDocument &doc, const std::vector<double> &deltas,
                                   const ExperimentOptions &opts);

    // <dir>/<name>.csv, <dir>/<name>.json and, with trace_data, <dir>/<name>_trace.csv.
    // Throws std::runtime_error when the directory or files cannot be written.
    void emit_results(const ExperimentResult &result, const std::filesystem::path &out_dir, bool trace_data = false);

    std::string results_csv(const ExperimentResult &result);
    std::string trace_csv(const ExperimentResult &result);

    // Human-readable violations of the run invariants (empty when clean)
    std::vector<std::string> check_invariants(const ExperimentResult &result);

    // Index of strict local maxima of a series (interior points only)
    std::vector<std::size_t> local_maxima(const std::vector<double> &series);
}

#endif
