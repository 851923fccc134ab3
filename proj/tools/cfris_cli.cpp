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

// Command line front end for the experiment harness

#include "cfris/experiments.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace
{
    struct Args
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        int seeds = 1;
        std::string scheme = "all";
        std::optional<int> ris_bits;
        std::string out = "results";
        bool plot_data = false;
        bool quiet = false;
        std::vector<double> grid;
    };

    std::vector<cfris::SchemeSpec> pick_schemes(const Args &args)
    {
        std::optional<cfris::RisMode> mode;
        if (args.ris_bits)
            mode = *args.ris_bits == 0 ? cfris::RisMode::continuous
                   : *args.ris_bits == 1 ? cfris::RisMode::one_bit
                                         : cfris::RisMode::two_bit;

        if (args.scheme == "all")
        {
            if (!mode)
                return cfris::all_schemes();
            return {{cfris::Scheme::proposed, *mode}, {cfris::Scheme::without_ris, cfris::RisMode::continuous},
                    {cfris::Scheme::without_td, cfris::RisMode::continuous}};
        }
        cfris::SchemeSpec s = cfris::SchemeSpec::parse(args.scheme);
        if (mode)
        {
            if (s.scheme != cfris::Scheme::proposed)
                throw std::invalid_argument("--ris-bits only applies to the proposed scheme");
            s.mode = *mode;
        }
        return {s};
    }

    int run(const std::string &command, const Args &args)
    {
        cfris::ConfigDocument doc = args.config_path.empty() ? cfris::default_config() : cfris::load_config(args.config_path);
        if (command == "sweep-users" && args.config_path.empty())
            doc.system.power_dbm = {20.0};

        cfris::ExperimentOptions opts;
        opts.schemes = pick_schemes(args);
        opts.seeds = cfris::seed_list(args.seed ? *args.seed : doc.system.seed, args.seeds);
        if (!args.quiet)
            opts.progress = [](const cfris::ExperimentCell &c) {
                std::fprintf(stderr, "%-14s %10.4g  seed %-4llu asr %8.4f  iterations %d\n", c.scheme.c_str(),
                             c.sweep_value, static_cast<unsigned long long>(c.seed), c.asr, c.iterations_to_converge);
            };

        auto grid_or = [&](std::vector<double> fallback) { return args.grid.empty() ? fallback : args.grid; };

        cfris::ExperimentResult result;
        if (command == "converge")
            result = cfris::run_convergence_experiment(doc, opts);
        else if (command == "sweep-power")
            result = cfris::run_power_sweep(doc, grid_or({-10.0, 0.0, 10.0, 20.0}), opts);
        else if (command == "sweep-users")
            result = cfris::run_user_sweep(doc, grid_or({2.0, 4.0, 6.0, 8.0}), opts);
        else if (command == "sweep-distance")
            result = cfris::run_distance_sweep(doc, grid_or({10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0}), opts);
        else
            result = cfris::run_csi_sweep(doc, grid_or({0.0, 0.1, 0.2, 0.3, 0.4}), opts);

        cfris::emit_results(result, args.out, args.plot_data);

        const auto issues = cfris::check_invariants(result);
        for (const auto &msg : issues)
            std::cerr << "invariant violated: " << msg << '\n';
        if (!issues.empty())
            return 2;

        for (std::size_t s = 0; s < result.schemes.size(); ++s)
        {
            std::cout << result.schemes[s];
            for (std::size_t p = 0; p < result.grid.size(); ++p)
                std::cout << ' ' << result.median(p, s);
            std::cout << '\n';
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Wideband THz cell-free precoding experiments"};
    app.require_subcommand(1);

    Args args;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"converge", "ASR per AO iteration for every scheme"},
        {"sweep-power", "ASR against the per-AP power budget in dBm"},
        {"sweep-users", "ASR against the number of UEs"},
        {"sweep-distance", "ASR against the UE cluster distance in m"},
        {"sweep-csi", "ASR against the CSI error ratio"},
    };
    for (const auto &[name, help] : commands)
    {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "First seed (default: system.seed)");
        sub->add_option("--seeds", args.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
        sub->add_option("--scheme", args.scheme, "proposed, proposed-1bit, proposed-2bit, without-ris, without-td or all");
        sub->add_option("--ris-bits", args.ris_bits, "RIS phase resolution of the proposed scheme, 0 = continuous")
            ->check(CLI::Range(0, 2));
        sub->add_option("--out", args.out, "Output directory");
        sub->add_flag("--emit-plot-data", args.plot_data, "Also write per-iteration trace CSVs");
        sub->add_flag("-q,--quiet", args.quiet, "No per-cell progress on stderr");
        if (name != "converge")
            sub->add_option("--grid", args.grid, "Sweep values, comma separated")->delimiter(',');
    }

    CLI11_PARSE(app, argc, argv);

    try
    {
        return run(app.get_subcommands().front()->get_name(), args);
    }
    catch (const std::exception &e)
    {
        std::cerr << "cfris: " << e.what() << '\n';
        return 1;
    }
}
