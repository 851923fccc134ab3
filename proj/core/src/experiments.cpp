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
#include "cfris/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfris
{
    namespace
    {
        // Streams of one cell, all derived from the master seed
        enum : std::uint64_t { stream_placement = 1, stream_phases = 2, stream_csi = 3, stream_init = 4 };

        std::string fmt(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            return buf;
        }

        ExperimentResult make_result(const ConfigDocument &doc, const ExperimentOptions &opts, std::string name,
                                     std::string variable, std::vector<double> grid)
        {
            if (opts.schemes.empty() || opts.seeds.empty())
                throw std::invalid_argument(name + ": need at least one scheme and one seed");
            if (grid.empty())
                throw std::invalid_argument(name + ": empty sweep grid");
            ExperimentResult r;
            r.name = std::move(name);
            r.sweep_variable = std::move(variable);
            r.grid = std::move(grid);
            for (const auto &s : opts.schemes)
                r.schemes.push_back(s.label());
            r.seeds = opts.seeds;
            r.config = doc;
            return r;
        }

        // Runs every (point, scheme, seed) with the configuration produced by 'configure'
        template <typename Configure>
        ExperimentResult sweep(const ConfigDocument &doc, const ExperimentOptions &opts, std::string name,
                               std::string variable, std::vector<double> grid, Configure &&configure)
        {
            ExperimentResult r = make_result(doc, opts, std::move(name), std::move(variable), std::move(grid));
            r.cells.reserve(r.grid.size() * opts.schemes.size() * opts.seeds.size());
            for (std::size_t p = 0; p < r.grid.size(); ++p)
            {
                ConfigDocument local = doc;
                double delta = 0.0;
                configure(local, r.grid[p], delta);
                for (const auto &scheme : opts.schemes)
                    for (std::uint64_t seed : opts.seeds)
                    {
                        r.cells.push_back(run_cell(local, scheme, seed, r.grid[p], delta, p));
                        if (opts.progress)
                            opts.progress(r.cells.back());
                    }
            }
            return r;
        }

        double quantile(std::vector<double> v, double q)
        {
            if (v.empty())
                throw std::invalid_argument("quantile of an empty set");
            std::sort(v.begin(), v.end());
            const double pos = q * double(v.size() - 1);
            const std::size_t lo = std::size_t(std::floor(pos));
            const std::size_t hi = std::min(lo + 1, v.size() - 1);
            return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
        }

        int integer_point(double v, const char *what)
        {
            if (v < 1.0 || v != std::floor(v))
                throw std::invalid_argument(std::string(what) + " must be a positive integer, got " + fmt(v));
            return int(v);
        }
    }

    const ExperimentCell &ExperimentResult::cell(std::size_t point, std::size_t scheme, std::size_t seed) const
    {
        if (point >= grid.size() || scheme >= schemes.size() || seed >= seeds.size())
            throw std::out_of_range("ExperimentResult::cell: index out of range");
        return cells.at((point * schemes.size() + scheme) * seeds.size() + seed);
    }

    std::vector<double> ExperimentResult::values(std::size_t point, std::size_t scheme) const
    {
        std::vector<double> out;
        for (std::size_t s = 0; s < seeds.size(); ++s)
            out.push_back(cell(point, scheme, s).asr);
        return out;
    }

    double ExperimentResult::median(std::size_t point, std::size_t scheme) const
    {
        return quantile(values(point, scheme), 0.5);
    }

    std::array<double, 3> ExperimentResult::quartiles(std::size_t point, std::size_t scheme) const
    {
        const auto v = values(point, scheme);
        return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
    }

    std::size_t ExperimentResult::scheme_index(const std::string &label) const
    {
        for (std::size_t i = 0; i < schemes.size(); ++i)
            if (schemes[i] == label)
                return i;
        throw std::out_of_range("scheme '" + label + "' is not part of this result");
    }

    std::vector<std::uint64_t> seed_list(std::uint64_t first, int count)
    {
        if (count < 1)
            throw std::invalid_argument("seed count must be positive");
        std::vector<std::uint64_t> out;
        for (int i = 0; i < count; ++i)
            out.push_back(first + std::uint64_t(i));
        return out;
    }

    ExperimentCell run_cell(const ConfigDocument &doc, const SchemeSpec &scheme, std::uint64_t seed,
                            double sweep_value, double estimate_delta, std::uint64_t point_index)
    {
        const SystemConfig &cfg = doc.system;
        cfg.validate();
        doc.geometry.validate(cfg);
        const std::uint64_t master = cfg.seed;

        std::mt19937_64 placement(derive_seed(master, seed, stream_placement));
        const auto ues = place_ues(doc.geometry, cfg.ues, placement);
        const ChannelRealization full =
            synthesize_channels(cfg, doc.geometry, ues, derive_seed(master, seed, stream_phases));
        const ChannelRealization truth = scheme.scheme == Scheme::without_ris ? full.without_ris() : full;

        std::mt19937_64 csi(derive_seed(derive_seed(master, point_index, stream_csi), seed));
        const ChannelRealization estimate = perturb_csi(truth, estimate_delta, csi);

        const AnalogPrecoder precoder = scheme_precoder(cfg, scheme, truth);
        const LinkModel opt_model(estimate, precoder, cfg.ue_weights(), cfg.noise_w(), cfg.power_budget_w());
        const AoOptions options = scheme_options(cfg, scheme);

        std::mt19937_64 init_rng(derive_seed(master, seed, stream_init));
        const PrecoderVariables init = random_initialization(opt_model, options.phase_levels, init_rng);
        const AoResult res = run_ao(opt_model, init, options);

        const LinkModel eval_model(truth, precoder, cfg.ue_weights(), cfg.noise_w(), cfg.power_budget_w());
        const double M = cfg.subcarriers;

        ExperimentCell c;
        c.scheme = scheme.label();
        c.sweep_value = sweep_value;
        c.seed = seed;
        c.asr = wsr(eval_model, res.variables) / M;
        c.iterations_to_converge = res.trace.iterations_to_converge(cfg.tolerance);
        for (const auto &rec : res.trace.records)
        {
            c.trace_asr.push_back(rec.wsr / M);
            c.power_residual = std::max(c.power_residual, rec.power_residual);
            c.modulus_residual = std::max(c.modulus_residual, rec.modulus_residual);
        }
        c.monotone = res.trace.monotone(1e-6);
        return c;
    }

    ExperimentResult run_convergence_experiment(const ConfigDocument &doc, const ExperimentOptions &opts)
    {
        const double p = doc.system.power_dbm.front();
        return sweep(doc, opts, "converge", "power_dbm", {p}, [](ConfigDocument &, double, double &) {});
    }

    ExperimentResult run_power_sweep(const ConfigDocument &doc, const std::vector<double> &power_dbm,
                                     const ExperimentOptions &opts)
    {
        return sweep(doc, opts, "sweep-power", "power_dbm", power_dbm,
                     [](ConfigDocument &d, double v, double &) { d.system.power_dbm = {v}; });
    }

    ExperimentResult run_user_sweep(const ConfigDocument &doc, const std::vector<double> &ue_counts,
                                    const ExperimentOptions &opts)
    {
        if (!doc.system.weights.empty() || doc.system.noise_dbm.size() != 1)
            throw std::invalid_argument("sweep-users needs uniform UE weights and a single noise value");
        for (double v : ue_counts)
            integer_point(v, "UE count");
        return sweep(doc, opts, "sweep-users", "ues", ue_counts,
                     [](ConfigDocument &d, double v, double &) { d.system.ues = int(v); });
    }

    ExperimentResult run_distance_sweep(const ConfigDocument &doc, const std::vector<double> &distances_m,
                                        const ExperimentOptions &opts)
    {
        return sweep(doc, opts, "sweep-distance", "distance_m", distances_m,
                     [](ConfigDocument &d, double v, double &) { d.geometry.ue_center_distance = v; });
    }

    ExperimentResult run_csi_sweep(const ConfigDocument &doc, const std::vector<double> &deltas,
                                   const ExperimentOptions &opts)
    {
        for (double v : deltas)
            if (!(v >= 0.0))
                throw std::invalid_argument("CSI error ratio must be non-negative, got " + fmt(v));
        return sweep(doc, opts, "sweep-csi", "csi_error", deltas,
                     [](ConfigDocument &, double v, double &delta) { delta = v; });
    }

    std::string results_csv(const ExperimentResult &result)
    {
        std::ostringstream os;
        os << "scheme,sweep_value,seed,asr_bits_per_sc,iterations_to_converge\n";
        for (const auto &c : result.cells)
            os << c.scheme << ',' << fmt(c.sweep_value) << ',' << c.seed << ',' << fmt(c.asr) << ','
               << c.iterations_to_converge << '\n';
        return os.str();
    }

    std::string trace_csv(const ExperimentResult &result)
    {
        std::ostringstream os;
        os << "scheme,sweep_value,seed,iteration,asr_bits_per_sc\n";
        for (const auto &c : result.cells)
            for (std::size_t i = 0; i < c.trace_asr.size(); ++i)
                os << c.scheme << ',' << fmt(c.sweep_value) << ',' << c.seed << ',' << i << ',' << fmt(c.trace_asr[i])
                   << '\n';
        return os.str();
    }

    namespace
    {
        void write_file(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw std::runtime_error("cannot write " + path.string());
            out << text;
            if (!out)
                throw std::runtime_error("failed writing " + path.string());
        }
    }

    void emit_results(const ExperimentResult &result, const std::filesystem::path &out_dir, bool trace_data)
    {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());

        write_file(out_dir / (result.name + ".csv"), results_csv(result));

        nlohmann::json side = {
            {"experiment", result.name},
            {"sweep_variable", result.sweep_variable},
            {"grid", result.grid},
            {"schemes", result.schemes},
            {"seeds", result.seeds},
            {"config", config_to_json(result.config)},
            {"config_hash", config_hash(result.config)},
        };
        write_file(out_dir / (result.name + ".json"), side.dump(2) + "\n");

        if (trace_data)
            write_file(out_dir / (result.name + "_trace.csv"), trace_csv(result));
    }

    std::vector<std::string> check_invariants(const ExperimentResult &result)
    {
        std::vector<std::string> out;
        const std::size_t expected = result.grid.size() * result.schemes.size() * result.seeds.size();
        if (result.cells.size() != expected)
            out.push_back("cell count " + std::to_string(result.cells.size()) + " differs from grid x schemes x seeds = "
                          + std::to_string(expected));
        for (const auto &c : result.cells)
        {
            const std::string where = c.scheme + " at " + fmt(c.sweep_value) + ", seed " + std::to_string(c.seed);
            if (!(c.asr >= 0.0) || !std::isfinite(c.asr))
                out.push_back(where + ": ASR " + fmt(c.asr) + " is not a finite non-negative number");
            if (!c.monotone)
                out.push_back(where + ": AO trace is not monotone");
            if (c.power_residual > 1e-6)
                out.push_back(where + ": power budget exceeded by " + fmt(c.power_residual));
            if (c.modulus_residual > 1e-6)
                out.push_back(where + ": unit-modulus violation " + fmt(c.modulus_residual));
        }
        return out;
    }

    std::vector<std::size_t> local_maxima(const std::vector<double> &series)
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 1; i + 1 < series.size(); ++i)
            if (series[i] > series[i - 1] && series[i] > series[i + 1])
                out.push_back(i);
        return out;
    }
}
