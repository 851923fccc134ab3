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

// Acceptance runner: prints one PASS/FAIL line per criterion and exits nonzero if any fail.
//   cfris_acceptance [--only 1,2,...] [--seeds N] [--trend-seeds N] [--out DIR]

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <string>

using namespace cfris;
using namespace cfris::testing;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    struct Settings
    {
        std::set<int> only;
        int seeds = 10;       // full-scale convergence and ordering
        int trend_seeds = 5;  // per sweep point
        std::filesystem::path out = std::filesystem::temp_directory_path() / "cfris_acceptance";
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    std::string num(double v, const char *f = "%.3g")
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, v);
        return buf;
    }

    void progress(const char *what)
    {
        std::fprintf(stderr, "  ... %s\n", what);
    }

    ExperimentOptions quiet_options(std::vector<SchemeSpec> schemes, int seeds)
    {
        ExperimentOptions o;
        o.schemes = std::move(schemes);
        o.seeds = seed_list(1, seeds);
        return o;
    }

    std::string medians_of(const ExperimentResult &r, std::size_t s)
    {
        std::string out = r.schemes[s] + " [";
        for (std::size_t p = 0; p < r.grid.size(); ++p)
            out += (p ? " " : "") + num(r.median(p, s), "%.2f");
        return out + "]";
    }

    // 1: matrix forms of the three blocks against the direct sums
    Outcome surrogate_equivalence(const Settings &)
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(101);
        double worst[3] = {0.0, 0.0, 0.0};
        const Block blocks[3] = {Block::baseband, Block::ris_phase, Block::ris_delay};
        for (int inst_i = 0; inst_i < 20; ++inst_i)
        {
            const auto inst = make_instance(small_config({}), 1000 + inst_i);
            for (int b = 0; b < 3; ++b)
                worst[b] = std::max(worst[b], surrogate_gap(*inst, blocks[b], 100, rng));
        }
        const double secs = seconds_since(t0);
        Outcome o;
        o.pass = worst[0] <= 1e-9 && worst[1] <= 1e-9 && worst[2] <= 1e-9 && secs < 60.0;
        o.detail = "max rel err w " + num(worst[0]) + ", theta " + num(worst[1]) + ", t " + num(worst[2]) + "; "
                   + num(secs, "%.1f") + " s";
        return o;
    }

    // 2: TD-aligned gain is flat across the band; the phase-only design loses gain at the band edges
    Outcome beam_alignment(const Settings &)
    {
        const auto grid = make_subcarrier_grid(100e9, 10e9, 8);
        const TdLayerConfig cfg(16, 16);
        std::mt19937_64 rng(202);
        std::uniform_real_distribution<double> ang(-80.0, 80.0);
        auto gain = [](const CVec &f, double phi, double eta) {
            return std::abs(ula_arv(phi, eta, UlaGeometry(int(f.size()))).dot(f)) / std::sqrt(16.0);
        };
        double worst_dev = 0.0, min_margin = std::numeric_limits<double>::infinity();
        bool edges_lower = true;
        for (int i = 0; i < 50; ++i)
        {
            const double phi = ang(rng) * pi / 180.0;
            double edge_aligned = 0.0;
            for (int m = 0; m < grid.count; ++m)
            {
                const double g = gain(aligned_fbar_column(phi, grid, m, cfg), phi, grid.eta[m]);
                worst_dev = std::max(worst_dev, std::abs(g - 1.0));
                if (m == 0 || m == grid.count - 1)
                    edge_aligned = std::max(edge_aligned, g);
            }
            const AnalogPrecoder flat = design_analog_precoder({phi}, grid, cfg, 1, 1, false);
            for (int m : {0, grid.count - 1})
            {
                const double margin = gain(aligned_fbar_column(phi, grid, m, cfg), phi, grid.eta[m])
                                      - gain(flat.fbar(0, m).col(0), phi, grid.eta[m]);
                min_margin = std::min(min_margin, margin);
                edges_lower = edges_lower && margin > 0.0;
            }
        }
        Outcome o;
        o.pass = worst_dev <= 1e-9 && edges_lower;
        o.detail = "max |gain - 1| " + num(worst_dev) + "; min edge margin over the phase-only design "
                   + num(min_margin, "%.4f");
        return o;
    }

    // 3: closed-form auxiliaries are stationary and unimprovable
    Outcome auxiliary_optimality(const Settings &)
    {
        std::mt19937_64 rng(303);
        std::normal_distribution<double> n(0.0, 1.0);
        double worst_rho = 0.0, worst_aux = 0.0;
        int improvements = 0;
        for (int trial = 0; trial < 50; ++trial)
        {
            const auto inst = make_instance(small_config({}), 3000 + trial);
            const LinkModel &model = inst->model;
            const auto v = random_variables(model, rng);
            const UeScReal rho = update_rho(model, v);
            for (Eigen::Index i = 0; i < rho.size(); ++i)
            {
                const double h = 1e-5 * std::max(1.0, rho.data()[i]);
                UeScReal up = rho, dn = rho;
                up.data()[i] += h;
                dn.data()[i] -= h;
                worst_rho = std::max(worst_rho,
                                     std::abs(ldr_objective(model, v, up) - ldr_objective(model, v, dn)) / (2.0 * h));
            }

            // lambda, omega and gamma share the closed form at their own evaluation points
            const UeScReal vs = compute_varsigma(model, rho);
            for (int point = 0; point < 3; ++point)
            {
                const auto at = point == 0 ? v : random_variables(model, rng);
                const UeScComplex aux = update_auxiliary(model, at, vs);
                const double best = mcqt_surrogate(model, at, aux, vs);
                const double scale = std::max(1.0, std::abs(best));
                for (int d = 0; d < 20; ++d)
                {
                    UeScComplex dir(aux.rows(), aux.cols());
                    for (Eigen::Index i = 0; i < dir.size(); ++i)
                        dir.data()[i] = cplx(n(rng), n(rng)) * std::max(std::abs(aux.data()[i]), 1e-12);
                    dir /= dir.norm() / aux.norm();
                    const double h = 1e-6;
                    const double deriv =
                        (mcqt_surrogate(model, at, aux + h * dir, vs) - mcqt_surrogate(model, at, aux - h * dir, vs))
                        / (2.0 * h);
                    worst_aux = std::max(worst_aux, std::abs(deriv) / scale);
                    if (mcqt_surrogate(model, at, aux + 1e-3 * dir, vs) > best)
                        ++improvements;
                }
            }
        }
        Outcome o;
        o.pass = worst_rho <= 1e-6 && worst_aux <= 1e-6 && improvements == 0;
        o.detail = "max |d/drho| " + num(worst_rho) + ", max |directional derivative| (aux) " + num(worst_aux)
                   + ", improving perturbations " + std::to_string(improvements) + " of 3000";
        return o;
    }

    ConfigDocument desk_document()
    {
        ConfigDocument d;
        d.system.aps = 2;
        d.system.ris = 2;
        d.system.ues = 2;
        d.system.subcarriers = 4;
        d.system.ap_antennas = 8;
        d.system.td_elements = 8;
        d.geometry = ScenarioGeometry::defaults(2, 2);
        return d;
    }

    // 4: continuous-mode AO never decreases the WSR
    Outcome monotonicity(const Settings &)
    {
        const auto t0 = Clock::now();
        const ExperimentResult r = run_convergence_experiment(desk_document(), quiet_options({SchemeSpec{}}, 20));
        const double secs = seconds_since(t0);
        int bad = 0;
        double worst_drop = 0.0;
        for (const auto &c : r.cells)
        {
            bad += c.monotone ? 0 : 1;
            for (std::size_t i = 1; i < c.trace_asr.size(); ++i)
                worst_drop = std::max(worst_drop, (c.trace_asr[i - 1] - c.trace_asr[i]) / std::abs(c.trace_asr[i - 1]));
        }
        Outcome o;
        o.pass = bad == 0 && secs < 300.0;
        o.detail = std::to_string(bad) + " of 20 traces non-monotone, worst relative drop " + num(worst_drop) + "; "
                   + num(secs, "%.1f") + " s";
        return o;
    }

    struct FullScaleRun
    {
        ExperimentResult result;
        double seconds = 0.0;
    };

    const FullScaleRun &full_scale_run(const Settings &s)
    {
        static const FullScaleRun run = [&] {
            progress("full-scale convergence experiment");
            const auto t0 = Clock::now();
            FullScaleRun p;
            p.result = run_convergence_experiment(default_config(), quiet_options(all_schemes(), s.seeds));
            p.seconds = seconds_since(t0);
            emit_results(p.result, s.out, true);
            return p;
        }();
        return run;
    }

    // 5: median iterations to the 1e-3 relative change
    Outcome convergence_budget(const Settings &s)
    {
        const FullScaleRun &run = full_scale_run(s);
        const ExperimentResult &r = run.result;
        bool pass = run.seconds < 1800.0;
        std::string detail;
        for (std::size_t i = 0; i < r.schemes.size(); ++i)
        {
            const std::string &name = r.schemes[i];
            const int budget = name == "proposed" ? 20 : (name.rfind("proposed-", 0) == 0 ? 10 : 5);
            std::vector<double> its;
            for (std::size_t k = 0; k < r.seeds.size(); ++k)
            {
                const int n = r.cell(0, i, k).iterations_to_converge;
                its.push_back(n < 0 ? std::numeric_limits<double>::infinity() : double(n));
            }
            std::sort(its.begin(), its.end());
            const std::size_t h = its.size() / 2;
            const double med = its.size() % 2 ? its[h] : 0.5 * (its[h - 1] + its[h]);
            pass = pass && med <= budget;
            detail += name + " " + num(med, "%.1f") + "/" + std::to_string(budget) + "; ";
        }
        Outcome o;
        o.pass = pass;
        o.detail = detail + num(run.seconds, "%.0f") + " s";
        return o;
    }

    // 6: proposed >= 2-bit >= 1-bit >= max(baselines), each with 1 % slack
    Outcome scheme_ordering(const Settings &s)
    {
        const ExperimentResult &r = full_scale_run(s).result;
        auto med = [&](const char *label) { return r.median(0, r.scheme_index(label)); };
        const double p = med("proposed"), b2 = med("proposed-2bit"), b1 = med("proposed-1bit");
        const double base = std::max(med("without-ris"), med("without-td"));
        auto geq = [](double a, double b) { return a >= 0.99 * b; };
        Outcome o;
        o.pass = geq(p, b2) && geq(b2, b1) && geq(b1, base);
        o.detail = "medians proposed " + num(p, "%.3f") + ", 2-bit " + num(b2, "%.3f") + ", 1-bit " + num(b1, "%.3f")
                   + ", without-ris " + num(med("without-ris"), "%.3f") + ", without-td "
                   + num(med("without-td"), "%.3f");
        return o;
    }

    // A point is a peak when its median exceeds both neighbours by more than 1 %
    bool is_peak(const std::vector<double> &y, std::size_t i)
    {
        return i > 0 && i + 1 < y.size() && y[i] > 1.01 * y[i - 1] && y[i] > 1.01 * y[i + 1];
    }

    // 7: monotone trends in P, delta, K and the two-peak distance profile
    Outcome trends(const Settings &s)
    {
        const ConfigDocument doc = default_config();
        const ExperimentOptions opts = quiet_options(all_schemes(), s.trend_seeds);
        std::vector<std::string> failures;
        std::string detail;

        progress("power sweep");
        const ExperimentResult pw = run_power_sweep(doc, {-10.0, 0.0, 10.0, 20.0}, opts);
        emit_results(pw, s.out);
        for (std::size_t i = 0; i < pw.schemes.size(); ++i)
            for (std::size_t p = 1; p < pw.grid.size(); ++p)
                if (!(pw.median(p, i) > pw.median(p - 1, i)))
                {
                    failures.push_back("P: " + medians_of(pw, i));
                    break;
                }

        progress("CSI error sweep");
        const ExperimentResult csi = run_csi_sweep(doc, {0.0, 0.1, 0.2, 0.3, 0.4}, opts);
        emit_results(csi, s.out);
        for (std::size_t i = 0; i < csi.schemes.size(); ++i)
            for (std::size_t p = 1; p < csi.grid.size(); ++p)
                if (csi.median(p, i) > csi.median(p - 1, i))
                {
                    failures.push_back("delta: " + medians_of(csi, i));
                    break;
                }

        progress("user sweep");
        ConfigDocument at20 = doc;
        at20.system.power_dbm = {20.0};
        const ExperimentResult us = run_user_sweep(at20, {2.0, 4.0, 6.0, 8.0}, opts);
        emit_results(us, s.out);
        for (std::size_t i = 0; i < us.schemes.size(); ++i)
        {
            bool ok = true;
            for (std::size_t p = 1; p < us.grid.size(); ++p)
            {
                const double inc = us.median(p, i) - us.median(p - 1, i);
                ok = ok && inc >= 0.0;
                if (p >= 2)
                    ok = ok && inc <= us.median(p - 1, i) - us.median(p - 2, i);
            }
            if (!ok)
                failures.push_back("K: " + medians_of(us, i));
        }

        progress("distance sweep");
        const ExperimentResult ds = run_distance_sweep(doc, {10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0}, opts);
        emit_results(ds, s.out);
        std::vector<std::size_t> ris_points;
        for (const Vec3 &q : doc.geometry.ris_positions)
            for (std::size_t p = 0; p < ds.grid.size(); ++p)
                if (std::abs(ds.grid[p] - q[0]) < 1e-9)
                    ris_points.push_back(p);
        for (std::size_t i = 0; i < ds.schemes.size(); ++i)
        {
            std::vector<double> y;
            for (std::size_t p = 0; p < ds.grid.size(); ++p)
                y.push_back(ds.median(p, i));
            const bool ris_scheme = ds.schemes[i] != "without-ris";
            bool ok = ris_points.size() == doc.geometry.ris_positions.size();
            for (std::size_t p : ris_points)
                ok = ok && is_peak(y, p) == ris_scheme;
            if (!ok)
                failures.push_back("L: " + medians_of(ds, i));
        }

        for (const auto *r : {&pw, &csi, &us, &ds})
            for (const auto &v : check_invariants(*r))
                failures.push_back(r->name + ": " + v);

        Outcome o;
        o.pass = failures.empty();
        if (o.pass)
            o.detail = "P, delta, K and distance trends hold for all schemes (" + std::to_string(s.trend_seeds)
                       + " seeds per point); e.g. " + medians_of(ds, 0);
        for (const auto &f : failures)
            o.detail += (o.detail.empty() ? "" : "; ") + f;
        return o;
    }

    QuadraticSubproblem ball_problem(const CVec &target, double budget)
    {
        QuadraticSubproblem p;
        const Eigen::Index n = target.size();
        p.blocks = {CMat::Identity(n, n)};
        p.linear = target;
        p.constant = target.squaredNorm();
        p.constraints = PowerConstraints{{{CMat::Identity(n, n)}}, {budget}};
        return p;
    }

    // 8: interior optimum, active ball, single-entry phase projection
    Outcome solver_cases(const Settings &)
    {
        std::mt19937_64 rng(808);
        CVec inner(4);
        inner << cplx(0.1, 0.0), cplx(0.0, -0.05), cplx(0.02, 0.02), cplx(-0.03, 0.0);
        const PdsResult a = solve_pds(ball_problem(inner, 1.0), CVec::Zero(4));
        const double ea = (a.x - inner).norm();

        CVec outer = random_phasors(6, rng);
        outer *= 2.0 / outer.norm();
        const PdsResult b = solve_pds(ball_problem(outer, 1.0), CVec::Zero(6));
        const double eb = (b.x - outer / 2.0).norm();

        QuadraticSubproblem ph;
        ph.blocks = {CMat::Identity(1, 1)};
        ph.linear = CVec::Constant(1, std::polar(2.0, pi / 4));
        ph.constant = 4.0;
        ph.constraints = UnitModulus{};
        const PdsResult c = solve_pds(ph, CVec::Ones(1));
        const double ec = std::abs(c.x[0] - std::polar(1.0, pi / 4));

        Outcome o;
        o.pass = ea <= 1e-6 && eb <= 1e-6 && ec <= 1e-6 && a.iterations <= 500 && b.iterations <= 500
                 && c.iterations <= 500;
        o.detail = "errors " + num(ea) + " / " + num(eb) + " / " + num(ec) + " in " + std::to_string(a.iterations)
                   + " / " + std::to_string(b.iterations) + " / " + std::to_string(c.iterations) + " iterations";
        return o;
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    // 9: byte-identical reruns and a lossless config sidecar
    Outcome determinism(const Settings &s)
    {
        ConfigDocument doc = desk_document();
        doc.system.max_iterations = 5;
        doc.system.ris_mode = RisMode::two_bit;
        doc.system.power_dbm = {3.25, -1.5};
        doc.geometry.ue_center_distance = 37.5;
        const ExperimentOptions opts = quiet_options(all_schemes(), 2);
        const auto a_dir = s.out / "determinism_a", b_dir = s.out / "determinism_b";
        emit_results(run_csi_sweep(doc, {0.0, 0.2}, opts), a_dir, true);
        emit_results(run_csi_sweep(doc, {0.0, 0.2}, opts), b_dir, true);
        bool same = true;
        for (const char *f : {"sweep-csi.csv", "sweep-csi_trace.csv", "sweep-csi.json"})
            same = same && slurp(a_dir / f) == slurp(b_dir / f) && !slurp(a_dir / f).empty();

        const auto side = nlohmann::json::parse(slurp(a_dir / "sweep-csi.json"));
        const bool lossless = config_from_json(side.at("config")) == doc
                              && config_from_json(config_to_json(default_config())) == default_config();
        Outcome o;
        o.pass = same && lossless;
        o.detail = std::string(same ? "reruns byte-identical" : "reruns differ") + ", config round trip "
                   + (lossless ? "lossless" : "lossy");
        return o;
    }

    Settings parse(int argc, char **argv)
    {
        Settings s;
        for (int i = 1; i < argc; ++i)
        {
            const std::string arg = argv[i];
            auto value = [&]() -> std::string {
                if (i + 1 >= argc)
                    throw std::invalid_argument(arg + " needs a value");
                return argv[++i];
            };
            if (arg == "--only")
            {
                std::stringstream ss(value());
                for (std::string tok; std::getline(ss, tok, ',');)
                    s.only.insert(std::stoi(tok));
            }
            else if (arg == "--seeds")
                s.seeds = std::stoi(value());
            else if (arg == "--trend-seeds")
                s.trend_seeds = std::stoi(value());
            else if (arg == "--out")
                s.out = value();
            else
                throw std::invalid_argument("unknown argument " + arg);
        }
        return s;
    }
}

int main(int argc, char **argv)
{
    Settings settings;
    try
    {
        settings = parse(argc, argv);
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "cfris_acceptance: %s\n", e.what());
        return 2;
    }

    const std::vector<std::pair<const char *, std::function<Outcome(const Settings &)>>> criteria = {
        {"surrogate equivalence (w, theta, t blocks)", surrogate_equivalence},
        {"beam alignment across the band", beam_alignment},
        {"auxiliary optimality", auxiliary_optimality},
        {"AO monotonicity at desk scale", monotonicity},
        {"convergence budget at full scale", convergence_budget},
        {"scheme ordering at convergence", scheme_ordering},
        {"trend suite (P, delta, K, distance)", trends},
        {"PDS analytic cases", solver_cases},
        {"determinism and config persistence", determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const int id = int(i) + 1;
        if (!settings.only.empty() && !settings.only.count(id))
            continue;
        Outcome o;
        try
        {
            o = criteria[i].second(settings);
        }
        catch (const std::exception &e)
        {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %d: %s | %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
