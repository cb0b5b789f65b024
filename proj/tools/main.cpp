// SPDX-License-Identifier: Apache-2.0
//
// aerothz c++ library for THz UM-MIMO aeronautical channel estimation and tracking
// Copyright (C) 2026 The aerothz authors
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

#include "smoke.hpp"

#include <aerothz/harness.hpp>

#include "CLI11.hpp"

#include <iomanip>
#include <iostream>
#include <map>

using namespace aerothz;

namespace
{
    int cmd_run(const std::string &path, const std::string &output, int threads, int trials)
    {
        ExperimentConfig cfg = load_config(path);
        if (!output.empty())
            cfg.output = output;
        if (threads >= 0)
            cfg.threads = threads;
        if (trials > 0)
            cfg.trials = trials;
        cfg.validate();
        std::vector<MetricRecord> rows = run_sweep(cfg);
        write_outputs(cfg, rows);
        std::cout << rows.size() << " records written to " << cfg.output << "/metrics.csv\n";
        return 0;
    }

    int cmd_crlb(const std::string &path, int trials)
    {
        ExperimentConfig cfg = load_config(path);
        if (trials > 0)
            cfg.trials = trials;
        std::vector<MetricRecord> rows = crlb_sweep(cfg);

        // One table per (variant, omega, f_s, array), one row per SNR
        std::vector<std::string> cols;
        for (const MetricRecord &r : rows)
            if (std::find(cols.begin(), cols.end(), r.metric) == cols.end() && r.metric != "failed_trials")
                cols.push_back(r.metric);
        std::map<std::string, std::map<double, std::map<std::string, double>>> tables;
        std::vector<std::string> order;
        for (const MetricRecord &r : rows)
        {
            std::ostringstream key;
            key << r.variant << "  omega=" << r.omega.value_or(1) << "  f_s=" << format_number(r.f_s_hz.value_or(0))
                << "  N=" << r.array_n.value_or(0);
            if (!tables.count(key.str()))
                order.push_back(key.str());
            tables[key.str()][r.snr_db.value_or(0.0)][r.metric] = r.value;
        }
        for (const std::string &k : order)
        {
            std::cout << "# " << k << "\n" << std::setw(8) << "snr_db";
            for (const std::string &c : cols)
                std::cout << std::setw(16) << c;
            std::cout << "\n";
            for (const auto &[snr, vals] : tables[k])
            {
                std::cout << std::setw(8) << snr;
                for (const std::string &c : cols)
                {
                    auto it = vals.find(c);
                    std::cout << std::setw(16) << (it == vals.end() ? std::string("-") : format_number(it->second));
                }
                std::cout << "\n";
            }
            std::cout << "\n";
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"THz UM-MIMO aeronautical channel estimation and tracking"};
    app.require_subcommand(1);

    std::string run_cfg, run_out;
    int run_threads = -1, run_trials = 0;
    CLI::App *run = app.add_subcommand("run", "Run the Monte-Carlo sweeps of a config");
    run->add_option("config", run_cfg, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", run_out, "Override the output directory");
    run->add_option("-j,--threads", run_threads, "Worker threads (0: all cores)");
    run->add_option("-n,--trials", run_trials, "Override the trial count");

    std::string crlb_cfg;
    int crlb_trials = 0;
    CLI::App *crlb = app.add_subcommand("crlb", "Print bound tables for a config");
    crlb->add_option("config", crlb_cfg, "JSON config file")->required()->check(CLI::ExistingFile);
    crlb->add_option("-n,--trials", crlb_trials, "Override the trial count");

    CLI::App *smoke = app.add_subcommand("smoke", "Fast noiseless verification");

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (*run)
            return cmd_run(run_cfg, run_out, run_threads, run_trials);
        if (*crlb)
            return cmd_crlb(crlb_cfg, crlb_trials);
        if (*smoke)
        {
            int failed = tools::run_smoke(std::cout);
            std::cout << (failed ? "smoke: FAILED\n" : "smoke: all invariants hold\n");
            return failed ? 1 : 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
