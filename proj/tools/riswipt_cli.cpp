/* SPDX-License-Identifier: Apache-2.0
 *
 * riswipt command-line front end: single runs, parameter sweeps, and
 * baseline-only runs over the key=value config format.
 */

#include "riswipt/harness.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char **argv)
{
    CLI::App app{"riswipt: joint beamforming, RIS reflection, and power-split optimization"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool no_timing = false;
    int jobs = 0;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config_path, "key=value config file")->required();
        sub->add_option("--seed", seed, "master seed (default 0)");
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_flag("--no-timing", no_timing, "write wall_ms = 0 for byte-stable output");
    };

    CLI::App *cmd_run = app.add_subcommand("run", "solve one channel drop with all methods");
    add_common(cmd_run);

    CLI::App *cmd_sweep = app.add_subcommand("sweep", "parameter sweep over Monte-Carlo drops");
    add_common(cmd_sweep);
    std::string param_name;
    std::vector<double> values;
    int drops = 1;
    cmd_sweep->add_option("--param", param_name, "n_ris | lambda_bar | f_min | k_users")
        ->required();
    cmd_sweep->add_option("--values", values, "comma-separated ascending values")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--drops", drops, "channel drops per value")->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--jobs", jobs, "worker threads (0 = hardware count)");

    CLI::App *cmd_base = app.add_subcommand("baseline", "run a single baseline method");
    add_common(cmd_base);
    std::string mode;
    cmd_base->add_option("--mode", mode, "no-ris | random-phase")
        ->required()
        ->check(CLI::IsMember({"no-ris", "random-phase"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 1;
    }

    try
    {
        riswipt::LoadedConfig config = riswipt::load_config(config_path);
        riswipt::RunOptions ropts;
        ropts.timing = !no_timing;
        ropts.jobs = jobs;

        std::vector<riswipt::ResultRow> rows;
        if (app.got_subcommand(cmd_sweep))
        {
            riswipt::SweepSpec sweep;
            sweep.parameter = riswipt::parse_sweep_param(param_name);
            sweep.values = values;
            sweep.drops = drops;
            sweep.master_seed = seed;
            riswipt::SweepOutput out = riswipt::run_sweep(config, sweep, out_dir, ropts);
            rows = std::move(out.rows);
            std::cerr << "wrote " << out.results_path << ", " << out.aggregate_path << ", "
                      << out.plot_path << "\n";
        }
        else if (app.got_subcommand(cmd_run))
        {
            rows = riswipt::run_single(config, seed, ropts);
            std::cerr << "wrote " << riswipt::write_results(rows, out_dir) << "\n";
        }
        else
        {
            std::string method = (mode == "no-ris") ? "no_ris" : "random_phase";
            rows.push_back(riswipt::run_method(config, seed, method, ropts));
            std::cerr << "wrote " << riswipt::write_results(rows, out_dir) << "\n";
        }

        bool all_converged = std::all_of(rows.begin(), rows.end(), [](const riswipt::ResultRow &r) {
            return r.status == "converged";
        });
        return all_converged ? 0 : 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
