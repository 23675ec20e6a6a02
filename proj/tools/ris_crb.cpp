// SPDX-License-Identifier: Apache-2.0
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

// ris-crb: experiment runner. Exit codes: 0 ok, 1 invalid config, 2 numerical
// failure (including failed validate checks), 3 I/O.

#include "risdoa/errors.hpp"
#include "risdoa/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace
{
    int exit_code(risdoa::ErrorKind kind)
    {
        switch (kind)
        {
        case risdoa::ErrorKind::invalid_input:
            return 1;
        case risdoa::ErrorKind::numerical:
            return 2;
        case risdoa::ErrorKind::io:
            return 3;
        }
        return 2;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Cramer-Rao bounds for RIS-assisted DoA estimation"};
    app.set_version_flag("--version", "ris-crb 0.1.0");

    std::string experiment_name, config_path, out_path, format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<unsigned> workers;
    bool fixed_ris = false, random_angles = false, full_scale = false, timings = false;

    app.add_option("experiment", experiment_name, "crb-vs-n | crb-vs-r | spectrum | moments | validate")
        ->required()
        ->check(CLI::IsMember({"crb-vs-n", "crb-vs-r", "spectrum", "moments", "validate"}));
    app.add_option("--config", config_path, "JSON config; keys as in ExperimentConfig (preset when omitted)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "Monte Carlo trials per sweep point");
    app.add_option("--workers", workers, "worker threads (output does not depend on it)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "output path (stdout when omitted)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--fixed-ris", fixed_ris, "hold one RIS draw across all slots");
    app.add_flag("--random-angles", random_angles, "draw angles under the seed instead of the preset");
    app.add_flag("--full-scale", full_scale, "spectrum at N = 2000");
    app.add_flag("--timings", timings, "add wall-clock columns (breaks byte reproducibility)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        const auto experiment = risdoa::parse_experiment(experiment_name);
        risdoa::ExperimentConfig config = config_path.empty() ? risdoa::preset(experiment)
                                                              : risdoa::load_config(config_path, experiment);
        if (seed)
            config.seed = *seed;
        if (trials)
            config.n_trials = *trials;
        if (workers)
            config.workers = *workers;
        if (!out_path.empty())
            config.output_path = out_path;
        if (!format.empty())
            config.output_format = risdoa::parse_output_format(format);
        config.fixed_ris = config.fixed_ris || fixed_ris;
        config.random_angles = config.random_angles || random_angles;
        config.full_scale = config.full_scale || full_scale;
        config.timings = config.timings || timings;
        risdoa::validate(config);

        const auto tables = risdoa::experiment_tables(config);
        if (config.output_format == risdoa::OutputFormat::json)
            risdoa::write_json_file(config.output_path, risdoa::config_json(config), tables);
        else
            risdoa::write_csv_files(config.output_path, tables);

        if (experiment == risdoa::Experiment::validate)
        {
            const auto &checks = tables.front().table;
            for (const auto &row : checks.rows)
                if (!std::get<bool>(row[4]))
                {
                    std::cerr << "ris-crb: check failed: " << std::get<std::string>(row[0]) << '\n';
                    return 2;
                }
        }
        return 0;
    }
    catch (const risdoa::Error &e)
    {
        std::cerr << "ris-crb: " << e.what() << '\n';
        return exit_code(e.kind());
    }
    catch (const std::exception &e)
    {
        std::cerr << "ris-crb: " << e.what() << '\n';
        return 2;
    }
}
