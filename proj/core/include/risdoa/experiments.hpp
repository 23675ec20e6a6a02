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

#ifndef RISDOA_EXPERIMENTS_HPP
#define RISDOA_EXPERIMENTS_HPP

#include "risdoa/report.hpp"
#include "risdoa/ris.hpp"
#include "risdoa/scaling_law.hpp"
#include "risdoa/scenario.hpp"
#include "risdoa/spectrum.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace risdoa
{
    enum class Experiment
    {
        crb_vs_n,
        crb_vs_r,
        spectrum,
        moments,
        validate
    };

    std::string to_string(Experiment experiment);
    Experiment parse_experiment(const std::string &name);

    enum class OutputFormat
    {
        csv,
        json
    };

    std::string to_string(OutputFormat format);
    OutputFormat parse_output_format(const std::string &name);

    // Every field maps to a config-file key of the same name. The RIS
    // distribution is flattened into ris_type plus its parameters.
    struct ExperimentConfig
    {
        Experiment experiment = Experiment::crb_vs_n;

        // Scenario; thetas/phis are overwritten when random_angles is set.
        std::vector<double> thetas;
        std::vector<double> phis;
        std::vector<std::size_t> n_sweep;
        std::vector<std::size_t> r_sweep; // prefixes of phis (crb-vs-r)
        std::size_t n_slots = 50;
        std::vector<double> powers;
        double noise_power = 1.0;
        SignalModel signal_model = SignalModel::uncorrelated_diagonal;
        RisDistribution ris = UniformPhase{};

        std::size_t n_trials = 200;
        std::uint64_t seed = 1;
        std::string output_path; // empty: stdout
        OutputFormat output_format = OutputFormat::csv;
        bool fixed_ris = false;
        bool random_angles = false;
        bool timings = false; // wall-clock columns make output non-reproducible
        unsigned workers = 1;

        // Spectrum.
        double c1 = 0.3;
        double c2 = 0.35;
        double amplitude_x = 1.0;
        double amplitude_y = 3.0;
        double amplitude_p = 0.5;
        std::size_t spectrum_n = 1000;
        std::size_t draws = 10;
        std::size_t bins = 40;
        double separation_factor = 2.0;
        std::size_t grid_points = 10001;
        double grid_lo = 0.0;
        double grid_hi = 0.0; // <= grid_lo: auto
        double y_offset = default_y_offset;
        bool full_scale = false; // spectrum_n = 2000

        // Moments.
        std::size_t n_samples = 1000000;
    };

    // Defaults for each experiment (angles, sweeps and trial counts).
    ExperimentConfig preset(Experiment experiment);

    // Overlays a JSON object onto `base`. Unknown keys and ill-typed values
    // raise PreconditionError.
    ExperimentConfig apply_config_json(ExperimentConfig base, const std::string &json_text);
    ExperimentConfig load_config(const std::string &path, Experiment experiment);

    void validate(const ExperimentConfig &config);

    // Echo used in JSON output; omits the fields that must not affect output
    // bytes (workers, output_path).
    std::string config_json(const ExperimentConfig &config);

    // The scenario at one sweep point, after angle resolution.
    Scenario sweep_scenario(const ExperimentConfig &config, std::size_t n, std::size_t r);

    // Golden-angle sequence of sensor angles that avoids mirroring any target
    // by less than `margin` radians. Prefixes of it give nested sensor sets.
    std::vector<double> non_symmetric_sensor_pool(std::span<const double> thetas, std::size_t count,
                                                  double margin = 0.05);

    // Resolves random_angles (draws under the seed) and full_scale.
    ExperimentConfig resolve(ExperimentConfig config);

    struct SweepRow
    {
        std::size_t n = 0;
        std::size_t r = 0;
        std::size_t target_index = 0;
        Regime regime = Regime::non_symmetric;
        double crb_exact_mean = 0.0;
        double crb_exact_stderr = 0.0;
        std::optional<double> crb_asymptotic;
        std::size_t n_singular_trials = 0;
        double condition_number = 0.0; // worst trial
    };

    // One row per (N, target). Errors carry the offending N.
    std::vector<SweepRow> run_crb_vs_n(const ExperimentConfig &config);
    // One row per (N, R) for the first target.
    std::vector<SweepRow> run_crb_vs_r(const ExperimentConfig &config);

    // Least-squares slope of log(crb) against log(n).
    double loglog_slope(std::span<const double> n, std::span<const double> crb);

    struct SpectrumSummary
    {
        std::string model;
        std::size_t n = 0, k = 0, r = 0, draws = 0;
        double mass = 0.0;
        double support_lo = 0.0;
        double support_hi = 0.0;
        double limit_l1 = 0.0;
        std::optional<double> l1;                // histogram vs theory, pooled over draws
        double crb_theory_per_target = 0.0;      // asymptotic_crb_total(...).per_target
        std::optional<double> crb_empirical_per_target; // first draw
    };

    struct SpectrumResult
    {
        std::string model;
        DensityCurve curve;
        HistogramComparison histogram;
        SpectrumSummary summary;
    };

    SpectralModel constant_modulus_model(const ExperimentConfig &config);
    SpectralModel discrete_amplitude_model(const ExperimentConfig &config);

    // Theory curve plus `draws` empirical spectra for one model.
    SpectrumResult run_spectrum_model(const ExperimentConfig &config, const SpectralModel &model);
    std::vector<SpectrumResult> run_spectrum(const ExperimentConfig &config);

    // E2 = |mean|^2 from samples is biased by (var_re + var_im) / n; its
    // standard error follows from the delta method plus the chi-square term.
    struct MomentEstimate
    {
        std::string distribution;
        Moments analytic;
        double e1 = 0.0;
        double e1_stderr = 0.0;
        double e2 = 0.0; // raw |sample mean|^2
        double e2_bias = 0.0;
        double e2_stderr = 0.0;
        std::size_t n_samples = 0;
    };

    MomentEstimate estimate_moments(const RisDistribution &dist, std::size_t n_samples, std::uint64_t seed,
                                    std::uint64_t index, unsigned workers = 1);
    std::vector<MomentEstimate> run_moments(const ExperimentConfig &config);

    struct ValidationCheck
    {
        std::string name;
        double observed = 0.0;
        double expected = 0.0;
        double tolerance = 0.0;
        bool passed = false;
        double runtime_s = 0.0;
        std::string detail;
    };

    // Lets tests inject faults into the solver under validation.
    struct ValidationHooks
    {
        QuadraticCoefficientFn quadratic = quadratic_coefficients;
    };

    std::vector<ValidationCheck> run_validate(const ExperimentConfig &config, const ValidationHooks &hooks = {});

    // Tables in output order; the first is the primary "rows" table.
    std::vector<NamedTable> experiment_tables(const ExperimentConfig &config);
    std::vector<NamedTable> experiment_tables(const ExperimentConfig &config, const ValidationHooks &hooks);

    Table sweep_table(const std::vector<SweepRow> &rows);
    std::vector<NamedTable> spectrum_tables(const std::vector<SpectrumResult> &results);
    Table moments_table(const std::vector<MomentEstimate> &rows);
    Table checks_table(const std::vector<ValidationCheck> &checks, bool timings);
}

#endif
