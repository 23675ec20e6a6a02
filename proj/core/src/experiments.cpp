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

#include "risdoa/experiments.hpp"
#include "risdoa/errors.hpp"
#include "risdoa/fim.hpp"
#include "risdoa/parallel.hpp"
#include "risdoa/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace risdoa
{
    namespace
    {
        using json = nlohmann::ordered_json;
        constexpr double pi = std::numbers::pi;

        const std::vector<double> preset_thetas{0.4, 1.1, -2.0};
        const std::vector<double> preset_phis{-0.4, 0.7, 1.5, -1.9, 2.6};

        std::string ris_type(const RisDistribution &dist)
        {
            if (std::holds_alternative<UniformPhase>(dist))
                return "uniform-phase";
            if (std::holds_alternative<DiscretePhase>(dist))
                return "discrete-phase";
            return "discrete-amplitude";
        }

        RisDistribution ris_of_type(const std::string &type)
        {
            if (type == "uniform-phase")
                return UniformPhase{};
            if (type == "discrete-phase")
                return DiscretePhase{};
            if (type == "discrete-amplitude")
                return DiscreteAmplitude{};
            throw PreconditionError("unknown ris_type '" + type + "'");
        }

        template <typename T>
        T get_as(const json &value, const std::string &key)
        {
            try
            {
                return value.get<T>();
            }
            catch (const json::exception &)
            {
                throw PreconditionError("config key '" + key + "' has the wrong type");
            }
        }

        bool strictly_ascending(const std::vector<std::size_t> &v)
        {
            return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
        }

        double seconds_since(std::chrono::steady_clock::time_point start)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }

        bool far_from_mirrors(double phi, std::span<const double> thetas, double margin)
        {
            return std::all_of(thetas.begin(), thetas.end(), [&](double theta)
                               { return std::abs(wrap_angle(phi + theta)) > margin; });
        }

        std::optional<double> asymptotic_or_empty(std::size_t i, const Scenario &s, const AsymptoticRegime &regime)
        {
            if (s.signal_model != SignalModel::uncorrelated_diagonal)
                return std::nullopt;
            try
            {
                return asymptotic_crb_entry(i, s, regime);
            }
            catch (const DegenerateRegimeError &)
            {
                return std::nullopt;
            }
        }

        Cell opt_cell(const std::optional<double> &v) { return v ? Cell{*v} : Cell{}; }
        Cell size_cell(std::size_t v) { return Cell{static_cast<std::int64_t>(v)}; }
    }

    std::string to_string(Experiment experiment)
    {
        switch (experiment)
        {
        case Experiment::crb_vs_n:
            return "crb-vs-n";
        case Experiment::crb_vs_r:
            return "crb-vs-r";
        case Experiment::spectrum:
            return "spectrum";
        case Experiment::moments:
            return "moments";
        case Experiment::validate:
            return "validate";
        }
        return "?";
    }

    Experiment parse_experiment(const std::string &name)
    {
        for (auto e : {Experiment::crb_vs_n, Experiment::crb_vs_r, Experiment::spectrum, Experiment::moments,
                       Experiment::validate})
            if (to_string(e) == name)
                return e;
        throw PreconditionError("unknown experiment '" + name + "'");
    }

    std::string to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

    OutputFormat parse_output_format(const std::string &name)
    {
        if (name == "csv")
            return OutputFormat::csv;
        if (name == "json")
            return OutputFormat::json;
        throw PreconditionError("unknown output format '" + name + "'");
    }

    std::vector<double> non_symmetric_sensor_pool(std::span<const double> thetas, std::size_t count, double margin)
    {
        constexpr double golden = 2.399963229728653; // pi (3 - sqrt 5)
        std::vector<double> pool;
        for (std::size_t r = 0; pool.size() < count; ++r)
        {
            require(r < 100 * (count + 10), "non_symmetric_sensor_pool: margin too large");
            const double phi = wrap_angle(0.7 + static_cast<double>(r) * golden);
            const bool distinct = std::all_of(pool.begin(), pool.end(), [&](double p)
                                              { return std::abs(wrap_angle(p - phi)) > margin; });
            if (distinct && far_from_mirrors(phi, thetas, margin))
                pool.push_back(phi);
        }
        return pool;
    }

    ExperimentConfig preset(Experiment experiment)
    {
        ExperimentConfig c;
        c.experiment = experiment;
        c.thetas = preset_thetas;
        c.phis = preset_phis;
        c.powers.assign(preset_thetas.size(), 1.0);
        c.ris = UniformPhase{0.0, pi};
        switch (experiment)
        {
        case Experiment::crb_vs_n:
            c.n_sweep = {64, 128, 256, 512, 1024};
            break;
        case Experiment::crb_vs_r:
            c.n_sweep = {128, 256, 512};
            c.r_sweep = {3, 5, 10, 20};
            c.phis = non_symmetric_sensor_pool(c.thetas, c.r_sweep.back());
            break;
        default:
            break;
        }
        return c;
    }

    ExperimentConfig apply_config_json(ExperimentConfig c, const std::string &json_text)
    {
        json doc;
        try
        {
            doc = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw PreconditionError(std::string("config is not valid JSON: ") + e.what());
        }
        require(doc.is_object(), "config must be a JSON object");

        std::optional<std::string> type;
        json ris_params = json::object();

        const std::map<std::string, std::function<void(const json &, const std::string &)>> setters{
            {"experiment",
             [&](const json &v, const std::string &k)
             {
                 require(parse_experiment(get_as<std::string>(v, k)) == c.experiment,
                         "config experiment does not match the command");
             }},
            {"thetas", [&](const json &v, const std::string &k) { c.thetas = get_as<std::vector<double>>(v, k); }},
            {"phis", [&](const json &v, const std::string &k) { c.phis = get_as<std::vector<double>>(v, k); }},
            {"n_sweep", [&](const json &v, const std::string &k) { c.n_sweep = get_as<std::vector<std::size_t>>(v, k); }},
            {"r_sweep", [&](const json &v, const std::string &k) { c.r_sweep = get_as<std::vector<std::size_t>>(v, k); }},
            {"n_slots", [&](const json &v, const std::string &k) { c.n_slots = get_as<std::size_t>(v, k); }},
            {"powers", [&](const json &v, const std::string &k) { c.powers = get_as<std::vector<double>>(v, k); }},
            {"noise_power", [&](const json &v, const std::string &k) { c.noise_power = get_as<double>(v, k); }},
            {"signal_model",
             [&](const json &v, const std::string &k) { c.signal_model = parse_signal_model(get_as<std::string>(v, k)); }},
            {"ris_type", [&](const json &v, const std::string &k) { type = get_as<std::string>(v, k); }},
            {"n_trials", [&](const json &v, const std::string &k) { c.n_trials = get_as<std::size_t>(v, k); }},
            {"seed", [&](const json &v, const std::string &k) { c.seed = get_as<std::uint64_t>(v, k); }},
            {"output_path", [&](const json &v, const std::string &k) { c.output_path = get_as<std::string>(v, k); }},
            {"output_format",
             [&](const json &v, const std::string &k) { c.output_format = parse_output_format(get_as<std::string>(v, k)); }},
            {"fixed_ris", [&](const json &v, const std::string &k) { c.fixed_ris = get_as<bool>(v, k); }},
            {"random_angles", [&](const json &v, const std::string &k) { c.random_angles = get_as<bool>(v, k); }},
            {"timings", [&](const json &v, const std::string &k) { c.timings = get_as<bool>(v, k); }},
            {"workers", [&](const json &v, const std::string &k) { c.workers = get_as<unsigned>(v, k); }},
            {"c1", [&](const json &v, const std::string &k) { c.c1 = get_as<double>(v, k); }},
            {"c2", [&](const json &v, const std::string &k) { c.c2 = get_as<double>(v, k); }},
            {"amplitude_x", [&](const json &v, const std::string &k) { c.amplitude_x = get_as<double>(v, k); }},
            {"amplitude_y", [&](const json &v, const std::string &k) { c.amplitude_y = get_as<double>(v, k); }},
            {"amplitude_p", [&](const json &v, const std::string &k) { c.amplitude_p = get_as<double>(v, k); }},
            {"spectrum_n", [&](const json &v, const std::string &k) { c.spectrum_n = get_as<std::size_t>(v, k); }},
            {"draws", [&](const json &v, const std::string &k) { c.draws = get_as<std::size_t>(v, k); }},
            {"bins", [&](const json &v, const std::string &k) { c.bins = get_as<std::size_t>(v, k); }},
            {"separation_factor", [&](const json &v, const std::string &k) { c.separation_factor = get_as<double>(v, k); }},
            {"grid_points", [&](const json &v, const std::string &k) { c.grid_points = get_as<std::size_t>(v, k); }},
            {"grid_lo", [&](const json &v, const std::string &k) { c.grid_lo = get_as<double>(v, k); }},
            {"grid_hi", [&](const json &v, const std::string &k) { c.grid_hi = get_as<double>(v, k); }},
            {"y_offset", [&](const json &v, const std::string &k) { c.y_offset = get_as<double>(v, k); }},
            {"full_scale", [&](const json &v, const std::string &k) { c.full_scale = get_as<bool>(v, k); }},
            {"n_samples", [&](const json &v, const std::string &k) { c.n_samples = get_as<std::size_t>(v, k); }},
        };

        for (const auto &[key, value] : doc.items())
        {
            if (key.rfind("ris_", 0) == 0 && key != "ris_type")
            {
                ris_params[key] = value;
                continue;
            }
            const auto it = setters.find(key);
            require(it != setters.end(), "unknown config key '" + key + "'");
            it->second(value, key);
        }

        if (type)
            c.ris = ris_of_type(*type);
        for (const auto &[key, value] : ris_params.items())
        {
            bool used = false;
            if (auto *u = std::get_if<UniformPhase>(&c.ris))
            {
                if (key == "ris_phase_lo")
                    u->phase_lo = get_as<double>(value, key), used = true;
                else if (key == "ris_phase_hi")
                    u->phase_hi = get_as<double>(value, key), used = true;
            }
            else if (auto *d = std::get_if<DiscretePhase>(&c.ris))
            {
                if (key == "ris_phases")
                    d->phases = get_as<std::vector<double>>(value, key), used = true;
                else if (key == "ris_probs")
                    d->probs = get_as<std::vector<double>>(value, key), used = true;
            }
            else if (auto *a = std::get_if<DiscreteAmplitude>(&c.ris))
            {
                if (key == "ris_x")
                    a->x = get_as<double>(value, key), used = true;
                else if (key == "ris_y")
                    a->y = get_as<double>(value, key), used = true;
                else if (key == "ris_p")
                    a->p = get_as<double>(value, key), used = true;
            }
            require(used, "config key '" + key + "' does not apply to ris_type " + ris_type(c.ris));
        }
        return c;
    }

    ExperimentConfig load_config(const std::string &path, Experiment experiment)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read config file '" + path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        return apply_config_json(preset(experiment), text.str());
    }

    void validate(const ExperimentConfig &c)
    {
        require(c.workers >= 1, "workers must be >= 1");
        require(!c.thetas.empty(), "thetas must be non-empty");
        require(!c.phis.empty(), "phis must be non-empty");
        require(c.powers.size() == c.thetas.size(), "powers must have one entry per target");
        validate(c.ris);
        switch (c.experiment)
        {
        case Experiment::crb_vs_n:
            require(!c.n_sweep.empty() && strictly_ascending(c.n_sweep), "n_sweep must be non-empty and ascending");
            require(c.n_trials >= 1, "n_trials must be >= 1");
            break;
        case Experiment::crb_vs_r:
            require(!c.n_sweep.empty() && strictly_ascending(c.n_sweep), "n_sweep must be non-empty and ascending");
            require(!c.r_sweep.empty() && strictly_ascending(c.r_sweep), "r_sweep must be non-empty and ascending");
            require(c.r_sweep.front() >= 1 && c.r_sweep.back() <= c.phis.size(),
                    "r_sweep entries must lie in [1, number of phis]");
            require(c.n_trials >= 1, "n_trials must be >= 1");
            break;
        case Experiment::spectrum:
            validate(constant_modulus_model(c));
            validate(discrete_amplitude_model(c));
            require(c.spectrum_n >= 2, "spectrum_n must be >= 2");
            require(c.bins >= 1, "bins must be >= 1");
            require(c.grid_points >= 3, "grid_points must be >= 3");
            require(c.y_offset > 0.0, "y_offset must be positive");
            require(c.separation_factor >= 0.0, "separation_factor must be non-negative");
            break;
        case Experiment::moments:
            require(c.n_samples >= 2, "n_samples must be >= 2");
            break;
        case Experiment::validate:
            break;
        }
    }

    std::string config_json(const ExperimentConfig &c)
    {
        json j;
        j["experiment"] = to_string(c.experiment);
        j["thetas"] = c.thetas;
        j["phis"] = c.phis;
        j["n_sweep"] = c.n_sweep;
        j["r_sweep"] = c.r_sweep;
        j["n_slots"] = c.n_slots;
        j["powers"] = c.powers;
        j["noise_power"] = c.noise_power;
        j["signal_model"] = to_string(c.signal_model);
        j["ris_type"] = ris_type(c.ris);
        std::visit(
            [&](const auto &d)
            {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, UniformPhase>)
                {
                    j["ris_phase_lo"] = d.phase_lo;
                    j["ris_phase_hi"] = d.phase_hi;
                }
                else if constexpr (std::is_same_v<T, DiscretePhase>)
                {
                    j["ris_phases"] = d.phases;
                    j["ris_probs"] = d.probs;
                }
                else
                {
                    j["ris_x"] = d.x;
                    j["ris_y"] = d.y;
                    j["ris_p"] = d.p;
                }
            },
            c.ris);
        j["n_trials"] = c.n_trials;
        j["seed"] = c.seed;
        j["output_format"] = to_string(c.output_format);
        j["fixed_ris"] = c.fixed_ris;
        j["random_angles"] = c.random_angles;
        j["timings"] = c.timings;
        j["c1"] = c.c1;
        j["c2"] = c.c2;
        j["amplitude_x"] = c.amplitude_x;
        j["amplitude_y"] = c.amplitude_y;
        j["amplitude_p"] = c.amplitude_p;
        j["spectrum_n"] = c.spectrum_n;
        j["draws"] = c.draws;
        j["bins"] = c.bins;
        j["separation_factor"] = c.separation_factor;
        j["grid_points"] = c.grid_points;
        j["grid_lo"] = c.grid_lo;
        j["grid_hi"] = c.grid_hi;
        j["y_offset"] = c.y_offset;
        j["full_scale"] = c.full_scale;
        j["n_samples"] = c.n_samples;
        return j.dump();
    }

    ExperimentConfig resolve(ExperimentConfig c)
    {
        if (c.full_scale)
            c.spectrum_n = 2000;
        if (!c.random_angles)
            return c;

        // Targets uniform on the circle and mutually separated; sensors avoid
        // every mirror image except the one deliberately matched to target 0
        // in the N-sweep.
        constexpr double margin = 0.05;
        Substream rng(c.seed, Stream::angles);
        const auto draw = [&] { return wrap_angle(rng.uniform(-pi, pi)); };
        const std::size_t k = c.thetas.size(), r = c.phis.size();
        c.thetas.clear();
        for (std::size_t attempts = 0; c.thetas.size() < k; ++attempts)
        {
            require(attempts < 100000, "random_angles: could not place targets");
            const double theta = draw();
            if (std::all_of(c.thetas.begin(), c.thetas.end(),
                            [&](double t) { return std::abs(wrap_angle(t - theta)) > margin; }))
                c.thetas.push_back(theta);
        }
        c.phis.clear();
        if (c.experiment == Experiment::crb_vs_n)
            c.phis.push_back(wrap_angle(-c.thetas.front()));
        for (std::size_t attempts = 0; c.phis.size() < r; ++attempts)
        {
            require(attempts < 100000, "random_angles: could not place sensors");
            const double phi = draw();
            const bool distinct = std::all_of(c.phis.begin(), c.phis.end(),
                                              [&](double p) { return std::abs(wrap_angle(p - phi)) > margin; });
            if (distinct && far_from_mirrors(phi, c.thetas, margin))
                c.phis.push_back(phi);
        }
        return c;
    }

    Scenario sweep_scenario(const ExperimentConfig &c, std::size_t n, std::size_t r)
    {
        Scenario s;
        s.thetas = c.thetas;
        s.phis.assign(c.phis.begin(), c.phis.begin() + static_cast<std::ptrdiff_t>(r == 0 ? c.phis.size() : r));
        s.n_elements = n;
        s.n_slots = c.n_slots;
        s.powers = c.powers;
        s.noise_power = c.noise_power;
        s.signal_model = c.signal_model;
        s.ris = c.ris;
        validate(s);
        return s;
    }

    namespace
    {
        CrbResult sweep_point(const ExperimentConfig &c, const Scenario &s)
        {
            try
            {
                return monte_carlo_crb(s, c.n_trials, c.seed, MonteCarloOptions{c.fixed_ris, c.workers});
            }
            catch (const Error &e)
            {
                rethrow_with_context(e, "N=" + std::to_string(s.n_elements) + " R=" + std::to_string(s.num_sensors()));
            }
        }
    }

    std::vector<SweepRow> run_crb_vs_n(const ExperimentConfig &config)
    {
        const ExperimentConfig c = resolve(config);
        validate(c);
        std::vector<SweepRow> rows;
        for (const std::size_t n : c.n_sweep)
        {
            const Scenario s = sweep_scenario(c, n, 0);
            const auto regimes = detect_regime(s);
            const CrbResult crb = sweep_point(c, s);
            for (std::size_t i = 0; i < s.num_targets(); ++i)
                rows.push_back({n, s.num_sensors(), i, regimes[i].tag, crb.diag[i], crb.std_err[i],
                                asymptotic_or_empty(i, s, regimes[i]), crb.n_singular, crb.condition_number});
        }
        return rows;
    }

    std::vector<SweepRow> run_crb_vs_r(const ExperimentConfig &config)
    {
        const ExperimentConfig c = resolve(config);
        validate(c);
        std::vector<SweepRow> rows;
        for (const std::size_t n : c.n_sweep)
            for (const std::size_t r : c.r_sweep)
            {
                const Scenario s = sweep_scenario(c, n, r);
                const auto regimes = detect_regime(s);
                const CrbResult crb = sweep_point(c, s);
                rows.push_back({n, r, 0, regimes[0].tag, crb.diag[0], crb.std_err[0],
                                asymptotic_or_empty(0, s, regimes[0]), crb.n_singular, crb.condition_number});
            }
        return rows;
    }

    double loglog_slope(std::span<const double> n, std::span<const double> crb)
    {
        require(n.size() == crb.size() && n.size() >= 2, "loglog_slope: need matching series of length >= 2");
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i)
        {
            require(n[i] > 0.0 && crb[i] > 0.0, "loglog_slope: values must be positive");
            mx += std::log(n[i]);
            my += std::log(crb[i]);
        }
        mx /= static_cast<double>(n.size());
        my /= static_cast<double>(n.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < n.size(); ++i)
        {
            const double dx = std::log(n[i]) - mx;
            sxy += dx * (std::log(crb[i]) - my);
            sxx += dx * dx;
        }
        return sxy / sxx;
    }

    SpectralModel constant_modulus_model(const ExperimentConfig &c) { return {c.c1, c.c2, ConstantModulus{}}; }

    SpectralModel discrete_amplitude_model(const ExperimentConfig &c)
    {
        return {c.c1, c.c2, DiscreteAmplitude{c.amplitude_x, c.amplitude_y, c.amplitude_p}};
    }

    SpectrumResult run_spectrum_model(const ExperimentConfig &config, const SpectralModel &model)
    {
        const ExperimentConfig c = resolve(config);
        const std::string name = std::holds_alternative<ConstantModulus>(model.ris) ? "constant-modulus"
                                                                                     : "discrete-amplitude";
        SpectrumResult out;
        out.model = name;
        try
        {
            out.curve = density_curve(model, GridSpec{c.grid_lo, c.grid_hi, c.grid_points}, c.y_offset);
        }
        catch (const Error &e)
        {
            rethrow_with_context(e, "model " + name);
        }

        const Scenario s = spectral_scenario(model, c.spectrum_n);
        std::vector<std::vector<double>> spectra(c.draws);
        parallel_for(c.draws, c.workers, [&](std::size_t d)
                     { spectra[d] = empirical_spectrum(s, c.seed, c.separation_factor, d); });
        std::vector<double> pooled;
        for (const auto &e : spectra)
            pooled.insert(pooled.end(), e.begin(), e.end());
        out.histogram = compare_histogram(pooled, out.curve, c.bins);

        SpectrumSummary &sum = out.summary;
        sum.model = name;
        sum.n = c.spectrum_n;
        sum.k = s.num_targets();
        sum.r = s.num_sensors();
        sum.draws = c.draws;
        sum.mass = out.curve.mass;
        sum.support_lo = out.curve.support_lo;
        sum.support_hi = out.curve.support_hi;
        sum.limit_l1 = out.curve.limit_l1;
        sum.l1 = out.histogram.l1;
        sum.crb_theory_per_target = asymptotic_crb_total(out.curve, s.noise_power, s.n_slots, s.n_elements,
                                                         s.num_targets())
                                        .per_target;
        if (!spectra.empty())
            sum.crb_empirical_per_target =
                spectral_crb_from_eigenvalues(spectra.front(), s.noise_power, s.n_slots, s.n_elements).per_target;
        return out;
    }

    std::vector<SpectrumResult> run_spectrum(const ExperimentConfig &config)
    {
        validate(config);
        return {run_spectrum_model(config, constant_modulus_model(config)),
                run_spectrum_model(config, discrete_amplitude_model(config))};
    }

    MomentEstimate estimate_moments(const RisDistribution &dist, std::size_t n_samples, std::uint64_t seed,
                                    std::uint64_t index, unsigned workers)
    {
        validate(dist);
        require(n_samples >= 2, "estimate_moments: need at least two samples");
        constexpr std::size_t chunk = 1 << 16;
        const std::size_t chunks = (n_samples + chunk - 1) / chunk;

        struct Sums
        {
            double re = 0, im = 0, re2 = 0, im2 = 0, abs2 = 0, abs4 = 0;
        };
        std::vector<Sums> partial(chunks);
        parallel_for(chunks, workers, [&](std::size_t b)
                     {
                         const std::size_t count = std::min(chunk, n_samples - b * chunk);
                         Substream rng(seed, Stream::validation, index, b);
                         const CVector w = sample_ris(dist, count, rng);
                         Sums &s = partial[b];
                         for (Eigen::Index i = 0; i < w.size(); ++i)
                         {
                             const double re = w[i].real(), im = w[i].imag(), a2 = re * re + im * im;
                             s.re += re;
                             s.im += im;
                             s.re2 += re * re;
                             s.im2 += im * im;
                             s.abs2 += a2;
                             s.abs4 += a2 * a2;
                         } });
        Sums t;
        for (const auto &s : partial)
        {
            t.re += s.re;
            t.im += s.im;
            t.re2 += s.re2;
            t.im2 += s.im2;
            t.abs2 += s.abs2;
            t.abs4 += s.abs4;
        }

        const double n = static_cast<double>(n_samples);
        const double a = t.re / n, b = t.im / n;
        const double va = std::max(0.0, (t.re2 / n - a * a) * n / (n - 1.0));
        const double vb = std::max(0.0, (t.im2 / n - b * b) * n / (n - 1.0));

        MomentEstimate out;
        out.distribution = describe(dist);
        out.analytic = ris_moments(dist);
        out.n_samples = n_samples;
        out.e1 = t.abs2 / n;
        out.e1_stderr = std::sqrt(std::max(0.0, t.abs4 / n - out.e1 * out.e1) / (n - 1.0));
        out.e2 = a * a + b * b;
        out.e2_bias = (va + vb) / n;
        const double sa = va / n, sb = vb / n;
        out.e2_stderr = std::sqrt(4.0 * a * a * sa + 4.0 * b * b * sb + 2.0 * sa * sa + 2.0 * sb * sb);
        return out;
    }

    std::vector<MomentEstimate> run_moments(const ExperimentConfig &c)
    {
        validate(c);
        std::vector<RisDistribution> dists{c.ris, UniformPhase{0.0, 2.0 * pi}, UniformPhase{0.0, pi},
                                           DiscretePhase{{0.0, pi / 2.0, pi, 3.0 * pi / 2.0}, {0.25, 0.25, 0.25, 0.25}},
                                           DiscreteAmplitude{c.amplitude_x, c.amplitude_y, c.amplitude_p}};
        std::vector<MomentEstimate> out;
        std::vector<std::string> seen;
        for (std::size_t i = 0; i < dists.size(); ++i)
        {
            const std::string name = describe(dists[i]);
            if (std::find(seen.begin(), seen.end(), name) != seen.end() && !std::holds_alternative<DiscretePhase>(dists[i]))
                continue;
            seen.push_back(name);
            out.push_back(estimate_moments(dists[i], c.n_samples, c.seed, i, c.workers));
        }
        return out;
    }

    namespace
    {
        struct CheckRunner
        {
            std::vector<ValidationCheck> checks;

            // fn returns {observed, expected, tolerance, detail}; passes when |observed - expected| <= tolerance.
            template <typename Fn>
            void run(const std::string &name, Fn &&fn)
            {
                const auto start = std::chrono::steady_clock::now();
                ValidationCheck c;
                c.name = name;
                try
                {
                    const auto [observed, expected, tolerance, detail] = fn();
                    c.observed = observed;
                    c.expected = expected;
                    c.tolerance = tolerance;
                    c.detail = detail;
                    c.passed = std::abs(observed - expected) <= tolerance;
                }
                catch (const std::exception &e)
                {
                    c.observed = std::numeric_limits<double>::quiet_NaN();
                    c.detail = e.what();
                    c.passed = false;
                }
                c.runtime_s = seconds_since(start);
                checks.push_back(std::move(c));
            }
        };

        struct Outcome
        {
            double observed, expected, tolerance;
            std::string detail;
        };

        std::vector<Complex> random_upper_half_plane(std::uint64_t seed, std::uint64_t index, std::size_t count,
                                                     double re_lo, double re_hi)
        {
            Substream rng(seed, Stream::validation, 1000 + index);
            std::vector<Complex> zs(count);
            for (auto &z : zs)
                z = Complex(rng.uniform(re_lo, re_hi), std::pow(10.0, rng.uniform(-4.0, 1.0)));
            return zs;
        }

        Scenario random_instance(Substream &rng, std::size_t n)
        {
            Scenario s;
            const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 3.0);
            const std::size_t r = k + static_cast<std::size_t>(rng.uniform() * 4.0);
            for (std::size_t i = 0; i < k; ++i)
            {
                s.thetas.push_back(wrap_angle(rng.uniform(-pi, pi)));
                s.powers.push_back(rng.uniform(0.2, 2.0));
            }
            for (std::size_t i = 0; i < r; ++i)
                s.phis.push_back(wrap_angle(rng.uniform(-pi, pi)));
            s.n_elements = n;
            s.n_slots = 1 + static_cast<std::size_t>(rng.uniform() * 20.0);
            s.noise_power = rng.uniform(0.5, 2.0);
            s.ris = UniformPhase{0.0, rng.uniform(0.5, 2.0 * pi)};
            return s;
        }

        double relative_frobenius(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b)
        {
            return (a - b).norm() / b.norm();
        }
    }

    std::vector<ValidationCheck> run_validate(const ExperimentConfig &c, const ValidationHooks &hooks)
    {
        CheckRunner runner;
        const SpectralModel cm{0.3, 0.35, ConstantModulus{}};
        const SpectralModel amp{0.3, 0.35, DiscreteAmplitude{1.0, 3.0, 0.5}};

        runner.run("herglotz_constant_modulus", [&]
                   {
                       std::size_t bad = 0;
                       for (const Complex z : random_upper_half_plane(c.seed, 0, 1000, -0.5, 1.0))
                       {
                           try
                           {
                               const Complex m = stieltjes_constant_modulus(z, cm, hooks.quadratic).m;
                               bad += !(m.imag() > 0.0 && (z * m).imag() >= -1e-10 * std::abs(z * m));
                           }
                           catch (const RootSelectionError &)
                           {
                               ++bad;
                           }
                       }
                       return Outcome{static_cast<double>(bad), 0.0, 0.0, "violations among 1000 points"}; });

        runner.run("quadratic_residual", [&]
                   {
                       double worst = 0.0;
                       for (const Complex z : random_upper_half_plane(c.seed, 1, 1000, -0.5, 1.0))
                       {
                           const Complex m = stieltjes_constant_modulus(z, cm, hooks.quadratic).m;
                           const auto [a2, a1, a0] = quadratic_coefficients(z, cm.c1, cm.c2);
                           const double scale = std::abs(a2) * std::norm(m) + std::abs(a1 * m) + std::abs(a0);
                           worst = std::max(worst, std::abs((a2 * m + a1) * m + a0) / scale);
                       }
                       return Outcome{worst, 0.0, 1e-12, "max relative residual"}; });

        runner.run("herglotz_discrete_amplitude", [&]
                   {
                       std::size_t bad = 0;
                       for (const Complex z : random_upper_half_plane(c.seed, 2, 1000, -0.5, 4.0))
                       {
                           try
                           {
                               const Complex m = stieltjes_discrete_amplitude(z, amp).m;
                               bad += !(m.imag() > 0.0 && (z * m).imag() >= -1e-10 * std::abs(z * m));
                           }
                           catch (const RootSelectionError &)
                           {
                               ++bad;
                           }
                       }
                       return Outcome{static_cast<double>(bad), 0.0, 0.0, "violations among 1000 points"}; });

        runner.run("quintic_residual", [&]
                   {
                       double worst = 0.0;
                       for (const Complex z : random_upper_half_plane(c.seed, 3, 1000, -0.5, 4.0))
                           worst = std::max(worst, amplitude_equation_residual(z, stieltjes_discrete_amplitude(z, amp).m, amp));
                       return Outcome{worst, 0.0, 1e-9, "max relative residual"}; });

        runner.run("free_convolution_constant_modulus", [&]
                   {
                       const auto zs = random_upper_half_plane(c.seed, 4, 100, -0.5, 1.0);
                       return Outcome{free_convolution_consistency(cm, zs, hooks.quadratic), 0.0, 1e-8,
                                      "max relative disagreement"}; });

        runner.run("free_convolution_discrete_amplitude", [&]
                   {
                       const auto zs = random_upper_half_plane(c.seed, 5, 100, -0.5, 4.0);
                       return Outcome{free_convolution_consistency(amp, zs), 0.0, 1e-8, "max relative disagreement"}; });

        for (const auto &[name, model] : {std::pair{"density_mass_constant_modulus", cm},
                                          std::pair{"density_mass_discrete_amplitude", amp}})
            runner.run(name, [&]
                       {
                           const DensityCurve curve = density_curve(model, GridSpec{0.0, 0.0, 2001});
                           return Outcome{curve.mass, 1.0, mass_tolerance, "trapezoid mass"}; });

        runner.run("crb_nonincreasing_in_t", [&]
                   {
                       Substream rng(c.seed, Stream::validation, 2000);
                       std::size_t bad = 0;
                       for (int inst = 0; inst < 100; ++inst)
                       {
                           Scenario s = random_instance(rng, 4 + static_cast<std::size_t>(rng.uniform() * 60.0));
                           const auto lo = crb_from_fim(fim_expected(s)).diag;
                           s.n_slots += 1 + static_cast<std::size_t>(rng.uniform() * 10.0);
                           const auto hi = crb_from_fim(fim_expected(s)).diag;
                           for (std::size_t i = 0; i < lo.size(); ++i)
                               bad += hi[i] > lo[i] * (1.0 + 1e-9);
                       }
                       return Outcome{static_cast<double>(bad), 0.0, 0.0, "violations over 100 instances"}; });

        runner.run("crb_nonincreasing_in_n", [&]
                   {
                       Substream rng(c.seed, Stream::validation, 2001);
                       std::size_t bad = 0;
                       for (int inst = 0; inst < 100; ++inst)
                       {
                           Scenario s = random_instance(rng, 4 + static_cast<std::size_t>(rng.uniform() * 60.0));
                           const auto lo = crb_from_fim(fim_expected(s)).diag;
                           s.n_elements += 1;
                           const auto hi = crb_from_fim(fim_expected(s)).diag;
                           for (std::size_t i = 0; i < lo.size(); ++i)
                               bad += hi[i] > lo[i] * (1.0 + 1e-9);
                       }
                       return Outcome{static_cast<double>(bad), 0.0, 0.0,
                                      "violations over 100 uncorrelated instances"}; });

        runner.run("expected_fim_oracle", [&]
                   {
                       // Tolerance: three standard errors of the Monte Carlo mean, in Frobenius norm.
                       Scenario s = sweep_scenario(preset(Experiment::crb_vs_n), 32, 0);
                       s.n_slots = 1;
                       const auto signals = scenario_signals(s, c.seed);
                       const FisherMatrix expected = fim_expected(s, empirical_covariance(signals));
                       constexpr std::size_t draws = 4000;
                       const auto k = expected.entries.rows();
                       Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, k), sum2 = Eigen::MatrixXd::Zero(k, k);
                       for (std::size_t d = 0; d < draws; ++d)
                       {
                           const auto f = fim_exact(s, trial_omegas(s, c.seed, d), signals).entries;
                           sum += f;
                           sum2 += f.cwiseProduct(f);
                       }
                       const double nd = static_cast<double>(draws);
                       const Eigen::MatrixXd mean = sum / nd;
                       const Eigen::MatrixXd var = (sum2 / nd - mean.cwiseProduct(mean)) / (nd - 1.0);
                       const double tol = 3.0 * std::sqrt(var.cwiseMax(0.0).sum()) / expected.entries.norm();
                       return Outcome{relative_frobenius(mean, expected.entries), 0.0, tol,
                                      "relative Frobenius error, 4000 draws"}; });

        for (const auto &[label, psi] : {std::pair{"0.5", 0.5}, std::pair{"1", 1.0}, std::pair{"pi", pi}})
            runner.run(std::string("cosine_sum_psi_") + label, [&]
                       {
                           constexpr std::size_t n = 5000;
                           Complex acc{0.0, 0.0};
                           for (std::size_t k = 1; k < n; ++k)
                               acc += static_cast<double>(k) * std::polar(1.0, static_cast<double>(k) * psi);
                           const double exact = std::norm(acc);
                           return Outcome{std::abs(exact / cosine_sum_leading(psi, n) - 1.0), 0.0,
                                          10.0 / static_cast<double>(n), "relative error at N=5000"}; });

        for (const auto &[name, dist] : {std::pair{"e2_uniform_full_circle", UniformPhase{0.0, 2.0 * pi}},
                                         std::pair{"e2_uniform_half_circle", UniformPhase{0.0, pi}}})
            runner.run(name, [&]
                       {
                           const MomentEstimate m = estimate_moments(dist, 100000, c.seed, 3000, c.workers);
                           return Outcome{m.e2 - m.e2_bias, m.analytic.e2, 3.0 * m.e2_stderr,
                                          "bias-corrected sample |mean|^2, 1e5 draws"}; });

        runner.run("asymptotic_crb_agreement", [&]
                   {
                       const Scenario s = sweep_scenario(preset(Experiment::crb_vs_n), 1024, 0);
                       const auto regimes = detect_regime(s);
                       const auto crb = crb_from_fim(fim_expected(s)).diag;
                       double worst = 0.0;
                       for (std::size_t i = 0; i < 2; ++i)
                           worst = std::max(worst, std::abs(asymptotic_crb_entry(i, s, regimes[i]) / crb[i] - 1.0));
                       return Outcome{worst, 0.0, 0.1, "relative gap to the expected-FIM CRB at N=1024"}; });

        return runner.checks;
    }

    Table sweep_table(const std::vector<SweepRow> &rows)
    {
        Table t;
        t.columns = {"n", "r", "target_index", "regime", "crb_exact_mean", "crb_exact_stderr",
                     "crb_asymptotic", "n_singular_trials", "condition_number"};
        for (const auto &r : rows)
            t.add({size_cell(r.n), size_cell(r.r), size_cell(r.target_index), to_string(r.regime),
                   r.crb_exact_mean, r.crb_exact_stderr, opt_cell(r.crb_asymptotic), size_cell(r.n_singular_trials),
                   r.condition_number});
        return t;
    }

    std::vector<NamedTable> spectrum_tables(const std::vector<SpectrumResult> &results)
    {
        Table hist, density, summary;
        hist.columns = {"model", "bin_lo", "bin_hi", "lambda", "mu_theory", "mu_empirical"};
        density.columns = {"model", "lambda", "mu_theory"};
        summary.columns = {"model", "n", "k", "r", "draws", "mass", "support_lo", "support_hi", "limit_l1",
                           "l1", "crb_theory_per_target", "crb_empirical_per_target"};
        for (const auto &res : results)
        {
            const auto &h = res.histogram;
            for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
            {
                const double width = h.edges[b + 1] - h.edges[b];
                hist.add({res.model, h.edges[b], h.edges[b + 1], 0.5 * (h.edges[b] + h.edges[b + 1]),
                          h.theory[b] / width, h.empirical.empty() ? Cell{} : Cell{h.empirical[b] / width}});
            }
            for (std::size_t i = 0; i < res.curve.lambdas.size(); ++i)
                density.add({res.model, res.curve.lambdas[i], res.curve.density[i]});
            const auto &s = res.summary;
            summary.add({s.model, size_cell(s.n), size_cell(s.k), size_cell(s.r), size_cell(s.draws), s.mass,
                         s.support_lo, s.support_hi, s.limit_l1, opt_cell(s.l1), s.crb_theory_per_target,
                         opt_cell(s.crb_empirical_per_target)});
        }
        return {{"rows", hist}, {"density", density}, {"summary", summary}};
    }

    Table moments_table(const std::vector<MomentEstimate> &rows)
    {
        Table t;
        t.columns = {"distribution", "n_samples", "e1_analytic", "e2_analytic", "e1_sample", "e1_stderr",
                     "e2_sample", "e2_bias", "e2_stderr"};
        for (const auto &m : rows)
            t.add({m.distribution, size_cell(m.n_samples), m.analytic.e1, m.analytic.e2, m.e1, m.e1_stderr, m.e2,
                   m.e2_bias, m.e2_stderr});
        return t;
    }

    Table checks_table(const std::vector<ValidationCheck> &checks, bool timings)
    {
        Table t;
        t.columns = {"name", "observed", "expected", "tolerance", "passed", "detail"};
        if (timings)
            t.columns.push_back("runtime_s");
        for (const auto &c : checks)
        {
            std::vector<Cell> row{c.name, c.observed, c.expected, c.tolerance, c.passed, c.detail};
            if (timings)
                row.push_back(c.runtime_s);
            t.add(std::move(row));
        }
        return t;
    }

    std::vector<NamedTable> experiment_tables(const ExperimentConfig &config)
    {
        return experiment_tables(config, ValidationHooks{});
    }

    std::vector<NamedTable> experiment_tables(const ExperimentConfig &config, const ValidationHooks &hooks)
    {
        validate(config);
        switch (config.experiment)
        {
        case Experiment::crb_vs_n:
            return {{"rows", sweep_table(run_crb_vs_n(config))}};
        case Experiment::crb_vs_r:
            return {{"rows", sweep_table(run_crb_vs_r(config))}};
        case Experiment::spectrum:
            return spectrum_tables(run_spectrum(config));
        case Experiment::moments:
            return {{"rows", moments_table(run_moments(config))}};
        case Experiment::validate:
            return {{"checks", checks_table(run_validate(config, hooks), config.timings)}};
        }
        return {};
    }
}
