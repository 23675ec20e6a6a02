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

// One line per acceptance criterion; exit status 1 if any line fails.

#include "oracles.hpp"

#include "risdoa/errors.hpp"
#include "risdoa/experiments.hpp"
#include "risdoa/fim.hpp"
#include "risdoa/random.hpp"
#include "risdoa/ris.hpp"
#include "risdoa/scaling_law.hpp"
#include "risdoa/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace risdoa;
using std::numbers::pi;

namespace
{
    struct Verdict
    {
        bool passed = false;
        std::string detail;
    };

    int failures = 0;

    void criterion(int id, const std::string &title, const std::function<Verdict()> &body)
    {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = body();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.passed;
        std::printf("[%s] %d %s: %s (%.1fs)\n", v.passed ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), secs);
        std::fflush(stdout);
    }

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    bool herglotz(Complex z, Complex m) { return m.imag() > 0.0 && (z * m).imag() >= -1e-10 * std::abs(z * m); }

    std::vector<Complex> upper_half_plane(std::uint64_t index, std::size_t count, double re_lo, double re_hi)
    {
        Substream rng(2718, Stream::validation, index);
        std::vector<Complex> zs(count);
        for (auto &z : zs)
            z = Complex(rng.uniform(re_lo, re_hi), std::pow(10.0, rng.uniform(-4.0, 1.5)));
        return zs;
    }

    Scenario random_scenario(Substream &rng, std::size_t k, std::size_t r, std::size_t n, std::size_t t)
    {
        Scenario s;
        for (std::size_t i = 0; i < k; ++i)
        {
            s.thetas.push_back(wrap_angle(rng.uniform(-pi, pi)));
            s.powers.push_back(rng.uniform(0.3, 2.0));
        }
        for (std::size_t i = 0; i < r; ++i)
            s.phis.push_back(wrap_angle(rng.uniform(-pi, pi)));
        s.n_elements = n;
        s.n_slots = t;
        s.noise_power = rng.uniform(0.5, 2.0);
        s.ris = UniformPhase{0.0, rng.uniform(0.5, 2.0 * pi)};
        return s;
    }

    // L1 between the theory curve and a pooled Haar-factor spectrum with the
    // same ratios; separates solver error from model mismatch.
    std::pair<double, double> haar_diagnostic(const SpectralModel &model, const DensityCurve &curve, int n, int draws)
    {
        const int k = static_cast<int>(std::lround(model.c1 * n));
        const int r = static_cast<int>(std::lround(model.c2 * n));
        std::vector<double> pooled, first;
        for (int d = 0; d < draws; ++d)
        {
            std::vector<double> amps(static_cast<std::size_t>(n), 1.0);
            if (const auto *a = std::get_if<DiscreteAmplitude>(&model.ris))
            {
                std::mt19937_64 gen(1000 + d);
                std::bernoulli_distribution coin(a->p);
                for (auto &v : amps)
                    v = coin(gen) ? a->x : a->y;
            }
            const auto eig = oracle::haar_factor_spectrum(n, k, r, amps, 500 + d);
            if (d == 0)
                first = eig;
            pooled.insert(pooled.end(), eig.begin(), eig.end());
        }
        const double l1 = *compare_histogram(pooled, curve, 40).l1;
        double inv = 0.0;
        for (double v : first)
            inv += 1.0 / v;
        return {l1, inv / static_cast<double>(first.size())};
    }
}

int main()
{
    std::printf("acceptance criteria (tolerances as specified)\n");

    criterion(1, "scaling law (CRB vs N)", []
              {
                  ExperimentConfig c = preset(Experiment::crb_vs_n);
                  c.n_sweep = {128, 256, 512, 1024};
                  const auto rows = run_crb_vs_n(c);
                  std::vector<double> n, sym, non;
                  double gap_sym = 0, gap_non = 0;
                  for (const auto &r : rows)
                  {
                      if (r.target_index == 0)
                      {
                          n.push_back(static_cast<double>(r.n));
                          sym.push_back(r.crb_exact_mean);
                          if (r.n == 1024)
                              gap_sym = std::abs(r.crb_exact_mean / *r.crb_asymptotic - 1.0);
                      }
                      if (r.target_index == 1)
                      {
                          non.push_back(r.crb_exact_mean);
                          if (r.n == 1024)
                              gap_non = std::abs(r.crb_exact_mean / *r.crb_asymptotic - 1.0);
                      }
                  }
                  const double s1 = loglog_slope(n, sym), s2 = loglog_slope(n, non);
                  const bool ok = s1 >= -4.15 && s1 <= -3.85 && s2 >= -3.15 && s2 <= -2.85 && gap_sym <= 0.10 &&
                                  gap_non <= 0.10;
                  return Verdict{ok, fmt("slope CRB11 %.3f in [-4.15,-3.85], CRB22 %.3f in [-3.15,-2.85]; "
                                         "N=1024 gap to asymptotic %.2f%% / %.2f%% (<= 10%%)",
                                         s1, s2, 100 * gap_sym, 100 * gap_non)};
              });

    criterion(2, "sensor-count law (R 5 -> 10 at N=512)", []
              {
                  ExperimentConfig c = preset(Experiment::crb_vs_r);
                  c.n_sweep = {512};
                  c.r_sweep = {5, 10};
                  const auto rows = run_crb_vs_r(c);
                  const double ratio = rows[0].crb_exact_mean / rows[1].crb_exact_mean;
                  return Verdict{ratio >= 1.7 && ratio <= 2.3,
                                 fmt("non-symmetric CRB11 ratio %.4f, required 2 +/- 15%%", ratio)};
              });

    criterion(3, "expected-FIM oracle (1e4 RIS draws)", []
              {
                  Substream rng(99, Stream::validation, 1);
                  Scenario s = random_scenario(rng, 3, 5, 64, 1);
                  const auto signals = scenario_signals(s, 99);
                  const Eigen::MatrixXd expected = fim_expected(s, empirical_covariance(signals)).entries;
                  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(3, 3);
                  for (std::size_t d = 0; d < 10000; ++d)
                      mean += fim_exact(s, trial_omegas(s, 99, d), signals).entries;
                  mean /= 10000.0;
                  const double rel = (mean - expected).norm() / expected.norm();
                  return Verdict{rel <= 0.01, fmt("relative Frobenius error %.4f%% (<= 1%%)", 100 * rel)};
              });

    std::vector<SpectrumResult> spectra;
    criterion(4, "spectral density match (N=1000, K=300, R=350)", [&]
              {
                  spectra = run_spectrum(preset(Experiment::spectrum));
                  bool ok = true;
                  std::string detail;
                  for (const auto &r : spectra)
                  {
                      const double l1 = *r.summary.l1;
                      const double dm = std::abs(r.summary.mass - 1.0);
                      ok = ok && l1 < 0.05 && dm <= 5e-3;
                      detail += fmt("%s L1 %.4f (< 0.05), |mass-1| %.1e (<= 5e-3); ", r.model.c_str(), l1, dm);
                  }
                  return Verdict{ok, detail.substr(0, detail.size() - 2)};
              });

    criterion(5, "spectral CRB consistency (one spectrum, N=1000)", [&]
              {
                  require(!spectra.empty(), "spectrum results unavailable");
                  bool ok = true;
                  std::string detail;
                  for (const auto &r : spectra)
                  {
                      const double gap = std::abs(r.summary.crb_theory_per_target / *r.summary.crb_empirical_per_target - 1.0);
                      ok = ok && gap <= 0.05;
                      detail += fmt("%s asymptotic %.4g vs empirical %.4g, gap %.1f%% (<= 5%%); ", r.model.c_str(),
                                    r.summary.crb_theory_per_target, *r.summary.crb_empirical_per_target, 100 * gap);
                  }
                  return Verdict{ok, detail.substr(0, detail.size() - 2)};
              });

    if (!spectra.empty())
        for (const auto &r : spectra)
        {
            const SpectralModel model = r.model == "constant-modulus"
                                            ? constant_modulus_model(preset(Experiment::spectrum))
                                            : discrete_amplitude_model(preset(Experiment::spectrum));
            const auto [l1, inv] = haar_diagnostic(model, r.curve, 1000, 10);
            const double theory_inv = r.summary.crb_theory_per_target * 2.0 * 1e12;
            std::printf("       diagnostic %s: Haar-factor surrogate L1 %.4f, mean 1/lambda %.2f vs theory %.2f\n",
                        r.model.c_str(), l1, inv, theory_inv);
        }

    criterion(6, "property suites", []
              {
                  std::ostringstream d;
                  bool ok = true;

                  const SpectralModel unit{0.3, 0.35, ConstantModulus{}};
                  const SpectralModel amp{0.3, 0.35, DiscreteAmplitude{1.0, 3.0, 0.5}};
                  std::size_t bad_u = 0, bad_a = 0;
                  double quad = 0, quint = 0;
                  for (const Complex z : upper_half_plane(1, 1000, -1.0, 4.0))
                  {
                      const Complex mu = stieltjes(z, unit).m;
                      const Complex ma = stieltjes(z, amp).m;
                      bad_u += !herglotz(z, mu);
                      bad_a += !herglotz(z, ma);
                      const auto [a2, a1, a0] = quadratic_coefficients(z, 0.3, 0.35);
                      quad = std::max(quad, std::abs((a2 * mu + a1) * mu + a0) /
                                                (std::abs(a2) * std::norm(mu) + std::abs(a1 * mu) + std::abs(a0)));
                      quint = std::max(quint, amplitude_equation_residual(z, ma, amp));
                  }
                  ok = ok && bad_u == 0 && bad_a == 0 && quad <= 1e-12 && quint <= 1e-9;
                  d << "herglotz violations " << bad_u << "/" << bad_a << ", residuals " << fmt("%.1e/%.1e", quad, quint);

                  Substream rng(5, Stream::validation, 2);
                  std::size_t bad_t = 0, bad_n = 0;
                  for (int inst = 0; inst < 100; ++inst)
                  {
                      Scenario s = random_scenario(rng, 1 + inst % 3, 3 + inst % 4,
                                                   4 + static_cast<std::size_t>(rng.uniform() * 60.0), 1 + inst % 7);
                      const auto base = crb_from_fim(fim_expected(s)).diag;
                      Scenario mt = s, mn = s;
                      mt.n_slots += 3;
                      mn.n_elements += 1;
                      const auto t = crb_from_fim(fim_expected(mt)).diag;
                      const auto n = crb_from_fim(fim_expected(mn)).diag;
                      for (std::size_t i = 0; i < base.size(); ++i)
                      {
                          bad_t += t[i] > base[i] * (1 + 1e-9);
                          bad_n += n[i] > base[i] * (1 + 1e-9);
                      }
                  }
                  ok = ok && bad_t == 0 && bad_n == 0;
                  d << "; monotonicity violations T " << bad_t << ", N " << bad_n;

                  double fd = 0.0;
                  for (int inst = 0; inst < 12; ++inst)
                  {
                      Scenario s = random_scenario(rng, 1 + inst % 2, 3, 2 + inst % 3, 2);
                      oracle::Instance in;
                      in.thetas = s.thetas;
                      in.phis = s.phis;
                      in.n = static_cast<int>(s.n_elements);
                      in.sigma2 = s.noise_power;
                      in.omegas = trial_omegas(s, 3, static_cast<std::size_t>(inst));
                      in.signals = scenario_signals(s, 3);
                      const Eigen::MatrixXd ref = oracle::finite_difference_fim(in);
                      fd = std::max(fd, (fim_exact(s, in.omegas, in.signals).entries - ref).norm() / ref.norm());
                  }
                  ok = ok && fd <= 1e-4;
                  d << fmt("; FD oracle %.1e", fd);

                  double cosine = 0.0;
                  for (double psi : {0.5, 1.0, pi})
                      cosine = std::max(cosine, std::abs(cosine_sum_leading(psi, 5000) / oracle::cosine_double_sum(psi, 5000) - 1.0));
                  ok = ok && cosine <= 10.0 / 5000.0;
                  d << fmt("; cosine sum %.1e (<= %.0e)", cosine, 10.0 / 5000.0);

                  for (const auto &dist : {UniformPhase{0.0, 2.0 * pi}, UniformPhase{0.0, pi}})
                  {
                      const auto m = estimate_moments(dist, 1000000, 8, 0);
                      const double z = std::abs(m.e2 - m.e2_bias - m.analytic.e2) / m.e2_stderr;
                      ok = ok && z <= 3.0;
                      d << fmt("; E2 %.4g vs %.4g (%.2f se)", m.e2 - m.e2_bias, m.analytic.e2, z);
                  }
                  return Verdict{ok, d.str()};
              });

    criterion(7, "determinism across reruns and worker counts", []
              {
                  std::vector<ExperimentConfig> configs;
                  auto n = preset(Experiment::crb_vs_n);
                  n.n_sweep = {64, 128};
                  n.n_trials = 20;
                  auto r = preset(Experiment::crb_vs_r);
                  r.n_sweep = {64};
                  r.n_trials = 20;
                  auto s = preset(Experiment::spectrum);
                  s.spectrum_n = 300;
                  s.draws = 4;
                  s.grid_points = 2001;
                  auto m = preset(Experiment::moments);
                  m.n_samples = 300000;
                  configs = {n, r, s, m, preset(Experiment::validate)};
                  std::size_t identical = 0;
                  for (auto c : configs)
                  {
                      c.workers = 1;
                      const std::string a = tables_to_json(config_json(c), experiment_tables(c));
                      const std::string b = tables_to_json(config_json(c), experiment_tables(c));
                      c.workers = 4;
                      const std::string w = tables_to_json(config_json(c), experiment_tables(c));
                      identical += (a == b && a == w);
                  }
                  return Verdict{identical == configs.size(),
                                 fmt("%zu/%zu experiments byte-identical (rerun and 1 vs 4 workers)", identical,
                                     configs.size())};
              });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
