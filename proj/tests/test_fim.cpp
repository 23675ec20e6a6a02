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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "risdoa/errors.hpp"
#include "risdoa/fim.hpp"
#include "risdoa/random.hpp"
#include "risdoa/ris.hpp"

#include <cmath>
#include <numbers>

using namespace risdoa;
using std::numbers::pi;

namespace
{
    Scenario random_scenario(Substream &rng, std::size_t k, std::size_t r, std::size_t n, std::size_t t,
                             SignalModel model = SignalModel::uncorrelated_diagonal)
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
        s.signal_model = model;
        s.ris = UniformPhase{0.0, rng.uniform(0.5, 2.0 * pi)};
        return s;
    }

    double rel_frobenius(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) { return (a - b).norm() / b.norm(); }
}

TEST_CASE("exact FIM equals the Hessian of the log-likelihood misfit (finite differences)")
{
    Substream rng(2024, Stream::validation, 1);
    for (int inst = 0; inst < 12; ++inst)
    {
        const std::size_t k = 1 + inst % 2;
        const std::size_t n = 2 + inst % 3;
        Scenario s = random_scenario(rng, k, 3, n, 2);
        const auto omegas = trial_omegas(s, 5, static_cast<std::size_t>(inst));
        const auto signals = scenario_signals(s, 5);

        oracle::Instance in;
        in.thetas = s.thetas;
        in.phis = s.phis;
        in.n = static_cast<int>(n);
        in.sigma2 = s.noise_power;
        in.omegas = omegas;
        in.signals = signals;

        const Eigen::MatrixXd fd = oracle::finite_difference_fim(in);
        const Eigen::MatrixXd f = fim_exact(s, omegas, signals).entries;
        CHECK(rel_frobenius(f, fd) <= 1e-4);
    }
}

TEST_CASE("structured expected FIM equals the entrywise expectation")
{
    Substream rng(7, Stream::validation, 2);
    for (int inst = 0; inst < 10; ++inst)
    {
        const auto model = inst % 2 ? SignalModel::coherent_all_one : SignalModel::uncorrelated_diagonal;
        Scenario s = random_scenario(rng, 1 + inst % 3, 2 + inst % 4, 5 + inst, 4, model);
        const auto signals = scenario_signals(s, 3);
        const Moments m = ris_moments(s.ris);
        const Eigen::MatrixXd expected = oracle::expected_fim(s.thetas, s.phis, static_cast<int>(s.n_elements),
                                                              s.noise_power, m.e1, m.e2, signals);
        const Eigen::MatrixXd f = fim_expected(s, empirical_covariance(signals)).entries;
        CHECK(rel_frobenius(f, expected) <= 1e-10);
    }
}

TEST_CASE("Monte Carlo mean of the exact FIM converges to the expected FIM")
{
    Substream rng(31, Stream::validation, 3);
    Scenario s = random_scenario(rng, 3, 5, 64, 1);
    s.ris = UniformPhase{0.0, pi};
    const auto signals = scenario_signals(s, 9);
    const Eigen::MatrixXd expected = fim_expected(s, empirical_covariance(signals)).entries;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(3, 3);
    constexpr std::size_t draws = 10000;
    for (std::size_t d = 0; d < draws; ++d)
        mean += fim_exact(s, trial_omegas(s, 9, d), signals).entries;
    mean /= static_cast<double>(draws);
    CHECK(rel_frobenius(mean, expected) <= 0.01);
}

TEST_CASE("FIM is symmetric positive semidefinite")
{
    Substream rng(3, Stream::validation, 4);
    const Scenario s = random_scenario(rng, 3, 4, 16, 5);
    const Eigen::MatrixXd f = fim_exact(s, trial_omegas(s, 1, 0), scenario_signals(s, 1)).entries;
    CHECK((f - f.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
}

TEST_CASE("covariances")
{
    Scenario s;
    s.thetas = {0.1, 0.2};
    s.phis = {0.3};
    s.n_elements = 4;
    s.n_slots = 200;
    s.powers = {1.0, 4.0};
    const CMatrix diag = model_covariance(s);
    CHECK(diag(1, 1).real() == 4.0);
    CHECK(std::abs(diag(0, 1)) == 0.0);
    s.signal_model = SignalModel::coherent_all_one;
    const CMatrix coh = model_covariance(s);
    CHECK(coh(0, 1).real() == doctest::Approx(2.0));

    // Coherent symbols share their phase, so the empirical covariance is exact.
    const CMatrix emp = empirical_covariance(scenario_signals(s, 4));
    CHECK((emp - coh).norm() < 1e-12);

    s.signal_model = SignalModel::uncorrelated_diagonal;
    const CMatrix un = empirical_covariance(scenario_signals(s, 4));
    CHECK(un(0, 0).real() == doctest::Approx(1.0));
    CHECK(std::abs(un(0, 1)) < 0.4);
}

TEST_CASE("coincident targets give a singular FIM")
{
    Scenario s;
    s.thetas = {0.5, 0.5};
    s.phis = {0.1, 0.9};
    s.n_elements = 8;
    s.n_slots = 3;
    s.powers = {1.0, 1.0};
    s.signal_model = SignalModel::coherent_all_one;
    CHECK_THROWS_AS(crb_from_fim(fim_expected(s)), SingularFimError);
    try
    {
        crb_from_fim(fim_expected(s));
    }
    catch (const SingularFimError &e)
    {
        CHECK(e.condition_number() > max_condition_number);
        CHECK(e.kind() == ErrorKind::numerical);
    }
}

TEST_CASE("CRB is the diagonal of the inverse")
{
    FisherMatrix f{Eigen::MatrixXd(2, 2), "x"};
    f.entries << 4.0, 1.0, 1.0, 3.0;
    const CrbResult c = crb_from_fim(f);
    CHECK(c.diag[0] == doctest::Approx(3.0 / 11.0));
    CHECK(c.diag[1] == doctest::Approx(4.0 / 11.0));
    f.entries(0, 1) = 2.0;
    CHECK_THROWS_AS(crb_from_fim(f), PreconditionError);
}

TEST_CASE("expected CRB does not increase with T or N (uncorrelated signals)")
{
    Substream rng(77, Stream::validation, 5);
    std::size_t bad_t = 0, bad_n = 0;
    for (int inst = 0; inst < 100; ++inst)
    {
        Scenario s = random_scenario(rng, 1 + inst % 3, 3 + inst % 4, 4 + static_cast<std::size_t>(rng.uniform() * 60.0),
                                     1 + inst % 7);
        const auto base = crb_from_fim(fim_expected(s)).diag;
        Scenario more_t = s;
        more_t.n_slots += 3;
        Scenario more_n = s;
        more_n.n_elements += 1;
        const auto t = crb_from_fim(fim_expected(more_t)).diag;
        const auto n = crb_from_fim(fim_expected(more_n)).diag;
        for (std::size_t i = 0; i < base.size(); ++i)
        {
            bad_t += t[i] > base[i] * (1.0 + 1e-9);
            bad_n += n[i] > base[i] * (1.0 + 1e-9);
        }
    }
    CHECK(bad_t == 0);
    CHECK(bad_n == 0);
}

TEST_CASE("coherent signals can break monotonicity in N")
{
    Scenario s;
    s.thetas = {-0.92, -1.57};
    s.phis = {0.92, 1.29, 1.09};
    s.n_elements = 6;
    s.n_slots = 1;
    s.powers = {1.0, 1.0};
    s.signal_model = SignalModel::coherent_all_one;
    s.ris = UniformPhase{0.0, pi};
    const double at6 = crb_from_fim(fim_expected(s)).diag[0];
    s.n_elements = 7;
    const double at7 = crb_from_fim(fim_expected(s)).diag[0];
    CHECK(at7 > at6);
}

TEST_CASE("Monte Carlo CRB is independent of the worker count")
{
    Substream rng(5, Stream::validation, 6);
    const Scenario s = random_scenario(rng, 3, 5, 32, 4);
    const CrbResult one = monte_carlo_crb(s, 40, 123, {false, 1});
    const CrbResult many = monte_carlo_crb(s, 40, 123, {false, 4});
    CHECK(one.diag == many.diag);
    CHECK(one.std_err == many.std_err);
    CHECK(one.condition_number == many.condition_number);
    CHECK(one.n_trials == 40);

    // Trial i reproduces from trial_omegas.
    const auto signals = scenario_signals(s, 123);
    double sum0 = 0.0;
    for (std::size_t i = 0; i < 40; ++i)
        sum0 += crb_from_fim(fim_exact(s, trial_omegas(s, 123, i), signals)).diag[0];
    CHECK(one.diag[0] == doctest::Approx(sum0 / 40.0).epsilon(1e-12));
}

TEST_CASE("fixed RIS reuses one draw across slots")
{
    Scenario s;
    s.thetas = {0.2};
    s.phis = {1.0};
    s.n_elements = 6;
    s.n_slots = 3;
    s.powers = {1.0};
    const auto fixed = trial_omegas(s, 1, 0, true);
    CHECK(fixed[0] == fixed[2]);
    const auto varying = trial_omegas(s, 1, 0, false);
    CHECK(varying[0] == fixed[0]);
    CHECK(varying[0] != varying[1]);
}

TEST_CASE("mostly singular trials abort the aggregate")
{
    Scenario s;
    s.thetas = {0.5, 0.5};
    s.phis = {0.1};
    s.n_elements = 4;
    s.n_slots = 1;
    s.powers = {1.0, 1.0};
    s.signal_model = SignalModel::coherent_all_one;
    CHECK_THROWS_AS(monte_carlo_crb(s, 10, 1), AggregateFailureError);
}
