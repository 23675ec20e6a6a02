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

#ifndef RISDOA_FIM_HPP
#define RISDOA_FIM_HPP

#include "risdoa/geometry.hpp"
#include "risdoa/scenario.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace risdoa
{
    // K x K real symmetric information matrix for xi = [theta_1 ... theta_K].
    struct FisherMatrix
    {
        Eigen::MatrixXd entries;
        std::string scenario_ref;
    };

    struct CrbResult
    {
        std::vector<double> diag;        // [F^-1]_kk (rad^2); Monte Carlo mean when n_trials > 1
        double condition_number = 0.0;   // of F; worst trial for Monte Carlo
        std::size_t n_trials = 1;        // trials that entered the mean
        std::vector<double> std_err;     // per-entry standard error of the mean
        std::size_t n_singular = 0;      // trials excluded for a singular F
    };

    struct MonteCarloOptions
    {
        bool fixed_ris = false; // hold one RIS draw across all T slots
        unsigned workers = 1;
    };

    // Condition numbers above this are reported as SingularFimError.
    inline constexpr double max_condition_number = 1e12;

    // Transmit symbols x_k(t) = sqrt(p_k) e^{j beta_kt}, beta drawn once from the
    // seed. Coherent scenarios share one phase per slot across all targets.
    std::vector<CVector> scenario_signals(const Scenario &scenario, std::uint64_t seed);

    // R_mn = (1/T) sum_t conj(x_n(t)) x_m(t).
    CMatrix empirical_covariance(std::span<const CVector> signals);

    // R implied by the scenario's signal model (diag(p) or p * ones).
    CMatrix model_covariance(const Scenario &scenario);

    // F = (2/sigma^2) sum_t Re{X^H(t) D^H(t) D(t) X(t)}, D(t) = A_phi diag(w(t)) dA_theta.
    FisherMatrix fim_exact(const Scenario &scenario, std::span<const CVector> omega_per_slot,
                           std::span<const CVector> signals);

    // Expectation of fim_exact over i.i.d. RIS draws, using the model covariance.
    FisherMatrix fim_expected(const Scenario &scenario);

    // Same, with an explicit signal covariance (e.g. the empirical one).
    FisherMatrix fim_expected(const Scenario &scenario, const CMatrix &covariance);

    // Diagonal of F^-1 via Cholesky. Throws SingularFimError when cond(F) > 1e12.
    CrbResult crb_from_fim(const FisherMatrix &fim);

    // RIS draws of one Monte Carlo trial (T vectors, or T copies of one draw in fixed mode).
    std::vector<CVector> trial_omegas(const Scenario &scenario, std::uint64_t seed, std::size_t trial,
                                      bool fixed_ris = false);

    // Mean and standard error of per-trial CRB diagonals. Trials with a singular
    // F are skipped and counted; more than half singular is an AggregateFailureError.
    CrbResult monte_carlo_crb(const Scenario &scenario, std::size_t n_trials, std::uint64_t seed,
                              const MonteCarloOptions &options = {});
}

#endif
