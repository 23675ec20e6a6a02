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

#include "risdoa/fim.hpp"
#include "risdoa/errors.hpp"
#include "risdoa/parallel.hpp"
#include "risdoa/random.hpp"
#include "risdoa/ris.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace risdoa
{
    namespace
    {
        using Index = Eigen::Index;

        // Manifolds are reused by every slot and trial of one scenario.
        struct FimKernel
        {
            CMatrix sensor;     // R x N
            CMatrix derivative; // N x K
            double scale;       // 2 / sigma^2

            explicit FimKernel(const Scenario &s)
                : sensor(sensor_manifold(s.phis, s.n_elements)),
                  derivative(target_manifold_derivative(s.thetas, s.n_elements)),
                  scale(2.0 / s.noise_power)
            {
            }

            // Adds (2/sigma^2) Re{X^H D^H D X} for one slot.
            void accumulate(Eigen::MatrixXd &f, const CVector &omega, const CVector &x) const
            {
                const CMatrix d = (sensor * omega.asDiagonal()) * derivative;
                const CMatrix gram = d.adjoint() * d;
                const Index k = gram.rows();
                for (Index a = 0; a < k; ++a)
                    for (Index b = 0; b < k; ++b)
                        f(a, b) += scale * std::real(std::conj(x[a]) * gram(a, b) * x[b]);
            }
        };

        void symmetrize(Eigen::MatrixXd &f)
        {
            const Eigen::MatrixXd t = f.transpose();
            f = 0.5 * (f + t);
        }
    }

    std::vector<CVector> scenario_signals(const Scenario &s, std::uint64_t seed)
    {
        validate(s);
        Substream rng(seed, Stream::signals);
        const auto k = static_cast<Index>(s.num_targets());
        std::vector<CVector> out(s.n_slots, CVector(k));
        for (auto &x : out)
        {
            const double shared = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (Index i = 0; i < k; ++i)
            {
                const double beta = s.signal_model == SignalModel::coherent_all_one
                                        ? shared
                                        : (i == 0 ? shared : rng.uniform(0.0, 2.0 * std::numbers::pi));
                x[i] = std::polar(std::sqrt(s.powers[static_cast<std::size_t>(i)]), beta);
            }
        }
        return out;
    }

    CMatrix empirical_covariance(std::span<const CVector> signals)
    {
        require(!signals.empty(), "empirical_covariance: no slots");
        const Index k = signals.front().size();
        CMatrix r = CMatrix::Zero(k, k);
        for (const auto &x : signals)
        {
            require(x.size() == k, "empirical_covariance: inconsistent signal lengths");
            r += x * x.adjoint(); // (m, n) -> x_m conj(x_n)
        }
        return r / static_cast<double>(signals.size());
    }

    CMatrix model_covariance(const Scenario &s)
    {
        const auto k = static_cast<Index>(s.num_targets());
        if (s.signal_model == SignalModel::uncorrelated_diagonal)
        {
            CMatrix r = CMatrix::Zero(k, k);
            for (Index i = 0; i < k; ++i)
                r(i, i) = s.powers[static_cast<std::size_t>(i)];
            return r;
        }
        // Coherent: a common symbol stream, so R_mn = sqrt(p_m p_n).
        CMatrix r(k, k);
        for (Index m = 0; m < k; ++m)
            for (Index n = 0; n < k; ++n)
                r(m, n) = std::sqrt(s.powers[static_cast<std::size_t>(m)] * s.powers[static_cast<std::size_t>(n)]);
        return r;
    }

    FisherMatrix fim_exact(const Scenario &s, std::span<const CVector> omegas, std::span<const CVector> signals)
    {
        validate(s);
        require(omegas.size() == s.n_slots, "fim_exact: need one RIS vector per slot");
        require(signals.size() == s.n_slots, "fim_exact: need one signal vector per slot");
        const auto n = static_cast<Index>(s.n_elements);
        const auto k = static_cast<Index>(s.num_targets());
        for (const auto &w : omegas)
            require(w.size() == n, "fim_exact: RIS vector length must equal N");
        for (const auto &x : signals)
            require(x.size() == k, "fim_exact: signal vector length must equal K");

        const FimKernel kernel(s);
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(k, k);
        for (std::size_t t = 0; t < s.n_slots; ++t)
            kernel.accumulate(f, omegas[t], signals[t]);
        symmetrize(f);
        return {f, fingerprint(s)};
    }

    FisherMatrix fim_expected(const Scenario &s) { return fim_expected(s, model_covariance(s)); }

    FisherMatrix fim_expected(const Scenario &s, const CMatrix &covariance)
    {
        validate(s);
        const auto k = static_cast<Index>(s.num_targets());
        require(covariance.rows() == k && covariance.cols() == k, "fim_expected: covariance must be K x K");

        const Moments mom = ris_moments(s.ris);
        const CMatrix sensor = sensor_manifold(s.phis, s.n_elements);
        const CMatrix derivative = target_manifold_derivative(s.thetas, s.n_elements);

        // dA^H ((A_phi^H A_phi) o Sigma) dA with Sigma = (e1 - e2) I + e2 11^T.
        // diag(A_phi^H A_phi) = R since every steering entry has unit modulus.
        const CMatrix projected = sensor * derivative;
        const CMatrix mean_gram = mom.e2 * (projected.adjoint() * projected) +
                                  (mom.e1 - mom.e2) * static_cast<double>(s.num_sensors()) *
                                      (derivative.adjoint() * derivative);

        const double scale = 2.0 * static_cast<double>(s.n_slots) / s.noise_power;
        Eigen::MatrixXd f(k, k);
        for (Index a = 0; a < k; ++a)
            for (Index b = 0; b < k; ++b)
                f(a, b) = scale * std::real(mean_gram(a, b) * covariance(b, a));
        symmetrize(f);
        return {f, fingerprint(s)};
    }

    CrbResult crb_from_fim(const FisherMatrix &fim)
    {
        const Eigen::MatrixXd &f = fim.entries;
        require(f.rows() == f.cols() && f.rows() > 0, "crb_from_fim: F must be square and non-empty");
        const double norm = f.norm();
        require((f - f.transpose()).norm() <= 1e-10 * std::max(norm, std::numeric_limits<double>::min()),
                "crb_from_fim: F is not symmetric");

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
        if (!(cond <= max_condition_number))
            throw SingularFimError(cond);

        Eigen::LLT<Eigen::MatrixXd> llt(f);
        if (llt.info() != Eigen::Success)
            throw SingularFimError(cond);
        const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(f.rows(), f.cols()));

        CrbResult out;
        out.diag.resize(static_cast<std::size_t>(f.rows()));
        for (Index i = 0; i < f.rows(); ++i)
            out.diag[static_cast<std::size_t>(i)] = inverse(i, i);
        out.condition_number = cond;
        out.n_trials = 1;
        out.std_err.assign(out.diag.size(), 0.0);
        return out;
    }

    std::vector<CVector> trial_omegas(const Scenario &s, std::uint64_t seed, std::size_t trial, bool fixed_ris)
    {
        std::vector<CVector> out;
        out.reserve(s.n_slots);
        for (std::size_t t = 0; t < s.n_slots; ++t)
        {
            if (fixed_ris && t > 0)
            {
                out.push_back(out.front());
                continue;
            }
            Substream rng(seed, Stream::ris, trial, t);
            out.push_back(sample_ris(s.ris, s.n_elements, rng));
        }
        return out;
    }

    CrbResult monte_carlo_crb(const Scenario &s, std::size_t n_trials, std::uint64_t seed,
                              const MonteCarloOptions &options)
    {
        validate(s);
        require(n_trials >= 1, "monte_carlo_crb: n_trials must be >= 1");

        const FimKernel kernel(s);
        const std::vector<CVector> signals = scenario_signals(s, seed);
        const auto k = static_cast<Index>(s.num_targets());
        const std::string ref = fingerprint(s);

        struct Trial
        {
            std::vector<double> diag;
            double cond = 0.0;
            bool singular = false;
        };
        std::vector<Trial> trials(n_trials);

        parallel_for(n_trials, options.workers,
                     [&](std::size_t i)
                     {
                         Eigen::MatrixXd f = Eigen::MatrixXd::Zero(k, k);
                         for (std::size_t t = 0; t < s.n_slots; ++t)
                         {
                             // Same substream layout as trial_omegas().
                             const std::size_t slot = options.fixed_ris ? 0 : t;
                             Substream rng(seed, Stream::ris, i, slot);
                             kernel.accumulate(f, sample_ris(s.ris, s.n_elements, rng), signals[t]);
                         }
                         symmetrize(f);
                         try
                         {
                             CrbResult one = crb_from_fim({f, ref});
                             trials[i].diag = std::move(one.diag);
                             trials[i].cond = one.condition_number;
                         }
                         catch (const SingularFimError &e)
                         {
                             trials[i].singular = true;
                             trials[i].cond = e.condition_number();
                         }
                         catch (const Error &e)
                         {
                             rethrow_with_context(e, "trial " + std::to_string(i));
                         }
                     });

        // Reduction in trial order.
        CrbResult out;
        out.diag.assign(static_cast<std::size_t>(k), 0.0);
        out.std_err.assign(static_cast<std::size_t>(k), 0.0);
        std::size_t used = 0;
        for (const auto &t : trials)
        {
            out.condition_number = std::max(out.condition_number, t.cond);
            if (t.singular)
            {
                ++out.n_singular;
                continue;
            }
            ++used;
            for (std::size_t i = 0; i < t.diag.size(); ++i)
                out.diag[i] += t.diag[i];
        }
        if (2 * out.n_singular > n_trials || used == 0)
            throw AggregateFailureError(out.n_singular, n_trials);

        for (double &v : out.diag)
            v /= static_cast<double>(used);
        if (used > 1)
        {
            std::vector<double> ss(out.diag.size(), 0.0);
            for (const auto &t : trials)
                if (!t.singular)
                    for (std::size_t i = 0; i < t.diag.size(); ++i)
                        ss[i] += (t.diag[i] - out.diag[i]) * (t.diag[i] - out.diag[i]);
            for (std::size_t i = 0; i < ss.size(); ++i)
                out.std_err[i] = std::sqrt(ss[i] / static_cast<double>(used - 1) / static_cast<double>(used));
        }
        out.n_trials = used;
        return out;
    }
}
