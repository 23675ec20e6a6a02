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

#ifndef RISDOA_ERRORS_HPP
#define RISDOA_ERRORS_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace risdoa
{
    // Coarse classification used by the CLI to pick an exit code.
    enum class ErrorKind
    {
        invalid_input, // exit 1
        numerical,     // exit 2
        io             // exit 3
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    class PreconditionError : public Error
    {
    public:
        explicit PreconditionError(const std::string &what) : Error(ErrorKind::invalid_input, what) {}
    };

    class IoError : public Error
    {
    public:
        explicit IoError(const std::string &what) : Error(ErrorKind::io, what) {}
    };

    // Fisher matrix is singular or too ill-conditioned to invert (e.g. coincident DoAs).
    class SingularFimError : public Error
    {
    public:
        explicit SingularFimError(double condition_number);
        double condition_number() const noexcept { return condition_number_; }

    private:
        double condition_number_;
    };

    // Leading-order coefficient of the requested asymptotic branch is zero.
    class DegenerateRegimeError : public Error
    {
    public:
        explicit DegenerateRegimeError(const std::string &what) : Error(ErrorKind::numerical, what) {}
    };

    // No (or more than one) admissible root of a Stieltjes polynomial. Carries every root.
    class RootSelectionError : public Error
    {
    public:
        RootSelectionError(const std::string &what, std::complex<double> z,
                           std::vector<std::complex<double>> roots);
        std::complex<double> z() const noexcept { return z_; }
        const std::vector<std::complex<double>> &roots() const noexcept { return roots_; }

    private:
        std::complex<double> z_;
        std::vector<std::complex<double>> roots_;
    };

    class NormalizationError : public Error
    {
    public:
        explicit NormalizationError(double mass);
        double mass() const noexcept { return mass_; }

    private:
        double mass_;
    };

    class ConvergenceError : public Error
    {
    public:
        explicit ConvergenceError(const std::string &what) : Error(ErrorKind::numerical, what) {}
    };

    class DivergentCrbError : public Error
    {
    public:
        explicit DivergentCrbError(double support_lo);
    };

    // Too many Monte Carlo trials produced a singular FIM.
    class AggregateFailureError : public Error
    {
    public:
        AggregateFailureError(std::size_t n_singular, std::size_t n_trials);
        std::size_t n_singular() const noexcept { return n_singular_; }
        std::size_t n_trials() const noexcept { return n_trials_; }

    private:
        std::size_t n_singular_;
        std::size_t n_trials_;
    };

    // Throws PreconditionError with `message` unless `condition` holds.
    inline void require(bool condition, const std::string &message)
    {
        if (!condition)
            throw PreconditionError(message);
    }

    // Rethrows `e` as an Error of the same kind with `context` prefixed to the message.
    [[noreturn]] void rethrow_with_context(const Error &e, const std::string &context);
}

#endif
