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

#include "risdoa/errors.hpp"

#include <cstdio>
#include <sstream>

namespace risdoa
{
    namespace
    {
        std::string format_double(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", v);
            return buf;
        }

        std::string describe_roots(const std::string &what, std::complex<double> z,
                                   const std::vector<std::complex<double>> &roots)
        {
            std::ostringstream os;
            os << what << " at z=" << format_double(z.real()) << "+" << format_double(z.imag()) << "j; roots:";
            for (const auto &r : roots)
                os << " (" << format_double(r.real()) << "," << format_double(r.imag()) << ")";
            return os.str();
        }
    }

    SingularFimError::SingularFimError(double condition_number)
        : Error(ErrorKind::numerical, "singular Fisher information matrix (condition number " +
                                          format_double(condition_number) + ")"),
          condition_number_(condition_number)
    {
    }

    RootSelectionError::RootSelectionError(const std::string &what, std::complex<double> z,
                                           std::vector<std::complex<double>> roots)
        : Error(ErrorKind::numerical, describe_roots(what, z, roots)), z_(z), roots_(std::move(roots))
    {
    }

    NormalizationError::NormalizationError(double mass)
        : Error(ErrorKind::numerical, "density mass " + format_double(mass) +
                                          " deviates from 1 (missed support or point mass)"),
          mass_(mass)
    {
    }

    DivergentCrbError::DivergentCrbError(double support_lo)
        : Error(ErrorKind::numerical, "spectral CRB diverges: density support reaches lambda=" +
                                          format_double(support_lo))
    {
    }

    AggregateFailureError::AggregateFailureError(std::size_t n_singular, std::size_t n_trials)
        : Error(ErrorKind::numerical, std::to_string(n_singular) + " of " + std::to_string(n_trials) +
                                          " Monte Carlo trials had a singular FIM"),
          n_singular_(n_singular), n_trials_(n_trials)
    {
    }

    void rethrow_with_context(const Error &e, const std::string &context)
    {
        throw Error(e.kind(), context + ": " + e.what());
    }
}
