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

#include "risdoa/geometry.hpp"

#include <complex>

namespace risdoa
{
    CVector steering_vector(double theta, std::size_t n)
    {
        CVector a(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            a[static_cast<Eigen::Index>(k)] = std::polar(1.0, static_cast<double>(k) * theta);
        return a;
    }

    CVector steering_derivative(double theta, std::size_t n)
    {
        CVector d(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
        {
            const double kk = static_cast<double>(k);
            d[static_cast<Eigen::Index>(k)] = std::complex<double>(0.0, kk) * std::polar(1.0, kk * theta);
        }
        return d;
    }

    CMatrix target_manifold(std::span<const double> thetas, std::size_t n)
    {
        CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(thetas.size()));
        for (std::size_t k = 0; k < thetas.size(); ++k)
            a.col(static_cast<Eigen::Index>(k)) = steering_vector(thetas[k], n);
        return a;
    }

    CMatrix target_manifold_derivative(std::span<const double> thetas, std::size_t n)
    {
        CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(thetas.size()));
        for (std::size_t k = 0; k < thetas.size(); ++k)
            a.col(static_cast<Eigen::Index>(k)) = steering_derivative(thetas[k], n);
        return a;
    }

    CMatrix sensor_manifold(std::span<const double> phis, std::size_t n)
    {
        CMatrix a(static_cast<Eigen::Index>(phis.size()), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < phis.size(); ++r)
            a.row(static_cast<Eigen::Index>(r)) = steering_vector(phis[r], n).transpose();
        return a;
    }
}
