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

#ifndef RISDOA_GEOMETRY_HPP
#define RISDOA_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace risdoa
{
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;

    // ULA response a(theta) = [1, e^{j theta}, ..., e^{j (n-1) theta}]^T.
    CVector steering_vector(double theta, std::size_t n);

    // d a(theta) / d theta; entry k is j k e^{j k theta}.
    CVector steering_derivative(double theta, std::size_t n);

    // N x K, column k = a(theta_k).
    CMatrix target_manifold(std::span<const double> thetas, std::size_t n);

    // N x K, column k = d a(theta_k) / d theta_k.
    CMatrix target_manifold_derivative(std::span<const double> thetas, std::size_t n);

    // R x N, row r = a(phi_r)^T. Transposed, not conjugated.
    CMatrix sensor_manifold(std::span<const double> phis, std::size_t n);
}

#endif
