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

#include "risdoa/spectrum.hpp"
#include "risdoa/errors.hpp"
#include "risdoa/geometry.hpp"
#include "risdoa/random.hpp"
#include "risdoa/ris.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace risdoa
{
    namespace
    {
        using Poly = std::vector<Complex>; // ascending powers

        constexpr double pi = std::numbers::pi;
        constexpr double inf = std::numeric_limits<double>::infinity();

        Poly poly_mul(const Poly &a, const Poly &b)
        {
            Poly out(a.size() + b.size() - 1, Complex{0.0, 0.0});
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    out[i + j] += a[i] * b[j];
            return out;
        }

        Poly poly_add(const Poly &a, const Poly &b)
        {
            Poly out(std::max(a.size(), b.size()), Complex{0.0, 0.0});
            for (std::size_t i = 0; i < a.size(); ++i)
                out[i] += a[i];
            for (std::size_t i = 0; i < b.size(); ++i)
                out[i] += b[i];
            return out;
        }

        Poly poly_scale(Poly a, Complex s)
        {
            for (auto &c : a)
                c *= s;
            return a;
        }

        template <typename Coeffs>
        std::pair<Complex, Complex> horner(const Coeffs &c, Complex x)
        {
            Complex p{0.0, 0.0}, dp{0.0, 0.0};
            for (std::size_t i = c.size(); i-- > 0;)
            {
                dp = dp * x + p;
                p = p * x + c[i];
            }
            return {p, dp};
        }

        template <typename Coeffs>
        Complex polish(const Coeffs &c, Complex root)
        {
            for (int it = 0; it < 3; ++it)
            {
                const auto [p, dp] = horner(c, root);
                if (p == Complex{0.0, 0.0} || dp == Complex{0.0, 0.0})
                    break;
                const Complex next = root - p / dp;
                if (!(std::abs(horner(c, next).first) < std::abs(p)))
                    break;
                root = next;
            }
            return root;
        }

        // Roots of an ascending-coefficient polynomial via companion-matrix eigenvalues.
        std::vector<Complex> polynomial_roots(const std::array<Complex, 6> &coeffs)
        {
            double scale = 0.0;
            for (const auto &c : coeffs)
                scale = std::max(scale, std::abs(c));
            std::size_t degree = coeffs.size() - 1;
            while (degree > 0 && std::abs(coeffs[degree]) <= 1e-14 * scale)
                --degree;
            if (degree == 0)
                return {};

            Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(degree),
                                                                static_cast<Eigen::Index>(degree));
            for (std::size_t i = 1; i < degree; ++i)
                companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
            for (std::size_t i = 0; i < degree; ++i)
                companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(degree - 1)) =
                    -coeffs[i] / coeffs[degree];

            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
            std::vector<Complex> roots;
            roots.reserve(degree);
            for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
                roots.push_back(polish(coeffs, solver.eigenvalues()[i]));
            return roots;
        }

        // Stieltjes transform of a law on [0, inf): Im m > 0 and Im(z m) >= 0.
        bool herglotz(Complex z, Complex m)
        {
            if (!(m.imag() > 0.0))
                return false;
            const Complex zm = z * m;
            return zm.imag() >= -1e-10 * std::abs(zm);
        }

        double max_amplitude_squared(const SpectralModel &model)
        {
            if (const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris))
                return std::max(amp->x * amp->x, amp->y * amp->y);
            return 1.0;
        }

        const DiscreteAmplitude *two_level(const SpectralModel &model)
        {
            const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris);
            return (amp != nullptr && amp->x != amp->y) ? amp : nullptr;
        }

        Complex quadratic_root(Complex z, const SpectralModel &model, const QuadraticCoefficientFn &coefficients)
        {
            const auto [a2, a1, a0] = coefficients(z, model.c1, model.c2);
            const std::array<Complex, 3> poly{a0, a1, a2};
            std::vector<Complex> roots;
            if (std::abs(a2) == 0.0)
            {
                roots.push_back(-a0 / a1);
            }
            else
            {
                Complex s = std::sqrt(a1 * a1 - 4.0 * a2 * a0);
                if (std::real(std::conj(a1) * s) < 0.0)
                    s = -s;
                const Complex q = -0.5 * (a1 + s);
                roots.push_back(polish(poly, q / a2));
                roots.push_back(q == Complex{0.0, 0.0} ? Complex{0.0, 0.0} : polish(poly, a0 / q));
            }

            std::vector<Complex> admissible;
            for (const auto &r : roots)
                if (herglotz(z, r))
                    admissible.push_back(r);
            if (admissible.size() != 1)
                throw RootSelectionError(admissible.empty() ? "no Herglotz root of the quadratic"
                                                            : "both quadratic roots are Herglotz",
                                         z, roots);
            return admissible.front();
        }

        // Admissible roots: Herglotz and satisfying the rational equation (drops
        // spurious roots introduced by clearing denominators).
        std::vector<Complex> admissible_amplitude_roots(Complex z, const std::vector<Complex> &roots,
                                                        const SpectralModel &model)
        {
            std::vector<Complex> out;
            for (const auto &r : roots)
                if (herglotz(z, r) && amplitude_equation_residual(z, r, model) <= 1e-6)
                    out.push_back(r);
            return out;
        }

        std::vector<Complex> amplitude_roots(Complex z, const SpectralModel &model)
        {
            return polynomial_roots(quintic_coefficients(z, model));
        }

        // Nearest admissible root to `reference`, provided it is clearly nearer than the runner-up.
        std::optional<Complex> pick_continuous(const std::vector<Complex> &admissible, Complex reference)
        {
            if (admissible.size() == 1)
                return admissible.front();
            if (admissible.empty())
                return std::nullopt;
            std::vector<std::pair<double, Complex>> ranked;
            for (const auto &r : admissible)
                ranked.emplace_back(std::abs(r - reference), r);
            std::sort(ranked.begin(), ranked.end(),
                      [](const auto &a, const auto &b) { return a.first < b.first; });
            if (ranked[0].first < 0.5 * ranked[1].first)
                return ranked[0].second;
            return std::nullopt;
        }

        Complex nearest(const std::vector<Complex> &roots, Complex reference)
        {
            return *std::min_element(roots.begin(), roots.end(), [&](Complex a, Complex b)
                                     { return std::abs(a - reference) < std::abs(b - reference); });
        }

        // Follow the physical branch down a vertical path from Im z = top, where m ~ -1/z.
        Complex continue_vertically(Complex z, const SpectralModel &model)
        {
            const double top = std::max(z.imag(), 50.0 * (1.0 + max_amplitude_squared(model)));
            const Complex start(z.real(), top);
            std::vector<Complex> roots = amplitude_roots(start, model);
            if (roots.empty())
                throw RootSelectionError("degenerate amplitude polynomial", start, roots);
            Complex m = nearest(roots, -1.0 / start);

            const double ratio = top / z.imag();
            const int steps = ratio > 1.0 ? static_cast<int>(std::ceil(std::log(ratio) / std::log(1.2))) : 0;
            for (int i = 1; i <= steps; ++i)
            {
                const double y = top * std::pow(z.imag() / top, static_cast<double>(i) / steps);
                roots = amplitude_roots(Complex(z.real(), y), model);
                m = nearest(roots, m);
            }

            roots = amplitude_roots(z, model);
            const auto admissible = admissible_amplitude_roots(z, roots, model);
            if (auto chosen = pick_continuous(admissible, m))
                return *chosen;
            throw RootSelectionError(admissible.empty() ? "no admissible root of the amplitude quintic"
                                                        : "ambiguous continuation of the amplitude quintic",
                                     z, roots);
        }

        Complex scaled_unit_modulus(Complex z, const SpectralModel &model, double amplitude_sq)
        {
            // Omega = a U scales every eigenvalue by a^2: m_a(z) = m_1(z / a^2) / a^2.
            SpectralModel unit{model.c1, model.c2, ConstantModulus{}};
            return quadratic_root(z / amplitude_sq, unit, quadratic_coefficients) / amplitude_sq;
        }

        std::vector<double> linspace(double lo, double hi, std::size_t n)
        {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i)
                v[i] = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            return v;
        }

        std::vector<double> evaluate_density(const SpectralModel &model, const std::vector<double> &lambdas,
                                             double y)
        {
            std::vector<double> out(lambdas.size());
            if (two_level(model) == nullptr)
            {
                for (std::size_t i = 0; i < lambdas.size(); ++i)
                    out[i] = stieltjes(Complex(lambdas[i], y), model).m.imag() / pi;
                return out;
            }
            // Left-to-right sweep; each point is seeded by its neighbour.
            Complex previous{};
            for (std::size_t i = 0; i < lambdas.size(); ++i)
            {
                const Complex z(lambdas[i], y);
                const StieltjesValue v = (i == 0) ? stieltjes_discrete_amplitude(z, model)
                                                  : stieltjes_discrete_amplitude(z, model, previous);
                previous = v.m;
                out[i] = v.m.imag() / pi;
            }
            return out;
        }

        double trapezoid(const std::vector<double> &x, const std::vector<double> &f)
        {
            double s = 0.0;
            for (std::size_t i = 1; i < x.size(); ++i)
                s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
            return s;
        }

        std::vector<bool> support_mask(const std::vector<double> &at_y, const std::vector<double> &at_half)
        {
            std::vector<bool> mask(at_y.size());
            for (std::size_t i = 0; i < at_y.size(); ++i)
                mask[i] = at_y[i] > support_threshold && at_half[i] >= 0.75 * at_y[i];
            return mask;
        }
    }

    void validate(const SpectralModel &model)
    {
        require(std::isfinite(model.c1) && model.c1 > 0.0, "spectral model: c1 must be positive");
        require(std::isfinite(model.c2) && model.c2 > 0.0, "spectral model: c2 must be positive");
        if (const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris))
            validate(RisDistribution{*amp});
    }

    bool well_posed(const SpectralModel &model) { return model.c1 < model.c2; }

    std::string describe(const SpectralModel &model)
    {
        if (const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris))
            return describe(RisDistribution{*amp});
        return "constant-modulus";
    }

    QuadraticCoefficients quadratic_coefficients(Complex z, double c1, double c2)
    {
        const Complex z2 = z * z;
        return {-c1 * z2 + 3.0 * c1 * z2 * z, (c2 - c1) * z + (6.0 * c1 - 3.0) * z2, (3.0 * c1 - 3.0) * z};
    }

    StieltjesValue stieltjes_constant_modulus(Complex z, const SpectralModel &model)
    {
        return stieltjes_constant_modulus(z, model, quadratic_coefficients);
    }

    StieltjesValue stieltjes_constant_modulus(Complex z, const SpectralModel &model,
                                              const QuadraticCoefficientFn &coefficients)
    {
        validate(model);
        require(z.imag() > 0.0, "stieltjes: Im z must be positive");
        return {z, quadratic_root(z, model, coefficients)};
    }

    std::array<Complex, 6> quintic_coefficients(Complex z, const SpectralModel &model)
    {
        const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris);
        require(amp != nullptr, "quintic_coefficients: amplitude model required");
        const double c1 = model.c1, c2 = model.c2;

        // u = c1 z m;  Q_a(m) = 3 (1 - c1 - u)^2 + a c1 m (c2 - c1 - u).
        const Poly m_poly{0.0, 1.0};
        const Poly u{0.0, c1 * z};
        const Poly one_minus{1.0 - c1, -c1 * z};
        const Poly gap{c2 - c1, -c1 * z};
        const Poly m_gap = poly_scale(poly_mul(m_poly, gap), c1);
        const auto q = [&](double a) { return poly_add(poly_scale(poly_mul(one_minus, one_minus), 3.0), poly_scale(m_gap, a)); };

        const double ax = amp->x * amp->x, ay = amp->y * amp->y;
        const Poly qx = q(ax), qy = q(ay);
        // (c1 + u) Qx Qy - c1 m (c2 - c1 - u) [p x^2 Qy + (1 - p) y^2 Qx] = 0
        const Poly lhs = poly_mul(poly_add(Poly{c1}, u), poly_mul(qx, qy));
        const Poly rhs = poly_mul(m_gap, poly_add(poly_scale(qy, amp->p * ax), poly_scale(qx, (1.0 - amp->p) * ay)));
        const Poly full = poly_add(lhs, poly_scale(rhs, -1.0));

        std::array<Complex, 6> out{};
        for (std::size_t i = 0; i < out.size() && i < full.size(); ++i)
            out[i] = full[i];
        return out;
    }

    double amplitude_equation_residual(Complex z, Complex m, const SpectralModel &model)
    {
        const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris);
        require(amp != nullptr, "amplitude_equation_residual: amplitude model required");
        const double c1 = model.c1, c2 = model.c2;
        const Complex u = c1 * z * m;
        const Complex lhs = c1 + u;
        double scale = std::abs(lhs);
        Complex rhs{0.0, 0.0};
        const std::array<std::pair<double, double>, 2> atoms{{{amp->p, amp->x * amp->x}, {1.0 - amp->p, amp->y * amp->y}}};
        for (const auto &[weight, a] : atoms)
        {
            if (weight == 0.0)
                continue;
            const Complex q = 3.0 * (1.0 - c1 - u) * (1.0 - c1 - u) + a * c1 * m * (c2 - c1 - u);
            const Complex term = weight * a * c1 * m * (c2 - c1 - u) / q;
            rhs += term;
            scale = std::max(scale, std::abs(term));
        }
        if (!(scale > 0.0))
            return inf;
        return std::abs(lhs - rhs) / scale;
    }

    StieltjesValue stieltjes_discrete_amplitude(Complex z, const SpectralModel &model)
    {
        validate(model);
        require(z.imag() > 0.0, "stieltjes: Im z must be positive");
        const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris);
        require(amp != nullptr, "stieltjes_discrete_amplitude: amplitude model required");
        if (amp->x == amp->y)
            return {z, scaled_unit_modulus(z, model, amp->x * amp->x)};
        return {z, continue_vertically(z, model)};
    }

    StieltjesValue stieltjes_discrete_amplitude(Complex z, const SpectralModel &model, Complex previous)
    {
        const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris);
        require(amp != nullptr, "stieltjes_discrete_amplitude: amplitude model required");
        require(z.imag() > 0.0, "stieltjes: Im z must be positive");
        if (amp->x == amp->y)
            return {z, scaled_unit_modulus(z, model, amp->x * amp->x)};
        const auto roots = amplitude_roots(z, model);
        if (auto chosen = pick_continuous(admissible_amplitude_roots(z, roots, model), previous))
            return {z, *chosen};
        return {z, continue_vertically(z, model)};
    }

    StieltjesValue stieltjes(Complex z, const SpectralModel &model)
    {
        if (std::holds_alternative<ConstantModulus>(model.ris))
            return stieltjes_constant_modulus(z, model);
        return stieltjes_discrete_amplitude(z, model);
    }

    DensityCurve density_curve(const SpectralModel &model, const GridSpec &grid, double y_offset)
    {
        validate(model);
        require(y_offset > 0.0, "density_curve: y_offset must be positive");
        require(grid.points >= 3, "density_curve: need at least 3 grid points");

        double lo = grid.lo, hi = grid.hi;
        if (!(grid.hi > grid.lo))
        {
            // The limiting law lives below ||Omega||^2 * ||dA^H dA / N^3|| = a_max^2 / 3.
            lo = 0.0;
            hi = 1.05 * max_amplitude_squared(model) / 3.0;
            constexpr std::size_t coarse_points = 801;
            for (int expand = 0;; ++expand)
            {
                const auto coarse = linspace(0.0, hi, coarse_points);
                const auto mask = support_mask(evaluate_density(model, coarse, y_offset),
                                               evaluate_density(model, coarse, 0.5 * y_offset));
                const auto first = std::find(mask.begin(), mask.end(), true);
                if (first == mask.end())
                    throw NormalizationError(0.0);
                if (mask.back() && expand < 12)
                {
                    hi *= 2.0;
                    continue;
                }
                const auto last = std::find(mask.rbegin(), mask.rend(), true);
                const double h = hi / static_cast<double>(coarse_points - 1);
                const auto i_lo = static_cast<std::size_t>(first - mask.begin());
                const auto i_hi = coarse_points - 1 - static_cast<std::size_t>(last - mask.rbegin());
                lo = std::max(0.0, coarse[i_lo] - 4.0 * h);
                hi = coarse[i_hi] + 4.0 * h;
                break;
            }
        }

        DensityCurve curve;
        curve.y_offset = y_offset;
        curve.lambdas = linspace(lo, hi, grid.points);
        const auto at_y = evaluate_density(model, curve.lambdas, y_offset);
        const auto at_half = evaluate_density(model, curve.lambdas, 0.5 * y_offset);

        curve.density.resize(at_y.size());
        for (std::size_t i = 0; i < at_y.size(); ++i)
            curve.density[i] = std::max(0.0, at_y[i]);
        curve.mass = trapezoid(curve.lambdas, curve.density);

        const auto mask = support_mask(at_y, at_half);
        const auto first = std::find(mask.begin(), mask.end(), true);
        if (first != mask.end())
        {
            const auto last = std::find(mask.rbegin(), mask.rend(), true);
            curve.support_lo = curve.lambdas[static_cast<std::size_t>(first - mask.begin())];
            curve.support_hi = curve.lambdas[mask.size() - 1 - static_cast<std::size_t>(last - mask.rbegin())];
        }
        if (!(std::abs(curve.mass - 1.0) <= mass_tolerance))
            throw NormalizationError(curve.mass);

        std::vector<double> diff(at_y.size());
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff[i] = std::abs(at_y[i] - at_half[i]);
        curve.limit_l1 = trapezoid(curve.lambdas, diff);
        if (!(curve.limit_l1 < limit_tolerance))
            throw ConvergenceError("density changes by " + std::to_string(curve.limit_l1) +
                                   " in L1 when y is halved");
        return curve;
    }

    double min_separation(std::span<const double> angles)
    {
        if (angles.size() < 2)
            return inf;
        std::vector<double> a(angles.begin(), angles.end());
        for (double &v : a)
            v = wrap_angle(v);
        std::sort(a.begin(), a.end());
        double best = 2.0 * pi - (a.back() - a.front());
        for (std::size_t i = 1; i < a.size(); ++i)
            best = std::min(best, a[i] - a[i - 1]);
        return best;
    }

    Scenario spectral_scenario(const SpectralModel &model, std::size_t n)
    {
        validate(model);
        const auto k = static_cast<std::size_t>(std::llround(model.c1 * static_cast<double>(n)));
        const auto r = static_cast<std::size_t>(std::llround(model.c2 * static_cast<double>(n)));
        require(k >= 1 && r >= 1 && k <= n && r <= n, "spectral_scenario: ratios incompatible with N");

        const auto bins = [n](std::size_t count)
        {
            std::vector<double> out(count);
            for (std::size_t i = 0; i < count; ++i)
            {
                const std::size_t bin = i * n / count;
                out[i] = wrap_angle(2.0 * pi * static_cast<double>(bin) / static_cast<double>(n));
            }
            return out;
        };

        Scenario s;
        s.thetas = bins(k);
        s.phis = bins(r);
        s.n_elements = n;
        s.n_slots = 1;
        s.powers.assign(k, 1.0);
        s.noise_power = 1.0;
        if (const auto *amp = std::get_if<DiscreteAmplitude>(&model.ris))
            s.ris = *amp;
        else
            s.ris = UniformPhase{0.0, 2.0 * pi};
        return s;
    }

    std::vector<double> empirical_spectrum(const Scenario &s, std::uint64_t seed, double separation_factor,
                                           std::uint64_t draw)
    {
        validate(s);
        require(separation_factor >= 0.0, "empirical_spectrum: separation factor must be non-negative");
        const double needed = 2.0 * pi * separation_factor / static_cast<double>(s.n_elements);
        const double slack = 1e-9;
        require(min_separation(s.thetas) + slack >= needed, "empirical_spectrum: target angles not widely spaced");
        require(min_separation(s.phis) + slack >= needed, "empirical_spectrum: sensor angles not widely spaced");

        const double n = static_cast<double>(s.n_elements);
        Substream rng(seed, Stream::spectrum, draw);
        const CVector omega = sample_ris(s.ris, s.n_elements, rng);
        const CMatrix d = (sensor_manifold(s.phis, s.n_elements) * omega.asDiagonal()) *
                          (target_manifold_derivative(s.thetas, s.n_elements) / (n * n));
        const CMatrix gram = d.adjoint() * d;

        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
        std::vector<double> out(static_cast<std::size_t>(eig.eigenvalues().size()));
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = std::max(0.0, eig.eigenvalues()[static_cast<Eigen::Index>(i)]);
        return out;
    }

    HistogramComparison compare_histogram(std::span<const double> eigenvalues, const DensityCurve &curve,
                                          std::size_t bins)
    {
        require(bins >= 1, "compare_histogram: need at least one bin");
        require(curve.lambdas.size() >= 2, "compare_histogram: empty density curve");

        double lo = curve.support_lo, hi = curve.support_hi;
        if (!eigenvalues.empty())
        {
            const auto [mn, mx] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
            lo = std::min(lo, *mn);
            hi = std::max(hi, *mx);
        }
        if (!(hi > lo))
            hi = lo + 1e-12;

        HistogramComparison out;
        out.edges = linspace(lo, hi, bins + 1);

        // Cumulative trapezoid of the density, interpolated linearly at the edges.
        std::vector<double> cdf(curve.lambdas.size(), 0.0);
        for (std::size_t i = 1; i < cdf.size(); ++i)
            cdf[i] = cdf[i - 1] + 0.5 * (curve.density[i] + curve.density[i - 1]) *
                                      (curve.lambdas[i] - curve.lambdas[i - 1]);
        const auto cdf_at = [&](double x)
        {
            if (x <= curve.lambdas.front())
                return 0.0;
            if (x >= curve.lambdas.back())
                return cdf.back();
            const auto it = std::upper_bound(curve.lambdas.begin(), curve.lambdas.end(), x);
            const auto i = static_cast<std::size_t>(it - curve.lambdas.begin());
            const double t = (x - curve.lambdas[i - 1]) / (curve.lambdas[i] - curve.lambdas[i - 1]);
            return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
        };
        out.theory.resize(bins);
        for (std::size_t b = 0; b < bins; ++b)
            out.theory[b] = cdf_at(out.edges[b + 1]) - cdf_at(out.edges[b]);

        if (eigenvalues.empty())
            return out;

        std::vector<double> counts(bins, 0.0);
        const double width = (hi - lo) / static_cast<double>(bins);
        for (double v : eigenvalues)
        {
            auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
            counts[std::min(b, bins - 1)] += 1.0;
        }
        out.empirical.resize(bins);
        double l1 = 0.0;
        for (std::size_t b = 0; b < bins; ++b)
        {
            out.empirical[b] = counts[b] / static_cast<double>(eigenvalues.size());
            l1 += std::abs(out.empirical[b] - out.theory[b]);
        }
        out.l1 = l1;
        return out;
    }

    SpectralCrb asymptotic_crb_total(const DensityCurve &curve, double sigma2, std::size_t slots, std::size_t n,
                                     std::size_t k)
    {
        require(sigma2 > 0.0 && slots >= 1 && n >= 1 && k >= 1, "asymptotic_crb_total: invalid system size");
        if (!(curve.support_lo > 1e-12))
            throw DivergentCrbError(curve.support_lo);

        double integral = 0.0;
        for (std::size_t i = 1; i < curve.lambdas.size(); ++i)
        {
            const double a = curve.lambdas[i - 1], b = curve.lambdas[i];
            if (a < curve.support_lo || b > curve.support_hi)
                continue;
            integral += 0.5 * (curve.density[i - 1] / a + curve.density[i] / b) * (b - a);
        }
        const double nn = static_cast<double>(n);
        SpectralCrb out;
        out.inverse_moment = integral;
        out.per_target = sigma2 / (2.0 * static_cast<double>(slots) * nn * nn * nn * nn) * integral;
        out.total = static_cast<double>(k) * out.per_target;
        return out;
    }

    SpectralCrb asymptotic_crb_total(const SpectralModel &model, double sigma2, std::size_t slots, std::size_t n,
                                     std::size_t k)
    {
        return asymptotic_crb_total(density_curve(model), sigma2, slots, n, k);
    }

    SpectralCrb spectral_crb_from_eigenvalues(std::span<const double> eigenvalues, double sigma2,
                                              std::size_t slots, std::size_t n)
    {
        require(!eigenvalues.empty(), "spectral_crb_from_eigenvalues: no eigenvalues");
        double sum = 0.0;
        for (double v : eigenvalues)
        {
            if (!(v > 1e-12))
                throw DivergentCrbError(v);
            sum += 1.0 / v;
        }
        const double nn = static_cast<double>(n);
        SpectralCrb out;
        out.inverse_moment = sum / static_cast<double>(eigenvalues.size());
        out.per_target = sigma2 / (2.0 * static_cast<double>(slots) * nn * nn * nn * nn) * out.inverse_moment;
        out.total = static_cast<double>(eigenvalues.size()) * out.per_target;
        return out;
    }

    FactorTransforms::FactorTransforms(SpectralModel model) : model_(model) { validate(model_); }

    Complex FactorTransforms::ris_gram(Complex w) const
    {
        require(std::holds_alternative<ConstantModulus>(model_.ris),
                "ris_gram: closed-form N-transform exists for the unit-modulus model only");
        return (1.0 + w) / w;
    }

    Complex FactorTransforms::ris_psi(Complex u) const
    {
        if (const auto *amp = std::get_if<DiscreteAmplitude>(&model_.ris))
        {
            const double ax = amp->x * amp->x, ay = amp->y * amp->y;
            return amp->p * ax / (u - ax) + (1.0 - amp->p) * ay / (u - ay);
        }
        return 1.0 / (u - 1.0);
    }

    Complex FactorTransforms::deterministic_part(Complex w) const
    {
        const double c1 = model_.c1, c2 = model_.c2;
        const Complex ratio = c1 * w / (1.0 + c1 * w);
        return ratio * ratio * derivative_gram(w) * sensor_gram((c1 / c2) * w);
    }

    Complex FactorTransforms::composed(Complex w) const { return deterministic_part(w) * ris_gram(model_.c1 * w); }

    FactorTransforms analytic_factor_transforms(const SpectralModel &model) { return FactorTransforms(model); }

    double free_convolution_consistency(const SpectralModel &model, std::span<const Complex> zs,
                                        const QuadraticCoefficientFn &coefficients)
    {
        const FactorTransforms transforms(model);
        double worst = 0.0;
        for (const Complex z : zs)
        {
            try
            {
                if (std::holds_alternative<ConstantModulus>(model.ris))
                {
                    const Complex m = stieltjes_constant_modulus(z, model, coefficients).m;
                    const Complex psi = -1.0 - z * m;
                    worst = std::max(worst, std::abs(transforms.composed(psi) - z) / std::abs(z));
                }
                else
                {
                    const Complex m = stieltjes_discrete_amplitude(z, model).m;
                    const Complex psi = -1.0 - z * m;
                    const Complex lhs = model.c1 * psi;
                    const Complex rhs = transforms.ris_psi(z / transforms.deterministic_part(psi));
                    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
                }
            }
            catch (const RootSelectionError &)
            {
                return inf;
            }
            if (!std::isfinite(worst))
                return inf;
        }
        return worst;
    }
}
