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
#include "risdoa/random.hpp"
#include "risdoa/spectrum.hpp"

#include <cmath>
#include <numbers>

using namespace risdoa;
using std::numbers::pi;

namespace
{
    const SpectralModel unit{0.3, 0.35, ConstantModulus{}};
    const SpectralModel amplitude{0.3, 0.35, DiscreteAmplitude{1.0, 3.0, 0.5}};

    std::vector<Complex> upper_half_plane(std::uint64_t seed, std::size_t count, double re_lo, double re_hi)
    {
        Substream rng(seed, Stream::validation, 42);
        std::vector<Complex> zs(count);
        for (auto &z : zs)
            z = Complex(rng.uniform(re_lo, re_hi), std::pow(10.0, rng.uniform(-4.0, 1.5)));
        return zs;
    }

    bool herglotz(Complex z, Complex m) { return m.imag() > 0.0 && (z * m).imag() >= -1e-10 * std::abs(z * m); }

    QuadraticCoefficients flipped_a1(Complex z, double c1, double c2)
    {
        auto q = quadratic_coefficients(z, c1, c2);
        q.a1 = -q.a1;
        return q;
    }
}

TEST_CASE("quadratic coefficients encode the composed N-transform")
{
    // 3 z psi (1 + c1 psi) - (1 + psi)(c1 psi + c2) with psi = -1 - z m.
    Substream rng(1, Stream::validation, 1);
    for (int i = 0; i < 20; ++i)
    {
        const Complex z(rng.uniform(-1, 1), rng.uniform(0.01, 1));
        const Complex m(rng.uniform(-3, 3), rng.uniform(-3, 3));
        const Complex psi = -1.0 - z * m;
        const Complex direct = 3.0 * z * psi * (1.0 + 0.3 * psi) - (1.0 + psi) * (0.3 * psi + 0.35);
        const auto [a2, a1, a0] = quadratic_coefficients(z, 0.3, 0.35);
        CHECK(std::abs((a2 * m + a1) * m + a0 - direct) <= 1e-12 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("unit-modulus root matches the textbook quadratic formula")
{
    for (const Complex z : upper_half_plane(3, 300, -0.5, 1.0))
    {
        bool unique = false;
        const Complex expected = oracle::herglotz_quadratic_root(z, 0.3, 0.35, unique);
        if (!unique)
            continue;
        const Complex m = stieltjes_constant_modulus(z, unit).m;
        CHECK(std::abs(m - expected) <= 1e-9 * std::abs(expected));
    }
}

TEST_CASE("Herglotz property on random points, both models")
{
    std::size_t bad_unit = 0, bad_amp = 0;
    double worst_quad = 0.0, worst_quint = 0.0;
    for (const Complex z : upper_half_plane(5, 1000, -1.0, 4.0))
    {
        const Complex m = stieltjes(z, unit).m;
        bad_unit += !herglotz(z, m);
        const auto [a2, a1, a0] = quadratic_coefficients(z, 0.3, 0.35);
        worst_quad = std::max(worst_quad, std::abs((a2 * m + a1) * m + a0) /
                                              (std::abs(a2) * std::norm(m) + std::abs(a1 * m) + std::abs(a0)));

        const Complex ma = stieltjes(z, amplitude).m;
        bad_amp += !herglotz(z, ma);
        worst_quint = std::max(worst_quint, amplitude_equation_residual(z, ma, amplitude));
    }
    CHECK(bad_unit == 0);
    CHECK(bad_amp == 0);
    CHECK(worst_quad <= 1e-12);
    CHECK(worst_quint <= 1e-9);
}

TEST_CASE("far from the spectrum m(z) ~ -1/z")
{
    for (const Complex z : {Complex(0.0, 1e4), Complex(-500.0, 300.0), Complex(1e3, 1e3)})
    {
        CHECK(std::abs(stieltjes(z, unit).m * z + 1.0) < 1e-3);
        CHECK(std::abs(stieltjes(z, amplitude).m * z + 1.0) < 1e-2);
    }
}

TEST_CASE("equal amplitudes reduce to the scaled unit-modulus law")
{
    const SpectralModel ones{0.3, 0.35, DiscreteAmplitude{1.0, 1.0, 0.4}};
    const SpectralModel twos{0.3, 0.35, DiscreteAmplitude{2.0, 2.0, 0.4}};
    for (const Complex z : upper_half_plane(9, 50, -0.2, 1.5))
    {
        const Complex m1 = stieltjes_constant_modulus(z, unit).m;
        CHECK(std::abs(stieltjes(z, ones).m - m1) <= 1e-10 * std::abs(m1));
        CHECK(std::abs(stieltjes(z, twos).m - stieltjes_constant_modulus(z / 4.0, unit).m / 4.0) <=
              1e-10 * std::abs(m1));
        // The quintic for x = y = 1 contains the quadratic's root.
        CHECK(amplitude_equation_residual(z, m1, ones) <= 1e-9);
    }
}

TEST_CASE("two-level quintic with nearly equal levels tracks the unit-modulus law")
{
    const SpectralModel near{0.3, 0.35, DiscreteAmplitude{1.0, 1.0 + 1e-7, 0.5}};
    for (const Complex z : upper_half_plane(10, 30, 0.0, 0.4))
    {
        const Complex m1 = stieltjes_constant_modulus(z, unit).m;
        CHECK(std::abs(stieltjes_discrete_amplitude(z, near).m - m1) <= 1e-4 * std::abs(m1));
    }
}

TEST_CASE("polynomial and factor-transform routes agree; a corrupted coefficient is caught")
{
    const auto zs = upper_half_plane(11, 100, -0.5, 2.0);
    CHECK(free_convolution_consistency(unit, zs) <= 1e-8);
    CHECK(free_convolution_consistency(amplitude, zs) <= 1e-8);
    CHECK(free_convolution_consistency(unit, zs, flipped_a1) > 1e-3);

    const FactorTransforms f = analytic_factor_transforms(unit);
    const Complex w(0.3, 0.2);
    CHECK(std::abs(f.composed(w) - (1.0 + w) * (0.35 + 0.3 * w) / (3.0 * w * (1.0 + 0.3 * w))) < 1e-14);
    CHECK_THROWS_AS(analytic_factor_transforms(amplitude).ris_gram(w), PreconditionError);
}

TEST_CASE("unit-modulus density: mass, support edges, limit stability")
{
    const DensityCurve c = density_curve(unit);
    CHECK(std::abs(c.mass - 1.0) <= mass_tolerance);
    CHECK(c.limit_l1 < limit_tolerance);
    const auto [lo, hi] = oracle::constant_modulus_edges(0.3, 0.35);
    const double h = c.lambdas[1] - c.lambdas[0];
    CHECK(std::abs(c.support_lo - lo) <= 3.0 * h);
    CHECK(std::abs(c.support_hi - hi) <= 3.0 * h);
    for (double d : c.density)
        CHECK(d >= 0.0);
}

TEST_CASE("amplitude density is normalized and wider than the unit-modulus one")
{
    const DensityCurve c = density_curve(amplitude, GridSpec{0.0, 0.0, 4001});
    CHECK(std::abs(c.mass - 1.0) <= mass_tolerance);
    CHECK(c.support_hi > 1.0);
    CHECK(c.support_hi <= 9.0 / 3.0);
    CHECK(c.support_lo > 0.0);
}

TEST_CASE("more targets than sensors leaves mass at zero")
{
    CHECK_THROWS_AS(density_curve(SpectralModel{0.4, 0.3, ConstantModulus{}}, GridSpec{0.0, 0.0, 2001}),
                    NormalizationError);
}

TEST_CASE("explicit grids are honoured")
{
    const auto [lo, hi] = oracle::constant_modulus_edges(0.3, 0.35);
    const DensityCurve c = density_curve(unit, GridSpec{0.0, hi * 1.01, 3001});
    CHECK(c.lambdas.front() == 0.0);
    CHECK(c.lambdas.size() == 3001);
    CHECK(std::abs(c.mass - 1.0) <= mass_tolerance);
    CHECK(c.support_lo >= lo - 2e-4);
}

TEST_CASE("spectral CRB conventions")
{
    const std::vector<double> eig{0.5, 0.25, 1.0};
    const SpectralCrb c = spectral_crb_from_eigenvalues(eig, 2.0, 3, 10);
    CHECK(c.inverse_moment == doctest::Approx(7.0 / 3.0));
    CHECK(c.per_target == doctest::Approx(2.0 / (2.0 * 3.0 * 1e4) * 7.0 / 3.0));
    CHECK(c.total == doctest::Approx(3.0 * c.per_target));
    CHECK_THROWS_AS(spectral_crb_from_eigenvalues(std::vector<double>{0.0, 1.0}, 1, 1, 10), DivergentCrbError);

    DensityCurve touching;
    touching.lambdas = {0.0, 0.5, 1.0};
    touching.density = {1.0, 1.0, 1.0};
    touching.support_lo = 0.0;
    touching.support_hi = 1.0;
    CHECK_THROWS_AS(asymptotic_crb_total(touching, 1.0, 1, 10, 2), DivergentCrbError);

    // Uniform density on [1, 2]: integral of 1/lambda is ln 2.
    DensityCurve flat;
    for (int i = 0; i <= 2000; ++i)
    {
        flat.lambdas.push_back(1.0 + i / 2000.0);
        flat.density.push_back(1.0);
    }
    flat.support_lo = 1.0;
    flat.support_hi = 2.0;
    CHECK(asymptotic_crb_total(flat, 1.0, 1, 1, 4).inverse_moment == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("spectral scenario and separation")
{
    const Scenario s = spectral_scenario(unit, 1000);
    CHECK(s.num_targets() == 300);
    CHECK(s.num_sensors() == 350);
    CHECK(s.n_slots == 1);
    CHECK(min_separation(s.thetas) >= 2.0 * pi * 3.0 / 1000.0 - 1e-12);
    CHECK(min_separation(s.phis) >= 2.0 * pi * 2.0 / 1000.0 - 1e-12);
    CHECK_THROWS_AS(empirical_spectrum(s, 1, 4.0), PreconditionError);

    CHECK(min_separation(std::vector<double>{3.0, -3.0}) == doctest::Approx(2.0 * pi - 6.0));
    CHECK(std::isinf(min_separation(std::vector<double>{1.0})));
}

TEST_CASE("empirical spectrum: size, order, determinism")
{
    const Scenario s = spectral_scenario(unit, 200);
    const auto a = empirical_spectrum(s, 3, 2.0, 0);
    const auto b = empirical_spectrum(s, 3, 2.0, 0);
    const auto c = empirical_spectrum(s, 3, 2.0, 1);
    CHECK(a.size() == 60);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(a.front() >= 0.0);
}

TEST_CASE("histogram comparison")
{
    const DensityCurve c = density_curve(unit, GridSpec{0.0, 0.0, 2001});
    const HistogramComparison empty = compare_histogram({}, c, 20);
    CHECK(empty.empirical.empty());
    CHECK(!empty.l1);
    double total = 0.0;
    for (double p : empty.theory)
        total += p;
    CHECK(total == doctest::Approx(c.mass).epsilon(1e-3));

    // Haar-factor samples follow the curve.
    const auto eig = oracle::haar_factor_spectrum(600, 180, 210, std::vector<double>(600, 1.0), 17);
    const HistogramComparison h = compare_histogram(eig, c, 20);
    REQUIRE(h.l1);
    CHECK(*h.l1 < 0.1);
}
