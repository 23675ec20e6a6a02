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

#ifndef RISDOA_SPECTRUM_HPP
#define RISDOA_SPECTRUM_HPP

#include "risdoa/scenario.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

// Large-system spectrum of (1/N^4) D^H D, D = A_phi Omega dA_theta, with
// K/N -> c1 and R/N -> c2. The limiting law is the free multiplicative
// convolution of the three factor spectra; its Stieltjes transform m(z) solves
// a quadratic (unit-modulus RIS) or a quintic (two-level amplitude RIS).

namespace risdoa
{
    using Complex = std::complex<double>;

    // |w| = 1 with random phase; Omega Omega^H = I.
    struct ConstantModulus
    {
    };

    using SpectralRisModel = std::variant<ConstantModulus, DiscreteAmplitude>;

    struct SpectralModel
    {
        double c1 = 0.3;  // K / N
        double c2 = 0.35; // R / N
        SpectralRisModel ris = ConstantModulus{};
    };

    void validate(const SpectralModel &model);
    // c1 < c2: more sensors than targets, no point mass at zero.
    bool well_posed(const SpectralModel &model);
    std::string describe(const SpectralModel &model);

    struct StieltjesValue
    {
        Complex z;
        Complex m;
    };

    // a2 m^2 + a1 m + a0 = 0 for the unit-modulus model.
    struct QuadraticCoefficients
    {
        Complex a2, a1, a0;
    };

    QuadraticCoefficients quadratic_coefficients(Complex z, double c1, double c2);

    using QuadraticCoefficientFn = std::function<QuadraticCoefficients(Complex, double, double)>;

    // The Herglotz root (Im m > 0, and Im zm >= 0 since the law lives on [0, inf)).
    // Throws RootSelectionError carrying both roots when none (or both) qualify.
    StieltjesValue stieltjes_constant_modulus(Complex z, const SpectralModel &model);
    StieltjesValue stieltjes_constant_modulus(Complex z, const SpectralModel &model,
                                              const QuadraticCoefficientFn &coefficients);

    // Degree-5 polynomial in m, ascending powers, obtained by clearing the
    // denominators of the two-atom amplitude equation.
    std::array<Complex, 6> quintic_coefficients(Complex z, const SpectralModel &model);

    // Relative residual of the rational (pre-clearing) amplitude equation at (z, m).
    double amplitude_equation_residual(Complex z, Complex m, const SpectralModel &model);

    // Root chosen by continuation from a high-Im(z) point where m ~ -1/z, then
    // filtered by the Herglotz conditions. Throws RootSelectionError with all
    // five roots when no unique admissible continuation exists.
    StieltjesValue stieltjes_discrete_amplitude(Complex z, const SpectralModel &model);

    // Variant used by grid sweeps: prefers the admissible root closest to
    // `previous`, falling back to vertical continuation when ambiguous.
    StieltjesValue stieltjes_discrete_amplitude(Complex z, const SpectralModel &model, Complex previous);

    // Dispatches on the RIS model (x == y reduces to a scaled unit-modulus law).
    StieltjesValue stieltjes(Complex z, const SpectralModel &model);

    inline constexpr double default_y_offset = 1e-6;
    inline constexpr double support_threshold = 1e-6;
    inline constexpr double mass_tolerance = 5e-3;
    inline constexpr double limit_tolerance = 1e-3;

    // hi <= lo requests auto-bracketing from 0 up to the factor-norm bound.
    struct GridSpec
    {
        double lo = 0.0;
        double hi = 0.0;
        std::size_t points = 10001;
    };

    struct DensityCurve
    {
        std::vector<double> lambdas; // ascending
        std::vector<double> density; // (1/pi) Im m(lambda + j y), clipped at 0
        double support_lo = 0.0;
        double support_hi = 0.0;
        double mass = 0.0;
        double y_offset = default_y_offset;
        double limit_l1 = 0.0; // L1 change when y is halved
    };

    // Inverse Stieltjes transform on a grid. Support is where the density
    // exceeds 1e-6 and survives halving y (Poisson tails halve, the bulk does
    // not). Throws ConvergenceError if halving y moves the curve by >= 1e-3 in
    // L1, NormalizationError if the mass is off by more than 5e-3.
    DensityCurve density_curve(const SpectralModel &model, const GridSpec &grid = {},
                               double y_offset = default_y_offset);

    // Smallest circular distance between any two angles (inf for fewer than two).
    double min_separation(std::span<const double> angles);

    // Widely spaced scenario at the model's ratios: targets and sensors on
    // distinct DFT bins, unit powers, T = 1.
    Scenario spectral_scenario(const SpectralModel &model, std::size_t n);

    // Eigenvalues (ascending, clipped at 0) of (1/N^4) D^H D for one RIS draw.
    // Requires pairwise separation >= 2 pi s / N among targets and among sensors.
    std::vector<double> empirical_spectrum(const Scenario &scenario, std::uint64_t seed,
                                           double separation_factor = 4.0, std::uint64_t draw = 0);

    struct HistogramComparison
    {
        std::vector<double> edges;
        std::vector<double> empirical; // bin probabilities; empty when no eigenvalues
        std::vector<double> theory;    // integrated density per bin
        std::optional<double> l1;      // sum |empirical - theory|
    };

    // Bins span the union of the empirical range and the theoretical support.
    HistogramComparison compare_histogram(std::span<const double> eigenvalues, const DensityCurve &curve,
                                          std::size_t bins);

    struct SpectralCrb
    {
        double inverse_moment = 0.0; // integral of (1/lambda) d mu
        double per_target = 0.0;     // sigma^2 / (2 T N^4) * inverse_moment
        double total = 0.0;          // K * per_target, i.e. tr(F^-1)
    };

    SpectralCrb asymptotic_crb_total(const DensityCurve &curve, double sigma2, std::size_t slots,
                                     std::size_t n, std::size_t k);
    SpectralCrb asymptotic_crb_total(const SpectralModel &model, double sigma2, std::size_t slots,
                                     std::size_t n, std::size_t k);

    // Finite-N counterpart from explicit eigenvalues of (1/N^4) D^H D.
    SpectralCrb spectral_crb_from_eigenvalues(std::span<const double> eigenvalues, double sigma2,
                                              std::size_t slots, std::size_t n);

    // N-transforms (N(w) = psi^{-1}(w), psi(z) = -1 - z m(z)) of the factors.
    class FactorTransforms
    {
    public:
        explicit FactorTransforms(SpectralModel model);

        // (1/N^3) dA^H dA -> I/3.
        Complex derivative_gram(Complex w) const { return (1.0 + w) / (3.0 * w); }
        // (1/N) A_phi A_phi^H -> I; composed at (c1/c2) z.
        Complex sensor_gram(Complex w) const { return (1.0 + w) / w; }
        // Omega Omega^H = I for unit modulus; composed at c1 z. Throws for the amplitude model.
        Complex ris_gram(Complex w) const;
        // Forward psi of Omega Omega^H: sum over atoms of weight * a / (u - a).
        Complex ris_psi(Complex u) const;

        // (c1 w / (1 + c1 w))^2 N_dA(w) N_A((c1/c2) w): everything except the RIS factor.
        Complex deterministic_part(Complex w) const;
        // Full N-transform of (1/N^4) D^H D (unit-modulus model).
        Complex composed(Complex w) const;

        const SpectralModel &model() const { return model_; }

    private:
        SpectralModel model_;
    };

    FactorTransforms analytic_factor_transforms(const SpectralModel &model);

    // Max relative disagreement over `zs` between the polynomial route (root of
    // the model's equation) and the factor-transform route. Unit modulus:
    // |N(psi(z)) - z| / |z|. Amplitude model: |c1 psi - psi_Omega(z / h(psi))|.
    // A root-selection failure counts as infinite disagreement.
    double free_convolution_consistency(const SpectralModel &model, std::span<const Complex> zs,
                                        const QuadraticCoefficientFn &coefficients = quadratic_coefficients);
}

#endif
