#pragma once

#include <complex>
#include <vector>

namespace excitonium {

/// Overdamped Brownian oscillator (Drude-Lorentz) environment of one site.
struct BathSpec {
    double lambda = 35.0;         ///< reorganization energy, cm^-1
    double gamma = 1.0 / 100.0;   ///< phonon relaxation rate, fs^-1
    double temperature = 300.0;   ///< K
    int n_matsubara = 0;          ///< K, number of explicit Matsubara terms

    double gamma_cm() const;      ///< gamma as an energy, cm^-1
    double beta() const;          ///< 1 / (k_B T), cm

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    friend bool operator==(const BathSpec&, const BathSpec&) = default;
};

/// Default Matsubara count for a temperature: 0 at/above 200 K, 3 below.
int default_matsubara_terms(double temperature_K);

/// FMO preset: lambda = 35 cm^-1, 100 fs relaxation time.
BathSpec fmo_bath(double temperature_K);

/// C(t) = sum_k c_k exp(-nu_k t) in cm^-1 energy units (hbar = 1):
/// c_k in cm^-2, nu_k in cm^-1. Entry 0 is the Drude term (nu_0 = gamma).
struct CorrelationExpansion {
    std::vector<std::complex<double>> c;
    std::vector<double> nu;

    std::size_t size() const { return c.size(); }
    /// sum_k c_k exp(-nu_k t), t in fs.
    std::complex<double> evaluate(double t_fs) const;
};

/// J(omega) = 2 lambda gamma omega / (omega^2 + gamma^2), all in cm^-1.
double drude_spectral_density(double omega, double lambda, double gamma_cm);

/// S(omega) = 2 J(omega) / (1 - exp(-beta omega)), with the omega -> 0 limit
/// 4 lambda / (beta gamma). Positive omega means energy given to the bath.
double bath_spectrum(double omega, const BathSpec& bath);

/// Im of the one-sided transform G(omega) = int_0^inf C(t) exp(i omega t) dt
/// with every Matsubara term included, cm^-1. Re G(omega) = S(omega) / 2.
/// Im G(0) = -lambda.
double bath_lamb_shift(double omega, const BathSpec& bath);

/// Throws std::invalid_argument if gamma coincides with a Matsubara frequency.
CorrelationExpansion correlation_coefficients(const BathSpec& bath);

/// Residual sum_{k > K} c_k / nu_k (cm^-1): the Markovian weight of the
/// Matsubara terms left out of the hierarchy. Zero for lambda = 0.
double terminator_rate(const BathSpec& bath);

}  // namespace excitonium
