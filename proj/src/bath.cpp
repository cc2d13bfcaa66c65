#include "excitonium/bath.hpp"

#include "excitonium/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace excitonium {

double BathSpec::gamma_cm() const { return units::rate_to_wavenumber(gamma); }

double BathSpec::beta() const { return 1.0 / units::thermal_energy(temperature); }

void BathSpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("bath lambda must be >= 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("bath gamma must be > 0");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("bath temperature must be > 0");
    }
    if (n_matsubara < 0) throw std::invalid_argument("bath n_matsubara must be >= 0");
}

int default_matsubara_terms(double temperature_K) { return temperature_K >= 200.0 ? 0 : 3; }

BathSpec fmo_bath(double temperature_K) {
    BathSpec b;
    b.lambda = 35.0;
    b.gamma = 1.0 / 100.0;
    b.temperature = temperature_K;
    b.n_matsubara = default_matsubara_terms(temperature_K);
    return b;
}

std::complex<double> CorrelationExpansion::evaluate(double t_fs) const {
    const double t = units::wavenumber_to_rad_per_fs * t_fs;  // nu in cm^-1 times t in fs
    std::complex<double> sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] * std::exp(-nu[k] * t);
    return sum;
}

double drude_spectral_density(double omega, double lambda, double gamma_cm) {
    return 2.0 * lambda * gamma_cm * omega / (omega * omega + gamma_cm * gamma_cm);
}

double bath_spectrum(double omega, const BathSpec& bath) {
    const double beta = bath.beta();
    const double g = bath.gamma_cm();
    if (omega == 0.0) return 4.0 * bath.lambda / (beta * g);
    return 2.0 * drude_spectral_density(omega, bath.lambda, g) / (-std::expm1(-beta * omega));
}

double bath_lamb_shift(double omega, const BathSpec& bath) {
    const double beta = bath.beta();
    const double g = bath.gamma_cm();
    const double lambda = bath.lambda;
    const double denom = g * g + omega * omega;
    const double drude = lambda * g * (omega / std::tan(0.5 * beta * g) - g) / denom;
    if (omega == 0.0) return drude;
    // sum_k c_k omega / (nu_k^2 + omega^2) = 2 lambda gamma omega / (pi denom) * sum_k f(k),
    // f(k) = k / (k^2 - x^2) - k / (k^2 + y^2) ~ (x^2 + y^2) / k^3.
    const double x = beta * g / (2.0 * units::pi);
    const double y = beta * omega / (2.0 * units::pi);
    constexpr int terms = 4000;
    double sum = 0.0;
    for (int k = terms; k >= 1; --k) {
        const double kk = static_cast<double>(k) * k;
        sum += k * (x * x + y * y) / ((kk - x * x) * (kk + y * y));
    }
    const double m = terms;
    sum += (x * x + y * y) * (0.5 / (m * m) - 0.5 / (m * m * m) + 0.25 / (m * m * m * m));
    return drude + 2.0 * lambda * g * omega / (units::pi * denom) * sum;
}

CorrelationExpansion correlation_coefficients(const BathSpec& bath) {
    bath.validate();
    const double beta = bath.beta();
    const double g = bath.gamma_cm();
    const double lambda = bath.lambda;

    CorrelationExpansion out;
    out.c.reserve(bath.n_matsubara + 1);
    out.nu.reserve(bath.n_matsubara + 1);
    out.c.emplace_back(lambda * g / std::tan(0.5 * beta * g), -lambda * g);
    out.nu.push_back(g);
    for (int k = 1; k <= bath.n_matsubara; ++k) {
        const double nu_k = 2.0 * units::pi * k / beta;
        if (std::abs(nu_k - g) <= 1e-9 * nu_k) {
            throw std::invalid_argument("bath gamma coincides with Matsubara frequency " + std::to_string(k));
        }
        out.c.emplace_back(4.0 * lambda * g * nu_k / (beta * (nu_k * nu_k - g * g)), 0.0);
        out.nu.push_back(nu_k);
    }
    return out;
}

double terminator_rate(const BathSpec& bath) {
    bath.validate();
    if (bath.lambda == 0.0) return 0.0;
    const double beta = bath.beta();
    const double g = bath.gamma_cm();
    const double half = 0.5 * beta * g;
    // sum_{k>=1} c_k / nu_k = 2 lambda / (beta gamma) - lambda cot(beta gamma / 2)
    double residual = bath.lambda * (1.0 / half - 1.0 / std::tan(half));
    const auto expansion = correlation_coefficients(bath);
    for (std::size_t k = 1; k < expansion.size(); ++k) residual -= expansion.c[k].real() / expansion.nu[k];
    return residual > 0.0 ? residual : 0.0;
}

}  // namespace excitonium
