#pragma once

// Unit bookkeeping. Energies are carried in wavenumbers (cm^-1), times in
// femtoseconds, and hbar = 1 once an energy is turned into an angular
// frequency through 2*pi*c.

namespace excitonium::units {

inline constexpr double pi = 3.14159265358979323846;

/// Speed of light in cm/fs.
inline constexpr double speed_of_light_cm_per_fs = 2.99792458e-5;

/// rad/fs per cm^-1.
inline constexpr double wavenumber_to_rad_per_fs = 2.0 * pi * speed_of_light_cm_per_fs;

/// Boltzmann constant in cm^-1 per kelvin.
inline constexpr double boltzmann_cm1_per_K = 0.695035;

/// Energy in cm^-1 to angular frequency in rad/fs.
double wavenumber_to_angular(double wavenumber);

/// Angular frequency in rad/fs back to cm^-1.
double angular_to_wavenumber(double angular);

/// k_B T in cm^-1. Throws std::invalid_argument for T <= 0.
double thermal_energy(double temperature_K);

/// Rate in fs^-1 expressed as an energy in cm^-1 (gamma / 2*pi*c).
inline double rate_to_wavenumber(double rate_per_fs) { return rate_per_fs / wavenumber_to_rad_per_fs; }

}  // namespace excitonium::units
