#include "excitonium/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace excitonium::units {

double wavenumber_to_angular(double wavenumber) { return wavenumber * wavenumber_to_rad_per_fs; }

double angular_to_wavenumber(double angular) { return angular / wavenumber_to_rad_per_fs; }

double thermal_energy(double temperature_K) {
    if (!(temperature_K > 0.0) || !std::isfinite(temperature_K)) {
        throw std::invalid_argument("temperature must be positive and finite, got " +
                                    std::to_string(temperature_K) + " K");
    }
    return boltzmann_cm1_per_K * temperature_K;
}

}  // namespace excitonium::units
