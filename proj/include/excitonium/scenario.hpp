#pragma once

#include "excitonium/bath.hpp"
#include "excitonium/hamiltonian.hpp"
#include "excitonium/heom.hpp"
#include "excitonium/propagation.hpp"

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace excitonium {

enum class SolverKind { heom, redfield_full, redfield_secular };

std::string to_string(SolverKind s);
/// Accepts heom, redfield-full, redfield-secular.
SolverKind parse_solver(const std::string& name);

/// Everything needed to reproduce one propagation.
///
/// Config text uses sections with key = value lines; '#' and ';' start
/// comments. Keys and defaults:
///
///     [system]      hamiltonian = fmo | <path>, initial_site = 1
///     [bath]        temperature = 300 (K), lambda = 35 (cm^-1),
///                   gamma = 0.01 (fs^-1), n_matsubara = auto | <int>,
///                   lambda.<site> / gamma.<site> override one site's bath
///     [trapping]    enabled = true, site = 3, rate = 0.00025 (fs^-1)
///     [solver]      name = heom | redfield-full | redfield-secular
///     [hierarchy]   depth = 4, terminator = true
///     [integrator]  method = rk4 | adaptive45, dt_fs = 1, horizon_fs = 5000,
///                   record_stride = 1, rtol, atol, dt_min, dt_max
///
/// n_matsubara = auto picks 0 at or above 200 K and 3 below.
struct Scenario {
    std::string hamiltonian = "fmo";
    int initial_site = 1;
    double temperature = 300.0;
    double lambda = 35.0;
    double gamma = 0.01;
    std::optional<int> n_matsubara;  ///< unset: auto
    std::map<int, double> site_lambda;  ///< 1-based site -> lambda override
    std::map<int, double> site_gamma;   ///< 1-based site -> gamma override
    TrappingSpec trapping{};
    bool trapping_enabled = true;
    SolverKind solver = SolverKind::heom;
    int depth = 4;
    bool terminator = true;
    IntegratorOptions integrator{};
    double horizon_fs = 5000.0;

    /// Bath with n_matsubara resolved, before per-site overrides.
    BathSpec bath() const;
    /// One bath per site with overrides applied.
    std::vector<BathSpec> site_baths(int n_sites) const;
    int resolved_matsubara() const;
    TrappingSpec effective_trapping() const;
    ElectronicHamiltonian load_hamiltonian() const;
    std::vector<double> time_grid() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Fully resolved config text; parse_scenario(to_config_text()) round-trips.
    std::string to_config_text() const;
};

/// Invalid configuration. `line` is 0 when the problem is not tied to a
/// specific line of input.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0, std::string field = {});
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

/// Applies the key = value lines of `in` on top of `base`, then validates.
Scenario parse_scenario(std::istream& in, Scenario base = {});
Scenario load_scenario(const std::string& path, Scenario base = {});

/// Sets one field by its section.key name; used for both config lines and
/// command-line overrides.
void set_field(Scenario& s, const std::string& section, const std::string& key, const std::string& value);

struct PresetInfo {
    std::string name;
    std::string description;
};

/// fig2, fig3, fig4, figS1, figS2, figS3.
const std::vector<PresetInfo>& preset_catalog();
/// Throws ConfigError for an unknown name.
Scenario preset(const std::string& name);

}  // namespace excitonium
