#include "excitonium/scenario.hpp"

#include "excitonium/trajectory.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace excitonium {

std::string to_string(SolverKind s) {
    switch (s) {
        case SolverKind::heom: return "heom";
        case SolverKind::redfield_full: return "redfield-full";
        case SolverKind::redfield_secular: return "redfield-secular";
    }
    return "unknown";
}

SolverKind parse_solver(const std::string& name) {
    if (name == "heom") return SolverKind::heom;
    if (name == "redfield-full") return SolverKind::redfield_full;
    if (name == "redfield-secular") return SolverKind::redfield_secular;
    throw ConfigError("unknown solver '" + name + "' (expected heom, redfield-full or redfield-secular)", 0,
                      "solver.name");
}

ConfigError::ConfigError(const std::string& what, int line, std::string field)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line),
      field_(std::move(field)) {}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& field, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(begin, &end);
    if (v.empty() || end != begin + v.size() || errno == ERANGE) {
        throw ConfigError("'" + v + "' is not a number", 0, field);
    }
    return x;
}

int to_int(const std::string& field, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    const long x = std::strtol(begin, &end, 10);
    if (v.empty() || end != begin + v.size() || errno == ERANGE || x < -1000000 || x > 1000000) {
        throw ConfigError("'" + v + "' is not an integer", 0, field);
    }
    return static_cast<int>(x);
}

bool to_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "off" || v == "no" || v == "0") return false;
    throw ConfigError("'" + v + "' is not a boolean", 0, field);
}

}  // namespace

void set_field(Scenario& s, const std::string& section, const std::string& key, const std::string& value) {
    const std::string field = section + "." + key;
    auto& in = s.integrator;
    if (section == "system") {
        if (key == "hamiltonian") {
            if (value.empty()) throw ConfigError("hamiltonian must be 'fmo' or a file path", 0, field);
            s.hamiltonian = value;
        } else if (key == "initial_site") {
            s.initial_site = to_int(field, value);
        } else {
            throw ConfigError("unknown key '" + key + "' in [system]", 0, field);
        }
    } else if (section == "bath") {
        if (key == "temperature") s.temperature = to_double(field, value);
        else if (key == "lambda") s.lambda = to_double(field, value);
        else if (key == "gamma") s.gamma = to_double(field, value);
        else if (key == "n_matsubara") s.n_matsubara = value == "auto" ? std::nullopt : std::optional<int>(to_int(field, value));
        else if (key.rfind("lambda.", 0) == 0) s.site_lambda[to_int(field, key.substr(7))] = to_double(field, value);
        else if (key.rfind("gamma.", 0) == 0) s.site_gamma[to_int(field, key.substr(6))] = to_double(field, value);
        else throw ConfigError("unknown key '" + key + "' in [bath]", 0, field);
    } else if (section == "trapping") {
        if (key == "enabled") s.trapping_enabled = to_bool(field, value);
        else if (key == "site") s.trapping.site = to_int(field, value);
        else if (key == "rate") s.trapping.rate = to_double(field, value);
        else throw ConfigError("unknown key '" + key + "' in [trapping]", 0, field);
    } else if (section == "solver") {
        if (key != "name") throw ConfigError("unknown key '" + key + "' in [solver]", 0, field);
        try {
            s.solver = parse_solver(value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), 0, field);
        }
    } else if (section == "hierarchy") {
        if (key == "depth") s.depth = to_int(field, value);
        else if (key == "terminator") s.terminator = to_bool(field, value);
        else throw ConfigError("unknown key '" + key + "' in [hierarchy]", 0, field);
    } else if (section == "integrator") {
        if (key == "method") {
            try {
                in.method = parse_integration_method(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what(), 0, field);
            }
        } else if (key == "dt_fs") in.dt = to_double(field, value);
        else if (key == "horizon_fs") s.horizon_fs = to_double(field, value);
        else if (key == "record_stride") in.record_stride = to_int(field, value);
        else if (key == "rtol") in.rtol = to_double(field, value);
        else if (key == "atol") in.atol = to_double(field, value);
        else if (key == "dt_min") in.dt_min = to_double(field, value);
        else if (key == "dt_max") in.dt_max = to_double(field, value);
        else throw ConfigError("unknown key '" + key + "' in [integrator]", 0, field);
    } else {
        throw ConfigError("unknown section [" + section + "]", 0, field);
    }
}

int Scenario::resolved_matsubara() const {
    return n_matsubara ? *n_matsubara : default_matsubara_terms(temperature);
}

BathSpec Scenario::bath() const {
    BathSpec b;
    b.lambda = lambda;
    b.gamma = gamma;
    b.temperature = temperature;
    b.n_matsubara = resolved_matsubara();
    return b;
}

std::vector<BathSpec> Scenario::site_baths(int n_sites) const {
    std::vector<BathSpec> out(static_cast<std::size_t>(n_sites), bath());
    for (const auto& [site, v] : site_lambda) {
        if (site >= 1 && site <= n_sites) out[site - 1].lambda = v;
    }
    for (const auto& [site, v] : site_gamma) {
        if (site >= 1 && site <= n_sites) out[site - 1].gamma = v;
    }
    return out;
}

TrappingSpec Scenario::effective_trapping() const {
    return trapping_enabled ? trapping : TrappingSpec::none();
}

ElectronicHamiltonian Scenario::load_hamiltonian() const {
    if (hamiltonian == "fmo") return build_fmo_hamiltonian();
    try {
        return excitonium::load_hamiltonian(hamiltonian);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot load Hamiltonian: ") + e.what(), 0, "system.hamiltonian");
    }
}

std::vector<double> Scenario::time_grid() const { return make_time_grid(horizon_fs, integrator.dt); }

void Scenario::validate() const {
    const int n = load_hamiltonian().n_sites();
    if (initial_site < 1 || initial_site > n) {
        throw ConfigError("initial_site " + std::to_string(initial_site) + " outside 1.." + std::to_string(n), 0,
                          "system.initial_site");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ConfigError("temperature must be > 0 K", 0, "bath.temperature");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0", 0, "bath.lambda");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be > 0", 0, "bath.gamma");
    if (n_matsubara && (*n_matsubara < 0 || *n_matsubara > 64)) {
        throw ConfigError("n_matsubara must be auto or in 0..64", 0, "bath.n_matsubara");
    }
    for (const auto* overrides : {&site_lambda, &site_gamma}) {
        for (const auto& [site, v] : *overrides) {
            const std::string field = std::string(overrides == &site_lambda ? "bath.lambda." : "bath.gamma.") +
                                      std::to_string(site);
            if (site < 1 || site > n) throw ConfigError("override for site outside 1.." + std::to_string(n), 0, field);
            if (!std::isfinite(v)) throw ConfigError("override must be finite", 0, field);
        }
    }
    for (const auto& b : site_baths(n)) {
        try {
            b.validate();
            correlation_coefficients(b);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), 0, "bath");
        }
    }
    if (trapping_enabled) {
        if (trapping.site < 1 || trapping.site > n) {
            throw ConfigError("trapping site outside 1.." + std::to_string(n), 0, "trapping.site");
        }
        if (!(trapping.rate >= 0.0) || !std::isfinite(trapping.rate)) {
            throw ConfigError("trapping rate must be >= 0", 0, "trapping.rate");
        }
    }
    if (depth < 0 || depth > 16) throw ConfigError("depth must be in 0..16", 0, "hierarchy.depth");
    if (!(horizon_fs >= 0.0) || !std::isfinite(horizon_fs)) {
        throw ConfigError("horizon_fs must be >= 0", 0, "integrator.horizon_fs");
    }
    try {
        integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), 0, "integrator");
    }
}

std::string Scenario::to_config_text() const {
    std::ostringstream o;
    o << "[system]\n"
      << "hamiltonian = " << hamiltonian << "\n"
      << "initial_site = " << initial_site << "\n"
      << "[bath]\n"
      << "temperature = " << format_number(temperature) << "\n"
      << "lambda = " << format_number(lambda) << "\n"
      << "gamma = " << format_number(gamma) << "\n"
      << "n_matsubara = " << resolved_matsubara() << "\n";
    for (const auto& [site, v] : site_lambda) o << "lambda." << site << " = " << format_number(v) << "\n";
    for (const auto& [site, v] : site_gamma) o << "gamma." << site << " = " << format_number(v) << "\n";
    o
      << "[trapping]\n"
      << "enabled = " << (trapping_enabled ? "true" : "false") << "\n"
      << "site = " << trapping.site << "\n"
      << "rate = " << format_number(trapping.rate) << "\n"
      << "[solver]\n"
      << "name = " << to_string(solver) << "\n"
      << "[hierarchy]\n"
      << "depth = " << depth << "\n"
      << "terminator = " << (terminator ? "true" : "false") << "\n"
      << "[integrator]\n"
      << "method = " << to_string(integrator.method) << "\n"
      << "dt_fs = " << format_number(integrator.dt) << "\n"
      << "horizon_fs = " << format_number(horizon_fs) << "\n"
      << "record_stride = " << integrator.record_stride << "\n"
      << "rtol = " << format_number(integrator.rtol) << "\n"
      << "atol = " << format_number(integrator.atol) << "\n"
      << "dt_min = " << format_number(integrator.dt_min) << "\n"
      << "dt_max = " << format_number(integrator.dt_max) << "\n";
    return o.str();
}

Scenario parse_scenario(std::istream& in, Scenario base) {
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        const std::string text = trim(comment == std::string::npos ? line : line.substr(0, comment));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']' || text.size() < 3) throw ConfigError("malformed section header '" + text + "'", line_no);
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + text + "'", line_no);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (section.empty()) throw ConfigError("key '" + key + "' appears before any [section]", line_no, key);
        try {
            set_field(base, section, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(e.what(), line_no, e.field());
        }
    }
    base.validate();
    return base;
}

Scenario load_scenario(const std::string& path, Scenario base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_scenario(in, std::move(base));
}

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog{
        {"fig2", "global entanglement E(t), HEOM, site 1 at 77 K (use --site 6 / --temp 300 for the other curves)"},
        {"fig3", "pairwise concurrence, HEOM, initial excitation on site 1, 77 K"},
        {"fig4", "pairwise concurrence, HEOM, initial excitation on site 6, 77 K"},
        {"figS1", "full concurrence set, HEOM, site 1, 300 K"},
        {"figS2", "full concurrence set, HEOM, site 6, 300 K"},
        {"figS3", "model comparison at 300 K, site 1 (compare heom, redfield-full, redfield-secular)"},
    };
    return catalog;
}

Scenario preset(const std::string& name) {
    Scenario s;
    s.hamiltonian = "fmo";
    s.lambda = 35.0;
    s.gamma = 0.01;
    s.trapping = TrappingSpec{};
    s.trapping_enabled = true;
    s.solver = SolverKind::heom;
    s.depth = 4;
    s.terminator = true;
    s.horizon_fs = 5000.0;
    s.integrator = IntegratorOptions{};
    s.integrator.record_stride = 5;
    if (name == "fig2" || name == "fig3") {
        s.initial_site = 1;
        s.temperature = 77.0;
    } else if (name == "fig4") {
        s.initial_site = 6;
        s.temperature = 77.0;
    } else if (name == "figS1" || name == "figS3") {
        s.initial_site = 1;
        s.temperature = 300.0;
    } else if (name == "figS2") {
        s.initial_site = 6;
        s.temperature = 300.0;
    } else {
        throw ConfigError("unknown preset '" + name + "'", 0, "preset");
    }
    s.n_matsubara.reset();  // follows the temperature, also under --temp overrides
    return s;
}

}  // namespace excitonium
