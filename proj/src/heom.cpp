#include "excitonium/heom.hpp"

#include "excitonium/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace excitonium {

void TrappingSpec::validate(int n_sites) const {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("trapping rate must be >= 0");
    if (site < 0 || site > n_sites) {
        throw std::invalid_argument("trapping site " + std::to_string(site) + " outside 1.." +
                                    std::to_string(n_sites) + " (0 disables trapping)");
    }
}

std::vector<BathSpec> uniform_baths(const BathSpec& bath, int n_sites) {
    return std::vector<BathSpec>(static_cast<std::size_t>(n_sites), bath);
}

Eigen::Map<const Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> HierarchyState::ado(
    std::size_t ordinal) const {
    const int n = n_sites();
    return {data.data() + ordinal * n * n, n, n};
}

SingleExcitationState HierarchyState::physical() const { return SingleExcitationState(ado(0)); }

namespace {

inline complex mul(complex a, complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

HeomModel::HeomModel(const ElectronicHamiltonian& h, std::vector<BathSpec> site_baths, TrappingSpec trapping,
                     HeomOptions options)
    : n_(h.n_sites()), hermitian_(true) {
    if (static_cast<int>(site_baths.size()) != n_) {
        throw std::invalid_argument("HEOM needs one bath per site (" + std::to_string(n_) + "), got " +
                                    std::to_string(site_baths.size()));
    }
    for (const auto& b : site_baths) b.validate();
    const int k_terms = site_baths.front().n_matsubara;
    for (const auto& b : site_baths) {
        if (b.n_matsubara != k_terms) throw std::invalid_argument("all site baths must share n_matsubara");
    }
    trapping.validate(n_);

    hierarchy_ = std::make_shared<const Hierarchy>(n_, k_terms, options.depth, options.max_ados);

    const double kappa = units::wavenumber_to_rad_per_fs;
    h_.resize(static_cast<std::size_t>(n_) * n_);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) h_[a * n_ + b] = kappa * h(a, b);
    }

    const int modes = hierarchy_->n_modes();
    c_.resize(modes);
    std::vector<double> nu(modes);
    delta_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const auto expansion = correlation_coefficients(site_baths[j]);
        for (int k = 0; k <= k_terms; ++k) {
            const int m = hierarchy_->mode(j, k);
            c_[m] = kappa * kappa * expansion.c[k];
            nu[m] = kappa * expansion.nu[k];
        }
        if (options.terminator) delta_[j] = kappa * terminator_rate(site_baths[j]);
    }

    ado_damping_.resize(hierarchy_->size());
    lower_begin_.assign(hierarchy_->size() + 1, 0);
    for (std::size_t o = 0; o < hierarchy_->size(); ++o) {
        const auto occ = hierarchy_->index(o);
        double s = 0.0;
        for (int m = 0; m < modes; ++m) {
            s += occ[m] * nu[m];
            if (occ[m] == 0) continue;
            const complex cm = static_cast<double>(occ[m]) * c_[m];
            lowerings_.push_back({hierarchy_->lower(o, m), m / hierarchy_->terms_per_site(), cm});
        }
        ado_damping_[o] = s;
        lower_begin_[o + 1] = lowerings_.size();
    }

    // Terminator: -sum_j delta_j [V_j, [V_j, rho]] damps rho_ab (a != b) by
    // delta_a + delta_b. Trapping: -(G/2){P_s, rho}.
    decay_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            double d = a != b ? delta_[a] + delta_[b] : 0.0;
            if (trapping.enabled()) {
                const int s = trapping.site - 1;
                d += 0.5 * trapping.rate * ((a == s ? 1.0 : 0.0) + (b == s ? 1.0 : 0.0));
            }
            decay_[a * n_ + b] = d;
        }
    }

    hermitian_ = options.hermitian_kernel;
    const int workers = options.workers > 0 ? options.workers : configured_worker_count();
    pool_ = std::make_unique<WorkerPool>(workers);
}

HeomModel::~HeomModel() = default;

HierarchyState HeomModel::initial_state(const SingleExcitationState& rho0) const {
    if (rho0.n_sites() != n_) throw std::invalid_argument("initial state has wrong dimension");
    HierarchyState s;
    s.hierarchy = hierarchy_;
    s.data = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(hierarchy_->size()) * n_ * n_);
    if (hermitian_) {
        const double defect = validate_state(rho0).hermiticity_defect;
        if (defect > 1e-12) {
            throw std::invalid_argument("initial state is not Hermitian (defect " + std::to_string(defect) + ")");
        }
        for (int a = 0; a < n_; ++a) {
            s.data(a * n_ + a) = rho0(a, a).real();
            for (int b = a + 1; b < n_; ++b) {
                s.data(a * n_ + b) = rho0(a, b);
                s.data(b * n_ + a) = std::conj(rho0(a, b));
            }
        }
        return s;
    }
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) s.data(a * n_ + b) = rho0(a, b);
    }
    return s;
}

SingleExcitationState HeomModel::physical(const Eigen::VectorXcd& y) const {
    Eigen::MatrixXcd m(n_, n_);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) m(a, b) = y(a * n_ + b);
    }
    return SingleExcitationState(std::move(m));
}

template <int FixedN>
void HeomModel::rhs_range(const complex* y, complex* dy, std::size_t begin, std::size_t end) const {
    const int n = FixedN > 0 ? FixedN : n_;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const int terms = hierarchy_->terms_per_site();
    const Hierarchy& hier = *hierarchy_;
    const double* h = h_.data();
    const double* decay = decay_.data();

    for (std::size_t o = begin; o < end; ++o) {
        const complex* rho = y + o * nn;
        complex* out = dy + o * nn;
        const double damping = ado_damping_[o];

        // -i[H, rho] - (sum n nu + decay) rho
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                double re = 0.0, im = 0.0;
                for (int k = 0; k < n; ++k) {
                    const complex left = rho[k * n + b];
                    const complex right = rho[a * n + k];
                    re += h[a * n + k] * left.real() - right.real() * h[k * n + b];
                    im += h[a * n + k] * left.imag() - right.imag() * h[k * n + b];
                }
                const complex r = rho[a * n + b];
                const double g = damping + decay[a * n + b];
                out[a * n + b] = complex(im - g * r.real(), -re - g * r.imag());
            }
        }

        const auto occ = hier.index(o);
        for (int j = 0; j < n; ++j) {
            for (int t = 0; t < terms; ++t) {
                const int m = j * terms + t;
                // -i [V_j, rho_{n+e_m}]
                if (const auto up = hier.raise(o, m); up != Hierarchy::none) {
                    const complex* x = y + static_cast<std::size_t>(up) * nn;
                    for (int b = 0; b < n; ++b) {
                        const complex v = x[j * n + b];
                        out[j * n + b] += complex(v.imag(), -v.real());
                    }
                    for (int a = 0; a < n; ++a) {
                        const complex v = x[a * n + j];
                        out[a * n + j] += complex(-v.imag(), v.real());
                    }
                }
                // -i n_m (c_m V_j rho_{n-e_m} - c_m^* rho_{n-e_m} V_j)
                if (const auto down = hier.lower(o, m); down != Hierarchy::none) {
                    const complex* x = y + static_cast<std::size_t>(down) * nn;
                    const complex cm = static_cast<double>(occ[m]) * c_[m];
                    const complex left(cm.imag(), -cm.real());   // -i c
                    const complex right(cm.imag(), cm.real());   // +i c^*
                    for (int b = 0; b < n; ++b) out[j * n + b] += mul(left, x[j * n + b]);
                    for (int a = 0; a < n; ++a) out[a * n + j] += mul(right, x[a * n + j]);
                }
            }
        }
    }
}

template <int FixedN, bool Axpy>
void HeomModel::rhs_range_hermitian(const complex* y, complex* dy, const complex* base, double scale,
                                    std::size_t begin, std::size_t end) const {
    const int n = FixedN > 0 ? FixedN : n_;
    const int w = 2 * n;  // doubles per row, (re, im) interleaved
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const int terms = hierarchy_->terms_per_site();
    const Hierarchy& hier = *hierarchy_;
    const double* h = h_.data();
    const double* decay = decay_.data();
    const int max_depth = hier.max_depth();
    const double* yd = reinterpret_cast<const double*>(y);

    // P = H rho + raised rows of site j in row j + c-weighted lowered rows
    // of site j in row j; d rho = Z + Z^dagger - (damping + decay) rho with
    // Z = -i P.
    std::vector<double> z_dynamic;
    std::array<double, (FixedN > 0 ? 2 * FixedN * FixedN : 1)> z_fixed{};
    double* z = z_fixed.data();
    if constexpr (FixedN == 0) {
        z_dynamic.resize(2 * nn);
        z = z_dynamic.data();
    }

    for (std::size_t o = begin; o < end; ++o) {
        const double* rho = yd + 2 * o * nn;
        complex* out = dy + o * nn;
        const bool has_up = hier.depth(o) < max_depth;

        if constexpr (FixedN > 0) {
            using Block = Eigen::Matrix<double, FixedN, 2 * FixedN, Eigen::RowMajor>;
            using Square = Eigen::Matrix<double, FixedN, FixedN, Eigen::RowMajor>;
            Eigen::Map<Block>(z).noalias() = Eigen::Map<const Square>(h) * Eigen::Map<const Block>(rho);
        } else {
            for (int j = 0; j < n; ++j) {
                double* zj = z + j * w;
                for (int b = 0; b < w; ++b) zj[b] = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double hjk = h[j * n + k];
                    for (int b = 0; b < w; ++b) zj[b] += hjk * rho[k * w + b];
                }
            }
        }

        for (int j = 0; j < n; ++j) {
            double* zj = z + j * w;
            for (int t = 0; has_up && t < terms; ++t) {
                const double* x = yd + 2 * (static_cast<std::size_t>(hier.raise(o, j * terms + t)) * nn) + j * w;
                for (int b = 0; b < w; ++b) zj[b] += x[b];
            }
        }
        for (std::size_t l = lower_begin_[o]; l < lower_begin_[o + 1]; ++l) {
            const Lowering& low = lowerings_[l];
            double* zj = z + low.site * w;
            const double* x = yd + 2 * (static_cast<std::size_t>(low.target) * nn) + low.site * w;
            const double qr = low.weight.real(), qi = low.weight.imag();
            for (int b = 0; b < w; b += 2) {
                zj[b] += qr * x[b] - qi * x[b + 1];
                zj[b + 1] += qr * x[b + 1] + qi * x[b];
            }
        }

        // Z = -i P, so Z_ab + conj(Z_ba) = -i (P_ab - conj(P_ba)).
        const double damping = ado_damping_[o];
        // Only the upper triangle of `base` is read, before it is overwritten.
        const complex* own = Axpy ? base + o * nn : nullptr;
        for (int a = 0; a < n; ++a) {
            const double ga = damping + decay[a * n + a];
            double d = 2.0 * z[a * w + 2 * a + 1] - ga * rho[a * w + 2 * a];
            if constexpr (Axpy) d = own[a * n + a].real() + scale * d;
            out[a * n + a] = complex(d, 0.0);
            for (int b = a + 1; b < n; ++b) {
                const double g = damping + decay[a * n + b];
                double re = z[a * w + 2 * b + 1] + z[b * w + 2 * a + 1] - g * rho[a * w + 2 * b];
                double im = z[b * w + 2 * a] - z[a * w + 2 * b] - g * rho[a * w + 2 * b + 1];
                if constexpr (Axpy) {
                    re = own[a * n + b].real() + scale * re;
                    im = own[a * n + b].imag() + scale * im;
                }
                out[a * n + b] = complex(re, im);
                out[b * n + a] = complex(re, -im);
            }
        }
    }
}

void HeomModel::check_size(const Eigen::VectorXcd& y) const {
    const auto expected = static_cast<Eigen::Index>(hierarchy_->size()) * n_ * n_;
    if (y.size() != expected) {
        throw std::invalid_argument("HEOM state has " + std::to_string(y.size()) + " entries, expected " +
                                    std::to_string(expected));
    }
}

void HeomModel::rhs(const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) const {
    check_size(y);
    if (dydt.size() != y.size()) dydt.resize(y.size());
    const complex* in = y.data();
    complex* out = dydt.data();
    pool_->parallel_for(hierarchy_->size(), [&](std::size_t b, std::size_t e) {
        if (hermitian_) {
            switch (n_) {
                case 2: rhs_range_hermitian<2, false>(in, out, nullptr, 0.0, b, e); break;
                case 7: rhs_range_hermitian<7, false>(in, out, nullptr, 0.0, b, e); break;
                default: rhs_range_hermitian<0, false>(in, out, nullptr, 0.0, b, e); break;
            }
            return;
        }
        switch (n_) {
            case 2: rhs_range<2>(in, out, b, e); break;
            case 7: rhs_range<7>(in, out, b, e); break;
            default: rhs_range<0>(in, out, b, e); break;
        }
    });
}

void HeomModel::stage(const Eigen::VectorXcd& v, const Eigen::VectorXcd& base, double scale,
                      Eigen::VectorXcd& out) const {
    check_size(v);
    check_size(base);
    if (&out == &v) throw std::invalid_argument("HEOM stage output must not alias its input");
    if (!hermitian_) {
        rhs(v, scratch_);
        out = base + scale * scratch_;
        return;
    }
    if (out.size() != v.size()) out.resize(v.size());
    const complex* in = v.data();
    const complex* b0 = base.data();
    complex* dst = out.data();
    pool_->parallel_for(hierarchy_->size(), [&](std::size_t b, std::size_t e) {
        switch (n_) {
            case 2: rhs_range_hermitian<2, true>(in, dst, b0, scale, b, e); break;
            case 7: rhs_range_hermitian<7, true>(in, dst, b0, scale, b, e); break;
            default: rhs_range_hermitian<0, true>(in, dst, b0, scale, b, e); break;
        }
    });
}

HierarchyState heom_rhs(const HierarchyState& state, const ElectronicHamiltonian& h,
                        const std::vector<BathSpec>& site_baths, const TrappingSpec& trapping, bool terminator) {
    if (!state.hierarchy) throw std::invalid_argument("heom_rhs: state has no hierarchy");
    if (state.n_sites() != h.n_sites()) throw std::invalid_argument("heom_rhs: dimension mismatch");
    HeomOptions opts;
    opts.depth = state.hierarchy->max_depth();
    opts.terminator = terminator;
    opts.workers = 1;
    opts.hermitian_kernel = false;
    HeomModel model(h, site_baths, trapping, opts);
    if (model.hierarchy().n_modes() != state.hierarchy->n_modes()) {
        throw std::invalid_argument("heom_rhs: hierarchy layout does not match the baths");
    }
    HierarchyState out;
    out.hierarchy = state.hierarchy;
    model.rhs(state.data, out.data);
    return out;
}

Trajectory propagate_heom(const ElectronicHamiltonian& h, const std::vector<BathSpec>& site_baths,
                          const TrappingSpec& trapping, const SingleExcitationState& rho0,
                          const std::vector<double>& t_grid, const HeomOptions& heom,
                          const IntegratorOptions& integrator, const ValidityTolerances& validity) {
    const std::vector<double> grid = t_grid.empty() ? std::vector<double>{0.0} : t_grid;
    if (grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");

    HeomModel model(h, site_baths, trapping, heom);
    Trajectory traj;
    traj.solver = "heom";
    const Observer record = [&](std::size_t, double t, const StateVector& y) {
        record_checked(traj, t, model.physical(y), validity);
    };
    if (integrator.method == IntegrationMethod::rk4) {
        integrate_linear_rk4([&](const StateVector& v, const StateVector& base, double scale,
                                 StateVector& out) { model.stage(v, base, scale, out); },
                             model.initial_state(rho0).data, grid, integrator, record);
    } else {
        integrate([&](double, const StateVector& y, StateVector& dy) { model.rhs(y, dy); },
                  model.initial_state(rho0).data, grid, integrator, record);
    }
    return traj;
}

ConvergenceRow compare_trajectories(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trajectories have different lengths");
    ConvergenceRow row;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.times[k] != b.times[k]) throw std::invalid_argument("trajectories use different time grids");
        row.max_entanglement_deviation =
            std::max(row.max_entanglement_deviation, std::abs(a.reports[k].global_E - b.reports[k].global_E));
        const Eigen::VectorXd diff = a.states[k].populations() - b.states[k].populations();
        row.max_population_deviation = std::max(row.max_population_deviation, diff.cwiseAbs().maxCoeff());
    }
    return row;
}

std::vector<ConvergenceRow> convergence_scan(const ElectronicHamiltonian& h, const BathSpec& bath,
                                             const TrappingSpec& trapping, const SingleExcitationState& rho0,
                                             const std::vector<double>& t_grid, const std::vector<int>& depths,
                                             const std::vector<int>& k_values, const HeomOptions& heom,
                                             const IntegratorOptions& integrator) {
    if (depths.empty() || k_values.empty()) throw std::invalid_argument("convergence_scan needs depths and K values");

    std::vector<std::vector<HierarchySetting>> scans;
    if (depths.size() >= 2) {
        std::vector<HierarchySetting> s;
        for (int d : depths) s.push_back({d, k_values.front()});
        scans.push_back(std::move(s));
    }
    if (k_values.size() >= 2) {
        std::vector<HierarchySetting> s;
        for (int k : k_values) s.push_back({depths.back(), k});
        scans.push_back(std::move(s));
    }
    if (scans.empty()) throw std::invalid_argument("convergence_scan needs at least two settings");

    std::vector<ConvergenceRow> rows;
    for (const auto& scan : scans) {
        Trajectory previous;
        for (std::size_t i = 0; i < scan.size(); ++i) {
            BathSpec b = bath;
            b.n_matsubara = scan[i].n_matsubara;
            HeomOptions opts = heom;
            opts.depth = scan[i].depth;
            Trajectory current = propagate_heom(h, uniform_baths(b, h.n_sites()), trapping, rho0, t_grid, opts,
                                                integrator);
            if (i > 0) {
                ConvergenceRow row = compare_trajectories(previous, current);
                row.from = scan[i - 1];
                row.to = scan[i];
                rows.push_back(row);
            }
            previous = std::move(current);
        }
    }
    return rows;
}

}  // namespace excitonium
