// constraint.hpp -- clock+system kinematics, physical projector, group averaging

#pragma once

#include "trinity/clock.hpp"
#include "trinity/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinity {

struct EmptyPhysicalSpace : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// guard for dense kinematical operators; large scenarios use state-vector paths instead
inline constexpr Index dense_dim_limit = 4096;

struct ConstraintModel {
    ClockSystem clock;
    Matrix h_s;                // system Hamiltonian
    SpectralDecomposition sys; // its eigensystem
    Index dim_c{0}, dim_s{0}, dim{0};

    double tol_match{1e-9};
    std::vector<std::pair<Index, Index>> matched_pairs; // (clock level j, system level m), eps_j + E_m = 0
    std::vector<double> sigma_sc;                       // matched system energies, deduplicated
    bool empty_physical{false};

    Matrix p_phys;   // projector onto the constraint kernel, kinematical dims
    Matrix pi_sigma; // system-space projector onto matched energies

    std::vector<double> omegas;              // constraint eigenvalues eps_j + E_m, flat clock-major index
    std::vector<std::vector<Index>> omega_groups; // flat indices grouped by equal omega
    std::vector<Index> omega_group_of;            // group id per flat index

    double clock_energy(Index j) const { return clock.energy(j); }
    double system_energy(Index m) const { return sys.eigenvalues(m); }
    Index flat(Index j, Index m) const { return j * dim_s + m; }
};

// ---- construction ---------------------------------------------------------------

inline ConstraintModel build_model(const ClockSystem& clock, const Matrix& h_s,
                                   double tol_match = 1e-9) {
    ConstraintModel m;
    m.clock = clock;
    m.h_s = h_s;
    m.dim_c = clock.dim;
    m.dim_s = h_s.rows();
    m.dim = m.dim_c * m.dim_s;
    m.tol_match = tol_match;
    if (m.dim > dense_dim_limit)
        throw std::invalid_argument("build_model: kinematical dimension exceeds dense-operator guard");
    m.sys = eig(h_s);

    for (Index j = 0; j < m.dim_c; ++j)
        for (Index s = 0; s < m.dim_s; ++s)
            if (std::abs(clock.energy(j) + m.sys.eigenvalues(s)) <= tol_match)
                m.matched_pairs.emplace_back(j, s);
    for (const auto& [j, s] : m.matched_pairs) {
        const double e = m.sys.eigenvalues(s);
        bool seen = false;
        for (const double known : m.sigma_sc)
            if (std::abs(known - e) <= tol_match) { seen = true; break; }
        if (!seen) m.sigma_sc.push_back(e);
    }
    m.empty_physical = m.matched_pairs.empty();

    m.p_phys = Matrix::Zero(m.dim, m.dim);
    m.pi_sigma = Matrix::Zero(m.dim_s, m.dim_s);
    std::vector<bool> sys_done(static_cast<std::size_t>(m.dim_s), false);
    for (const auto& [j, s] : m.matched_pairs) {
        const Vector v = tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s)));
        m.p_phys += projector_onto(v);
        if (!sys_done[static_cast<std::size_t>(s)]) {
            m.pi_sigma += projector_onto(Vector(m.sys.eigenvectors.col(s)));
            sys_done[static_cast<std::size_t>(s)] = true;
        }
    }

    // constraint spectrum, grouped for dephasing
    m.omegas.resize(static_cast<std::size_t>(m.dim));
    for (Index j = 0; j < m.dim_c; ++j)
        for (Index s = 0; s < m.dim_s; ++s)
            m.omegas[static_cast<std::size_t>(m.flat(j, s))] = clock.energy(j) + m.sys.eigenvalues(s);
    std::vector<Index> order(static_cast<std::size_t>(m.dim));
    for (Index i = 0; i < m.dim; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return m.omegas[static_cast<std::size_t>(a)] < m.omegas[static_cast<std::size_t>(b)];
    });
    const double scale = std::max(1.0, std::abs(m.omegas[static_cast<std::size_t>(order.back())]));
    m.omega_group_of.resize(static_cast<std::size_t>(m.dim));
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || m.omegas[static_cast<std::size_t>(order[i])] -
                              m.omegas[static_cast<std::size_t>(order[i - 1])] >
                          1e-9 * scale)
            m.omega_groups.emplace_back();
        m.omega_groups.back().push_back(order[i]);
        m.omega_group_of[static_cast<std::size_t>(order[i])] =
            static_cast<Index>(m.omega_groups.size()) - 1;
    }
    return m;
}

// ---- kinematical operators ---------------------------------------------------------

inline Matrix constraint_operator(const ConstraintModel& m) {
    return tensor(m.clock.h_c, Matrix::Identity(m.dim_s, m.dim_s)) +
           tensor(Matrix::Identity(m.dim_c, m.dim_c), m.h_s);
}

// e^{i s C_H} built factorwise, no dense eigensolve
inline Matrix evolve_constraint(const ConstraintModel& m, double s) {
    return tensor(evolve(m.clock.h_c, -s), evolve(m.h_s, -s));
}

inline Matrix u_system(const ConstraintModel& m, double t) {
    return evolve(m.sys, t);
}

// ---- physical-space operations --------------------------------------------------

inline void require_physical_space(const ConstraintModel& m, const char* who) {
    if (m.empty_physical)
        throw EmptyPhysicalSpace(std::string(who) + ": constraint kernel is empty for this model");
}

inline Complex physical_inner(const ConstraintModel& m, const Vector& phi, const Vector& psi) {
    require_physical_space(m, "physical_inner");
    return (phi.adjoint() * m.p_phys * psi)(0);
}

inline Vector project_physical(const ConstraintModel& m, const Vector& psi) {
    require_physical_space(m, "project_physical");
    return m.p_phys * psi;
}

inline Vector random_physical_state(const ConstraintModel& m, std::mt19937_64& rng) {
    require_physical_space(m, "random_physical_state");
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vector v = m.p_phys * random_state(m.dim, rng);
        const double n = v.norm();
        if (n > 1e-8) return v / n;
    }
    throw std::runtime_error("random_physical_state: projector annihilated every draw");
}

inline double validate_physical(const ConstraintModel& m, const Vector& psi, double tol = 1e-9) {
    require_physical_space(m, "validate_physical");
    const double defect = (psi - m.p_phys * psi).norm();
    if (defect > tol * std::max(1.0, psi.norm()))
        throw std::invalid_argument("validate_physical: state has components outside the constraint kernel");
    return defect;
}

// ---- group averaging ------------------------------------------------------------

// Compact-regime quadrature (1/N) sum_k U(s_k) A U(s_k)^dag over one group period,
// exact once N exceeds the integer frequency range of the constraint spectrum
inline Matrix group_average(const ConstraintModel& m, const Matrix& a, Index n_points = 0) {
    if (m.clock.spec.regime != ClockRegime::Compact)
        throw std::invalid_argument("group_average: quadrature path needs the Compact regime");
    if (a.rows() != m.dim || a.cols() != m.dim)
        throw std::invalid_argument("group_average: operator dimension mismatch");

    const double period = m.clock.period();
    long lo = 0, hi = 0;
    for (const double w : m.omegas) {
        const double q = w * period / (2.0 * M_PI);
        const long r = std::lround(q);
        if (std::abs(q - r) > 1e-6)
            throw std::invalid_argument("group_average: constraint spectrum off the periodicity lattice");
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (n_points <= 0) n_points = static_cast<Index>(2 * (hi - lo) + 1);

    Matrix acc = Matrix::Zero(m.dim, m.dim);
    for (Index k = 0; k < n_points; ++k) {
        const double s = period * static_cast<double>(k) / static_cast<double>(n_points);
        const Matrix u = evolve_constraint(m, s);
        acc += u * a * u.adjoint();
    }
    return acc / static_cast<double>(n_points);
}

// ---- system-side projector ----------------------------------------------------------

inline Matrix system_projector(const ConstraintModel& m) { return m.pi_sigma; }

// residual of mu * contour-integral dt chi*(t) U_S^dag(t) = Pi_sigma with chi(t) = <t=0|t>
inline double system_projector_identity_defect(const ConstraintModel& m) {
    const ClockSystem& c = m.clock;
    Matrix lhs = Matrix::Zero(m.dim_s, m.dim_s);
    for (Index s = 0; s < m.dim_s; ++s) {
        Complex amp = 0.0;
        for (Index j = 0; j < m.dim_c; ++j)
            amp += c.weight * c.weight *
                   poly_phase_integral(0, c.energy(j) + m.sys.eigenvalues(s), c.t_start, c.t_end);
        const Vector v = m.sys.eigenvectors.col(s);
        lhs += c.mu * amp * (v * v.adjoint());
    }
    return max_abs(lhs - m.pi_sigma);
}

// ---- trivialization ---------------------------------------------------------------

inline Index find_clock_level(const ClockSystem& c, double e, double tol = 1e-9) {
    for (Index j = 0; j < c.dim; ++j)
        if (std::abs(c.energy(j) - e) <= tol * std::max(1.0, std::abs(e))) return j;
    return -1;
}

// smallest clock energy participating in a matched pair
inline double default_eps_star(const ConstraintModel& m) {
    require_physical_space(m, "default_eps_star");
    double best = m.clock.energy(m.matched_pairs.front().first);
    for (const auto& [j, s] : m.matched_pairs) best = std::min(best, m.clock.energy(j));
    return best;
}

// T = mu * contour-integral dt |t><t| (x) e^{i t (H_S + eps*)}; on the energy lattice this
// shifts each system sector's clock ladder, |eps_k, E_m> -> e^{i(g_l - g_k)} |eps_l, E_m>
// with eps_l = eps_k + E_m + eps*, annihilating components that shift off the grid
inline Matrix trivialization_matrix(const ConstraintModel& m, double eps_star) {
    Matrix out = Matrix::Zero(m.dim, m.dim);
    for (Index s = 0; s < m.dim_s; ++s) {
        Matrix shift = Matrix::Zero(m.dim_c, m.dim_c);
        for (Index k = 0; k < m.dim_c; ++k) {
            const Index l =
                find_clock_level(m.clock, m.clock.energy(k) + m.sys.eigenvalues(s) + eps_star);
            if (l >= 0)
                shift(l, k) = m.clock.phase_factors(l) * std::conj(m.clock.phase_factors(k));
        }
        const Vector v = m.sys.eigenvectors.col(s);
        out += tensor(shift, Matrix(v * v.adjoint()));
    }
    return out;
}

} // namespace trinity
