// clock.hpp -- covariant clock POVMs: clock states, effects, time-operator moments, phase freedom

#pragma once

#include "trinity/linalg.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace trinity {

enum class ClockRegime { Compact, ContinuumApprox };

struct ClockSpec {
    ClockRegime regime{ClockRegime::Compact};
    std::vector<double> energies;  // strictly increasing
    std::vector<double> phases;    // g(eps_j); empty means identically zero
    double t_max{0.0};             // Compact group period
    double window{0.0};            // ContinuumApprox half-window; 0 selects the grid-conjugate pi/spacing
};

struct ClockSystem {
    ClockSpec spec;
    Index dim{0};
    double mu{0.0};       // measure constant: 1/t_max (Compact), 1/2pi (ContinuumApprox)
    double weight{1.0};   // per-energy amplitude; sqrt(grid spacing) in ContinuumApprox
    double t_start{0.0};
    double t_end{0.0};
    double phi{0.0};      // Compact periodicity phase, U_C(t_max) = e^{i phi} I
    Matrix h_c;           // diag(energies)
    Vector phase_factors; // e^{i g_j}

    double period() const { return t_end - t_start; }
    double energy(Index j) const { return spec.energies[static_cast<std::size_t>(j)]; }
};

// ---- oscillatory integrals ---------------------------------------------------
// I_n(omega; a, b) = int_a^b t^n e^{i omega t} dt, exact up to roundoff.
// Small |omega t|: Taylor series in (i omega). Large: integration-by-parts recursion,
// whose error amplification n!/|omega|^n stays benign once |omega|*max|t| > ~10.

inline Complex poly_phase_integral(int n, double omega, double a, double b) {
    if (n < 0) throw std::invalid_argument("poly_phase_integral: n must be >= 0");
    if (a == b) return 0.0;
    const double tscale = std::max(std::abs(a), std::abs(b));

    if (std::abs(omega) * tscale <= 10.0) {
        // sum_m (i omega)^m / m! * (b^{n+m+1} - a^{n+m+1}) / (n+m+1)
        // symmetric intervals zero out every other term, so stop only after
        // two consecutive terms fall below roundoff of the peak term
        Complex acc = 0.0;
        Complex coeff = 1.0; // (i omega)^m / m!
        double pa = std::pow(a, n + 1), pb = std::pow(b, n + 1);
        double peak = 0.0;
        int tiny_run = 0;
        for (int m = 0; m < 400; ++m) {
            const Complex term = coeff * (pb - pa) / static_cast<double>(n + m + 1);
            acc += term;
            peak = std::max(peak, std::abs(term));
            tiny_run = std::abs(term) <= 1e-17 * (peak + 1e-300) ? tiny_run + 1 : 0;
            if (tiny_run >= 2 && static_cast<double>(m) > std::abs(omega) * tscale)
                return acc;
            coeff *= iu * omega / static_cast<double>(m + 1);
            pa *= a;
            pb *= b;
        }
        throw std::runtime_error("poly_phase_integral: series did not converge");
    }

    const Complex ea = std::exp(iu * omega * a), eb = std::exp(iu * omega * b);
    const Complex inv = 1.0 / (iu * omega);
    Complex ik = inv * (eb - ea); // I_0
    double pa = 1.0, pb = 1.0;    // t^k at the endpoints
    for (int k = 1; k <= n; ++k) {
        pa *= a;
        pb *= b;
        ik = inv * (pb * eb - pa * ea) - static_cast<double>(k) * inv * ik;
    }
    return ik;
}

// ---- construction ---------------------------------------------------------------

inline ClockSystem build_clock(const ClockSpec& spec) {
    const std::size_t d = spec.energies.size();
    if (d == 0) throw std::invalid_argument("build_clock: empty energy list");
    for (std::size_t j = 1; j < d; ++j)
        if (!(spec.energies[j] > spec.energies[j - 1] + 1e-12))
            throw std::invalid_argument("build_clock: degenerate or unsorted clock energies");
    if (!spec.phases.empty() && spec.phases.size() != d)
        throw std::invalid_argument("build_clock: phase list length mismatch");

    ClockSystem c;
    c.spec = spec;
    c.dim = static_cast<Index>(d);

    if (spec.regime == ClockRegime::Compact) {
        if (!(spec.t_max > 0.0)) throw std::invalid_argument("build_clock: t_max must be > 0");
        const Complex ref = std::exp(iu * spec.energies[0] * spec.t_max);
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(std::exp(iu * spec.energies[j] * spec.t_max) - ref) > 1e-9)
                throw std::invalid_argument(
                    "build_clock: compactness condition violated (energy*t_max not on 2*pi lattice)");
        c.phi = std::arg(ref);
        if (c.phi < 0.0) c.phi += 2.0 * M_PI;
        c.mu = 1.0 / spec.t_max;
        c.weight = 1.0;
        c.t_start = 0.0;
        c.t_end = spec.t_max;
    } else {
        if (d < 2) throw std::invalid_argument("build_clock: ContinuumApprox grid needs >= 2 energies");
        const double step = spec.energies[1] - spec.energies[0];
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs((spec.energies[j] - spec.energies[j - 1]) - step) > 1e-9 * std::max(1.0, step))
                throw std::invalid_argument("build_clock: ContinuumApprox grid spacing not uniform");
        const double t_win = spec.window > 0.0 ? spec.window : M_PI / step;
        c.mu = 1.0 / (2.0 * M_PI);
        c.weight = std::sqrt(step);
        c.t_start = -t_win;
        c.t_end = +t_win;
    }

    c.h_c = Matrix::Zero(c.dim, c.dim);
    c.phase_factors = Vector::Ones(c.dim);
    for (Index j = 0; j < c.dim; ++j) {
        c.h_c(j, j) = spec.energies[static_cast<std::size_t>(j)];
        if (!spec.phases.empty()) c.phase_factors(j) = std::exp(iu * spec.phases[static_cast<std::size_t>(j)]);
    }
    return c;
}

// |t> = sum_j w e^{i g_j} e^{-i eps_j t} |eps_j>, unnormalized
inline Vector clock_state(const ClockSystem& c, double t) {
    Vector v(c.dim);
    for (Index j = 0; j < c.dim; ++j)
        v(j) = c.weight * c.phase_factors(j) * std::exp(-iu * c.energy(j) * t);
    return v;
}

// ---- integrated operators ----------------------------------------------------

namespace detail {

// mu * int_a^b (t - shift)^n |t><t| dt assembled entrywise from closed-form integrals
inline Matrix clock_time_integral(const ClockSystem& c, int n, double a, double b, double shift = 0.0) {
    Matrix out(c.dim, c.dim);
    const double w2 = c.weight * c.weight;
    for (Index j = 0; j < c.dim; ++j) {
        for (Index k = j; k < c.dim; ++k) {
            const double omega = c.energy(k) - c.energy(j);
            const Complex base = poly_phase_integral(n, omega, a - shift, b - shift)
                                 * std::exp(iu * omega * shift);
            const Complex phase = c.phase_factors(j) * std::conj(c.phase_factors(k));
            out(j, k) = c.mu * w2 * phase * base;
            out(k, j) = std::conj(out(j, k));
        }
    }
    return out;
}

} // namespace detail

// E_T([a,b]) = mu int_a^b dt |t><t|
inline Matrix effect(const ClockSystem& c, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("effect: interval reversed");
    if (a < c.t_start - 1e-9 || b > c.t_end + 1e-9)
        throw std::invalid_argument("effect: interval outside clock group domain");
    return detail::clock_time_integral(c, 0, a, b);
}

// T^(n) = mu * contour-integral over G of t^n |t><t| dt
inline Matrix moment_operator(const ClockSystem& c, int n) {
    return detail::clock_time_integral(c, n, c.t_start, c.t_end);
}

// mu * integral over G of (t - tau)^n |t><t| dt (series diagnostics)
inline Matrix shifted_moment_operator(const ClockSystem& c, int n, double tau) {
    return detail::clock_time_integral(c, n, c.t_start, c.t_end, tau);
}

// ---- defect diagnostics ----------------------------------------------------------

inline double resolution_defect(const ClockSystem& c) {
    return max_abs(moment_operator(c, 0) - Matrix::Identity(c.dim, c.dim));
}

// [T,H_C] - i(I - |t_max><t_max|) in Compact; [T,H_C] - iI in ContinuumApprox
inline Matrix ccr_defect(const ClockSystem& c) {
    const Matrix t_op = moment_operator(c, 1);
    Matrix target = iu * Matrix::Identity(c.dim, c.dim);
    if (c.spec.regime == ClockRegime::Compact) {
        const Vector edge = clock_state(c, c.t_end);
        target -= iu * (c.mu * c.period()) * projector_onto(edge);
    }
    return comm(t_op, c.h_c) - target;
}

// exact finite identity with the window-boundary term, valid in both regimes
inline double ccr_boundary_identity_defect(const ClockSystem& c) {
    const Matrix t_op = moment_operator(c, 1);
    const Vector edge = clock_state(c, c.t_end);
    const Matrix target = iu * (Matrix::Identity(c.dim, c.dim)
                                - (c.mu * c.period()) * projector_onto(edge));
    return max_abs(comm(t_op, c.h_c) - target);
}

// || E_T(X + t) - U_C(t) E_T(X) U_C^dag(t) ||
inline double covariance_defect(const ClockSystem& c, double a, double b, double t) {
    if (!(a <= b)) throw std::invalid_argument("covariance_defect: interval reversed");
    if (c.spec.regime == ClockRegime::ContinuumApprox &&
        (a < c.t_start - 1e-9 || b + t > c.t_end + 1e-9 || a + t < c.t_start - 1e-9))
        throw std::invalid_argument("covariance_defect: shifted interval outside window");
    // Compact integrands are periodic on the energy lattice, so the literal
    // interval [a+t, b+t] already equals its wrapped decomposition
    const Matrix lhs = detail::clock_time_integral(c, 0, a + t, b + t);
    const Matrix u = evolve(c.h_c, t);
    return spectral_norm(lhs - u * detail::clock_time_integral(c, 0, a, b) * u.adjoint());
}

inline double state_covariance_defect(const ClockSystem& c, double t, double s) {
    const Matrix u = evolve(c.h_c, s);
    return (u * clock_state(c, t) - clock_state(c, t + s)).norm();
}

// Compact monotonicity: U_C(s) T U_C^dag(s) = T - sI + period * E_T([t_start, t_start+s])
inline double monotonicity_defect(const ClockSystem& c, double s) {
    if (c.spec.regime != ClockRegime::Compact)
        throw std::invalid_argument("monotonicity_defect: operator identity is Compact-regime only");
    if (!(s >= 0.0 && s < c.period())) throw std::invalid_argument("monotonicity_defect: need 0 <= s < period");
    const Matrix t_op = moment_operator(c, 1);
    const Matrix u = evolve(c.h_c, s);
    const Matrix rhs = t_op - s * Matrix::Identity(c.dim, c.dim)
                       + c.period() * effect(c, c.t_start, c.t_start + s);
    return max_abs(u * t_op * u.adjoint() - rhs);
}

// || |eps_j> - w * mu * contour-integral e^{-i g_j} e^{i eps_j t} |t> dt ||, max over j
inline double fourier_defect(const ClockSystem& c) {
    double worst = 0.0;
    for (Index j = 0; j < c.dim; ++j) {
        Vector rec = Vector::Zero(c.dim);
        for (Index k = 0; k < c.dim; ++k) {
            const Complex overlap = poly_phase_integral(0, c.energy(j) - c.energy(k), c.t_start, c.t_end);
            rec(k) = c.weight * c.weight * c.mu * c.phase_factors(k) * std::conj(c.phase_factors(j)) * overlap;
        }
        worst = std::max(worst, (rec - unit_vector(c.dim, j)).norm());
    }
    return worst;
}

// ---- wavepackets ------------------------------------------------------------------

// Gaussian-in-energy packet centered mid-grid, time-localized near t0, normalized
inline Vector gaussian_packet(const ClockSystem& c, double sigma_eps, double t0) {
    if (!(sigma_eps > 0.0)) throw std::invalid_argument("gaussian_packet: sigma must be > 0");
    const double mean = 0.5 * (c.energy(0) + c.energy(c.dim - 1));
    Vector v(c.dim);
    for (Index j = 0; j < c.dim; ++j) {
        const double de = c.energy(j) - mean;
        v(j) = std::exp(-de * de / (4.0 * sigma_eps * sigma_eps)) * std::exp(-iu * c.energy(j) * t0);
    }
    return v / v.norm();
}

inline double mean_time(const ClockSystem& c, const Vector& psi) {
    const Matrix t_op = moment_operator(c, 1);
    return (psi.adjoint() * t_op * psi)(0).real() / psi.squaredNorm();
}

// d<T>/ds = 1 along clock orbits of interior packets; returns |<T>_{U(s)psi} - <T>_psi - s|
inline double packet_monotonicity_defect(const ClockSystem& c, const Vector& psi, double s) {
    const Vector evolved = evolve(c.h_c, s) * psi;
    return std::abs(mean_time(c, evolved) - mean_time(c, psi) - s);
}

// ---- phase freedom -----------------------------------------------------------------

inline ClockSystem reparametrize(const ClockSystem& c, const std::function<double(double)>& g_new) {
    ClockSpec spec = c.spec;
    spec.phases.resize(static_cast<std::size_t>(c.dim));
    for (Index j = 0; j < c.dim; ++j) spec.phases[static_cast<std::size_t>(j)] = g_new(c.energy(j));
    return build_clock(spec);
}

struct PhaseFreedomCheck {
    double packet_defect{0.0};  // max residual over an interior Gaussian packet family
    double full_defect{0.0};    // full-matrix norm; boundary-dominated, diagnostic only
};

// residual of e^{i g(H_C)} T e^{-i g(H_C)} = T + g'(H_C)
inline PhaseFreedomCheck check_phase_freedom(const ClockSystem& c,
                                             const std::function<double(double)>& g,
                                             const std::function<double(double)>& gprime) {
    const Matrix t_op = moment_operator(c, 1);
    Vector ug(c.dim);
    Matrix hdiag = Matrix::Zero(c.dim, c.dim);
    for (Index j = 0; j < c.dim; ++j) {
        ug(j) = std::exp(iu * g(c.energy(j)));
        hdiag(j, j) = gprime(c.energy(j));
    }
    const Matrix conj_t = ug.asDiagonal() * t_op * ug.asDiagonal().toDenseMatrix().adjoint();
    const Matrix defect = conj_t - t_op - hdiag;

    PhaseFreedomCheck out;
    out.full_defect = spectral_norm(defect);
    const double span = c.energy(c.dim - 1) - c.energy(0);
    const double sigma = span > 0.0 ? span / 20.0 : 1.0;
    const double third = c.period() / 6.0; // t0 in {0, +-T_win/3} for a symmetric window
    const double mid = 0.5 * (c.t_start + c.t_end);
    for (const double t0 : {mid, mid - third, mid + third}) {
        const Vector psi = gaussian_packet(c, sigma, t0);
        out.packet_defect = std::max(out.packet_defect, (defect * psi).norm());
    }
    return out;
}

} // namespace trinity
