// reductions.hpp -- conditional and symmetry reductions, encodings, picture-equivalence checks

#pragma once

#include "trinity/relobs.hpp"
#include "trinity/report.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trinity {

enum class Picture { Schrodinger, Heisenberg };

struct ReducedState {
    Picture picture{Picture::Schrodinger};
    double tau{0.0}; // clock reading; meaningful in the Schrodinger picture
    Vector vec;      // system-factor state supported on the matched energy block
};

// ---- conditional (clock-reading) reduction ---------------------------------------

// (<tau| (x) I_S) as a dim_s x dim matrix
inline Matrix pw_reduction_matrix(const ConstraintModel& m, double tau) {
    const Vector ct = clock_state(m.clock, tau);
    return tensor(Matrix(ct), Matrix::Identity(m.dim_s, m.dim_s)).adjoint();
}

inline ReducedState pw_reduce(const ConstraintModel& m, double tau, const Vector& psi) {
    validate_physical(m, psi);
    return ReducedState{Picture::Schrodinger, tau, pw_reduction_matrix(m, tau) * psi};
}

// projector-dressed insertion at clock reading tau; right inverse of the reduction
inline Matrix pw_inverse_matrix(const ConstraintModel& m, double tau) {
    const double w2 = m.clock.weight * m.clock.weight;
    return m.p_phys * tensor(Matrix(clock_state(m.clock, tau)),
                             Matrix::Identity(m.dim_s, m.dim_s)) /
           w2;
}

inline Vector pw_inverse(const ConstraintModel& m, double tau, const Vector& phi) {
    return pw_inverse_matrix(m, tau) * phi;
}

// inner product evaluated on conditioned states; the per-energy amplitude weight
// drops out so this reproduces the physical inner product at every tau
inline Complex pw_inner(const ConstraintModel& m, double tau, const Vector& phi,
                        const Vector& psi) {
    const Vector a = pw_reduce(m, tau, phi).vec;
    const Vector b = pw_reduce(m, tau, psi).vec;
    return a.dot(b) / (m.clock.weight * m.clock.weight);
}

// ---- trivialization -----------------------------------------------------------------

struct TrivializationContext {
    double eps_star{0.0};
    Matrix t_mat; // ladder-shift closed form of the clock-conditioned evolution integral
    Matrix t_inv; // reverse shift; left inverse on the constraint kernel
};

inline TrivializationContext trivialize(const ConstraintModel& m, double eps_star) {
    if (find_clock_level(m.clock, eps_star, m.tol_match) < 0)
        throw std::invalid_argument("trivialize: eps_star is not a clock energy");
    TrivializationContext ctx;
    ctx.eps_star = eps_star;
    ctx.t_mat = trivialization_matrix(m, eps_star);
    // the reverse shift is exactly the adjoint, sector by sector
    ctx.t_inv = ctx.t_mat.adjoint();
    return ctx;
}

inline TrivializationContext trivialize(const ConstraintModel& m) {
    return trivialize(m, default_eps_star(m));
}

inline Vector apply_trivialization(const TrivializationContext& ctx, const Vector& psi) {
    return ctx.t_mat * psi;
}

inline double trivialization_left_inverse_defect(const ConstraintModel& m,
                                                 const TrivializationContext& ctx) {
    const Matrix id = Matrix::Identity(m.dim, m.dim);
    return spectral_norm((ctx.t_inv * ctx.t_mat - id) * m.p_phys);
}

// constraint conjugates to (H_C - eps*) (x) I on the trivialized physical subspace
inline double trivialization_conjugation_defect(const ConstraintModel& m,
                                                const TrivializationContext& ctx) {
    const Matrix conj = ctx.t_mat * constraint_operator(m) * ctx.t_inv;
    const Matrix target =
        tensor(Matrix(m.clock.h_c - ctx.eps_star * Matrix::Identity(m.dim_c, m.dim_c)),
               Matrix::Identity(m.dim_s, m.dim_s));
    return spectral_norm((conj - target) * (ctx.t_mat * m.p_phys * ctx.t_inv));
}

// ratio of second to first singular value across the clock|system split
inline double trivialized_schmidt_ratio(const ConstraintModel& m,
                                        const TrivializationContext& ctx, const Vector& psi) {
    const RealVector sv =
        schmidt_coefficients(apply_trivialization(ctx, psi), m.dim_c, m.dim_s);
    if (sv.size() < 2 || sv(0) <= 0.0) return 0.0;
    return sv(1) / sv(0);
}

// ---- symmetry reduction --------------------------------------------------------------

inline Vector sym_reduce_at(const ConstraintModel& m, const TrivializationContext& ctx,
                            const Vector& psi, double tau) {
    validate_physical(m, psi);
    return std::exp(-iu * ctx.eps_star * tau) *
           (pw_reduction_matrix(m, tau) * apply_trivialization(ctx, psi));
}

inline ReducedState sym_reduce(const ConstraintModel& m, const TrivializationContext& ctx,
                               const Vector& psi) {
    return ReducedState{Picture::Heisenberg, 0.0, sym_reduce_at(m, ctx, psi, 0.0)};
}

inline Matrix sym_reduction_matrix(const ConstraintModel& m, const TrivializationContext& ctx) {
    return pw_reduction_matrix(m, 0.0) * ctx.t_mat;
}

inline Matrix sym_inverse_matrix(const ConstraintModel& m, const TrivializationContext& ctx) {
    const double w2 = m.clock.weight * m.clock.weight;
    return m.p_phys * ctx.t_inv *
           tensor(Matrix(clock_state(m.clock, 0.0)), Matrix::Identity(m.dim_s, m.dim_s)) / w2;
}

inline Vector sym_inverse(const ConstraintModel& m, const TrivializationContext& ctx,
                          const Vector& phi) {
    return sym_inverse_matrix(m, ctx) * phi;
}

// ---- observable encodings --------------------------------------------------------------

inline Matrix heisenberg_op(const ConstraintModel& m, const Matrix& f, double tau) {
    const Matrix u = u_system(m, tau);
    return u.adjoint() * f * u;
}

// dress a system operator by conditioning the kernel projector on clock reading tau
inline Matrix encode_S(const ConstraintModel& m, const Matrix& f, double tau) {
    require_projected(m, f, "encode_S");
    const Vector ct = clock_state(m.clock, tau);
    const double w2 = m.clock.weight * m.clock.weight;
    return m.p_phys * tensor(Matrix(ct * ct.adjoint()), f) * m.p_phys / w2;
}

// dress a Heisenberg-picture operator through the trivialization
inline Matrix encode_H(const ConstraintModel& m, const TrivializationContext& ctx,
                       const Matrix& f_heis) {
    require_projected(m, f_heis, "encode_H");
    const Vector ct = clock_state(m.clock, 0.0);
    const double w2 = m.clock.weight * m.clock.weight;
    return m.p_phys * ctx.t_inv * tensor(Matrix(ct * ct.adjoint()), f_heis) * ctx.t_mat *
           m.p_phys / w2;
}

// push a kinematical operator down into the system factor at clock reading tau
inline Matrix reduce_observable_S(const ConstraintModel& m, const Matrix& big, double tau) {
    return pw_reduction_matrix(m, tau) * big * pw_inverse_matrix(m, tau);
}

// ---- dynamics diagnostics ---------------------------------------------------------------

// residual of the conditioned-state evolution law under a central difference
inline double schrodinger_residual(const ConstraintModel& m, const Vector& psi, double tau,
                                   double delta) {
    const Vector plus = pw_reduce(m, tau + delta, psi).vec;
    const Vector minus = pw_reduce(m, tau - delta, psi).vec;
    const Vector mid = pw_reduce(m, tau, psi).vec;
    return ((plus - minus) / (2.0 * delta) + iu * (m.h_s * mid)).norm();
}

// fourth-order stencil: Richardson combination of two central differences
inline double schrodinger_residual_richardson(const ConstraintModel& m, const Vector& psi,
                                              double tau, double delta) {
    const Vector d1 = pw_reduce(m, tau + delta, psi).vec - pw_reduce(m, tau - delta, psi).vec;
    const Vector d2 =
        pw_reduce(m, tau + 2.0 * delta, psi).vec - pw_reduce(m, tau - 2.0 * delta, psi).vec;
    const Vector mid = pw_reduce(m, tau, psi).vec;
    return ((8.0 * d1 - d2) / (12.0 * delta) + iu * (m.h_s * mid)).norm();
}

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("loglog_slope: need matching samples, at least two");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(xs.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> default_tau_grid(const ConstraintModel& m, int n = 24) {
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        taus.push_back(m.clock.t_start +
                       m.clock.period() * static_cast<double>(k) / static_cast<double>(n));
    return taus;
}

// ---- picture-equivalence verification -----------------------------------------------------

using NamedOperator = std::pair<std::string, Matrix>;

inline Report verify_trinity(const ConstraintModel& m, const std::vector<NamedOperator>& obs,
                             const std::vector<double>& taus, std::uint64_t seed = 12345) {
    Report rep;
    rep.title = "trinity";
    if (obs.empty()) return rep;
    if (taus.empty()) throw std::invalid_argument("verify_trinity: empty tau grid");
    require_physical_space(m, "verify_trinity");

    std::mt19937_64 rng(seed);
    const Vector psi = random_physical_state(m, rng);
    const Vector phi = random_physical_state(m, rng);
    const double w2 = m.clock.weight * m.clock.weight;
    const TrivializationContext ctx = trivialize(m);

    // state-level rows
    {
        double d_inner = 0.0, d_isom = 0.0, d_round = 0.0, d_link = 0.0;
        const Complex pip_pp = physical_inner(m, psi, psi);
        const Complex pip_fp = physical_inner(m, phi, psi);
        const Vector heis = sym_reduce(m, ctx, psi).vec;
        for (const double tau : taus) {
            d_inner = std::max(d_inner, std::abs(pw_inner(m, tau, phi, psi) - pip_fp));
            const ReducedState red = pw_reduce(m, tau, psi);
            d_isom = std::max(d_isom, std::abs(red.vec.squaredNorm() / w2 - pip_pp.real()));
            d_round = std::max(d_round, (pw_inverse(m, tau, red.vec) - psi).norm());
            d_link = std::max(d_link, (red.vec - u_system(m, tau) * heis).norm());
        }
        d_isom = std::max(d_isom, std::abs(heis.squaredNorm() / w2 - pip_pp.real()));
        rep.add("inner-product-tau-independence", "Cor 1 / Eq. PWinnerproduct", d_inner, 1e-10);
        rep.add("reduction-isometry", "Cor 2", d_isom, 1e-10);
        rep.add("conditional-round-trip", "Eq. check", d_round, 1e-10);
        rep.add("schrodinger-heisenberg-link", "Eq. rsp2", d_link, 1e-10);
    }
    {
        double d_tau = 0.0, d_round = 0.0;
        const Vector ref = sym_reduce_at(m, ctx, psi, taus.front());
        for (const double tau : taus)
            d_tau = std::max(d_tau, (sym_reduce_at(m, ctx, psi, tau) - ref).norm());
        d_round = (sym_inverse(m, ctx, sym_reduce(m, ctx, psi).vec) - psi).norm();
        const Vector onto = m.pi_sigma * Vector(Vector::Ones(m.dim_s).normalized());
        d_round = std::max(
            d_round, (sym_reduce(m, ctx, sym_inverse(m, ctx, onto)).vec - onto).norm());
        rep.add("symmetry-reduction-tau-independence", "Lem 3", d_tau, 1e-10);
        rep.add("symmetry-reduction-round-trip", "Lem 3 / Eq. RRQ", d_round, 1e-10);
        rep.add("trivialization-left-inverse", "Lem 2 / Eq. trivial1",
                trivialization_left_inverse_defect(m, ctx), 1e-10);
        rep.add("trivialization-conjugation", "Lem 2", trivialization_conjugation_defect(m, ctx),
                1e-9);
        const double schmidt =
            std::max(trivialized_schmidt_ratio(m, ctx, psi), trivialized_schmidt_ratio(m, ctx, phi));
        rep.add("trivialized-product-form", "Lem 2 / Eq. trivial4", schmidt, 1e-9);
    }

    // per-observable rows across the tau grid
    const Vector psi_h = sym_reduce(m, ctx, psi).vec;
    const Vector phi_h = sym_reduce(m, ctx, phi).vec;
    for (const auto& [name, f] : obs) {
        double d_enc_s = 0.0, d_idem = 0.0, d_enc_h = 0.0, d_chain_s = 0.0, d_chain_h = 0.0,
               d_triv = 0.0;
        for (const double tau : taus) {
            const Matrix dressed = relational_observable(m, f, tau).matrix;
            d_enc_s = std::max(d_enc_s, weak_defect(m, encode_S(m, f, tau), dressed));
            d_idem = std::max(
                d_idem, max_abs(reduce_observable_S(m, dressed, tau) - m.pi_sigma * f * m.pi_sigma));
            const Matrix f_tau = heisenberg_op(m, f, tau);
            d_enc_h = std::max(d_enc_h, weak_defect(m, encode_H(m, ctx, f_tau), dressed));

            const Complex dirac = (phi.adjoint() * dressed * psi)(0);
            const Complex cond = pw_reduce(m, tau, phi).vec.dot(f * pw_reduce(m, tau, psi).vec);
            const Vector ct = clock_state(m.clock, tau);
            const Complex raw = (phi.adjoint() * tensor(Matrix(ct * ct.adjoint()), f) * psi)(0);
            d_chain_s = std::max(d_chain_s, std::abs(dirac - cond));
            d_chain_s = std::max(d_chain_s, std::abs(dirac - raw));
            d_chain_h = std::max(d_chain_h, std::abs(dirac - phi_h.dot(f_tau * psi_h)));

            const Matrix triv_obs = ctx.t_mat * dressed * ctx.t_inv -
                                    tensor(Matrix::Identity(m.dim_c, m.dim_c), f_tau);
            for (const auto& [j, s] : m.matched_pairs) {
                const Vector basis = apply_trivialization(
                    ctx, tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s))));
                d_triv = std::max(d_triv, (triv_obs * basis).norm());
            }
        }
        rep.add("encode-schrodinger/" + name, "Thm 3 / Eq. encode1", d_enc_s, 1e-9);
        rep.add("reduce-encode-idempotence/" + name, "Thm 3", d_idem, 1e-9);
        rep.add("encode-heisenberg/" + name, "Thm 5 / Eq. encodeQR", d_enc_h, 1e-9);
        rep.add("expectation-chain-schrodinger/" + name, "Thm 4", d_chain_s, 1e-9);
        rep.add("expectation-chain-heisenberg/" + name, "Thm 6", d_chain_h, 1e-9);
        rep.add("trivialized-observable-product/" + name, "Eq. trivialobs", d_triv, 1e-9);
    }

    // spectral criterion for the reduced quantization
    {
        std::vector<Index> cols;
        std::vector<bool> seen(static_cast<std::size_t>(m.dim_s), false);
        for (const auto& pr : m.matched_pairs)
            if (!seen[static_cast<std::size_t>(pr.second)]) {
                seen[static_cast<std::size_t>(pr.second)] = true;
                cols.push_back(pr.second);
            }
        Matrix basis(m.dim_s, static_cast<Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i)
            basis.col(static_cast<Index>(i)) = m.sys.eigenvectors.col(cols[i]);
        const SpectralDecomposition restricted = eig(Matrix(basis.adjoint() * m.h_s * basis));
        double d_spec = 0.0;
        for (Index i = 0; i < restricted.eigenvalues.size(); ++i) {
            double nearest = 1e300;
            for (const double e : m.sigma_sc)
                nearest = std::min(nearest, std::abs(restricted.eigenvalues(i) - e));
            d_spec = std::max(d_spec, nearest);
        }
        for (const double e : m.sigma_sc) {
            double nearest = 1e300;
            for (Index i = 0; i < restricted.eigenvalues.size(); ++i)
                nearest = std::min(nearest, std::abs(restricted.eigenvalues(i) - e));
            d_spec = std::max(d_spec, nearest);
        }
        rep.add("reduced-spectrum-match", "Cor 3 / Eq. samespec", d_spec, 1e-9);

        const Matrix h_red = m.pi_sigma * m.h_s * m.pi_sigma;
        const Complex heis = phi_h.dot(h_red * psi_h);
        const Complex dirac =
            (phi.adjoint() * relational_observable(m, h_red, 0.0).matrix * psi)(0);
        rep.add("reduced-energy-expectation", "Cor 3", std::abs(dirac - heis), 1e-9);
    }

    // evolution-law residual scalings
    {
        const double tau0 = m.clock.t_start + 0.37 * m.clock.period();
        std::vector<double> deltas{1e-2, 1e-3, 1e-4}, residuals;
        for (const double d : deltas) residuals.push_back(schrodinger_residual(m, psi, tau0, d));
        rep.add("conditional-evolution-slope", "Eq. PaWSchrod",
                std::abs(loglog_slope(deltas, residuals) - 2.0), 0.1);
        std::vector<double> deltas4{0.3, 0.1, 0.03}, residuals4;
        for (const double d : deltas4)
            residuals4.push_back(schrodinger_residual_richardson(m, psi, tau0, d));
        rep.add("conditional-evolution-richardson-slope", "Eq. PaWSchrod",
                std::abs(loglog_slope(deltas4, residuals4) - 4.0), 0.2);
    }
    return rep;
}

} // namespace trinity
