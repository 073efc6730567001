// relobs.hpp -- relational Dirac observables via the G-twirl and their weak algebra

#pragma once

#include "trinity/constraint.hpp"

#include <cmath>
#include <stdexcept>

namespace trinity {

// ---- G-twirl --------------------------------------------------------------------

// dephasing across constraint eigenvalue blocks: rotate to the product eigenbasis,
// zero the blocks that connect different eigenvalues, rotate back; this is the exact
// group average and preserves Hermiticity entrywise
inline Matrix gtwirl(const ConstraintModel& m, const Matrix& a) {
    if (a.rows() != m.dim || a.cols() != m.dim)
        throw std::invalid_argument("gtwirl: operator dimension mismatch");
    const Matrix w = tensor(Matrix::Identity(m.dim_c, m.dim_c), m.sys.eigenvectors);
    Matrix tilted = w.adjoint() * a * w;
    for (Index r = 0; r < m.dim; ++r)
        for (Index c = 0; c < m.dim; ++c)
            if (m.omega_group_of[static_cast<std::size_t>(r)] !=
                m.omega_group_of[static_cast<std::size_t>(c)])
                tilted(r, c) = 0.0;
    return w * tilted * w.adjoint();
}

// ---- relational observables ------------------------------------------------------

struct RelationalObservable {
    Matrix f_s;    // system operator being dressed
    double tau{0.0};
    Matrix matrix; // F on the kinematical space
};

inline RelationalObservable relational_observable(const ConstraintModel& m, const Matrix& f_s,
                                                  double tau) {
    if (f_s.rows() != m.dim_s || f_s.cols() != m.dim_s)
        throw std::invalid_argument("relational_observable: system operator dimension mismatch");
    RelationalObservable out;
    out.f_s = f_s;
    out.tau = tau;
    const Vector ct = clock_state(m.clock, tau);
    out.matrix = gtwirl(m, tensor(Matrix(ct * ct.adjoint()), f_s));
    return out;
}

// ---- weak equality ---------------------------------------------------------------

// || (O1 - O2) P_phys ||: zero iff the two act identically on the constraint kernel
inline double weak_defect(const ConstraintModel& m, const Matrix& o1, const Matrix& o2) {
    return spectral_norm((o1 - o2) * m.p_phys);
}

struct HomomorphismDefects {
    double add_mul_defect{0.0};
    double commutator_defect{0.0};
};

inline void require_projected(const ConstraintModel& m, const Matrix& f, const char* who) {
    if ((m.pi_sigma * f * m.pi_sigma - f).norm() > 1e-9 * std::max(1.0, f.norm()))
        throw std::invalid_argument(std::string(who) +
                                    ": system operator not supported on the matched energy block");
}

// Theorem-2 style algebra transfer: sums, products and commutators of dressed
// observables weakly reproduce the dressed sums, products and commutators
inline HomomorphismDefects homomorphism_defects(const ConstraintModel& m, const Matrix& f,
                                                const Matrix& g, const Matrix& h, double tau) {
    require_projected(m, f, "homomorphism_defects");
    require_projected(m, g, "homomorphism_defects");
    require_projected(m, h, "homomorphism_defects");
    const Matrix ff = relational_observable(m, f, tau).matrix;
    const Matrix fg = relational_observable(m, g, tau).matrix;
    const Matrix fh = relational_observable(m, h, tau).matrix;
    const Matrix combined = relational_observable(m, Matrix(f + g * h), tau).matrix;
    HomomorphismDefects out;
    out.add_mul_defect = weak_defect(m, combined, Matrix(ff + fg * fh));
    out.commutator_defect =
        weak_defect(m, comm(ff, fg), relational_observable(m, comm(f, g), tau).matrix);
    return out;
}

// conjugating the dressed commutator by the trivialization collapses it onto the
// clock-identity tensor the Heisenberg-picture system commutator
inline double trivialized_commutator_check(const ConstraintModel& m, const Matrix& f,
                                           const Matrix& g, double tau) {
    require_projected(m, f, "trivialized_commutator_check");
    require_projected(m, g, "trivialized_commutator_check");
    const Matrix ff = relational_observable(m, f, tau).matrix;
    const Matrix fg = relational_observable(m, g, tau).matrix;
    const Matrix t = trivialization_matrix(m, default_eps_star(m));
    const Matrix lhs = t * comm(ff, fg) * t.adjoint();
    const Matrix u = u_system(m, tau);
    const Matrix target = tensor(Matrix::Identity(m.dim_c, m.dim_c),
                                 Matrix(comm(u.adjoint() * f * u, u.adjoint() * g * u)));
    double worst = 0.0;
    for (const auto& [j, s] : m.matched_pairs) {
        const Vector psi =
            t * tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s)));
        worst = std::max(worst, ((lhs - target) * psi).norm());
    }
    return worst;
}

// ---- power-series diagnostic -------------------------------------------------------

// partial sums of sum_n ((-i)^n / n!) M_n(tau) (x) ad_{H_S}^n(f); formal series whose
// convergence toward the twirl is only probed, never used for construction
inline Matrix series_observable(const ConstraintModel& m, const Matrix& f, double tau, int order) {
    if (order < 0) throw std::invalid_argument("series_observable: order must be >= 0");
    Matrix acc = Matrix::Zero(m.dim, m.dim);
    Matrix ad = f;
    Complex coeff = 1.0; // (-i)^n / n!
    for (int n = 0; n <= order; ++n) {
        acc += coeff * tensor(shifted_moment_operator(m.clock, n, tau), ad);
        ad = comm(m.h_s, ad);
        coeff *= -iu / static_cast<double>(n + 1);
    }
    return acc;
}

} // namespace trinity
