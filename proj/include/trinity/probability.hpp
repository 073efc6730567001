// probability.hpp -- gauge-invariant conditional probabilities and propagators

#pragma once

#include "trinity/reductions.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trinity {

// conditioning on an event of negligible weight; stage is 1-based in the
// conditioning chain (stage 1 is the denominator event)
struct DegenerateConditioning : std::runtime_error {
    std::size_t stage;
    DegenerateConditioning(std::size_t stage_, const std::string& msg)
        : std::runtime_error(msg), stage(stage_) {}
};

struct EffectSpec {
    std::string label; // outcome tag carried into tables
    Matrix op;         // positive system operator bounded by the identity
};

inline double prob_floor(const Vector& psi) { return 1e-12 * psi.squaredNorm(); }

inline void validate_effect(const ConstraintModel& m, const Matrix& e, const char* who) {
    if (e.rows() != m.dim_s || e.cols() != m.dim_s)
        throw std::invalid_argument(std::string(who) + ": effect has wrong dimension");
    if (!is_hermitian(e)) throw std::invalid_argument(std::string(who) + ": effect not hermitian");
    const SpectralDecomposition es = eig(e);
    if (es.eigenvalues(0) < -1e-12)
        throw std::invalid_argument(std::string(who) + ": effect not positive");
    if (es.eigenvalues(es.eigenvalues.size() - 1) > 1.0 + 1e-12)
        throw std::invalid_argument(std::string(who) + ": effect exceeds the identity");
    require_projected(m, e, who); // support must stay inside the matched block
}

inline void validate_projector(const ConstraintModel& m, const Matrix& p, const char* who) {
    validate_effect(m, p, who);
    if (max_abs(p * p - p) > 1e-9 * std::max(1.0, max_abs(p)))
        throw std::invalid_argument(std::string(who) + ": operator is not a projector");
}

// ---- one-time conditioning -----------------------------------------------------

struct OneTimePaths {
    double kinematical; // ratio of kinematical expectations with the clock effect
    double conditional; // Born rule in the conditioned system state
    double defect() const { return std::abs(kinematical - conditional); }
};

inline OneTimePaths one_time_paths(const ConstraintModel& m, const Vector& psi, double tau,
                                   const Matrix& e) {
    validate_effect(m, e, "prob_one_time");
    validate_physical(m, psi);

    const Vector ct = clock_state(m.clock, tau);
    const Matrix et = ct * ct.adjoint();
    const double num_kin =
        (psi.adjoint() * tensor(Matrix(et), e) * psi)(0).real();
    const double den_kin =
        (psi.adjoint() * tensor(Matrix(et), Matrix::Identity(m.dim_s, m.dim_s)) * psi)(0).real();
    if (den_kin <= prob_floor(psi))
        throw DegenerateConditioning(1, "prob_one_time: clock reading has negligible weight");

    const Vector cond = pw_reduction_matrix(m, tau) * psi;
    const double den_red = cond.squaredNorm();
    if (den_red <= prob_floor(psi))
        throw DegenerateConditioning(1, "prob_one_time: conditioned state has negligible norm");
    return OneTimePaths{num_kin / den_kin, cond.dot(e * cond).real() / den_red};
}

inline double prob_one_time(const ConstraintModel& m, const Vector& psi, double tau,
                            const Matrix& e) {
    return one_time_paths(m, psi, tau, e).kinematical;
}

inline double prob_one_time(const ConstraintModel& m, const Vector& psi, double tau,
                            const EffectSpec& e) {
    return prob_one_time(m, psi, tau, e.op);
}

// ---- two-time conditioning ------------------------------------------------------

struct TwoTimePaths {
    double dirac;   // nested dressed-observable expectation in the physical product
    double hybrid;  // clock-effect insertions interleaved with the kernel projector
    double reduced; // conditioned state, evolved and collapsed in the system factor
    double defect() const {
        return std::max({std::abs(dirac - hybrid), std::abs(dirac - reduced),
                         std::abs(hybrid - reduced)});
    }
};

inline TwoTimePaths two_time_paths(const ConstraintModel& m, const Vector& psi, const Matrix& ea,
                                   double tau, const Matrix& eb, double tau2) {
    validate_effect(m, ea, "prob_two_time");
    validate_effect(m, eb, "prob_two_time");
    validate_physical(m, psi);
    const double floor = prob_floor(psi);

    // dressed-observable path
    const Matrix fa = relational_observable(m, ea, tau).matrix;
    const Matrix fb = relational_observable(m, eb, tau2).matrix;
    const double den_dirac = (psi.adjoint() * fa * psi)(0).real();
    if (den_dirac <= floor)
        throw DegenerateConditioning(1, "prob_two_time: conditioning event has negligible weight");
    const double num_dirac = (psi.adjoint() * fa * fb * fa * psi)(0).real();

    // hybrid path
    const Vector ct1 = clock_state(m.clock, tau);
    const Vector ct2 = clock_state(m.clock, tau2);
    const Matrix xa = tensor(Matrix(ct1 * ct1.adjoint()), ea);
    const Matrix xb = tensor(Matrix(ct2 * ct2.adjoint()), eb);
    const double den_hyb = (psi.adjoint() * xa * psi)(0).real();
    if (den_hyb <= floor)
        throw DegenerateConditioning(1, "prob_two_time: conditioning event has negligible weight");
    const double num_hyb = (psi.adjoint() * xa * m.p_phys * xb * m.p_phys * xa * psi)(0).real();

    // reduced path; the middle effect is inserted once, not as a collapse
    const Vector cond = pw_reduction_matrix(m, tau) * psi;
    const Vector evolved = u_system(m, tau2 - tau) * (ea * cond);
    const double den_red = cond.dot(ea * cond).real();
    if (den_red <= floor)
        throw DegenerateConditioning(1, "prob_two_time: conditioning event has negligible weight");
    const double num_red = evolved.dot(eb * evolved).real();

    return TwoTimePaths{num_dirac / den_dirac, num_hyb / den_hyb, num_red / den_red};
}

inline double prob_two_time(const ConstraintModel& m, const Vector& psi, const Matrix& ea,
                            double tau, const Matrix& eb, double tau2) {
    return two_time_paths(m, psi, ea, tau, eb, tau2).dirac;
}

// ---- n-time conditioning ----------------------------------------------------------

struct NTimePaths {
    double dirac;
    double reduced;
    double defect() const { return std::abs(dirac - reduced); }
};

inline NTimePaths n_time_paths(const ConstraintModel& m, const Vector& psi,
                               const std::vector<std::pair<Matrix, double>>& chain) {
    if (chain.empty()) throw std::invalid_argument("prob_n_time: empty conditioning chain");
    for (const auto& stage : chain) validate_projector(m, stage.first, "prob_n_time");
    validate_physical(m, psi);
    const double floor = prob_floor(psi);

    if (chain.size() == 1) {
        const OneTimePaths one = one_time_paths(m, psi, chain[0].second, chain[0].first);
        return NTimePaths{one.kinematical, one.conditional};
    }

    // reduced chain: collapse, evolve, collapse, ...; degenerate intermediate
    // conditioning makes the remaining conditionals undefined
    Vector state = chain[0].first * (pw_reduction_matrix(m, chain[0].second) * psi);
    const double den_red = state.squaredNorm();
    if (den_red <= floor)
        throw DegenerateConditioning(1, "prob_n_time: conditioning event has negligible weight");
    for (std::size_t k = 1; k < chain.size(); ++k) {
        state = chain[k].first *
                (u_system(m, chain[k].second - chain[k - 1].second) * state);
        if (k + 1 < chain.size() && state.squaredNorm() <= floor)
            throw DegenerateConditioning(
                k + 1, "prob_n_time: intermediate conditioning event has negligible weight");
    }
    const double reduced = state.squaredNorm() / den_red;

    // nested alternation of dressed projections in the physical product
    std::vector<Matrix> dressed;
    dressed.reserve(chain.size());
    for (const auto& stage : chain)
        dressed.push_back(relational_observable(m, stage.first, stage.second).matrix);
    Matrix nest = dressed.back();
    for (std::size_t k = chain.size() - 1; k-- > 0;) nest = dressed[k] * nest * dressed[k];
    const double den_dirac = (psi.adjoint() * dressed.front() * psi)(0).real();
    if (den_dirac <= floor)
        throw DegenerateConditioning(1, "prob_n_time: conditioning event has negligible weight");
    const double dirac = (psi.adjoint() * nest * psi)(0).real() / den_dirac;

    return NTimePaths{dirac, reduced};
}

inline double prob_n_time(const ConstraintModel& m, const Vector& psi,
                          const std::vector<std::pair<Matrix, double>>& chain) {
    return n_time_paths(m, psi, chain).dirac;
}

// ---- propagator ----------------------------------------------------------------------

inline Matrix position_projector(const ConstraintModel& m, Index q) {
    if (q < 0 || q >= m.dim_s)
        throw std::invalid_argument("position_projector: index out of range");
    return projector_onto(unit_vector(m.dim_s, q));
}

// transition probability between computational-basis readings; independent of
// the physical state used to condition, as long as the conditioning has weight
inline double propagator(const ConstraintModel& m, const Vector& psi, Index q, double tau,
                         Index q2, double tau2) {
    return prob_two_time(m, psi, position_projector(m, q), tau, position_projector(m, q2), tau2);
}

struct PropagatorSample {
    double tau;
    double tau2;
    double value;
    double defect; // largest pairwise disagreement between the evaluation paths
};

inline std::vector<PropagatorSample> propagator_table(const ConstraintModel& m, const Vector& psi,
                                                      Index q, Index q2,
                                                      const std::vector<double>& taus,
                                                      const std::vector<double>& tau2s) {
    const Matrix pa = position_projector(m, q);
    const Matrix pb = position_projector(m, q2);
    std::vector<PropagatorSample> table(taus.size() * tau2s.size());
    parallel_for(table.size(), [&](std::size_t i) {
        const double tau = taus[i / tau2s.size()];
        const double tau2 = tau2s[i % tau2s.size()];
        const TwoTimePaths paths = two_time_paths(m, psi, pa, tau, pb, tau2);
        table[i] = PropagatorSample{tau, tau2, paths.dirac, paths.defect()};
    });
    return table;
}

inline std::string propagator_table_to_csv(const std::vector<PropagatorSample>& table) {
    std::string out = "tau,tau2,value,defect\n";
    for (const auto& s : table)
        out += format_double(s.tau) + ',' + format_double(s.tau2) + ',' + format_double(s.value) +
               ',' + format_double(s.defect) + '\n';
    return out;
}

} // namespace trinity
