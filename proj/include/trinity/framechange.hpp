// framechange.hpp -- two-clock models, temporal frame changes, parity-swap moments,
// and the Gaussian clock-packet scenario

#pragma once

#include "trinity/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trinity {

// ---- three-subsystem models -----------------------------------------------------

enum class Frame { A, B };

struct Perspective {
    Frame frame{Frame::A};
    Picture picture{Picture::Schrodinger};
    double tau{0.0}; // clock reading; ignored in the Heisenberg picture
};

// two clocks sharing one system under the additive constraint; each frame sees the
// other clock bundled into an effective system, so the single-clock machinery applies
struct ThreeFrameModel {
    ClockSystem clock_a, clock_b;
    Matrix h_s;                // bare system Hamiltonian
    SpectralDecomposition sys; // its eigensystem
    Index dim_a{0}, dim_b{0}, dim_s{0}, dim{0};

    ConstraintModel from_a; // clock A against composite B(x)S, kinematical order A(x)B(x)S
    ConstraintModel from_b; // clock B against composite A(x)S, kinematical order B(x)A(x)S
    Matrix swap_ab;         // basis permutation (A(x)B(x)S) -> (B(x)A(x)S)

    TrivializationContext ctx_a, ctx_b; // per-frame trivializations; empty if no kernel

    const ConstraintModel& frame_model(Frame f) const { return f == Frame::A ? from_a : from_b; }
    const TrivializationContext& frame_ctx(Frame f) const {
        return f == Frame::A ? ctx_a : ctx_b;
    }
};

inline ThreeFrameModel build_three_frame_model(const ClockSystem& a, const ClockSystem& b,
                                               const Matrix& h_s) {
    ThreeFrameModel t;
    t.clock_a = a;
    t.clock_b = b;
    t.h_s = h_s;
    t.sys = eig(h_s);
    t.dim_a = a.dim;
    t.dim_b = b.dim;
    t.dim_s = h_s.rows();
    t.dim = t.dim_a * t.dim_b * t.dim_s;

    const Matrix i_a = Matrix::Identity(t.dim_a, t.dim_a);
    const Matrix i_b = Matrix::Identity(t.dim_b, t.dim_b);
    const Matrix i_s = Matrix::Identity(t.dim_s, t.dim_s);
    t.from_a = build_model(a, tensor(b.h_c, i_s) + tensor(i_b, h_s));
    t.from_b = build_model(b, tensor(a.h_c, i_s) + tensor(i_a, h_s));

    t.swap_ab = Matrix::Zero(t.dim, t.dim);
    for (Index ja = 0; ja < t.dim_a; ++ja)
        for (Index jb = 0; jb < t.dim_b; ++jb)
            for (Index s = 0; s < t.dim_s; ++s)
                t.swap_ab(jb * t.dim_a * t.dim_s + ja * t.dim_s + s,
                          ja * t.dim_b * t.dim_s + jb * t.dim_s + s) = 1.0;

    if (!t.from_a.empty_physical) t.ctx_a = trivialize(t.from_a);
    if (!t.from_b.empty_physical) t.ctx_b = trivialize(t.from_b);
    return t;
}

inline void require_matched(const ConstraintModel& m, const Vector& psi, const char* who) {
    if (psi.size() != m.dim_s)
        throw std::invalid_argument(std::string(who) + ": reduced state dimension mismatch");
    if ((psi - m.pi_sigma * psi).norm() > 1e-9 * std::max(1.0, psi.norm()))
        throw std::invalid_argument(std::string(who) +
                                    ": state leaves the matched energy block of its frame");
}

// ---- frame-change maps ------------------------------------------------------------

// reduced-space map between perspectives: lift with the source frame's inverse
// reduction (which lands on the constraint kernel), permute factors if the frame
// changes, then reduce into the target frame's picture
inline Matrix tfc_matrix(const ThreeFrameModel& t, const Perspective& from,
                         const Perspective& to) {
    const ConstraintModel& mf = t.frame_model(from.frame);
    const ConstraintModel& mt = t.frame_model(to.frame);
    const Matrix lift = from.picture == Picture::Schrodinger
                            ? pw_inverse_matrix(mf, from.tau)
                            : sym_inverse_matrix(mf, t.frame_ctx(from.frame));
    const Matrix reduce = to.picture == Picture::Schrodinger
                              ? pw_reduction_matrix(mt, to.tau)
                              : sym_reduction_matrix(mt, t.frame_ctx(to.frame));
    if (from.frame == to.frame) return reduce * lift;
    const Matrix swapped =
        from.frame == Frame::A ? Matrix(t.swap_ab * lift) : Matrix(t.swap_ab.adjoint() * lift);
    return reduce * swapped;
}

// kinematical state the map passes through, in the source frame's factor ordering
inline Vector tfc_lift(const ThreeFrameModel& t, const Perspective& from,
                       const Vector& psi_reduced) {
    const ConstraintModel& mf = t.frame_model(from.frame);
    require_matched(mf, psi_reduced, "tfc_lift");
    return from.picture == Picture::Schrodinger
               ? pw_inverse(mf, from.tau, psi_reduced)
               : sym_inverse(mf, t.frame_ctx(from.frame), psi_reduced);
}

inline ReducedState tfc_state(const ThreeFrameModel& t, const Perspective& from,
                              const Perspective& to, const Vector& psi_reduced) {
    require_matched(t.frame_model(from.frame), psi_reduced, "tfc_state");
    return ReducedState{to.picture, to.tau, Vector(tfc_matrix(t, from, to) * psi_reduced)};
}

// ---- observable transforms --------------------------------------------------------

// conjugate an observable on B(x)S into A's-clock-for-B's form at the given readings
inline Matrix tfc_observable_S(const ThreeFrameModel& t, const Matrix& o, double tau_a,
                               double tau_b) {
    require_projected(t.from_a, o, "tfc_observable_S");
    const Matrix lam = tfc_matrix(t, Perspective{Frame::A, Picture::Schrodinger, tau_a},
                                  Perspective{Frame::B, Picture::Schrodinger, tau_b});
    return lam * o * lam.adjoint();
}

// Heisenberg-picture transform: undress the target frame's evolution; equivalent to
// conjugating the source frame's Heisenberg observable by the fixed Heisenberg map
inline Matrix tfc_observable_H(const ThreeFrameModel& t, const Matrix& o, double tau_a,
                               double tau_b) {
    const Matrix u = u_system(t.from_b, tau_b);
    return u.adjoint() * tfc_observable_S(t, o, tau_a, tau_b) * u;
}

// commutator of an observable on B(x)S with the B clock Hamiltonian; vanishing is
// the constant-of-motion side of the reading-independence criterion
inline double clock_factor_commutant_defect(const ThreeFrameModel& t, const Matrix& o) {
    if (o.rows() != t.from_a.dim_s || o.cols() != t.from_a.dim_s)
        throw std::invalid_argument("clock_factor_commutant_defect: operator dimension mismatch");
    const Matrix hb = tensor(t.clock_b.h_c, Matrix::Identity(t.dim_s, t.dim_s));
    return max_abs(comm(o, hb));
}

struct TauIndependence {
    bool is_independent{false};
    bool clock_factor_conforming{false};
    double max_pairwise_defect{0.0};
    double commutant_defect{0.0};
    std::vector<double> defect_profile; // per sweep reading, against the first one
};

// sweep the target clock reading and compare transformed observables pairwise; the
// sweep density exceeds twice the B spectral span over the period, so a trig
// polynomial agreeing on all sample points is constant and the verdict is exact
inline TauIndependence tauB_independence_test(const ThreeFrameModel& t, const Matrix& o,
                                              double tau_a = 0.0, int n_sweep = 8,
                                              double tol = 1e-9) {
    require_projected(t.from_a, o, "tauB_independence_test");
    const ClockSystem& cb = t.clock_b;
    const double span = cb.energy(cb.dim - 1) - cb.energy(0);
    const int k_max = static_cast<int>(std::ceil(span * cb.period() / (2.0 * M_PI) - 1e-9));
    const int n = std::max(n_sweep, 2 * k_max + 1);

    std::vector<Matrix> transformed;
    transformed.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double tau_b = cb.t_start + cb.period() * static_cast<double>(k) / n;
        transformed.push_back(tfc_observable_S(t, o, tau_a, tau_b));
    }

    TauIndependence out;
    out.defect_profile.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = max_abs(transformed[static_cast<std::size_t>(i)] -
                                     transformed[static_cast<std::size_t>(j)]);
            out.max_pairwise_defect = std::max(out.max_pairwise_defect, d);
            if (i == 0) out.defect_profile[static_cast<std::size_t>(j)] = d;
        }
    out.commutant_defect = clock_factor_commutant_defect(t, o);
    const double scale = std::max(1.0, max_abs(o));
    out.is_independent = out.max_pairwise_defect <= tol * scale;
    out.clock_factor_conforming = out.commutant_defect <= tol * scale;
    return out;
}

namespace detail {

// dephase across distinct eigenvalue blocks of a spectral decomposition
inline Matrix spectral_dephase(const SpectralDecomposition& es, const Matrix& a) {
    const Matrix tilted = es.eigenvectors.adjoint() * a * es.eigenvectors;
    Matrix kept = Matrix::Zero(a.rows(), a.cols());
    for (const auto& [b0, b1] : es.degeneracy_blocks)
        kept.block(b0, b0, b1 - b0, b1 - b0) = tilted.block(b0, b0, b1 - b0, b1 - b0);
    return es.eigenvectors * kept * es.eigenvectors.adjoint();
}

} // namespace detail

// closed form of the transformed observable for the conforming product case
// O = O_B (x) f_S with [O_B, H_B] = 0: each matched target-energy sector picks up the
// diagonal O_B value at its matching clock level, while the clock-conditioned f
// dephases across the A+S energy blocks; no reading of B's clock appears
inline Matrix transformed_product_observable(const ThreeFrameModel& t, const Matrix& o_b,
                                             const Matrix& f_s, double tau_a) {
    if (o_b.rows() != t.dim_b || o_b.cols() != t.dim_b || f_s.rows() != t.dim_s ||
        f_s.cols() != t.dim_s)
        throw std::invalid_argument("transformed_product_observable: factor dimension mismatch");
    if (max_abs(comm(o_b, t.clock_b.h_c)) > 1e-9 * std::max(1.0, max_abs(o_b)))
        throw std::invalid_argument(
            "transformed_product_observable: clock factor is not a constant of motion");

    const ConstraintModel& mb = t.from_b;
    const Vector ca = clock_state(t.clock_a, tau_a);
    const Matrix dephased =
        detail::spectral_dephase(mb.sys, tensor(Matrix(ca * ca.adjoint()), f_s));
    Matrix scal = Matrix::Zero(mb.dim_s, mb.dim_s);
    for (const auto& [j, s] : mb.matched_pairs)
        scal += o_b(j, j) * projector_onto(Vector(mb.sys.eigenvectors.col(s)));
    const double wa2 = t.clock_a.weight * t.clock_a.weight;
    const double wb2 = t.clock_b.weight * t.clock_b.weight;
    return (wb2 / (wa2 * wa2)) * Matrix(mb.pi_sigma * dephased * scal * mb.pi_sigma);
}

// central-difference residual of the source-free equation of motion in the target
// frame, d O^H / d tau_b = i [H_A + H_S, O^H]; small exactly for conforming factors
inline double heisenberg_equation_residual(const ThreeFrameModel& t, const Matrix& o,
                                           double tau_a, double tau_b, double delta) {
    const Matrix plus = tfc_observable_H(t, o, tau_a, tau_b + delta);
    const Matrix minus = tfc_observable_H(t, o, tau_a, tau_b - delta);
    const Matrix mid = tfc_observable_H(t, o, tau_a, tau_b);
    return max_abs((plus - minus) / (2.0 * delta) - iu * comm(t.from_b.h_s, mid));
}

// ---- parity-swap moments -----------------------------------------------------------

inline void require_shared_window(const ClockSystem& a, const ClockSystem& b, const char* who) {
    if (std::abs(a.t_start - b.t_start) > 1e-12 || std::abs(a.t_end - b.t_end) > 1e-12 ||
        std::abs(a.mu - b.mu) > 1e-12)
        throw std::invalid_argument(std::string(who) +
                                    ": clocks must share the time window and measure");
}

// n-th moment mu * contour-integral dt (-t)^n |t>_A <-t|_B in closed form
inline Matrix parity_swap_moment(const ThreeFrameModel& t, int n) {
    if (n < 0) throw std::invalid_argument("parity_swap_moment: n must be >= 0");
    require_shared_window(t.clock_a, t.clock_b, "parity_swap_moment");
    const ClockSystem& ca = t.clock_a;
    const ClockSystem& cb = t.clock_b;
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    Matrix out(ca.dim, cb.dim);
    for (Index j = 0; j < ca.dim; ++j)
        for (Index k = 0; k < cb.dim; ++k)
            out(j, k) = ca.mu * ca.weight * cb.weight * sign * ca.phase_factors(j) *
                        std::conj(cb.phase_factors(k)) *
                        poly_phase_integral(n, -(ca.energy(j) + cb.energy(k)), ca.t_start,
                                            ca.t_end);
    return out;
}

// closed form of mu * contour-integral dt |t>_A <-t|_B (x) U_S(t), one system eigenline
// at a time; the moment series above converges to this factorially
inline Matrix parity_swap_kernel(const ThreeFrameModel& t) {
    require_shared_window(t.clock_a, t.clock_b, "parity_swap_kernel");
    const ClockSystem& ca = t.clock_a;
    const ClockSystem& cb = t.clock_b;
    Matrix out = Matrix::Zero(ca.dim * t.dim_s, cb.dim * t.dim_s);
    for (Index s = 0; s < t.dim_s; ++s) {
        Matrix line(ca.dim, cb.dim);
        for (Index j = 0; j < ca.dim; ++j)
            for (Index k = 0; k < cb.dim; ++k)
                line(j, k) = ca.mu * ca.weight * cb.weight * ca.phase_factors(j) *
                             std::conj(cb.phase_factors(k)) *
                             poly_phase_integral(
                                 0, -(ca.energy(j) + cb.energy(k) + t.sys.eigenvalues(s)),
                                 ca.t_start, ca.t_end);
        const Vector v = t.sys.eigenvectors.col(s);
        out += tensor(line, Matrix(v * v.adjoint()));
    }
    return out;
}

struct ParitySwapSeries {
    int order{0};                 // truncation order actually reached
    double defect{0.0};           // defect against the closed-form kernel at that order
    std::vector<double> defects;  // defect after each partial sum
};

// partial sums sum_{n<=N} (i^n/n!) P^(n) (x) H_S^n against the closed-form kernel
inline ParitySwapSeries parity_swap_series(const ThreeFrameModel& t, int max_order,
                                           double series_tol = 1e-9) {
    if (max_order < 0) throw std::invalid_argument("parity_swap_series: order must be >= 0");
    const Matrix target = parity_swap_kernel(t);
    Matrix acc = Matrix::Zero(target.rows(), target.cols());
    Matrix hpow = Matrix::Identity(t.dim_s, t.dim_s);
    Complex coeff = 1.0; // i^n / n!
    ParitySwapSeries out;
    for (int n = 0; n <= max_order; ++n) {
        acc += coeff * tensor(parity_swap_moment(t, n), hpow);
        out.order = n;
        out.defect = max_abs(target - acc);
        out.defects.push_back(out.defect);
        if (out.defect <= series_tol) break;
        hpow = hpow * t.h_s;
        coeff *= iu / static_cast<double>(n + 1);
    }
    return out;
}

// ---- Gaussian clock-packet scenario --------------------------------------------------

struct NonlocalityConfig {
    Index dim_a{64};
    Index dim_b{64};
    double grid_step{1.0}; // clock energy spacing; grids are symmetric around zero
    double window{0.0};    // half-window; 0 selects the grid-conjugate pi/spacing
    double sigma{0.12};    // temporal packet width
    double delta{2.4};     // peak offset; packet peaks sit at -delta and +delta
    double tau_b{0.0};     // reading of the destination clock
    Matrix h_s;            // empty selects the two-level flip Hamiltonian
    Vector psi_s;          // system seed state, computational basis; empty selects |0>
    double fidelity_threshold{0.999}; // calibrated against an independent simulation
    double convolution_tol{1e-8};
    double truncation_limit{1e-6};
};

namespace detail {

inline ClockSystem symmetric_grid_clock(Index dim, double step, double window) {
    ClockSpec spec;
    spec.regime = ClockRegime::ContinuumApprox;
    spec.window = window;
    spec.energies.resize(static_cast<std::size_t>(dim));
    for (Index j = 0; j < dim; ++j)
        spec.energies[static_cast<std::size_t>(j)] = (static_cast<double>(j) - dim / 2) * step;
    return build_clock(spec);
}

// normalized clock-energy amplitudes of a sum of Gaussian time peaks
inline Vector peaked_packet_amplitudes(const ClockSystem& c, double sigma,
                                       const std::vector<double>& peaks) {
    Vector v = Vector::Zero(c.dim);
    for (const double p : peaks)
        for (Index j = 0; j < c.dim; ++j) {
            const double e = c.energy(j);
            v(j) += std::exp(-sigma * sigma * e * e / 2.0) * std::exp(-iu * e * p);
        }
    const double n = v.norm();
    if (!(n > 0.0)) throw std::invalid_argument("peaked_packet_amplitudes: empty packet");
    return v / n;
}

} // namespace detail

// index-matched application of the frame-change map to the product of a B-clock
// packet and a system state, with A's clock prepared at reading tau_a; output lives
// on A (x) S in the system energy eigenbasis and never touches a dense kinematical
// operator, so it scales to grids past the dense-dimension guard
inline Vector frame_change_product_state(const ClockSystem& ca, const ClockSystem& cb,
                                         const SpectralDecomposition& sys, const Vector& c_b,
                                         const Vector& psi_s_eig, double tau_a, double tau_b) {
    const Index da = ca.dim, ds = psi_s_eig.size();
    if (c_b.size() != cb.dim)
        throw std::invalid_argument("frame_change_product_state: packet dimension mismatch");
    Vector out = Vector::Zero(da * ds);
    const double wa2 = ca.weight * ca.weight;
    for (Index a = 0; a < da; ++a)
        for (Index s = 0; s < ds; ++s) {
            const Index b = find_clock_level(cb, -(ca.energy(a) + sys.eigenvalues(s)));
            if (b < 0) continue; // matching level off the grid: component annihilated
            const Complex lift =
                ca.weight * ca.phase_factors(a) * std::exp(-iu * ca.energy(a) * tau_a);
            const Complex read = cb.weight * std::conj(cb.phase_factors(b)) *
                                 std::exp(iu * cb.energy(b) * tau_b);
            out(a * ds + s) = lift * c_b(b) * psi_s_eig(s) * read / wa2;
        }
    return out;
}

// Riemann quadrature of the equivalent time-convolution form: the packet's temporal
// profile weighs jointly evolved copies of A's clock state and the system; exact on
// band-limited grids once the node count clears the spectral span
inline Vector frame_change_quadrature(const ClockSystem& ca, const ClockSystem& cb,
                                      const SpectralDecomposition& sys, const Vector& c_b,
                                      const Vector& psi_s_eig, double tau_b,
                                      Index n_nodes = 512) {
    const Index da = ca.dim, ds = psi_s_eig.size();
    Vector out = Vector::Zero(da * ds);
    const double dt = ca.period() / static_cast<double>(n_nodes);
    for (Index l = 0; l < n_nodes; ++l) {
        const double tl = ca.t_start + dt * static_cast<double>(l);
        Complex prof = 0.0; // packet's temporal profile at tau_b - tl
        for (Index b = 0; b < cb.dim; ++b)
            prof += cb.weight * std::conj(cb.phase_factors(b)) *
                    std::exp(iu * cb.energy(b) * (tau_b - tl)) * c_b(b);
        for (Index a = 0; a < da; ++a) {
            const Complex amp_a =
                ca.weight * ca.phase_factors(a) * std::exp(-iu * ca.energy(a) * tl);
            for (Index s = 0; s < ds; ++s)
                out(a * ds + s) += ca.mu * dt * prof * amp_a * psi_s_eig(s) *
                                   std::exp(-iu * sys.eigenvalues(s) * tl);
        }
    }
    return out;
}

// L2 mass of the ideal (continuum) packet outside the time window, and of the ideal
// energy amplitude outside the grid; both must stay small for the map to be faithful
inline std::pair<double, double> packet_truncation_masses(const ClockSystem& cb, double sigma,
                                                          const std::vector<double>& peaks) {
    const Index n = 200001;
    const double t_win = cb.t_end;
    double t_all = 0.0, t_out = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double ts = -4.0 * t_win + 8.0 * t_win * static_cast<double>(i) / (n - 1);
        double prof = 0.0;
        for (const double p : peaks) prof += std::exp(-(ts - p) * (ts - p) / (2.0 * sigma * sigma));
        const double m = prof * prof;
        t_all += m;
        if (std::abs(ts) > t_win) t_out += m;
    }
    const double e_max = cb.spec.energies.back();
    double e_all = 0.0, e_out = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double es = -8.0 * e_max + 16.0 * e_max * static_cast<double>(i) / (n - 1);
        const double amp = std::exp(-sigma * sigma * es * es / 2.0);
        const double m = amp * amp;
        e_all += m;
        if (std::abs(es) > e_max) e_out += m;
    }
    return {t_out / t_all, e_out / e_all};
}

inline ScenarioReport nonlocality_scenario(const NonlocalityConfig& cfg) {
    if (!(cfg.sigma > 0.0)) throw std::invalid_argument("nonlocality_scenario: sigma must be > 0");
    if (cfg.delta < 0.0)
        throw std::invalid_argument("nonlocality_scenario: delta must be >= 0");
    if (cfg.dim_a < 2 || cfg.dim_b < 2)
        throw std::invalid_argument("nonlocality_scenario: clock grids need >= 2 levels");

    const ClockSystem ca = detail::symmetric_grid_clock(cfg.dim_a, cfg.grid_step, cfg.window);
    const ClockSystem cb = detail::symmetric_grid_clock(cfg.dim_b, cfg.grid_step, cfg.window);

    Matrix h = cfg.h_s;
    if (h.size() == 0) {
        h = Matrix::Zero(2, 2);
        h(0, 1) = 1.0;
        h(1, 0) = 1.0;
    }
    const SpectralDecomposition sys = eig(h);
    const Index ds = h.rows();
    Vector seed = cfg.psi_s.size() ? cfg.psi_s : unit_vector(ds, 0);
    if (seed.size() != ds)
        throw std::invalid_argument("nonlocality_scenario: system state dimension mismatch");
    const double sn = seed.norm();
    if (!(sn > 0.0)) throw std::invalid_argument("nonlocality_scenario: zero system state");
    const Vector psi0 = sys.eigenvectors.adjoint() * (seed / sn);
    const auto evolved = [&](double tau) {
        Vector v(ds);
        for (Index s = 0; s < ds; ++s) v(s) = psi0(s) * std::exp(-iu * sys.eigenvalues(s) * tau);
        return v;
    };

    ScenarioReport rep;
    rep.scenario = "nonlocality";
    const std::string par = "sigma=" + format_double(cfg.sigma) +
                            ",delta=" + format_double(cfg.delta) +
                            ",tau_b=" + format_double(cfg.tau_b);

    const std::vector<double> peaks{-cfg.delta, cfg.delta};
    const auto [t_mass, e_mass] = packet_truncation_masses(cb, cfg.sigma, peaks);
    if (t_mass > cfg.truncation_limit)
        throw std::invalid_argument(
            "nonlocality_scenario: clock window too small for the peak separation (truncation "
            "mass " +
            format_double(t_mass) + ")");
    rep.add(par, "time-window-truncation-mass", t_mass, cfg.truncation_limit,
            t_mass <= cfg.truncation_limit);
    rep.add(par, "energy-grid-truncation-mass", e_mass, cfg.truncation_limit,
            e_mass <= cfg.truncation_limit);

    // how distinguishable the two branch evolutions are; context for the mixture row
    Complex ov = 0.0;
    for (Index s = 0; s < ds; ++s)
        ov += std::norm(psi0(s)) * std::exp(-iu * 2.0 * cfg.delta * sys.eigenvalues(s));
    rep.add(par, "branch-overlap", std::abs(ov), 1.0, true);

    // two-peak packet: transformed state along both routes, then the branch mixture
    const Vector c2 = detail::peaked_packet_amplitudes(cb, cfg.sigma, peaks);
    const Vector out2 = frame_change_product_state(ca, cb, sys, c2, psi0, 0.0, cfg.tau_b);
    const Vector conv = frame_change_quadrature(ca, cb, sys, c2, psi0, cfg.tau_b);
    const double rel = (out2 - conv).norm() / out2.norm();
    rep.add(par, "lambda-vs-convolution-defect", rel, cfg.convolution_tol,
            rel <= cfg.convolution_tol);

    Matrix rho = reduced_density_right(out2, ca.dim, ds);
    rho /= rho.trace().real();
    const Matrix mix = 0.5 * (projector_onto(evolved(cfg.tau_b - cfg.delta)) +
                              projector_onto(evolved(cfg.tau_b + cfg.delta)));
    const double f_mix = fidelity(rho, mix);
    rep.add(par, "two-peak-mixture-fidelity", f_mix, cfg.fidelity_threshold,
            f_mix >= cfg.fidelity_threshold);

    // single-peak control: output must be the frozen packet carried by the joint
    // evolution of A's clock and the system, at more than one reading
    const Vector c1 = detail::peaked_packet_amplitudes(cb, cfg.sigma, {0.0});
    const Vector base = frame_change_product_state(ca, cb, sys, c1, psi0, 0.0, 0.0);
    for (const double reading : {cfg.tau_b, cfg.tau_b + 0.7}) {
        const Vector out1 = frame_change_product_state(ca, cb, sys, c1, psi0, 0.0, reading);
        Vector ref(base.size());
        for (Index a = 0; a < ca.dim; ++a)
            for (Index s = 0; s < ds; ++s)
                ref(a * ds + s) = base(a * ds + s) *
                                  std::exp(-iu * (ca.energy(a) + sys.eigenvalues(s)) * reading);
        const double f1 = std::norm(ref.dot(out1)) / (ref.squaredNorm() * out1.squaredNorm());
        const std::string par1 = "sigma=" + format_double(cfg.sigma) +
                                 ",delta=" + format_double(cfg.delta) +
                                 ",tau_b=" + format_double(reading);
        rep.add(par1, "single-peak-temporal-locality-fidelity", f1, cfg.fidelity_threshold,
                f1 >= cfg.fidelity_threshold);
    }
    return rep;
}

// sweep the peak separation; independent jobs, rows emitted in sweep order
inline ScenarioReport nonlocality_sweep(const NonlocalityConfig& base,
                                        const std::vector<double>& deltas) {
    if (deltas.empty()) throw std::invalid_argument("nonlocality_sweep: empty sweep");
    std::vector<ScenarioReport> parts(deltas.size());
    std::vector<std::exception_ptr> errors(deltas.size());
    parallel_for(deltas.size(), [&](std::size_t i) {
        try {
            NonlocalityConfig cfg = base;
            cfg.delta = deltas[i];
            parts[i] = nonlocality_scenario(cfg);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    ScenarioReport rep;
    rep.scenario = "nonlocality";
    for (const auto& part : parts) rep.append(part);
    return rep;
}

} // namespace trinity
