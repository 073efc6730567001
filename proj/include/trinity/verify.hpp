// verify.hpp -- report assembly: per-module defect suites, the combined
// verification run, and the named scenario drivers

#pragma once

#include "trinity/config.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace trinity {

// rescale every plain row's tolerance and re-evaluate it; skip rows keep their pass
inline void scale_tolerances(Report& rep, double scale) {
    for (CheckRow& r : rep.rows) {
        if (!r.note.empty()) continue;
        r.tolerance *= scale;
        r.pass = r.defect <= r.tolerance;
    }
}

// ---- clock suite ---------------------------------------------------------------------

inline Report clock_report(const ClockSystem& c) {
    Report rep;
    rep.title = "clock";
    const double per = c.period();
    const double a = c.t_start + 0.10 * per;
    const double b = c.t_start + 0.35 * per;

    rep.add("resolution-of-identity", "Eq. completeness", resolution_defect(c), 1e-12);
    rep.add("effect-covariance", "Eq. covariance", covariance_defect(c, a, b, 0.20 * per), 1e-10);
    rep.add("state-covariance", "Eq. covariance",
            state_covariance_defect(c, c.t_start + 0.40 * per, 0.25 * per), 1e-10);

    if (c.spec.regime == ClockRegime::Compact) {
        rep.add("clock-ccr-boundary-identity", "§3.2.3", ccr_boundary_identity_defect(c), 1e-10);
    } else {
        const double span = c.energy(c.dim - 1) - c.energy(0);
        const Matrix defect = ccr_defect(c);
        double worst = 0.0;
        for (const double t0 : {0.0, -per / 6.0, per / 6.0})
            worst = std::max(worst, (defect * gaussian_packet(c, span / 20.0, t0)).norm());
        rep.add("clock-ccr-on-packets", "Eq. contCCR", worst, 1e-9);
    }

    rep.add("time-fourier-relation", "Eq. fourier", fourier_defect(c), 1e-12);

    if (c.spec.regime == ClockRegime::Compact) {
        rep.add("time-monotonicity", "§3.2.3", monotonicity_defect(c, 0.30 * per), 1e-10);
        rep.add_skip("phase-freedom", "App. B", "packet-based check targets the continuum window");
    } else {
        const double span = c.energy(c.dim - 1) - c.energy(0);
        const Vector psi = gaussian_packet(c, span / 20.0, -per / 8.0);
        rep.add("time-monotonicity", "§3", packet_monotonicity_defect(c, psi, 0.10 * per), 1e-9);
        const auto pf = check_phase_freedom(
            c, [](double e) { return 0.05 * e * e; }, [](double e) { return 0.1 * e; });
        rep.add("phase-freedom", "App. B", pf.packet_defect, 1e-8);
    }
    return rep;
}

// ---- constraint suite -------------------------------------------------------------------

inline Report constraint_report(const ConstraintModel& m) {
    Report rep;
    rep.title = "constraint";

    rep.add("constraint-annihilates-physical", "Eq. WheelerDeWitt",
            max_abs(constraint_operator(m) * m.p_phys), 1e-10);
    rep.add("physical-projector-idempotent", "Eq. GAP", max_abs(m.p_phys * m.p_phys - m.p_phys),
            1e-12);
    if (m.clock.spec.regime == ClockRegime::Compact) {
        // (1/N) sum_k U(s_k) over one period, exact once N beats the frequency range
        const double per = m.clock.period();
        long lo = 0, hi = 0;
        for (const double w : m.omegas) {
            const long r = std::lround(w * per / (2.0 * M_PI));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const Index n = static_cast<Index>(2 * (hi - lo) + 1);
        Matrix acc = Matrix::Zero(m.dim, m.dim);
        for (Index k = 0; k < n; ++k)
            acc += evolve_constraint(m, per * static_cast<double>(k) / static_cast<double>(n));
        rep.add("group-average-matches-projector", "Eq. GAP",
                max_abs(acc / static_cast<double>(n) - m.p_phys), 1e-10);
    } else {
        rep.add_skip("group-average-matches-projector", "Eq. GAP",
                     "quadrature needs the compact clock's periodic group");
    }

    double flow = 0.0;
    for (const double s : {0.7, 1.9, 5.0})
        flow = std::max(flow, max_abs(evolve_constraint(m, s) * m.p_phys - m.p_phys));
    rep.add("constraint-flow-invariance", "Eq. Constraint", flow, 1e-10);

    rep.add("system-projector-identity", "App. C / Eq. scproj",
            system_projector_identity_defect(m), 1e-12);

    // hermiticity and positivity of the physical pairing on a fixed frame of states
    double pairing = 0.0;
    std::mt19937_64 rng(7);
    for (int k = 0; k < 4; ++k) {
        const Vector u = random_physical_state(m, rng);
        const Vector v = random_physical_state(m, rng);
        const Complex uv = physical_inner(m, u, v);
        const Complex vu = physical_inner(m, v, u);
        pairing = std::max(pairing, std::abs(uv - std::conj(vu)));
        const Complex uu = physical_inner(m, u, u);
        pairing = std::max(pairing, std::abs(uu.imag()));
        if (uu.real() < 0.0) pairing = std::max(pairing, -uu.real());
    }
    rep.add("physical-inner-product", "Eq. PIP", pairing, 1e-12);
    return rep;
}

// ---- relational-observable suite ------------------------------------------------------------

inline Report relobs_report(const ConstraintModel& m, const std::vector<NamedOperator>& obs,
                            std::uint64_t seed) {
    Report rep;
    rep.title = "relobs";
    if (obs.empty()) throw std::invalid_argument("relobs_report: needs at least one observable");
    const double tau0 = m.clock.t_start + 0.37 * m.clock.period();

    std::mt19937_64 rng(seed);
    const Matrix f = m.pi_sigma * obs[0].second * m.pi_sigma;
    const Matrix g = m.pi_sigma * random_hermitian(m.dim_s, rng) * m.pi_sigma;
    const Matrix h = m.pi_sigma * random_hermitian(m.dim_s, rng) * m.pi_sigma;

    const Matrix ff = relational_observable(m, f, tau0).matrix;
    rep.add("dressed-strong-dirac", "Thm 1", max_abs(comm(constraint_operator(m), ff) * m.p_phys),
            1e-10);
    rep.add("dressed-hermiticity", "Eq. RelationalDiracObservable", max_abs(ff - ff.adjoint()),
            1e-12);

    const Matrix raw = random_hermitian(m.dim_s, rng);
    rep.add("weak-equivalence-classes", "Lem 1 / Eq. qweak",
            weak_defect(m, relational_observable(m, raw, tau0).matrix,
                        relational_observable(m, Matrix(m.pi_sigma * raw * m.pi_sigma), tau0)
                            .matrix),
            1e-10);

    const HomomorphismDefects hom = homomorphism_defects(m, f, g, h, tau0);
    rep.add("homomorphism-sum-product", "Thm 2", hom.add_mul_defect, 1e-9);
    rep.add("homomorphism-commutator", "Thm 2", hom.commutator_defect, 1e-9);
    rep.add("trivialized-commutator", "§6.3 / Eq. trivialcommutator",
            trivialized_commutator_check(m, f, g, tau0), 1e-9);
    return rep;
}

// ---- conditional-probability suite ------------------------------------------------------------

// deterministic physical state used by the probability rows and the propagator
// scenario: matched energy branches weighted by the first computational amplitude
inline Vector canonical_physical_state(const ConstraintModel& m, std::uint64_t seed = 12345) {
    Vector psi = Vector::Zero(m.dim);
    for (const auto& [j, s] : m.matched_pairs)
        psi += std::conj(m.sys.eigenvectors(0, s)) *
               tensor(unit_vector(m.dim_c, j), Vector(m.sys.eigenvectors.col(s)));
    const double n = psi.norm();
    if (n < 1e-12) {
        std::mt19937_64 rng(seed);
        return random_physical_state(m, rng);
    }
    return psi / n;
}

inline Report probability_report(const ConstraintModel& m, std::uint64_t seed) {
    Report rep;
    rep.title = "probability";
    const double per = m.clock.period();
    const double tau1 = m.clock.t_start + 0.20 * per;
    const double tau2 = m.clock.t_start + 0.55 * per;
    const Vector psi = canonical_physical_state(m, seed);
    const Matrix ea = m.pi_sigma * position_projector(m, 0) * m.pi_sigma;
    const Matrix eb =
        m.pi_sigma * position_projector(m, m.dim_s > 1 ? 1 : 0) * m.pi_sigma;

    rep.add("one-time-path-agreement", "Eq. AwhenT", one_time_paths(m, psi, tau1, ea).defect(),
            1e-10);
    rep.add("one-time-certain-event", "Eq. AwhenT",
            std::abs(prob_one_time(m, psi, tau1, Matrix(m.pi_sigma)) - 1.0), 1e-12);
    rep.add("two-time-path-agreement", "Eq. AwhenT3",
            two_time_paths(m, psi, ea, tau1, eb, tau2).defect(), 1e-9);

    const bool full_block =
        max_abs(m.pi_sigma - Matrix::Identity(m.dim_s, m.dim_s)) < 1e-12;
    if (full_block) {
        double unit = 0.0;
        for (const double t2 : {tau2, m.clock.t_start + 0.75 * per}) {
            double total = 0.0;
            for (Index q2 = 0; q2 < m.dim_s; ++q2)
                total += propagator(m, psi, 0, tau1, q2, t2);
            unit = std::max(unit, std::abs(total - 1.0));
        }
        rep.add("propagator-unitarity", "§8.3", unit, 1e-9);
    } else {
        rep.add_skip("propagator-unitarity", "§8.3",
                     "position basis is not supported on the matched block");
    }

    const double p_ref = prob_one_time(m, psi, tau1, ea);
    double gauge = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double s = 0.61 * static_cast<double>(k);
        const Vector moved = evolve_constraint(m, s) * psi;
        gauge = std::max(gauge, std::abs(prob_one_time(m, moved, tau1, ea) - p_ref));
    }
    rep.add("gauge-invariance", "§8.3", gauge, 1e-12);

    double norm_inv = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const Complex lam =
            (0.1 + 0.3 * static_cast<double>(k)) * std::exp(iu * (0.7 * static_cast<double>(k)));
        const Vector scaled = lam * psi;
        norm_inv = std::max(norm_inv, std::abs(prob_one_time(m, scaled, tau1, ea) - p_ref));
        norm_inv = std::max(
            norm_inv, std::abs(two_time_paths(m, scaled, ea, tau1, eb, tau2).dirac -
                               two_time_paths(m, psi, ea, tau1, eb, tau2).dirac));
    }
    rep.add("normalization-invariance", "§8.3", norm_inv, 1e-12);
    return rep;
}

// ---- combined verification run ------------------------------------------------------------

struct VerifyRun {
    Report report;
    std::vector<std::pair<std::string, double>> timings_ms; // wall clock, per suite
};

inline VerifyRun full_report(const RunConfig& cfg) {
    const ConstraintModel m = model_from_config(cfg);
    const std::vector<NamedOperator> obs = observables_from_config(cfg, m.dim_s);
    if (obs.empty()) throw ConfigError("verify: config needs at least one observable");
    int tau_count = 20;
    if (cfg.raw.contains("tau_count")) {
        const double v = detail::json_number(cfg.raw.at("tau_count"), "tau_count");
        if (v < 2.0 || v != std::floor(v)) throw ConfigError("tau_count: expected an integer >= 2");
        tau_count = static_cast<int>(v);
    }
    const std::vector<double> taus = default_tau_grid(m, tau_count);

    const std::array<std::string, 5> names = {"clock", "constraint", "relobs", "trinity",
                                              "probability"};
    std::array<Report, 5> parts;
    std::array<double, 5> ms{};
    parallel_for(parts.size(), [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        switch (i) {
        case 0: parts[0] = clock_report(m.clock); break;
        case 1: parts[1] = constraint_report(m); break;
        case 2: parts[2] = relobs_report(m, obs, cfg.seed); break;
        case 3: parts[3] = verify_trinity(m, obs, taus, cfg.seed); break;
        default: parts[4] = probability_report(m, cfg.seed); break;
        }
        ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
    });

    VerifyRun run;
    run.report.title = "trinity-verify";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        run.report.append(parts[i]);
        run.timings_ms.emplace_back(names[i], ms[i]);
    }
    scale_tolerances(run.report, cfg.tol_scale);
    return run;
}

// ---- scenario drivers -------------------------------------------------------------------

struct PropagatorScenario {
    ScenarioReport report;
    std::vector<PropagatorSample> table;
};

inline PropagatorScenario scenario_propagator(const RunConfig& cfg) {
    const ConstraintModel m = model_from_config(cfg);
    const Json& s = scenario_object(cfg);
    const Index points = scenario_index(s, "points", "propagator");
    if (points < 1) throw ConfigError("propagator scenario.points: must be >= 1");
    const Index q = scenario_index_or(s, "q", 0);
    const Index q2 = scenario_index_or(s, "q2", 1);
    const double tau = scenario_number_or(s, "tau", 0.0);

    const Vector psi = canonical_physical_state(m, cfg.seed);
    std::vector<double> tau2s;
    tau2s.reserve(static_cast<std::size_t>(points));
    for (Index k = 0; k < points; ++k)
        tau2s.push_back(tau + m.clock.period() * static_cast<double>(k) /
                                  static_cast<double>(points));

    PropagatorScenario out;
    out.table = propagator_table(m, psi, q, q2, {tau}, tau2s);
    out.report.scenario = "propagator";
    const double tol = 1e-9 * cfg.tol_scale;
    for (const PropagatorSample& row : out.table)
        out.report.add("tau=" + format_double(row.tau) + ",tau2=" + format_double(row.tau2),
                       "transition-probability", row.value, tol, row.defect <= tol);
    return out;
}

inline ScenarioReport scenario_frame_change(const RunConfig& cfg) {
    const ThreeFrameModel t = three_frame_from_config(cfg);
    const Json& s = scenario_object(cfg);
    const Index states = scenario_index(s, "states", "frame-change");
    if (states < 1) throw ConfigError("frame-change scenario.states: must be >= 1");
    const Index points = scenario_index_or(s, "points", 7);
    if (points < 1) throw ConfigError("frame-change scenario.points: must be >= 1");
    const double tau_a = scenario_number_or(s, "tau_a", 0.3);
    std::uint64_t seed = cfg.seed;
    if (s.contains("seed")) seed = static_cast<std::uint64_t>(scenario_index(s, "seed", "frame-change"));

    ScenarioReport rep;
    rep.scenario = "frame-change";
    const double tol = 1e-9 * cfg.tol_scale;
    std::mt19937_64 rng(seed);
    const Perspective from{Frame::A, Picture::Schrodinger, tau_a};
    for (Index k = 0; k < states; ++k) {
        Vector psi = t.from_a.pi_sigma * random_state(t.from_a.dim_s, rng);
        if (psi.norm() < 1e-9)
            throw ConfigError("frame-change scenario: no matched physical states");
        psi.normalize();
        double norm_drift = 0.0;
        for (Index p = 0; p < points; ++p) {
            const double tau_b = t.from_b.clock.t_start + t.from_b.clock.period() *
                                                              static_cast<double>(p) /
                                                              static_cast<double>(points);
            const Perspective to{Frame::B, Picture::Schrodinger, tau_b};
            const Vector there = tfc_matrix(t, from, to) * psi;
            const Vector back = tfc_matrix(t, to, from) * there;
            const double defect = (back - psi).norm();
            norm_drift = std::max(norm_drift, std::abs(there.norm() - 1.0));
            rep.add("state=" + std::to_string(k) + ",tau_b=" + format_double(tau_b),
                    "round-trip-defect", defect, tol, defect <= tol);
        }
        rep.add("state=" + std::to_string(k), "norm-preservation-defect", norm_drift, tol,
                norm_drift <= tol);
    }
    return rep;
}

inline ScenarioReport scenario_nonlocality(const RunConfig& cfg) {
    return nonlocality_sweep(nonlocality_from_config(cfg), nonlocality_deltas(cfg));
}

// ---- clock-info ----------------------------------------------------------------------

inline std::vector<std::string> clock_info_lines(const ClockSystem& c) {
    std::vector<std::string> lines;
    lines.push_back(std::string("regime = ") +
                    (c.spec.regime == ClockRegime::Compact ? "compact" : "continuum"));
    lines.push_back("dim = " + std::to_string(c.dim));
    lines.push_back("mu = " + format_double(c.mu));
    lines.push_back("weight = " + format_double(c.weight));
    if (c.spec.regime == ClockRegime::Compact)
        lines.push_back("t_max = " + format_double(c.t_end));
    else
        lines.push_back("window = [" + format_double(c.t_start) + ", " + format_double(c.t_end) +
                        "]");
    return lines;
}

} // namespace trinity
