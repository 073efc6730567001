#!/usr/bin/env python3
# nonlocality.py -- independent state-vector simulation of the two-clock
# Gaussian scenario. Computes the frame-change output along two routes
# (physical-projector composition and direct time-convolution quadrature),
# then the fidelities whose thresholds get frozen into the acceptance suite.
import numpy as np

d = 64
de = 1.0
epsA = (np.arange(d) - d // 2) * de      # [-32, 31]
epsB = epsA.copy()
T = np.pi / de
mu = 1.0 / (2 * np.pi)
w = np.sqrt(de)

sx = np.array([[0, 1], [1, 0]], dtype=complex)
Es, Vs = np.linalg.eigh(sx)              # E = -1, +1
psiS0 = Vs.conj().T @ np.array([1.0, 0.0])   # |0> in the energy eigenbasis

sigma = 0.12
Delta = 2.4                               # sigma/Delta = 0.05
tauA = 0.0


def clock_amp(eps, t):
    return w * np.exp(-1j * eps * t)


def packet_amps(peaks):
    # wavepacket of B clock states with time profile sum of Gaussians at the peaks
    c = np.zeros(d, dtype=complex)
    for p in peaks:
        c = c + np.exp(-(sigma ** 2) * epsB ** 2 / 2) * np.exp(-1j * epsB * p)
    return c / np.linalg.norm(c)


def truncation_masses(peaks):
    # L2 mass of the ideal profile outside the time window, and of the ideal
    # energy amplitude outside the grid
    ts = np.linspace(-4 * T, 4 * T, 200001)
    prof = sum(np.exp(-((ts - p) ** 2) / (2 * sigma ** 2)) for p in peaks)
    m = prof ** 2
    t_out = m[np.abs(ts) > T].sum() / m.sum()
    es = np.linspace(-argmax_e() * 8, argmax_e() * 8, 200001)
    amp = np.exp(-(sigma ** 2) * es ** 2 / 2)
    me = amp ** 2
    e_out = me[np.abs(es) > epsB.max()].sum() / me.sum()
    return t_out, e_out


def argmax_e():
    return epsB.max()


def lambda_path(cB, tauB):
    # (<tauB|_B ⊗ I_AS) P_phys (|tauA>_A ⊗ psi_B ⊗ psi_S), spaces ordered A,B,S
    out = np.zeros((d, 2), dtype=complex)
    ampA = clock_amp(epsA, tauA)
    for s in range(2):
        ebn = -epsA - Es[s]                    # matched B energy per A index
        b = np.round(ebn / de).astype(int) + d // 2
        ok = (b >= 0) & (b < d) & (np.abs(ebn - (b - d // 2) * de) < 1e-9)
        amps = np.zeros(d, dtype=complex)
        amps[ok] = ampA[ok] * cB[b[ok]] * psiS0[s] * np.conj(clock_amp(epsB[b[ok]], tauB))
        out[:, s] = amps
    return out.ravel()


def convolution_path(cB, tauB):
    # mu ∮ dt psi_{B|A}(tauB - t) |t>_A |psi_S(t)>, with psi_{B|A} reconstructed
    # from the grid packet (band-limited)
    nt = 512
    ts = -T + (2 * T / nt) * np.arange(nt)
    dt = 2 * T / nt
    out = np.zeros((d, 2), dtype=complex)
    prof = (w * cB[None, :] * np.exp(1j * np.outer(tauB - ts, epsB))).sum(axis=1)
    for li, t in enumerate(ts):
        out += mu * dt * prof[li] * np.outer(clock_amp(epsA, t), psiS0 * np.exp(-1j * Es * t))
    return out.ravel()


def rho_S(v):
    m = v.reshape(d, 2)
    rho = m.conj().T @ m
    return rho / np.trace(rho).real


def fidelity(rho, sig):
    wr, vr = np.linalg.eigh(rho)
    wr = np.clip(wr, 0, None)
    sq = (vr * np.sqrt(wr)) @ vr.conj().T
    m = sq @ sig @ sq
    ev = np.clip(np.linalg.eigvalsh(m), 0, None)
    return float(np.sum(np.sqrt(ev)) ** 2)


def psi_S(t):
    return psiS0 * np.exp(-1j * Es * t)


print("== truncation masses (error contract <= 1e-6) ==")
t_out, e_out = truncation_masses([-Delta, Delta])
print(f"time-window mass outside: {t_out:.3e}, energy-grid mass outside: {e_out:.3e}")

print("\n== two-peak scenario, tauB = 0 ==")
cB2 = packet_amps([-Delta, Delta])
out_l = lambda_path(cB2, 0.0)
out_c = convolution_path(cB2, 0.0)
agree = np.linalg.norm(out_l - out_c) / np.linalg.norm(out_l)
print("lambda vs convolution relative disagreement:", agree)
rho = rho_S(out_l)
mix = 0.5 * (np.outer(psi_S(-Delta), psi_S(-Delta).conj())
             + np.outer(psi_S(Delta), psi_S(Delta).conj()))
print("mixture fidelity:", fidelity(rho, mix))

print("\n== two-peak, Delta=0 (degenerate) ==")
cB0 = packet_amps([0.0, 0.0])
out0 = lambda_path(cB0, 0.0)
rho0 = rho_S(out0)
pure = np.outer(psi_S(0.0), psi_S(0.0).conj())
print("purity fidelity:", fidelity(rho0, pure))

print("\n== single-peak control ==")
for tauB in (0.0, 0.7):
    cB1 = packet_amps([0.0])
    out1 = lambda_path(cB1, tauB)
    # reference: U_AS(tauB) applied to the frozen packet integral
    nt = 512
    ts = -T + (2 * T / nt) * np.arange(nt)
    dt = 2 * T / nt
    ref = np.zeros((d, 2), dtype=complex)
    prof = (w * cB1[None, :] * np.exp(1j * np.outer(-ts, epsB))).sum(axis=1)
    for li, t in enumerate(ts):
        ref += mu * dt * prof[li] * np.outer(clock_amp(epsA, t), psiS0 * np.exp(-1j * Es * t))
    phase = np.exp(-1j * np.add.outer(epsA, Es) * tauB)
    ref = (phase * ref).ravel()
    f = abs(np.vdot(ref, out1)) ** 2 / (np.vdot(ref, ref).real * np.vdot(out1, out1).real)
    print(f"tauB={tauB}: temporally-local fidelity = {f:.12f}")

print("\n== branch structure diagnostics ==")
ov = abs(np.vdot(psi_S(-Delta), psi_S(Delta)))
print("system branch overlap |<psi_S(-D)|psi_S(D)>| =", ov)
