#!/usr/bin/env python3
# small_models.py -- brute-force reference values for the small compact-clock models.
# Everything here is computed by dense eigendecomposition and explicit quadrature,
# independently of the C++ closed forms, so the numbers can be frozen into tests.
import numpy as np

np.set_printoptions(precision=15, suppress=False)


def kron(*ops):
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
    return out


def clock_state(energies, t, g=None):
    e = np.asarray(energies, dtype=float)
    if g is None:
        g = np.zeros_like(e)
    return np.exp(1j * g) * np.exp(-1j * e * t)


def dense_kernel_projector(h, tol=1e-9):
    w, v = np.linalg.eigh(h)
    cols = v[:, np.abs(w) <= tol]
    return cols @ cols.conj().T, cols.shape[1]


def dephasing_twirl(c_h, a, tol=1e-9):
    w, v = np.linalg.eigh(c_h)
    out = np.zeros_like(a)
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and abs(w[j] - w[i]) <= tol:
            j += 1
        p = v[:, i:j] @ v[:, i:j].conj().T
        out = out + p @ a @ p
        i = j
    return out


def expm_herm(h, t):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


print("== evolve oracle ==")
sz = np.diag([1.0, -1.0]).astype(complex)
print("evolve(sigma_z, pi) =\n", expm_herm(sz, np.pi))

print("\n== compact clock {0,1,2,3}, t_max=2pi : first moment by quadrature ==")
e4 = [0.0, 1.0, 2.0, 3.0]
t_max = 2 * np.pi
nt = 200001
ts = np.linspace(0.0, t_max, nt)
V = np.exp(-1j * np.outer(e4, ts))          # columns are clock states over time
wq = np.full(nt, t_max / (nt - 1)); wq[0] *= 0.5; wq[-1] *= 0.5   # trapezoid
T1 = (V * (wq * ts)) @ V.conj().T / t_max
print("T[0,0], T[1,1] (expect pi):", T1[0, 0].real, T1[1, 1].real)
print("T[0,1] (expect +1j/(0-1) = -1j):", T1[0, 1])
print("T[0,2] (expect 1j/(0-2) = -0.5j):", T1[0, 2])
res = (V * wq) @ V.conj().T / t_max
print("resolution defect (trapezoid):", np.linalg.norm(res - np.eye(4), 2))
ccr = T1 @ np.diag(e4) - np.diag(e4) @ T1
print("CCR defect vs i(I - ones):", np.linalg.norm(ccr - 1j * (np.eye(4) - np.ones((4, 4))), 2))

print("\n== model M1: clock {0,1,2,3} x H_S=diag(-1,-2) ==")
hs1 = np.diag([-1.0, -2.0]).astype(complex)
hc1 = np.diag(e4).astype(complex)
C1 = kron(hc1, np.eye(2)) + kron(np.eye(4), hs1)
P1, rank1 = dense_kernel_projector(C1)
print("kernel rank (expect 2):", rank1)
w1 = np.linalg.eigvalsh(C1)
print("constraint spectrum:", np.round(w1, 12))

print("\n== model M2: clock {-2..2} x H_S=sigma_x : propagator paths ==")
sx = np.array([[0, 1], [1, 0]], dtype=complex)
e5 = [-2.0, -1.0, 0.0, 1.0, 2.0]
hc2 = np.diag(e5).astype(complex)
C2 = kron(hc2, np.eye(2)) + kron(np.eye(5), sx)
P2, rank2 = dense_kernel_projector(C2)
print("kernel rank (expect 2):", rank2)

# physical state whose reduced state at tau=0 is |0> (position basis)
evals, evecs = np.linalg.eigh(sx)
psi = np.zeros(10, dtype=complex)
for k in range(2):
    E = evals[k]
    j = e5.index(-E)
    amp = evecs[:, k].conj() @ np.array([1.0, 0.0])          # <E|0>
    psi += amp * kron(np.eye(5)[j].reshape(5, 1), evecs[:, k].reshape(2, 1)).ravel()
psi /= np.linalg.norm(psi)

proj0 = np.diag([1.0, 0.0]).astype(complex)
proj1 = np.diag([0.0, 1.0]).astype(complex)


def reduce_state(psi_kin, tau):
    bra = clock_state(e5, tau).conj()
    return (bra.reshape(5, 1, 1) * psi_kin.reshape(5, 2, 1)).sum(axis=0).ravel()


def two_time_paths(psi_kin, pa, ta, pb, tb):
    # (i) relational-observable path
    Xa = kron(np.outer(clock_state(e5, ta), clock_state(e5, ta).conj()), pa)
    Xb = kron(np.outer(clock_state(e5, tb), clock_state(e5, tb).conj()), pb)
    Fa = dephasing_twirl(C2, Xa)
    Fb = dephasing_twirl(C2, Xb)
    num_i = np.vdot(psi_kin, Fa @ Fb @ Fa @ psi_kin).real
    den_i = np.vdot(psi_kin, Fa @ psi_kin).real
    # (ii) hybrid form, projector-delta convention
    num_ii = np.vdot(psi_kin, Xa @ P2 @ Xb @ P2 @ Xa @ psi_kin).real
    den_ii = np.vdot(psi_kin, Xa @ psi_kin).real
    # (iii) reduced closed form
    ps = reduce_state(psi_kin, ta)
    u = expm_herm(sx, tb - ta)
    num_iii = np.vdot(pa @ ps, u.conj().T @ pb @ u @ (pa @ ps)).real
    den_iii = np.vdot(ps, pa @ ps).real
    return num_i / den_i, num_ii / den_ii, num_iii / den_iii


for dt in (np.pi / 2, np.pi / 6, 0.37):
    a, b, c = two_time_paths(psi, proj0, 0.0, proj1, dt)
    print(f"two-time dt={dt:.6f}: paths=({a:.15f},{b:.15f},{c:.15f}) sin^2={np.sin(dt)**2:.15f}")

ps0 = reduce_state(psi, 0.8)
print("one-time prob(A=0, tau=0.8):", (np.vdot(ps0, proj0 @ ps0) / np.vdot(ps0, ps0)).real,
      " cos^2(0.8) =", np.cos(0.8) ** 2)

# three-time chain |0>,|1>,|0> at (0, pi/4, pi/2)
u = expm_herm(sx, np.pi / 4)
ps = reduce_state(psi, 0.0)
chain = proj0 @ u.conj().T @ proj1 @ u.conj().T @ proj0 @ u @ proj1 @ u @ proj0
num = np.vdot(ps, chain @ ps).real
den = np.vdot(ps, proj0 @ ps).real
print("three-time value (expect 0.25):", num / den)

# gauge invariance: psi -> exp(-i s C) psi and psi -> lam*psi
rng = np.random.default_rng(7)
worst = 0.0
base = two_time_paths(psi, proj0, 0.0, proj1, 0.37)[0]
for _ in range(10):
    s = rng.uniform(0, 2 * np.pi)
    lam = rng.normal() + 1j * rng.normal()
    psi_g = expm_herm(C2, s) @ psi * lam
    v = two_time_paths(psi_g, proj0, 0.0, proj1, 0.37)[0]
    worst = max(worst, abs(v - base))
print("gauge-invariance worst drift:", worst)

print("\n== F1 three-frame model: theorem-7 sweep logic ==")
eA = [0.0, 1.0, 2.0, 3.0]
eB = [-4.0, -3.0, -2.0, -1.0, 0.0]
hA = np.diag(eA).astype(complex)
hB = np.diag(eB).astype(complex)
C3 = kron(hA, np.eye(5), np.eye(2)) + kron(np.eye(4), hB, np.eye(2)) + kron(np.eye(4), np.eye(5), sx)
P3, rank3 = dense_kernel_projector(C3)
print("kernel rank (expect 7):", rank3)


def obs_sweep(o_bs, tau_a, tau_bs):
    # O_{AS|B}(tau_a, tau_b) = (<tau_b| ⊗ I_AS) P (|tau_a><tau_a| ⊗ O_BS) P (|tau_b> ⊗ I_AS)
    outs = []
    ket_a = clock_state(eA, tau_a)
    # |tau_a><tau_a| on A  ⊗  O_BS  (spaces ordered A,B,S)
    A_op = np.outer(ket_a, ket_a.conj())
    full = np.einsum("ac,bsdt->abscdt", A_op, o_bs.reshape(5, 2, 5, 2)).reshape(40, 40)
    for tb in tau_bs:
        ket_b = clock_state(eB, tb)
        emb = P3 @ full @ P3                      # on A⊗B⊗S
        t = emb.reshape(4, 5, 2, 4, 5, 2)
        red = np.einsum("b,abscdt,d->asct", ket_b.conj(), t, ket_b).reshape(8, 8)
        outs.append(red)
    return outs


def bfactor_block_defect(o_bs):
    # off-diagonal-in-H_B-energy content of O_BS
    o = o_bs.reshape(5, 2, 5, 2)
    d = 0.0
    for b in range(5):
        for bp in range(5):
            if b != bp:
                d = max(d, np.linalg.norm(o[b, :, bp, :], 2))
    return d


rng = np.random.default_rng(42)
taus = np.linspace(0, 2 * np.pi, 9, endpoint=False)
# conforming operator: sum_b |b><b| ⊗ f_b
o_good = np.zeros((10, 10), dtype=complex)
for b in range(5):
    f = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = f + f.conj().T
    o_good += kron(np.outer(np.eye(5)[b], np.eye(5)[b]), f)
o_bad = rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10))
o_bad = o_bad + o_bad.conj().T

for name, o in (("conforming", o_good), ("generic", o_bad)):
    outs = obs_sweep(o, 0.3, taus)
    dd = max(np.linalg.norm(outs[i] - outs[0], 2) for i in range(len(outs)))
    print(f"{name}: sweep max defect = {dd:.3e}, B-block defect = {bfactor_block_defect(o):.3e}")
