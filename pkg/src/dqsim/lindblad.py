"""Master equation with resonator photon loss, integrated over piecewise-constant Hamiltonians.

drho/dt = -i [H, rho] + kappa (2 a rho a^dagger - a^dagger a rho - rho a^dagger a) / 2

The integrator is a fixed-step integrating-factor (Lawson) RK4: inside a
segment the coherent part is propagated exactly in the eigenbasis of H and
classical RK4 handles only the dissipator. Before integrating, the problem is
restricted to the coordinate subspace reachable from the support of rho_0
under H and a (a alone, not a^dagger). That subspace is invariant under the
generator, so the restriction is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hamiltonians import build_h1, build_h2, h2_blocks, h2_frame
from .hilbert import DensityMatrix, Operator, ShapeMismatchError, conjugate, expm_hermitian, ladder

MAX_TRACE_DRIFT = 1e-6


class NumericalAbort(RuntimeError):
    """Integration left its validity envelope (trace drift, Fock truncation)."""


@dataclass(frozen=True)
class Segment:
    H: Operator
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"segment duration must be > 0, got {self.duration}")
        if not self.H.is_hermitian():
            raise ValueError("segment Hamiltonian must be Hermitian")


def _dissipate(a: np.ndarray, ad: np.ndarray, n: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return a @ rho @ ad - 0.5 * (n @ rho + rho @ n)


def lindblad_rhs(rho: DensityMatrix | np.ndarray, H: Operator, kappa: float) -> np.ndarray:
    """Time derivative of rho; the annihilation operator comes from H's shape."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape != H.matrix.shape:
        raise ShapeMismatchError(f"rho {m.shape} vs H {H.matrix.shape}")
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    h = H.matrix
    out = -1j * (h @ m - m @ h)
    if kappa and H.shape.has_mode:
        a = ladder("lower", H.shape).matrix
        ad = a.conj().T
        out = out + kappa * _dissipate(a, ad, ad @ a, m)
    return out


def reachable_indices(seed: np.ndarray, generators: Sequence[np.ndarray]) -> np.ndarray:
    """Basis indices reachable from ``seed`` (bool mask) through nonzero entries of the generators."""
    adj = np.zeros(generators[0].shape, dtype=bool)
    for g in generators:
        adj |= g != 0
    mask = seed.copy()
    while True:
        grown = mask | adj[:, mask].any(axis=1)
        if np.array_equal(grown, mask):
            return np.flatnonzero(mask)
        mask = grown


@dataclass
class MasterResult:
    """States at t=0 and after every segment, plus run-wide diagnostics."""

    times: np.ndarray
    states: list[DensityMatrix]
    steps: int
    subspace_dim: int
    max_trace_drift: float = 0.0
    min_eigenvalue: float = 1.0
    max_purity: float = 1.0
    top_fock_population: float = 0.0
    dt_used: list[float] = field(default_factory=list)

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


class _Propagator:
    """Eigendecomposition of one segment Hamiltonian on the reduced space."""

    def __init__(self, h: np.ndarray, a: np.ndarray) -> None:
        self.energies, self.vecs = np.linalg.eigh(h)
        self.norm = float(np.abs(self.energies).max())
        vd = self.vecs.conj().T
        self.a = vd @ a @ self.vecs
        self.ad = self.a.conj().T
        self.n = self.ad @ self.a
        self.gaps = self.energies[:, None] - self.energies[None, :]

    def to_eigen(self, rho: np.ndarray) -> np.ndarray:
        return self.vecs.conj().T @ rho @ self.vecs

    def from_eigen(self, rho: np.ndarray) -> np.ndarray:
        return self.vecs @ rho @ self.vecs.conj().T

    def phases(self, h: float) -> np.ndarray:
        return np.exp(-1j * self.gaps * h)


def step_count(duration: float, norm: float, kappa: float, dt: float | None,
               max_phase: float, max_decay: float) -> int:
    if dt is not None:
        return max(1, math.ceil(duration / dt - 1e-9))
    limits = []
    if kappa > 0:
        limits.append(max_decay / kappa)
        if norm > 0:
            limits.append(max_phase / norm)
    if not limits:
        return 1
    return max(1, math.ceil(duration / min(limits) - 1e-9))


def evolve_master(rho0: DensityMatrix, segments: Sequence[Segment], kappa: float, dt: float | None = None,
                  *, max_phase: float = 0.05, max_decay: float = 1e-4,
                  check_positivity: bool = True) -> MasterResult:
    """Integrate through ``segments`` in order and return the state after each one.

    Without an explicit ``dt`` each segment is cut so that ||H|| dt <= max_phase
    and kappa dt <= max_decay (norms on the reduced space). For kappa = 0 the
    coherent propagation is exact and a single step per segment is taken.
    """
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if dt is not None and not dt > 0:
        raise ValueError("dt must be > 0")
    shape = rho0.shape
    for seg in segments:
        if seg.H.shape != shape:
            raise ShapeMismatchError(f"segment on {seg.H.shape}, state on {shape}")

    a_full = ladder("lower", shape).matrix if shape.has_mode else np.zeros((shape.total_dim,) * 2)
    distinct: dict[int, Operator] = {id(s.H): s.H for s in segments}
    seed = np.abs(rho0.matrix).sum(axis=1) > 0
    gens = [h.matrix for h in distinct.values()]
    if kappa > 0:
        gens.append(a_full)
    idx = reachable_indices(seed, gens)
    sub = np.ix_(idx, idx)
    a_red = a_full[sub]
    props = {key: _Propagator(h.matrix[sub], a_red) for key, h in distinct.items()}

    top_rows = []
    if shape.has_mode:
        top_rows = [i for i, full in enumerate(idx) if full % shape.fock_dim == shape.fock_dim - 1]

    def embed(r: np.ndarray) -> np.ndarray:
        full = np.zeros((shape.total_dim, shape.total_dim), dtype=complex)
        full[sub] = r
        return full

    rho = np.array(rho0.matrix[sub])
    result = MasterResult(times=np.zeros(len(segments) + 1), states=[rho0], steps=0,
                          subspace_dim=len(idx))
    clock = 0.0
    for i, seg in enumerate(segments):
        p = props[id(seg.H)]
        n_steps = step_count(seg.duration, p.norm, kappa, dt, max_phase, max_decay)
        h = seg.duration / n_steps
        result.dt_used.append(h)
        full_ph, half_ph = p.phases(h), p.phases(h / 2)
        r = p.to_eigen(rho)
        for _ in range(n_steps):
            if kappa > 0:
                k1 = kappa * _dissipate(p.a, p.ad, p.n, r)
                k2 = kappa * _dissipate(p.a, p.ad, p.n, half_ph * (r + 0.5 * h * k1))
                k3 = kappa * _dissipate(p.a, p.ad, p.n, half_ph * r + 0.5 * h * k2)
                k4 = kappa * _dissipate(p.a, p.ad, p.n, full_ph * r + h * half_ph * k3)
                r = full_ph * (r + h / 6 * k1) + h / 6 * (half_ph * (2 * k2 + 2 * k3) + k4)
            else:
                r = full_ph * r
            r = 0.5 * (r + r.conj().T)
        result.steps += n_steps
        rho = p.from_eigen(r)
        rho = 0.5 * (rho + rho.conj().T)

        drift = abs(np.trace(rho).real - 1.0)
        result.max_trace_drift = max(result.max_trace_drift, drift)
        if drift > MAX_TRACE_DRIFT:
            raise NumericalAbort(
                f"trace drift {drift:.3e} after segment {i} (dt={h:.3e}, ||H|| dt={p.norm * h:.3e}); "
                "reduce dt"
            )
        if check_positivity:
            result.min_eigenvalue = min(result.min_eigenvalue, float(np.linalg.eigvalsh(rho)[0]))
        result.max_purity = max(result.max_purity, float(np.vdot(rho, rho).real))
        if top_rows:
            top = float(np.diag(rho)[top_rows].real.sum())
            result.top_fock_population = max(result.top_fock_population, top)
        clock += seg.duration
        result.times[i + 1] = clock
        result.states.append(DensityMatrix(shape, embed(rho), tol=1e-8))
    return result


def itc_schedule(n: int, omega1: float, Omega1: float, g: float, omega2: float, Omega2: float,
                 J: float, t: float, s: int, fock_dim: int, expand: bool = False) -> list[Segment]:
    """Trotter schedule [H1 for t/s, H2 for t/s] * s.

    With ``expand`` each H2 slot becomes N-1 consecutive pair blocks H(j,k),
    each lasting t/s with omega' = omega_2/(N-1), Omega' = Omega_2/(N-1).
    """
    if s < 1:
        raise ValueError("steps must be >= 1")
    tau = t / s
    h1 = build_h1(n, omega1, Omega1, g, fock_dim)
    omega_p, Omega_p = h2_frame(n, omega2, Omega2)
    if expand:
        h2_part = [Segment(b, tau) for b in h2_blocks(n, omega_p, Omega_p, J, fock_dim)]
    else:
        h2_part = [Segment(build_h2(n, omega_p, Omega_p, J, fock_dim), tau)]
    out: list[Segment] = []
    for _ in range(s):
        out.append(Segment(h1, tau))
        out.extend(h2_part)
    return out


def unitary_schedule_oracle(rho0: DensityMatrix, segments: Sequence[Segment]) -> DensityMatrix:
    """Closed-system result: conjugate by exp(-i H tau) per segment."""
    rho = rho0
    for seg in segments:
        rho = conjugate(expm_hermitian(seg.H, seg.duration), rho)
    return rho
