"""Fidelity and overlap measures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .hilbert import DensityMatrix, PureState, ShapeMismatchError


def fidelity_pure(psi1: PureState, psi2: PureState) -> float:
    """|<psi1|psi2>|^2."""
    return abs(psi1.inner(psi2)) ** 2


def fidelity_trace(rho_i: DensityMatrix, rho_t: DensityMatrix) -> float:
    """Tr(rho_I rho_T). This is the overlap, not the Uhlmann fidelity."""
    if rho_i.shape != rho_t.shape:
        raise ShapeMismatchError(f"{rho_i.shape} vs {rho_t.shape}")
    # Tr(A B) = sum_ij A_ij B_ji; for Hermitian B that is vdot(B, A)
    value = np.vdot(rho_t.matrix, rho_i.matrix)
    if abs(value.imag) > 1e-10:
        raise ValueError(f"Tr(rho_I rho_T) has imaginary part {value.imag:.3e}")
    return float(value.real)


def fidelity(a: PureState | DensityMatrix, b: PureState | DensityMatrix) -> float:
    if isinstance(a, PureState) and isinstance(b, PureState):
        return fidelity_pure(a, b)
    da = a.density() if isinstance(a, PureState) else a
    db = b.density() if isinstance(b, PureState) else b
    return fidelity_trace(da, db)


def trace_distance(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """(1/2) ||rho1 - rho2||_1."""
    if rho1.shape != rho2.shape:
        raise ShapeMismatchError(f"{rho1.shape} vs {rho2.shape}")
    diff = rho1.matrix - rho2.matrix
    return 0.5 * float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum())


def overlap_with_initial(trajectory: Sequence[PureState | DensityMatrix],
                         initial: PureState | DensityMatrix) -> np.ndarray:
    return np.array([fidelity(state, initial) for state in trajectory])


@dataclass
class FidelityReport:
    """Fidelity curves on a shared grid, one per Trotter step count, plus the inset overlap."""

    axis_name: str
    grid: np.ndarray
    curves: dict[int, np.ndarray] = field(default_factory=dict)
    inset_overlap: np.ndarray | None = None
    extra: dict[str, np.ndarray] = field(default_factory=dict)

    def final(self) -> dict[int, float]:
        return {s: float(c[-1]) for s, c in self.curves.items()}

    def monotone_final(self) -> bool:
        """Final-point fidelity strictly increases with the step count."""
        vals = [self.curves[s][-1] for s in sorted(self.curves)]
        return all(b > a for a, b in zip(vals, vals[1:]))

    def dominates(self, low: int, high: int, slack: float = 1e-9) -> bool:
        """curve(high) >= curve(low) - slack at every grid point."""
        return bool(np.all(self.curves[high] >= self.curves[low] - slack))

    def columns(self) -> list[tuple[str, np.ndarray]]:
        cols = [(self.axis_name, self.grid)]
        cols += [(f"F_s{s}", self.curves[s]) for s in sorted(self.curves)]
        cols += list(self.extra.items())
        if self.inset_overlap is not None:
            cols.append(("overlap_initial", self.inset_overlap))
        return cols

    def to_csv(self) -> str:
        cols = self.columns()
        lines = [",".join(name for name, _ in cols)]
        for row in range(len(self.grid)):
            lines.append(",".join(f"{values[row]:.16e}" for _, values in cols))
        return "\n".join(lines) + "\n"
