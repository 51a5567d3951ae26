"""First-order product formulas, their error estimates, and gate-level Trotter schedules."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gates import GateKind, GateSequence, zzz_layer_gates
from .hamiltonians import TermList, nn_pairs, nn_triples
from .hilbert import Operator, SpaceShape, expm_hermitian


@dataclass(frozen=True)
class TrotterPlan:
    terms: TermList | Sequence[Operator]
    time: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")

    @property
    def operators(self) -> list[Operator]:
        if isinstance(self.terms, TermList):
            return self.terms.operators
        return list(self.terms)


def _operators(terms: TermList | Sequence[Operator]) -> list[Operator]:
    return terms.operators if isinstance(terms, TermList) else list(terms)


def trotter_step(terms: TermList | Sequence[Operator], dt: float) -> Operator:
    """One step: the first term acts first, so it sits rightmost in the product."""
    ops = _operators(terms)
    for op in ops:
        if not op.is_hermitian():
            raise ValueError("Trotter terms must be Hermitian")
    u = Operator.identity(ops[0].shape)
    for op in ops:
        u = expm_hermitian(op, dt) @ u
    return u


def trotter_unitary(plan: TrotterPlan) -> Operator:
    step = trotter_step(plan.terms, plan.time / plan.steps)
    return Operator(step.shape, np.linalg.matrix_power(step.matrix, plan.steps))


def exact_unitary(terms: TermList | Sequence[Operator], t: float) -> Operator:
    ops = _operators(terms)
    return expm_hermitian(Operator(ops[0].shape, sum(op.matrix for op in ops)), t)


def trotter_error_first_order(terms: TermList | Sequence[Operator], t: float, s: int) -> float:
    """||sum_{i<j} [H_i, H_j]||_2 t^2 / (2 s)."""
    ops = [op.matrix for op in _operators(terms)]
    total = np.zeros_like(ops[0])
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            total += ops[i] @ ops[j] - ops[j] @ ops[i]
    return float(np.linalg.norm(total, 2)) * t * t / (2 * s)


def trotter_tail_bound(h: Operator | float, t: float, s: int, k: int) -> float:
    """s (||H|| t / s)^k / k!, bounding the order-k remainder."""
    if k < 3:
        raise ValueError("tail bound is defined for k >= 3")
    norm = h.norm() if isinstance(h, Operator) else float(h)
    return s * (norm * abs(t) / s) ** k / math.factorial(k)


def _zz_layer(seq: GateSequence, n: int, angle: float) -> None:
    for j, k in nn_pairs(n):
        seq.append(GateKind.ZZ, (j, k), angle)


def _x_layer(seq: GateSequence, n: int, angle: float) -> None:
    for j in range(1, n + 1):
        seq.append(GateKind.XROT, (j,), angle)


def digital_sequence_ising(n: int, J: float, B: float, t: float, s: int) -> GateSequence:
    """s repetitions of N-1 ZZ(J t/s) gates followed by N X(B t/s) rotations."""
    if n < 2:
        raise ValueError("Ising chain needs N >= 2")
    if s < 1:
        raise ValueError("steps must be >= 1")
    seq = GateSequence(SpaceShape(n))
    for _ in range(s):
        _zz_layer(seq, n, J * t / s)
        _x_layer(seq, n, B * t / s)
    return seq


def digital_sequence_extended(n: int, J: float, G: float, B: float, t: float, s: int,
                              zzz_mode: str = "direct") -> GateSequence:
    """Per step: ZZ layer, ZZZ layer (realized per ``zzz_mode``), X layer."""
    if n < 3:
        raise ValueError("three-body chain needs N >= 3")
    if s < 1:
        raise ValueError("steps must be >= 1")
    shape = SpaceShape(n)
    seq = GateSequence(shape)
    for _ in range(s):
        _zz_layer(seq, n, J * t / s)
        for triple in nn_triples(n):
            seq.extend(zzz_layer_gates(G * t / s, triple, zzz_mode, shape))
        _x_layer(seq, n, B * t / s)
    return seq


def gate_counts(seq: GateSequence, steps: int = 1) -> dict[str, float]:
    """Logical and physical gate tallies, totals and per Trotter step."""
    c = seq.counts()
    out = {
        "total_gates": len(seq),
        "ZZ": c.get("ZZ", 0),
        "ZZZ": c.get("ZZZ", 0),
        "X": c.get("Xrot", 0),
        "two_qubit": seq.two_qubit_count(),
        "single_qubit": seq.single_qubit_count(),
        "collective": c.get("CollectiveSz2", 0),
    }
    per_step = {f"{k}_per_step": v / steps for k, v in out.items()}
    return {**out, **per_step}
