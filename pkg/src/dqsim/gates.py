"""Gate set for superconducting-circuit protocols and the ZZ / ZZZ decomposition identities.

All diagonal gates are built straight from sigma_z eigenvalue vectors, so
placing them on arbitrary (not necessarily adjacent) sites costs nothing.
A :class:`GateSequence` lists gates in *application* order; evaluating it
multiplies right-to-left.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .hilbert import Operator, PureState, ShapeMismatchError, SpaceShape, embed, z_eigenvalues

QUARTER_PI = np.pi / 4


class GateKind(str, Enum):
    ZROT = "Zrot"  # diag(1, e^{i phi})
    XROT = "Xrot"  # exp(-i phi sx)
    YROT = "Yrot"  # exp(-i theta sy / 2)
    CZ = "CZ"  # diag(1, 1, 1, e^{-2 i phi})
    ZZ = "ZZ"  # exp(-i theta sz sz)
    ZZ_A = "ZZ_A"  # exp(+i pi/4 sz sz), angle ignored
    ZZ_B = "ZZ_B"  # exp(-i pi/4 sz sz), angle ignored
    ZZZ = "ZZZ"  # exp(-i beta sz sz sz)
    COLLECTIVE_SZ2 = "CollectiveSz2"  # exp(-i theta/2 sum_{i<j} sz sz)
    XFLIP = "Xflip"  # exp(+i alpha sx)


ARITY = {
    GateKind.ZROT: 1,
    GateKind.XROT: 1,
    GateKind.YROT: 1,
    GateKind.XFLIP: 1,
    GateKind.CZ: 2,
    GateKind.ZZ: 2,
    GateKind.ZZ_A: 2,
    GateKind.ZZ_B: 2,
    GateKind.ZZZ: 3,
    GateKind.COLLECTIVE_SZ2: None,
}

DIAGONAL_KINDS = frozenset(
    {GateKind.ZROT, GateKind.CZ, GateKind.ZZ, GateKind.ZZ_A, GateKind.ZZ_B, GateKind.ZZZ,
     GateKind.COLLECTIVE_SZ2}
)
_SINGLE_QUBIT_KINDS = frozenset({GateKind.ZROT, GateKind.XROT, GateKind.YROT, GateKind.XFLIP})


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    sites: tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        arity = ARITY[self.kind]
        if arity is None:
            if len(self.sites) < 2:
                raise ValueError("CollectiveSz2 needs at least two sites")
        elif len(self.sites) != arity:
            raise ValueError(f"{self.kind.value} acts on {arity} site(s), got {self.sites}")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError(f"repeated site in {self.sites}")


def _diag_phases(gate: Gate, shape: SpaceShape) -> np.ndarray:
    k, a = gate.kind, gate.angle
    z = [z_eigenvalues(shape, s) for s in gate.sites]
    if k is GateKind.ZROT:
        bit = (1 - z[0]) / 2
        return np.exp(1j * a * bit)
    if k is GateKind.CZ:
        both = (1 - z[0]) * (1 - z[1]) / 4
        return np.exp(-2j * a * both)
    if k is GateKind.ZZ:
        return np.exp(-1j * a * z[0] * z[1])
    if k is GateKind.ZZ_A:
        return np.exp(1j * QUARTER_PI * z[0] * z[1])
    if k is GateKind.ZZ_B:
        return np.exp(-1j * QUARTER_PI * z[0] * z[1])
    if k is GateKind.ZZZ:
        return np.exp(-1j * a * z[0] * z[1] * z[2])
    if k is GateKind.COLLECTIVE_SZ2:
        pair_sum = sum(zi * zj for zi, zj in combinations(z, 2))
        return np.exp(-0.5j * a * pair_sum)
    raise AssertionError(k)


def _single_qubit_matrix(kind: GateKind, angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    if kind is GateKind.XROT:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind is GateKind.XFLIP:
        return np.array([[c, 1j * s], [1j * s, c]])
    if kind is GateKind.YROT:
        ch, sh = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[ch, -sh], [sh, ch]], dtype=complex)
    raise AssertionError(kind)


def gate_operator(gate: Gate, shape: SpaceShape) -> Operator:
    for s in gate.sites:
        shape.check_site(s)
    if gate.kind in DIAGONAL_KINDS:
        return Operator(shape, np.diag(_diag_phases(gate, shape)))
    return embed(_single_qubit_matrix(gate.kind, gate.angle), gate.sites[0], shape)


def _apply_gate(gate: Gate, shape: SpaceShape, vec: np.ndarray) -> np.ndarray:
    if gate.kind in DIAGONAL_KINDS:
        return _diag_phases(gate, shape) * vec
    # single-qubit: contract the target axis of the reshaped tensor
    site = gate.sites[0]
    left = 2 ** (site - 1)
    right = (2 ** (shape.n_qubits - site)) * shape.mode_dim
    t = vec.reshape(left, 2, right)
    m = _single_qubit_matrix(gate.kind, gate.angle)
    return np.einsum("ab,ibj->iaj", m, t).reshape(-1)


@dataclass
class GateSequence:
    """Gates in application order on a fixed :class:`SpaceShape`."""

    shape: SpaceShape
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        for s in gate.sites:
            self.shape.check_site(s)

    def append(self, kind: GateKind | str, sites: Iterable[int], angle: float = 0.0) -> None:
        gate = Gate(GateKind(kind), tuple(sites), float(angle))
        self._check(gate)
        self.gates.append(gate)

    def extend(self, other: GateSequence | Iterable[Gate]) -> None:
        if isinstance(other, GateSequence):
            if other.shape != self.shape:
                raise ShapeMismatchError(f"{self.shape} vs {other.shape}")
            other = other.gates
        for g in other:
            self._check(g)
            self.gates.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def evaluate(self) -> Operator:
        u = np.eye(self.shape.total_dim, dtype=complex)
        for g in self.gates:
            if g.kind in DIAGONAL_KINDS:
                u = _diag_phases(g, self.shape)[:, None] * u
            else:
                u = gate_operator(g, self.shape).matrix @ u
        return Operator(self.shape, u)

    def apply(self, psi: PureState) -> PureState:
        if psi.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {psi.shape}")
        vec = np.array(psi.amplitudes)
        for g in self.gates:
            vec = _apply_gate(g, self.shape, vec)
        return PureState(self.shape, vec / np.linalg.norm(vec))

    def counts(self) -> Counter:
        return Counter(g.kind.value for g in self.gates)

    def two_qubit_count(self) -> int:
        return sum(1 for g in self.gates if len(g.sites) == 2 and g.kind is not GateKind.COLLECTIVE_SZ2)

    def single_qubit_count(self) -> int:
        return sum(1 for g in self.gates if g.kind in _SINGLE_QUBIT_KINDS)

    def to_text(self) -> str:
        lines = [f"{g.kind.value} {','.join(map(str, g.sites))} {g.angle!r}" for g in self.gates]
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str, shape: SpaceShape) -> GateSequence:
        seq = cls(shape)
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"line {lineno}: expected '<kind> <sites> <angle>', got {line!r}")
            kind, sites, angle = parts
            seq.append(kind, (int(s) for s in sites.split(",")), float(angle))
        return seq


def phase_distance(u: Operator | np.ndarray, v: Operator | np.ndarray) -> float:
    """min over gamma of ||U - e^{i gamma} V||_F, with gamma = arg tr(V^dagger U)."""
    u = u.matrix if isinstance(u, Operator) else np.asarray(u)
    v = v.matrix if isinstance(v, Operator) else np.asarray(v)
    overlap = np.trace(v.conj().T @ u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def _shape_for(sites: Sequence[int], shape: SpaceShape | None) -> SpaceShape:
    return shape if shape is not None else SpaceShape(max(sites))


def z_rotation(phi: float) -> Operator:
    return gate_operator(Gate(GateKind.ZROT, (1,), phi), SpaceShape(1))


def cz_gate(phi: float) -> Operator:
    return gate_operator(Gate(GateKind.CZ, (1, 2), phi), SpaceShape(2))


def zz_gate(theta: float, sites: Sequence[int] = (1, 2), shape: SpaceShape | None = None) -> Operator:
    return gate_operator(Gate(GateKind.ZZ, tuple(sites), theta), _shape_for(sites, shape))


def zzz_gate(beta: float, sites: Sequence[int] = (1, 2, 3), shape: SpaceShape | None = None) -> Operator:
    return gate_operator(Gate(GateKind.ZZZ, tuple(sites), beta), _shape_for(sites, shape))


def collective_sz2(theta: float, sites: Sequence[int], shape: SpaceShape | None = None) -> Operator:
    return gate_operator(Gate(GateKind.COLLECTIVE_SZ2, tuple(sites), theta), _shape_for(sites, shape))


def zz_via_cz(theta: float, sites: Sequence[int] = (1, 2), shape: SpaceShape | None = None) -> GateSequence:
    """CZ(phi) followed by Z(phi) on both qubits, phi = 2 theta. Equals ZZ(theta) times e^{i theta}."""
    j, k = sites
    phi = 2.0 * theta
    seq = GateSequence(_shape_for(sites, shape))
    seq.append(GateKind.CZ, (j, k), phi)
    seq.append(GateKind.ZROT, (j,), phi)
    seq.append(GateKind.ZROT, (k,), phi)
    return seq


def zzz_via_collective(alpha: float, sites: Sequence[int] = (1, 2, 3),
                       shape: SpaceShape | None = None) -> GateSequence:
    """ZZZ(alpha) from one X-type flip sandwiched between collective Sz^2 gates.

    U_{Sz^2}(pi/2) maps sx on the middle qubit to -sz sz sx on the triple,
    so exp(i alpha sx_k) becomes exp(-i alpha sz_j sx_k sz_l); R_Y(+-pi/2) on
    the middle qubit then turns sx_k into sz_k. The identity is exact,
    without a global phase.
    """
    j, k, l = sites
    seq = GateSequence(_shape_for(sites, shape))
    seq.append(GateKind.YROT, (k,), np.pi / 2)
    seq.append(GateKind.COLLECTIVE_SZ2, (j, k, l), -np.pi / 2)
    seq.append(GateKind.XFLIP, (k,), alpha)
    seq.append(GateKind.COLLECTIVE_SZ2, (j, k, l), np.pi / 2)
    seq.append(GateKind.YROT, (k,), -np.pi / 2)
    return seq


def zzz_via_two_qubit(alpha: float, sites: Sequence[int] = (1, 2, 3),
                      shape: SpaceShape | None = None) -> GateSequence:
    """ZZZ(alpha) from nearest-neighbour ZZ_A / ZZ_B pairs around the middle qubit.

    exp(-i pi/4 sz_k (sz_j + sz_l)) plays the role of U_{Sz^2}(pi/2): the
    sz_j sz_l part of the collective gate commutes with sx_k and drops out.
    """
    j, k, l = sites
    seq = GateSequence(_shape_for(sites, shape))
    seq.append(GateKind.YROT, (k,), np.pi / 2)
    seq.append(GateKind.ZZ_A, (j, k))
    seq.append(GateKind.ZZ_A, (k, l))
    seq.append(GateKind.XFLIP, (k,), alpha)
    seq.append(GateKind.ZZ_B, (k, l))
    seq.append(GateKind.ZZ_B, (j, k))
    seq.append(GateKind.YROT, (k,), -np.pi / 2)
    return seq


ZZZ_MODES = ("direct", "collective", "two_qubit")


def zzz_layer_gates(alpha: float, sites: Sequence[int], mode: str, shape: SpaceShape) -> GateSequence:
    """One logical ZZZ gate realized per ``mode``."""
    if mode == "direct":
        seq = GateSequence(shape)
        seq.append(GateKind.ZZZ, sites, alpha)
        return seq
    if mode == "collective":
        return zzz_via_collective(alpha, sites, shape)
    if mode == "two_qubit":
        return zzz_via_two_qubit(alpha, sites, shape)
    raise ValueError(f"zzz mode must be one of {ZZZ_MODES}, got {mode!r}")
