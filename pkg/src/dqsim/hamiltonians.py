"""Model Hamiltonians and their Trotter term splits.

Chains are open: N-1 nearest-neighbour pairs and N-2 nearest-neighbour
triples. Rates are angular frequencies; the package uses rad/us with time
in us, or dimensionless units for phase-axis experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .hilbert import Operator, SpaceShape, ladder, number, pauli, spin_ladder, z_eigenvalues

TWO_PI = 2.0 * np.pi


def mhz(f: float) -> float:
    """Angular frequency in rad/us for a frequency given in MHz."""
    return TWO_PI * f


@dataclass
class TermList:
    """Ordered, labelled Hamiltonian summands; order is the Trotter application order."""

    terms: list[tuple[str, Operator]] = field(default_factory=list)

    def __post_init__(self) -> None:
        shapes = {op.shape for _, op in self.terms}
        if len(shapes) > 1:
            raise ValueError(f"terms live on different spaces: {shapes}")

    @property
    def shape(self) -> SpaceShape:
        return self.terms[0][1].shape

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.terms]

    @property
    def operators(self) -> list[Operator]:
        return [op for _, op in self.terms]

    @property
    def sum(self) -> Operator:
        return Operator(self.shape, sum(op.matrix for op in self.operators))

    def __getitem__(self, label: str) -> Operator:
        for name, op in self.terms:
            if name == label:
                return op
        raise KeyError(label)

    def __iter__(self) -> Iterator[tuple[str, Operator]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def nn_pairs(n: int) -> list[tuple[int, int]]:
    return [(j, j + 1) for j in range(1, n)]


def nn_triples(n: int) -> list[tuple[int, int, int]]:
    return [(j, j + 1, j + 2) for j in range(1, n - 1)]


def _diag(shape: SpaceShape, values: np.ndarray) -> Operator:
    return Operator(shape, np.diag(values.astype(complex)))


def zz_chain(shape: SpaceShape, coupling: float) -> Operator:
    """coupling * sum over nearest-neighbour pairs of sz_j sz_k."""
    d = np.zeros(shape.total_dim)
    for j, k in nn_pairs(shape.n_qubits):
        d += z_eigenvalues(shape, j) * z_eigenvalues(shape, k)
    return _diag(shape, coupling * d)


def zzz_chain(shape: SpaceShape, coupling: float) -> Operator:
    d = np.zeros(shape.total_dim)
    for j, k, l in nn_triples(shape.n_qubits):
        d += z_eigenvalues(shape, j) * z_eigenvalues(shape, k) * z_eigenvalues(shape, l)
    return _diag(shape, coupling * d)


def x_field(shape: SpaceShape, field_strength: float) -> Operator:
    h = sum((pauli("x", j, shape).matrix for j in range(1, shape.n_qubits + 1)))
    return Operator(shape, field_strength * h)


def z_field(shape: SpaceShape, strength: float) -> Operator:
    """strength * sum_j sz_j."""
    d = sum(z_eigenvalues(shape, j) for j in range(1, shape.n_qubits + 1))
    return _diag(shape, strength * d)


def tavis_cummings(shape: SpaceShape, g: float) -> Operator:
    """g * sum_j (a sigma_plus_j + a^dagger sigma_minus_j)."""
    a = ladder("lower", shape)
    ad = ladder("raise", shape)
    m = np.zeros((shape.total_dim, shape.total_dim), dtype=complex)
    for j in range(1, shape.n_qubits + 1):
        m += a.matrix @ spin_ladder("plus", j, shape).matrix
        m += ad.matrix @ spin_ladder("minus", j, shape).matrix
    return Operator(shape, g * m)


def excitation_number(shape: SpaceShape) -> Operator:
    """a^dagger a + sum_j sigma_plus_j sigma_minus_j, conserved by the Tavis-Cummings term."""
    spins = sum((1.0 + z_eigenvalues(shape, j)) / 2 for j in range(1, shape.n_qubits + 1))
    return Operator(shape, number(shape).matrix + np.diag(spins))


def _require_mode(shape: SpaceShape) -> None:
    if shape.fock_dim < 2:
        raise ValueError(f"model needs a bosonic mode with fock_dim >= 2, got {shape}")


def build_ising_tf(n: int, J: float, B: float, shape: SpaceShape | None = None) -> TermList:
    """J sum sz sz + B sum sx. J < 0 is ferromagnetic, J > 0 antiferromagnetic."""
    if n < 2:
        raise ValueError("Ising chain needs N >= 2")
    shape = shape or SpaceShape(n)
    if shape.n_qubits != n or shape.has_mode:
        raise ValueError(f"shape {shape} does not match a bare {n}-spin chain")
    return TermList([("zz", zz_chain(shape, J)), ("x", x_field(shape, B))])


def build_extended_ising(n: int, J: float, G: float, B: float, shape: SpaceShape | None = None) -> TermList:
    """J sum sz sz + G sum sz sz sz + B sum sx with nearest-neighbour pairs and triples."""
    if n < 3:
        raise ValueError("three-body chain needs N >= 3")
    shape = shape or SpaceShape(n)
    if shape.n_qubits != n or shape.has_mode:
        raise ValueError(f"shape {shape} does not match a bare {n}-spin chain")
    return TermList([
        ("zz", zz_chain(shape, J)),
        ("zzz", zzz_chain(shape, G)),
        ("x", x_field(shape, B)),
    ])


def build_itc(n: int, omega: float, Omega: float, J: float, g: float, fock_dim: int) -> TermList:
    """Ising chain plus Tavis-Cummings coupling to one mode.

    omega a^dagger a + sum Omega/2 sz - J sum sz sz + g sum (a s+ + a^dagger s-).
    The spin-spin sign is negative here, opposite to :func:`build_ising_tf`.
    """
    shape = SpaceShape(n, fock_dim)
    _require_mode(shape)
    return TermList([
        ("mode", omega * number(shape)),
        ("spin", z_field(shape, Omega / 2)),
        ("spin_spin", zz_chain(shape, -J)),
        ("tavis_cummings", tavis_cummings(shape, g)),
    ])


def build_h1(n: int, omega1: float, Omega1: float, g: float, fock_dim: int) -> Operator:
    """Resonator-qubit Hamiltonian after the rotating-wave approximation."""
    shape = SpaceShape(n, fock_dim)
    _require_mode(shape)
    return omega1 * number(shape) + z_field(shape, Omega1 / 2) + tavis_cummings(shape, g)


def build_hjk(j: int, k: int, omega_p: float, Omega_p: float, J: float, n: int, fock_dim: int) -> Operator:
    """Detuned block for the adjacent pair (j, k): omega' a^dagger a + sum Omega'/2 sz - J sz_j sz_k."""
    shape = SpaceShape(n, fock_dim)
    _require_mode(shape)
    if abs(j - k) != 1:
        raise ValueError(f"({j}, {k}) is not a nearest-neighbour pair")
    shape.check_site(j)
    shape.check_site(k)
    zz = z_eigenvalues(shape, j) * z_eigenvalues(shape, k)
    return omega_p * number(shape) + z_field(shape, Omega_p / 2) + _diag(shape, -J * zz)


def h2_blocks(n: int, omega_p: float, Omega_p: float, J: float, fock_dim: int) -> list[Operator]:
    return [build_hjk(j, k, omega_p, Omega_p, J, n, fock_dim) for j, k in nn_pairs(n)]


def build_h2(n: int, omega_p: float, Omega_p: float, J: float, fock_dim: int) -> Operator:
    """Sum of the N-1 pair blocks, i.e. omega_2 = (N-1) omega', Omega_2 = (N-1) Omega'."""
    if n < 2:
        raise ValueError("H2 needs at least one pair")
    blocks = h2_blocks(n, omega_p, Omega_p, J, fock_dim)
    return Operator(blocks[0].shape, sum(b.matrix for b in blocks))


def h2_frame(n: int, omega2: float, Omega2: float) -> tuple[float, float]:
    """Per-pair (omega', Omega') that reproduce the given omega_2, Omega_2."""
    return omega2 / (n - 1), Omega2 / (n - 1)
