"""Dense operator and state algebra for N qubits plus an optional truncated bosonic mode.

Basis conventions used everywhere in the package:

* qubit 1 is the most significant tensor factor, the bosonic mode (if any)
  is the least significant one;
* each qubit is ordered ``(|0>, |1>)`` where ``|0>`` is the +1 eigenstate of
  sigma_z. Since the spin Hamiltonians carry ``+Omega/2 sigma_z`` the +1
  eigenstate is the *excited* level, and ``sigma_plus = [[0, 1], [0, 0]]``
  raises ``|1>`` (ground) to ``|0>`` (excited).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-9
UNITARY_TOL = 1e-10

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
_SIGMA_MINUS = _SIGMA_PLUS.T.copy()

EXCITED = 0
GROUND = 1


class ShapeMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class SpaceShape:
    """Layout of the composite space: ``n_qubits`` spins and a mode of ``fock_dim`` levels."""

    n_qubits: int
    fock_dim: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.fock_dim < 0:
            raise ValueError(f"fock_dim must be >= 0, got {self.fock_dim}")

    @property
    def has_mode(self) -> bool:
        return self.fock_dim > 0

    @property
    def mode_dim(self) -> int:
        return max(self.fock_dim, 1)

    @property
    def qubit_dim(self) -> int:
        return 2**self.n_qubits

    @property
    def total_dim(self) -> int:
        return self.qubit_dim * self.mode_dim

    def check_site(self, site: int) -> None:
        if not 1 <= site <= self.n_qubits:
            raise ValueError(f"site {site} out of range 1..{self.n_qubits}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _rel_norm(a: np.ndarray) -> float:
    return max(1.0, float(np.linalg.norm(a)))


class Operator:
    """Immutable dense operator on a :class:`SpaceShape`."""

    __slots__ = ("shape", "matrix")

    def __init__(self, shape: SpaceShape, matrix) -> None:
        matrix = _frozen(matrix)
        d = shape.total_dim
        if matrix.shape != (d, d):
            raise ShapeMismatchError(f"matrix {matrix.shape} does not fit {shape} (dim {d})")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @classmethod
    def identity(cls, shape: SpaceShape) -> Operator:
        return cls(shape, np.eye(shape.total_dim))

    @classmethod
    def zero(cls, shape: SpaceShape) -> Operator:
        return cls(shape, np.zeros((shape.total_dim, shape.total_dim)))

    def _same(self, other: Operator) -> None:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")

    def __add__(self, other: Operator) -> Operator:
        self._same(other)
        return Operator(self.shape, self.matrix + other.matrix)

    def __sub__(self, other: Operator) -> Operator:
        self._same(other)
        return Operator(self.shape, self.matrix - other.matrix)

    def __neg__(self) -> Operator:
        return Operator(self.shape, -self.matrix)

    def __mul__(self, scalar: complex) -> Operator:
        return Operator(self.shape, self.matrix * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._same(other)
            return Operator(self.shape, self.matrix @ other.matrix)
        if isinstance(other, PureState):
            return apply(self, other)
        return NotImplemented

    def dag(self) -> Operator:
        return Operator(self.shape, self.matrix.conj().T)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        m = self.matrix
        return float(np.linalg.norm(m - m.conj().T)) <= tol * _rel_norm(m)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        m = self.matrix
        eye = np.eye(m.shape[0])
        return float(np.linalg.norm(m.conj().T @ m - eye)) <= tol * _rel_norm(eye)

    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2))

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __repr__(self) -> str:
        return f"Operator({self.shape}, dim={self.shape.total_dim})"


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def embed(local: np.ndarray, site: int, shape: SpaceShape) -> Operator:
    """Place a 2x2 matrix on qubit ``site`` (1-based) with identities elsewhere."""
    shape.check_site(site)
    factors = [np.eye(2)] * shape.n_qubits
    factors[site - 1] = np.asarray(local, dtype=complex)
    if shape.has_mode:
        factors.append(np.eye(shape.fock_dim))
    return Operator(shape, reduce(np.kron, factors))


def pauli(axis: str, site: int, shape: SpaceShape) -> Operator:
    try:
        local = _PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None
    return embed(local, site, shape)


def spin_ladder(kind: str, site: int, shape: SpaceShape) -> Operator:
    """sigma_plus = (sx + i sy)/2 or sigma_minus = (sx - i sy)/2 on ``site``."""
    if kind == "plus":
        return embed(_SIGMA_PLUS, site, shape)
    if kind == "minus":
        return embed(_SIGMA_MINUS, site, shape)
    raise ValueError(f"kind must be 'plus' or 'minus', got {kind!r}")


def ladder(kind: str, shape: SpaceShape) -> Operator:
    """Truncated annihilation (``lower``) or creation (``raise``) operator on the mode."""
    if shape.fock_dim < 2:
        raise ValueError(f"ladder operators need fock_dim >= 2, shape is {shape}")
    a = np.diag(np.sqrt(np.arange(1, shape.fock_dim)), k=1).astype(complex)
    if kind == "raise":
        a = a.T.copy()
    elif kind != "lower":
        raise ValueError(f"kind must be 'lower' or 'raise', got {kind!r}")
    return Operator(shape, np.kron(np.eye(shape.qubit_dim), a))


def number(shape: SpaceShape) -> Operator:
    """Photon number a^dagger a."""
    n = np.arange(shape.fock_dim, dtype=float)
    return Operator(shape, np.diag(np.tile(n, shape.qubit_dim)))


def z_eigenvalues(shape: SpaceShape, site: int) -> np.ndarray:
    """Diagonal of sigma_z on ``site`` over the full basis, as a real vector of +-1."""
    shape.check_site(site)
    index = np.arange(shape.total_dim) // shape.mode_dim
    bit = (index >> (shape.n_qubits - site)) & 1
    return 1.0 - 2.0 * bit


def expm_hermitian(h: Operator, scale: float) -> Operator:
    """exp(-i * scale * H) by eigendecomposition."""
    if not h.is_hermitian(HERMITIAN_TOL):
        raise ValueError("expm_hermitian needs a Hermitian operator")
    evals, evecs = np.linalg.eigh(h.matrix)
    phases = np.exp(-1j * scale * evals)
    return Operator(h.shape, (evecs * phases) @ evecs.conj().T)


class PureState:
    __slots__ = ("shape", "amplitudes")

    def __init__(self, shape: SpaceShape, amplitudes, *, normalize: bool = False) -> None:
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (shape.total_dim,):
            raise ShapeMismatchError(f"{amps.shape[0]} amplitudes for {shape}")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: PureState) -> complex:
        if other.shape != self.shape:
            raise ShapeMismatchError(f"{self.shape} vs {other.shape}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))

    def tensor(self, other: PureState) -> np.ndarray:
        return np.kron(self.amplitudes, other.amplitudes)

    def __repr__(self) -> str:
        return f"PureState({self.shape})"


class DensityMatrix:
    """Hermitian, unit-trace matrix. Positivity is checked lazily via :meth:`min_eigenvalue`."""

    __slots__ = ("shape", "matrix")

    def __init__(self, shape: SpaceShape, matrix, *, tol: float = 1e-10) -> None:
        m = _frozen(matrix)
        d = shape.total_dim
        if m.shape != (d, d):
            raise ShapeMismatchError(f"matrix {m.shape} does not fit {shape}")
        if np.abs(m - m.conj().T).max() > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > tol:
            raise ValueError(f"density matrix trace {np.trace(m).real} is not 1")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def purity(self) -> float:
        m = self.matrix
        return float(np.vdot(m, m).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def expect(self, op: Operator) -> float:
        return float(np.trace(op.matrix @ self.matrix).real)

    def __repr__(self) -> str:
        return f"DensityMatrix({self.shape})"


def apply(u: Operator, psi: PureState) -> PureState:
    if u.shape != psi.shape:
        raise ShapeMismatchError(f"{u.shape} vs {psi.shape}")
    return PureState(psi.shape, u.matrix @ psi.amplitudes)


def conjugate(u: Operator, rho: DensityMatrix) -> DensityMatrix:
    if u.shape != rho.shape:
        raise ShapeMismatchError(f"{u.shape} vs {rho.shape}")
    m = u.matrix @ rho.matrix @ u.matrix.conj().T
    return DensityMatrix(rho.shape, 0.5 * (m + m.conj().T))


def qubit_index(levels: Sequence[int] | str) -> int:
    """Integer index of a qubit basis string such as ``"1000"`` (qubit 1 first)."""
    bits = [int(c) for c in levels]
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"qubit levels must be 0/1, got {levels!r}")
    return reduce(lambda acc, b: (acc << 1) | b, bits, 0)


def basis_state(shape: SpaceShape, qubits: Sequence[int] | str, photons: int = 0) -> PureState:
    """Product basis state ``|qubits> (x) |photons>``; qubit levels use the 0/1 labels above."""
    if len(qubits) != shape.n_qubits:
        raise ValueError(f"need {shape.n_qubits} qubit levels, got {len(qubits)}")
    if not 0 <= photons < shape.mode_dim:
        raise ValueError(f"photon number {photons} outside truncation {shape.mode_dim}")
    amps = np.zeros(shape.total_dim, dtype=complex)
    amps[qubit_index(qubits) * shape.mode_dim + photons] = 1.0
    return PureState(shape, amps)


def product_state(shape: SpaceShape, qubits: Sequence[int] | str,
                  mode_amplitudes: Iterable[complex] | None = None) -> PureState:
    """Qubit basis string tensored with an arbitrary (normalized here) mode vector."""
    q = basis_state(SpaceShape(shape.n_qubits), qubits).amplitudes
    if mode_amplitudes is None:
        mode = np.zeros(shape.mode_dim, dtype=complex)
        mode[0] = 1.0
    else:
        mode = np.zeros(shape.mode_dim, dtype=complex)
        given = np.asarray(list(mode_amplitudes), dtype=complex)
        if given.size > shape.mode_dim:
            raise ValueError("mode amplitudes exceed the Fock truncation")
        mode[: given.size] = given
    return PureState(shape, np.kron(q, mode), normalize=True)
