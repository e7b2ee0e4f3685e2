"""Bipartite density matrices: Werner and MEMS families, random ensembles, diagnostics, JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    QUBIT_QUBIT,
    Dims,
    hermiticity_error,
    hermitian_eigenvalues,
    hermitian_function,
    kron,
    min_eigenvalue,
    partial_transpose,
)
from .povm import PAULI

PSD_TOL = 1e-10


class InvalidStateError(ValueError):
    """Matrix violates a density-matrix invariant (Hermitian, unit trace, PSD)."""


class StateFormatError(ValueError):
    """State JSON is malformed."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    dims: Dims = QUBIT_QUBIT

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n = self.dims.total
        if m.shape != (n, n):
            raise InvalidStateError(f"matrix shape {m.shape} does not match dims {self.dims}")
        herr = hermiticity_error(m)
        if herr > HERMITIAN_TOL:
            raise InvalidStateError(f"matrix is not Hermitian (error {herr:.3e})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > HERMITIAN_TOL:
            raise InvalidStateError(f"trace is {tr:.12g}, expected 1")
        lo = min_eigenvalue(m)
        if lo < -PSD_TOL:
            raise InvalidStateError(f"matrix is not positive semidefinite (min eigenvalue {lo:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self):
        return self.matrix.shape

    def expect(self, op) -> float:
        return float(np.real(np.trace(self.matrix @ op)))

    def to_dict(self) -> dict:
        return {
            "dims": self.dims.as_list(),
            "matrix": [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data) -> "DensityMatrix":
        try:
            dims = Dims(*[int(d) for d in data["dims"]])
            rows = [[complex(float(z["re"]), float(z["im"])) for z in row] for row in data["matrix"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise StateFormatError(f"malformed state JSON: {exc}") from exc
        if len(rows) != dims.total or any(len(r) != dims.total for r in rows):
            raise StateFormatError(f"matrix must be {dims.total}x{dims.total} for dims {dims}")
        return cls(np.array(rows), dims)


def save_state(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(rho.to_dict(), indent=1))


def load_state(path) -> DensityMatrix:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: {exc}") from exc
    return DensityMatrix.from_dict(data)


def pure(vector, dims: Dims = QUBIT_QUBIT) -> DensityMatrix:
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()), dims)


def schmidt_vector(xi: float) -> np.ndarray:
    """sin(xi)|00> + cos(xi)|11>."""
    return np.array([np.sin(xi), 0.0, 0.0, np.cos(xi)], dtype=complex)


def bell_state() -> DensityMatrix:
    """|Phi+><Phi+| with |Phi+> = (|00> + |11>)/sqrt(2)."""
    return pure([1, 0, 0, 1])


def maximally_mixed(dims: Dims = QUBIT_QUBIT) -> DensityMatrix:
    return DensityMatrix(np.eye(dims.total) / dims.total, dims)


def werner(theta: float, alpha: float) -> DensityMatrix:
    """General Werner state alpha |psi><psi| + (1 - alpha) 1/4.

    ``|psi(theta)> = cos(theta)|00> + sin(theta)|11>``; note this puts the
    cosine on |00>, the opposite of ``schmidt_vector`` (theta = pi/2 - xi).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta={theta} outside [0, pi]")
    psi = np.array([np.cos(theta), 0.0, 0.0, np.sin(theta)])
    return DensityMatrix(alpha * np.outer(psi, psi) + (1.0 - alpha) * np.eye(4) / 4.0)


def mems_g(gamma: float) -> float:
    return gamma / 2.0 if gamma >= 2.0 / 3.0 else 1.0 / 3.0


def mems(gamma: float) -> DensityMatrix:
    """Maximally entangled mixed state with concurrence gamma."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma={gamma} outside [0, 1]")
    g = mems_g(gamma)
    m = np.diag([g, 1.0 - 2.0 * g, 0.0, g]).astype(complex)
    m[0, 3] = m[3, 0] = gamma / 2.0
    return DensityMatrix(m)


def _as_matrix(rho) -> tuple[np.ndarray, Dims]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    m = np.asarray(rho, dtype=complex)
    return m, QUBIT_QUBIT if m.shape == (4, 4) else Dims(2, 3)


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Smallest eigenvalue of the partial transpose over subsystem B."""
    m, dims = _as_matrix(rho)
    return min_eigenvalue(partial_transpose(m, dims))


def concurrence(rho: DensityMatrix) -> float:
    """Wootters concurrence of a two-qubit state.

    Uses the Hermitian form sqrt(rho) rho~ sqrt(rho), which shares its
    spectrum with rho rho~.
    """
    m, dims = _as_matrix(rho)
    if dims != QUBIT_QUBIT:
        raise ValueError("concurrence is only defined here for two qubits")
    yy = kron(PAULI[1], PAULI[1])
    flipped = yy @ m.conj() @ yy
    root = hermitian_function(m, lambda w: np.sqrt(np.clip(w, 0.0, None)))
    r = root @ flipped @ root
    lam = np.sqrt(np.clip(hermitian_eigenvalues(0.5 * (r + r.conj().T)), 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _random_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)


def random_state(dims: Dims, seed) -> DensityMatrix:
    """Hilbert-Schmidt random state G G^dagger / tr(G G^dagger)."""
    rng = np.random.default_rng(seed)
    n = dims.total
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_separable(dims: Dims, terms: int, seed) -> DensityMatrix:
    """Dirichlet-weighted mixture of ``terms`` random product pure states."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    m = np.zeros((dims.total, dims.total), dtype=complex)
    for w in weights:
        v = np.kron(_random_vector(dims.a, rng), _random_vector(dims.b, rng))
        m += w * np.outer(v, v.conj())
    m /= np.trace(m).real
    return DensityMatrix(m, dims)
