"""Small dense complex-matrix kernel for qubit-qubit and qubit-qutrit systems.

Composite basis index is ``a * dim_b + b`` (subsystem A is the slow index),
which is the ordering produced by :func:`numpy.kron`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-10


class NotHermitianError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Dims:
    """Local dimensions of a bipartite system (A is always a qubit)."""

    a: int = 2
    b: int = 2

    def __post_init__(self):
        if self.a != 2 or self.b not in (2, 3):
            raise DimensionError(f"unsupported dims {self.a}x{self.b}; expected 2x2 or 2x3")

    @property
    def total(self) -> int:
        return self.a * self.b

    def as_list(self) -> list[int]:
        return [self.a, self.b]

    def __str__(self):
        return f"{self.a}x{self.b}"

    @classmethod
    def parse(cls, text: str) -> "Dims":
        """Parse ``"2x3"`` style strings."""
        parts = text.lower().replace("*", "x").split("x")
        if len(parts) != 2:
            raise DimensionError(f"cannot parse dims {text!r}")
        return cls(int(parts[0]), int(parts[1]))


QUBIT_QUBIT = Dims(2, 2)
QUBIT_QUTRIT = Dims(2, 3)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def _check_square(m: np.ndarray, dims: Dims):
    n = dims.total
    if m.shape != (n, n):
        raise DimensionError(f"expected a {n}x{n} matrix for dims {dims}, got {m.shape}")


def partial_transpose(m, dims: Dims) -> np.ndarray:
    """Transpose the subsystem-B indices of ``m``."""
    m = np.asarray(m)
    _check_square(m, dims)
    t = m.reshape(dims.a, dims.b, dims.a, dims.b).transpose(0, 3, 2, 1)
    return t.reshape(dims.total, dims.total)


def partial_trace(m, dims: Dims, keep: str = "A") -> np.ndarray:
    """Trace out one subsystem; ``keep`` names the one that survives."""
    m = np.asarray(m)
    _check_square(m, dims)
    t = m.reshape(dims.a, dims.b, dims.a, dims.b)
    keep = keep.upper()
    if keep == "A":
        return np.einsum("ibjb->ij", t)
    if keep == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def hermiticity_error(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and hermiticity_error(m) <= tol


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def eigh(m, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Returns ``(values, vectors)`` with ascending eigenvalues and the
    eigenvectors as columns, so that ``m = V diag(w) V^H``.

    Each rotation first removes the phase of the pivot ``a[p, q]`` and then
    applies a real Givens rotation that annihilates it.  Sweeps stop once
    the off-diagonal Frobenius norm drops below ``tol`` (scaled by the
    matrix norm when that exceeds one).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        raise NotHermitianError(f"matrix is not Hermitian (error {hermiticity_error(m):.3e})")
    n = m.shape[0]
    a = 0.5 * (m + m.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = tol * scale

    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J acts on columns (p, q): J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                cols = a[:, [p, q]] @ j
                a[:, [p, q]] = cols
                a[[p, q], :] = j.conj().T @ a[[p, q], :]
                a[p, q] = a[q, p] = 0.0
                v[:, [p, q]] = v[:, [p, q]] @ j
    else:
        if _off_norm(a) > threshold:
            raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def hermitian_eigenvalues(m) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix."""
    return eigh(m)[0]


def min_eigenvalue(m) -> float:
    return float(hermitian_eigenvalues(m)[0])


def hermitian_function(m, func) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, v = eigh(m)
    return (v * func(w)) @ v.conj().T


def is_unitary(u, tol: float = HERMITIAN_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol
