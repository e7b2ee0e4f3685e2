"""Tetrahedron (qubit) and 8-simplex (qutrit) POVMs, rotations and dual frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import HERMITIAN_TOL, is_unitary, min_eigenvalue

SQRT3 = np.sqrt(3.0)

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# Gell-Mann matrices lambda_1..lambda_8, tr(l_a l_b) = 2 delta_ab
GELL_MANN = np.array(
    [
        [[0, 1, 0], [1, 0, 0], [0, 0, 0]],
        [[0, -1j, 0], [1j, 0, 0], [0, 0, 0]],
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
        [[0, 0, -1j], [0, 0, 0], [1j, 0, 0]],
        [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
        [[0, 0, 0], [0, 0, -1j], [0, 1j, 0]],
        np.diag([1, 1, -2]) / SQRT3,
    ],
    dtype=complex,
)

# Rows are n_1..n_4: vertices of a regular tetrahedron on the Bloch sphere.
TETRAHEDRON = np.array(
    [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ]
) / SQRT3

# Rows are v_1..v_9: vertices of a regular 8-simplex in the Gell-Mann Bloch
# space (unit norm, pairwise inner product -1/8, zero sum).  Obtained as
# sqrt(9/8) * H e_i with H the Helmert basis of the hyperplane sum(x) = 0
# in R^9; see ``simplex_vertices``.
SIMPLEX_VECTORS = np.array(
    [
        [0.7499999999999999, 0.43301270189221935, 0.3061862178478973, 0.23717082451262841,
         0.19364916731037082, 0.16366341767699427, 0.1417366773784602, 0.125],
        [-0.7499999999999999, 0.43301270189221935, 0.3061862178478973, 0.23717082451262841,
         0.19364916731037082, 0.16366341767699427, 0.1417366773784602, 0.125],
        [0.0, -0.8660254037844387, 0.3061862178478973, 0.23717082451262841,
         0.19364916731037082, 0.16366341767699427, 0.1417366773784602, 0.125],
        [0.0, 0.0, -0.9185586535436918, 0.23717082451262841,
         0.19364916731037082, 0.16366341767699427, 0.1417366773784602, 0.125],
        [0.0, 0.0, 0.0, -0.9486832980505137,
         0.19364916731037082, 0.16366341767699427, 0.1417366773784602, 0.125],
        [0.0, 0.0, 0.0, 0.0,
         -0.9682458365518541, 0.16366341767699427, 0.1417366773784602, 0.125],
        [0.0, 0.0, 0.0, 0.0,
         0.0, -0.9819805060619656, 0.1417366773784602, 0.125],
        [0.0, 0.0, 0.0, 0.0,
         0.0, 0.0, -0.9921567416492214, 0.125],
        [0.0, 0.0, 0.0, 0.0,
         0.0, 0.0, 0.0, -1.0],
    ]
)


def simplex_vertices(n: int = 9) -> np.ndarray:
    """Regular (n-1)-simplex vertices in R^(n-1) from the Helmert basis."""
    h = np.zeros((n - 1, n))
    for k in range(1, n):
        h[k - 1, :k] = 1.0
        h[k - 1, k] = -k
        h[k - 1] /= np.sqrt(k * (k + 1))
    return np.sqrt(n / (n - 1)) * h.T


class PovmError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Povm:
    """A finite POVM stored as an ``(n, d, d)`` array of effects."""

    elements: np.ndarray

    def __post_init__(self):
        els = np.asarray(self.elements, dtype=complex)
        if els.ndim != 3 or els.shape[1] != els.shape[2]:
            raise PovmError(f"elements must have shape (n, d, d), got {els.shape}")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def __len__(self):
        return self.elements.shape[0]

    def __getitem__(self, i):
        return self.elements[i]

    def check(self, tol: float = HERMITIAN_TOL):
        """Raise PovmError unless every effect is PSD and they sum to identity."""
        total = self.elements.sum(axis=0)
        err = float(np.max(np.abs(total - np.eye(self.dim))))
        if err > tol:
            raise PovmError(f"effects sum to identity only within {err:.3e}")
        for i, e in enumerate(self.elements):
            if min_eigenvalue(e) < -tol:
                raise PovmError(f"effect {i} is not positive semidefinite")
        return self


def qubit_tetrahedron() -> Povm:
    """Effects (1 + n_i . sigma) / 4 for the tetrahedron vectors."""
    effects = 0.25 * (np.eye(2) + np.einsum("ik,kab->iab", TETRAHEDRON, PAULI))
    return Povm(effects)


def qutrit_simplex() -> Povm:
    """Effects (1 + (sqrt3/2) v_i . lambda) / 9 for the simplex vectors.

    The sqrt(3)/2 factor maps the most negative eigenvalue any unit Bloch
    vector can produce, -2/sqrt(3), to exactly -1.
    """
    bloch = np.einsum("ia,akl->ikl", SIMPLEX_VECTORS, GELL_MANN)
    effects = (np.eye(3) + 0.5 * SQRT3 * bloch) / 9.0
    return Povm(effects)


def rotate(povm: Povm, u) -> Povm:
    """Conjugate every effect: F_i -> U F_i U^dagger."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (povm.dim, povm.dim):
        raise PovmError(f"unitary of shape {u.shape} does not match POVM dimension {povm.dim}")
    if not is_unitary(u):
        raise PovmError("rotation matrix is not unitary")
    return Povm(u @ povm.elements @ u.conj().T)


def gram_matrix(povm: Povm) -> np.ndarray:
    """Real Gram matrix tr(F_i F_j)."""
    return np.real(np.einsum("iab,jba->ij", povm.elements, povm.elements))


def dual_frame(povm: Povm) -> np.ndarray:
    """Dual operators G_i with O = sum_i tr(G_i O) F_i for every operator O.

    Requires an informationally complete POVM whose effects form a basis of
    the operator space (n = d^2); then G = Gram^{-1} F.
    """
    n, d = len(povm), povm.dim
    if n != d * d:
        raise PovmError(f"dual frame needs n = d^2 effects (got n={n}, d={d})")
    gram = gram_matrix(povm)
    if np.linalg.cond(gram) > 1e12:
        raise PovmError("Gram matrix is singular: POVM is not informationally complete")
    coeffs = np.linalg.solve(gram, np.eye(n))
    duals = np.einsum("ij,jab->iab", coeffs, povm.elements)
    return 0.5 * (duals + duals.conj().transpose(0, 2, 1))


def expand(op, povm: Povm, duals=None) -> np.ndarray:
    """Coefficients c_i with op = sum_i c_i F_i."""
    if duals is None:
        duals = dual_frame(povm)
    return np.einsum("iab,ba->i", duals, np.asarray(op))


def transpose_expansion(povm: Povm, duals=None) -> np.ndarray:
    """Matrix T with F_i^T = sum_j T[i, j] F_j (real for Hermitian effects)."""
    if duals is None:
        duals = dual_frame(povm)
    return np.real(np.array([expand(f.T, povm, duals) for f in povm.elements]))


def partial_transpose_map(povm: Povm, tol: float = 1e-12) -> list[tuple[float, int]]:
    """Closed-form transpose relations ``F_i^T = s * 1 - F_j``.

    Entry ``i`` of the result is ``(s, j)`` with zero-based ``j``.  For the
    tetrahedron, transposition flips the y component of each Bloch vector,
    which sends every vertex to the antipode of another vertex.  Raises
    PovmError when no such relation exists (as for the qutrit simplex).
    """
    relations = []
    eye = np.eye(povm.dim)
    for i, f in enumerate(povm.elements):
        found = None
        for j, g in enumerate(povm.elements):
            total = f.T + g
            s = np.trace(total).real / povm.dim
            if np.max(np.abs(total - s * eye)) <= tol:
                found = (float(s), j)
                break
        if found is None:
            raise PovmError(f"transpose of effect {i} is not of the form s*1 - F_j")
        relations.append(found)
    return relations
