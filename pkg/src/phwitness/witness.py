"""Quadratic PPT-equivalent Bell witness built from local POVM statistics.

Two independent routes to the triple (Y1, Y2, Y3) are provided:

* probability path -- joint outcome probabilities of the rotated local POVMs
  combined with fixed coefficients (closed form for two qubits, dual-frame
  coefficients for qubit-qutrit);
* operator path -- expectation values of the rotated operators Y_k, where
  Y_k is the partial transpose over B of X_k and
  |Phi><Phi| = (sin 2xi X_1 - cos 2xi X_2 + X_3) / 4
  for |Phi> = sin xi |00> + cos xi |11>.

The witness value is I = Y1^2 + Y2^2 - Y3^2; it is positive for some
local settings exactly when the partial transpose has a negative
eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .linalg import (
    QUBIT_QUBIT,
    QUBIT_QUTRIT,
    Dims,
    DimensionError,
    hermitian_eigenvalues,
    is_unitary,
    kron,
    partial_transpose,
)
from .povm import PAULI, SQRT3, Povm, dual_frame, qubit_tetrahedron, qutrit_simplex
from .states import DensityMatrix

ENTANGLED_THRESHOLD = 1e-6
PROB_TOL = 1e-12
SUM_TOL = 1e-10


class TableError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class JointProbabilityTable:
    """P[i, j] = tr[rho (U F_i U^+) (x) (V F_j V^+)]; rows index A outcomes."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape not in ((4, 4), (4, 9)):
            raise TableError(f"unsupported table shape {p.shape}")
        if p.min() < -PROB_TOL or p.max() > 1.0 + PROB_TOL:
            raise TableError("probabilities outside [0, 1]")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise TableError(f"probabilities sum to {total!r}")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def shape(self):
        return self.p.shape

    @property
    def p_a(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def p_b(self) -> np.ndarray:
        return self.p.sum(axis=0)


@dataclass(frozen=True)
class QuadraticCoeffs:
    """a t^2 + b t + c with a = Y2 + Y3, b = 2 Y1, c = Y3 - Y2."""

    a: float
    b: float
    c: float

    def __call__(self, t):
        return self.a * np.square(t) + self.b * t + self.c

    @property
    def discriminant(self) -> float:
        return self.b * self.b - 4.0 * self.a * self.c

    def nonnegative_for_all_t(self, tol: float = 0.0) -> bool:
        # a t^2 + b t + c >= 0 for every real t  <=>  a >= 0 and b^2 - 4ac <= 0
        return self.a >= -tol and self.discriminant <= tol


@dataclass(frozen=True)
class YTriple:
    y1: float
    y2: float
    y3: float

    @property
    def i_ph(self) -> float:
        return self.y1 * self.y1 + self.y2 * self.y2 - self.y3 * self.y3

    def coeffs(self) -> QuadraticCoeffs:
        return QuadraticCoeffs(self.y2 + self.y3, 2.0 * self.y1, self.y3 - self.y2)

    def as_list(self) -> list[float]:
        return [self.y1, self.y2, self.y3]


@dataclass
class WitnessReport:
    i_ph_max: float
    y: YTriple
    u_params: np.ndarray
    v_params: np.ndarray
    u_matrix: np.ndarray
    v_matrix: np.ndarray
    ppt_min_eig: float
    chsh_max: float | None
    concurrence: float | None
    p_e: float
    restarts_used: int
    seed: int
    label: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def cmat(m):
            return [[{"re": float(z.real), "im": float(z.imag)} for z in row] for row in np.asarray(m)]

        out = {
            "i_ph_max": float(self.i_ph_max),
            "y": [float(v) for v in self.y.as_list()],
            "u_params": [float(v) for v in self.u_params],
            "v_params": [float(v) for v in self.v_params],
            "u_matrix": cmat(self.u_matrix),
            "v_matrix": cmat(self.v_matrix),
            "ppt_min_eig": float(self.ppt_min_eig),
            "chsh_max": None if self.chsh_max is None else float(self.chsh_max),
            "concurrence": None if self.concurrence is None else float(self.concurrence),
            "p_e": float(self.p_e),
            "restarts_used": int(self.restarts_used),
            "seed": int(self.seed),
        }
        if self.label:
            out["label"] = self.label
        out.update(self.extra)
        return out


@lru_cache(maxsize=None)
def local_povms(dims: Dims) -> tuple[Povm, Povm]:
    return qubit_tetrahedron(), (qubit_tetrahedron() if dims.b == 2 else qutrit_simplex())


def _matrix_and_dims(rho) -> tuple[np.ndarray, Dims]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    m = np.asarray(rho, dtype=complex)
    if m.shape == (4, 4):
        return m, QUBIT_QUBIT
    if m.shape == (6, 6):
        return m, QUBIT_QUTRIT
    raise DimensionError(f"unsupported state shape {m.shape}")


def _check_settings(u, v, dims: Dims):
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != (dims.a, dims.a) or v.shape != (dims.b, dims.b):
        raise DimensionError(f"settings of shape {u.shape}, {v.shape} do not match dims {dims}")
    if not (is_unitary(u) and is_unitary(v)):
        raise ValueError("local settings must be unitary")
    return u, v


def joint_probabilities(rho, u, v) -> JointProbabilityTable:
    m, dims = _matrix_and_dims(rho)
    u, v = _check_settings(u, v, dims)
    fa, fb = local_povms(dims)
    ra = u @ fa.elements @ u.conj().T
    rb = v @ fb.elements @ v.conj().T
    t = m.reshape(dims.a, dims.b, dims.a, dims.b)
    p = np.real(np.einsum("xyXY,iXx,jYy->ij", t, ra, rb))
    return JointProbabilityTable(p)


def _qubit_y(p: np.ndarray) -> YTriple:
    P = lambda i, j: p[i - 1, j - 1]  # noqa: E731  one-based outcome labels
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    y1 = 6.0 * (P(1, 1) + P(2, 2) + P(3, 3) + P(4, 4) - P(1, 4) - P(4, 1) - P(2, 3) - P(3, 2))
    # the sign of the third outcome is negative on both sides (Y2 equals X2)
    y2 = SQRT3 * (pa[0] + pa[3] - pa[1] - pa[2] + pb[0] + pb[3] - pb[1] - pb[2])
    y3 = 1.0 + 3.0 * (
        P(1, 1) + P(2, 2) + P(3, 3) + P(4, 4)
        + P(1, 4) + P(4, 1) + P(2, 3) + P(3, 2)
        - P(1, 2) - P(2, 1) - P(1, 3) - P(3, 1)
        - P(2, 4) - P(4, 2) - P(3, 4) - P(4, 3)
    )
    return YTriple(float(y1), float(y2), float(y3))


def y_from_probabilities(table: JointProbabilityTable) -> YTriple:
    """Y triple as linear combinations of the joint probabilities."""
    p = table.p if isinstance(table, JointProbabilityTable) else np.asarray(table, dtype=float)
    if p.shape == (4, 4):
        return _qubit_y(p)
    if p.shape == (4, 9):
        y = np.einsum("kij,ij->k", probability_coefficients(QUBIT_QUTRIT), p)
        return YTriple(*(float(v) for v in y))
    raise TableError(f"unsupported table shape {p.shape}")


def _product_sum(terms, fa: Povm, fb: Povm) -> np.ndarray:
    """sum of coeff * F_i^A (x) F_j^B over (coeff, i, j) with one-based i, j."""
    out = np.zeros((fa.dim * fb.dim,) * 2, dtype=complex)
    for coeff, i, j in terms:
        out += coeff * kron(fa[i - 1], fb[j - 1])
    return out


def effect_x_operators() -> np.ndarray:
    """X_1, X_2, X_3 for two qubits written in tetrahedron effects."""
    f = qubit_tetrahedron()
    one = np.eye(2)
    x1 = _product_sum(
        [(6, 1, 2), (6, 2, 1), (6, 3, 4), (6, 4, 3), (-6, 1, 3), (-6, 3, 1), (-6, 2, 4), (-6, 4, 2)], f, f
    )
    z = f[0] + f[3] - f[1] - f[2]
    x2 = SQRT3 * (kron(z, one) + kron(one, z))
    plus = [(1, 1), (2, 2), (3, 3), (4, 4), (1, 4), (4, 1), (2, 3), (3, 2)]
    minus = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 4), (4, 2), (3, 4), (4, 3)]
    x3 = np.eye(4) + _product_sum([(3, i, j) for i, j in plus] + [(-3, i, j) for i, j in minus], f, f)
    return np.array([x1, x2, x3])


def effect_y1_operator() -> np.ndarray:
    """Y_1 = X_1^{T_B} written directly in tetrahedron effects."""
    f = qubit_tetrahedron()
    return _product_sum(
        [(6, 1, 1), (6, 2, 2), (6, 3, 3), (6, 4, 4), (-6, 1, 4), (-6, 4, 1), (-6, 2, 3), (-6, 3, 2)], f, f
    )


def schmidt_x_operators(dims: Dims) -> np.ndarray:
    """X_k in matrix form on span{|0>, |1>} of each party.

    X_1 = 2(|0><1| (x) |0><1| + h.c.), X_2 = 2(|00><00| - |11><11|),
    X_3 = 2(|00><00| + |11><11|).  For a qutrit B the Schmidt support of
    any pure state is two-dimensional, so the same construction applies
    with the qutrit basis states |0>, |1>.
    """
    n = dims.total

    def ket(a, b):
        v = np.zeros(n, dtype=complex)
        v[a * dims.b + b] = 1.0
        return v

    k00, k11 = ket(0, 0), ket(1, 1)
    e01 = np.zeros((dims.b, dims.b), dtype=complex)
    e01[0, 1] = 1.0
    s01 = np.array([[0, 1], [0, 0]], dtype=complex)
    x1 = 2.0 * (kron(s01, e01) + kron(s01, e01).conj().T)
    p00 = np.outer(k00, k00)
    p11 = np.outer(k11, k11)
    return np.array([x1, 2.0 * (p00 - p11), 2.0 * (p00 + p11)])


@lru_cache(maxsize=None)
def x_operators(dims: Dims) -> np.ndarray:
    """X operators: effect-product closed forms for qubits, matrix form for a qutrit."""
    ops = effect_x_operators() if dims == QUBIT_QUBIT else schmidt_x_operators(dims)
    ops.setflags(write=False)
    return ops


@lru_cache(maxsize=None)
def y_operators(dims: Dims) -> np.ndarray:
    """Y_k = X_k^{T_B}."""
    ops = np.array([partial_transpose(x, dims) for x in x_operators(dims)])
    ops.setflags(write=False)
    return ops


@lru_cache(maxsize=None)
def probability_coefficients(dims: Dims) -> np.ndarray:
    """C[k, i, j] with Y_k = sum_ij C[k, i, j] P_ij, from the local dual frames."""
    fa, fb = local_povms(dims)
    ga, gb = dual_frame(fa), dual_frame(fb)
    c = np.real(np.einsum("iab,jcd,kbdac->kij", ga, gb, _split(y_operators(dims), dims)))
    c.setflags(write=False)
    return c


def _split(ops: np.ndarray, dims: Dims) -> np.ndarray:
    # (k, n, n) -> (k, a, b, a', b') so that tr[(G_i (x) H_j) Y] contracts cleanly
    return ops.reshape(-1, dims.a, dims.b, dims.a, dims.b)


def _operator_path(ops, rho, u, v) -> YTriple:
    m, dims = _matrix_and_dims(rho)
    u, v = _check_settings(u, v, dims)
    w = kron(u, v)
    rotated = w.conj().T @ m @ w
    y = np.real(np.einsum("kij,ji->k", ops, rotated))
    return YTriple(*(float(val) for val in y))


def y_operator_path(rho, u, v) -> YTriple:
    """Y_k = tr[rho (U (x) V) Y_k (U (x) V)^+]."""
    _, dims = _matrix_and_dims(rho)
    return _operator_path(y_operators(dims), rho, u, v)


def x_operator_path(rho, u, v) -> YTriple:
    """X_k = tr[rho (U (x) V) X_k (U (x) V)^+]."""
    _, dims = _matrix_and_dims(rho)
    return _operator_path(x_operators(dims), rho, u, v)


def y_triple(rho, u, v) -> YTriple:
    return y_from_probabilities(joint_probabilities(rho, u, v))


def i_ph(rho, u, v) -> float:
    """Witness value Y1^2 + Y2^2 - Y3^2 at the settings (U, V)."""
    return y_triple(rho, u, v).i_ph


def quadratic_coeffs(rho, u, v) -> QuadraticCoeffs:
    return y_triple(rho, u, v).coeffs()


def correlation_matrix(rho) -> np.ndarray:
    m, dims = _matrix_and_dims(rho)
    if dims != QUBIT_QUBIT:
        raise DimensionError("CHSH baseline is defined for two qubits only")
    return np.real(np.einsum("kab,lcd,bdac->kl", PAULI, PAULI, m.reshape(2, 2, 2, 2)))


def chsh_max(rho) -> float:
    """Maximal CHSH value over all projective settings, 2 sqrt(m1 + m2)."""
    t = correlation_matrix(rho)
    m = hermitian_eigenvalues(t.T @ t)
    return float(2.0 * np.sqrt(max(0.0, m[-1] + m[-2])))


def projector(direction, outcome: int) -> np.ndarray:
    """(1 + (-1)^m a . sigma) / 2 for a unit vector a."""
    a = np.asarray(direction, dtype=float)
    return 0.5 * (np.eye(2) + (-1) ** outcome * np.einsum("k,kab->ab", a, PAULI))


def correlation(rho, a, b) -> float:
    """<A B> as sum_{m,n} (-1)^(m+n) P(A=m, B=n)."""
    m, _ = _matrix_and_dims(rho)
    total = 0.0
    for i in (0, 1):
        for j in (0, 1):
            prob = np.real(np.trace(m @ kron(projector(a, i), projector(b, j))))
            total += (-1) ** (i + j) * prob
    return float(total)


def chsh_value(rho, a1, a2, b1, b2) -> float:
    return (
        correlation(rho, a1, b1) + correlation(rho, a1, b2)
        + correlation(rho, a2, b1) - correlation(rho, a2, b2)
    )


def degree_of_entanglement(i_ph_max: float) -> float:
    return max(0.0, i_ph_max / 4.0)


def werner_formula(theta: float, alpha: float) -> float:
    """[(1 + 2|sin 2theta|) alpha - 1](1 + alpha) for the Werner family.

    This is the maximum over local settings wherever the first factor is
    non-negative.  Below the separability boundary the true maximum is
    larger (less negative), see the optimizer tests.
    """
    return ((1.0 + 2.0 * abs(np.sin(2.0 * theta))) * alpha - 1.0) * (1.0 + alpha)


def mems_formula(gamma: float) -> float:
    return 4.0 * gamma * gamma
