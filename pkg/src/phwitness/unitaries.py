"""SU(2) and SU(3) charts used to rotate the local measurement settings.

SU(2) uses the ZYZ Euler chart exp(i phi Z/2) exp(i theta Y/2) exp(i psi Z/2);
SU(3) uses the exponential chart exp(i sum_a c_a lambda_a).  Both accept
batched parameters (leading axes) so the optimizer can evaluate many
candidate settings at once.
"""

from __future__ import annotations

import numpy as np

from .linalg import Dims
from .povm import GELL_MANN

SU2_PARAMS = 3
SU3_PARAMS = 8


def su2(params) -> np.ndarray:
    """Euler-angle SU(2) matrix; ``params[..., :] = (phi, theta, psi)``."""
    p = np.asarray(params, dtype=float)
    phi, theta, psi = p[..., 0], p[..., 1], p[..., 2]
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    plus = np.exp(0.5j * (phi + psi))
    minus = np.exp(0.5j * (phi - psi))
    out = np.empty(p.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = plus * c
    out[..., 0, 1] = minus * s
    out[..., 1, 0] = -minus.conj() * s
    out[..., 1, 1] = plus.conj() * c
    return out


def su2_params(u) -> np.ndarray:
    """Euler angles reproducing ``u`` up to a global phase."""
    u = np.asarray(u, dtype=complex)
    u = u / np.sqrt(np.linalg.det(u))
    theta = 2.0 * np.arctan2(abs(u[0, 1]), abs(u[0, 0]))
    total = 2.0 * np.angle(u[0, 0]) if abs(u[0, 0]) > 1e-300 else 0.0
    diff = 2.0 * np.angle(u[0, 1]) if abs(u[0, 1]) > 1e-300 else 0.0
    return np.array([0.5 * (total + diff), theta, 0.5 * (total - diff)])


def su3(params) -> np.ndarray:
    """exp(i sum_a c_a lambda_a) via the eigendecomposition of the exponent."""
    c = np.asarray(params, dtype=float)
    h = np.einsum("...a,aij->...ij", c, GELL_MANN)
    w, q = np.linalg.eigh(h)
    return (q * np.exp(1j * w)[..., None, :]) @ np.swapaxes(q.conj(), -1, -2)


def random_params(group: str, seed) -> np.ndarray:
    """Multistart seed point: SU(2) angles in [0, 2pi), SU(3) coefficients in [-pi, pi]."""
    rng = np.random.default_rng(seed)
    if group == "su2":
        return rng.uniform(0.0, 2.0 * np.pi, SU2_PARAMS)
    if group == "su3":
        return rng.uniform(-np.pi, np.pi, SU3_PARAMS)
    raise ValueError(f"unknown group {group!r}")


def n_params(dims: Dims) -> int:
    return SU2_PARAMS + (SU2_PARAMS if dims.b == 2 else SU3_PARAMS)


def local_unitaries(params, dims: Dims) -> tuple[np.ndarray, np.ndarray]:
    """Split a joint parameter vector into the (U, V) pair for ``dims``."""
    p = np.asarray(params, dtype=float)
    if p.shape[-1] != n_params(dims):
        raise ValueError(f"expected {n_params(dims)} parameters for dims {dims}, got {p.shape[-1]}")
    u = su2(p[..., :SU2_PARAMS])
    v = su2(p[..., SU2_PARAMS:]) if dims.b == 2 else su3(p[..., SU2_PARAMS:])
    return u, v


def random_settings(dims: Dims, seed) -> np.ndarray:
    """Joint (U, V) parameter vector drawn as in ``random_params``."""
    ss = np.random.SeedSequence(seed)
    ka, kb = ss.spawn(2)
    group_b = "su2" if dims.b == 2 else "su3"
    return np.concatenate([random_params("su2", ka), random_params(group_b, kb)])


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed U(n) from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
