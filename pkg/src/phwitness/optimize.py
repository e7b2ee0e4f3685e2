"""Multistart Nelder-Mead maximization of the witness over local unitaries.

All restarts advance in lockstep: at each simplex step the candidate
points of every still-active restart are evaluated in one vectorized call.
The update rules are applied per restart, so the trajectory of restart k
does not depend on how many other restarts run beside it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .linalg import Dims
from .states import DensityMatrix, concurrence, ppt_min_eigenvalue
from .unitaries import SU2_PARAMS, local_unitaries, random_settings
from .witness import (
    ENTANGLED_THRESHOLD,
    WitnessReport,
    chsh_max,
    degree_of_entanglement,
    y_operators,
    y_triple,
)

TIE_TOL = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    """Search settings; defaults are the ones the acceptance sweeps use."""

    restarts: int = 32
    max_iters: int = 2000
    fatol: float = 1e-9
    xatol: float = 1e-3
    initial_step: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def replace(self, **changes) -> "OptimizerConfig":
        return OptimizerConfig(**{**asdict(self), **changes})

    @classmethod
    def from_dict(cls, data: dict) -> "OptimizerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "OptimizerConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class OptimizationResult:
    best_value: float
    best_params: np.ndarray
    per_restart_values: np.ndarray
    evaluations: int
    best_restart: int
    dims: Dims

    def settings(self) -> tuple[np.ndarray, np.ndarray]:
        return local_unitaries(self.best_params, self.dims)


class WitnessObjective:
    """Vectorized I(U, V) for a fixed state.

    Every Y operator is supported on span{|ab> : a, b in {0, 1}}, so only
    the rotated state restricted to that 4-dimensional block is needed:
    with w_ab = U|a> (x) V|b>, Y_k = Re tr[R Y_k|block] where
    R[(ab), (a'b')] = <w_ab| rho |w_a'b'>.
    """

    def __init__(self, rho: DensityMatrix):
        self.dims = rho.dims
        self.rho = np.asarray(rho.matrix)
        ops = np.asarray(y_operators(self.dims))
        b = self.dims.b
        support = [0, 1, b, b + 1]
        mask = np.zeros(self.dims.total, dtype=bool)
        mask[support] = True
        if np.any(ops[:, ~mask, :]) or np.any(ops[:, :, ~mask]):
            raise AssertionError("Y operators leak outside the Schmidt block")
        self.block = np.ascontiguousarray(ops[:, support][:, :, support])
        self.evaluations = 0

    def y_values(self, params) -> np.ndarray:
        x = np.atleast_2d(np.asarray(params, dtype=float))
        u, v = local_unitaries(x, self.dims)
        m = x.shape[0]
        w = np.einsum("mxa,myb->mxyab", u, v[:, :, :2]).reshape(m, self.dims.total, 4)
        r = np.swapaxes(w.conj(), 1, 2) @ self.rho @ w
        return np.real(np.einsum("kij,mji->mk", self.block, r))

    def __call__(self, params) -> np.ndarray:
        y = self.y_values(params)
        self.evaluations += y.shape[0]
        return y[:, 0] ** 2 + y[:, 1] ** 2 - y[:, 2] ** 2


def nelder_mead_batch(func, x0, step: float, max_iters: int, fatol: float, xatol: float):
    """Minimize ``func`` from each row of ``x0`` with independent simplices.

    ``func`` maps an (m, n) array of points to m values.  Uses the standard
    coefficients (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
    and stops a restart once both the spread of simplex values is within
    ``fatol`` and the simplex diameter is within ``xatol``.

    Returns (best points, best values, iterations per restart).
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    k, n = x0.shape
    sim = np.empty((k, n + 1, n))
    sim[:, 0] = x0
    sim[:, 1:] = x0[:, None, :] + step * np.eye(n)[None]
    fsim = func(sim.reshape(-1, n)).reshape(k, n + 1)
    order = np.argsort(fsim, axis=1, kind="stable")
    sim = np.take_along_axis(sim, order[:, :, None], axis=1)
    fsim = np.take_along_axis(fsim, order, axis=1)
    iters = np.zeros(k, dtype=int)
    active = np.ones(k, dtype=bool)

    while True:
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s, fs = sim[idx], fsim[idx]
        converged = (np.max(np.abs(s[:, 1:] - s[:, :1]), axis=(1, 2)) <= xatol) & (
            np.max(np.abs(fs[:, 1:] - fs[:, :1]), axis=1) <= fatol
        )
        done = converged | (iters[idx] >= max_iters)
        active[idx[done]] = False
        keep = ~done
        idx, s, fs = idx[keep], s[keep], fs[keep]
        if idx.size == 0:
            break

        xbar = s[:, :-1].mean(axis=1)
        worst = s[:, -1]
        xr = 2.0 * xbar - worst
        fr = func(xr)
        new_x, new_f = xr.copy(), fr.copy()

        expand = fr < fs[:, 0]
        if expand.any():
            ei = np.flatnonzero(expand)
            xe = 3.0 * xbar[ei] - 2.0 * worst[ei]
            fe = func(xe)
            better = fe < fr[ei]
            new_x[ei[better]] = xe[better]
            new_f[ei[better]] = fe[better]

        accept = expand | (fr < fs[:, -2])
        shrink = np.zeros(idx.size, dtype=bool)
        contract = ~accept
        if contract.any():
            ci = np.flatnonzero(contract)
            outside = fr[ci] < fs[ci, -1]
            xc = np.where(
                outside[:, None],
                1.5 * xbar[ci] - 0.5 * worst[ci],
                0.5 * xbar[ci] + 0.5 * worst[ci],
            )
            fc = func(xc)
            ok = np.where(outside, fc <= fr[ci], fc < fs[ci, -1])
            new_x[ci[ok]] = xc[ok]
            new_f[ci[ok]] = fc[ok]
            accept[ci[ok]] = True
            shrink[ci[~ok]] = True

        ai = idx[accept]
        sim[ai, -1] = new_x[accept]
        fsim[ai, -1] = new_f[accept]
        if shrink.any():
            si = idx[shrink]
            best = sim[si, :1]
            sim[si, 1:] = best + 0.5 * (sim[si, 1:] - best)
            fsim[si, 1:] = func(sim[si, 1:].reshape(-1, n)).reshape(si.size, n)

        iters[idx] += 1
        order = np.argsort(fsim[idx], axis=1, kind="stable")
        sim[idx] = np.take_along_axis(sim[idx], order[:, :, None], axis=1)
        fsim[idx] = np.take_along_axis(fsim[idx], order, axis=1)

    return sim[:, 0].copy(), fsim[:, 0].copy(), iters


def start_points(dims: Dims, cfg: OptimizerConfig) -> np.ndarray:
    """Restart k is seeded by (cfg.seed, k), independent of the restart count."""
    return np.array([random_settings(dims, (cfg.seed, k)) for k in range(cfg.restarts)])


def maximize_i_ph(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Best witness value found over local-unitary settings (a lower bound on the supremum)."""
    cfg = cfg or OptimizerConfig()
    objective = WitnessObjective(rho)
    x, fx, _ = nelder_mead_batch(
        lambda p: -objective(p),
        start_points(rho.dims, cfg),
        cfg.initial_step,
        cfg.max_iters,
        cfg.fatol,
        cfg.xatol,
    )
    values = -fx
    top = values.max()
    best = int(np.flatnonzero(values >= top - TIE_TOL)[0])
    return OptimizationResult(
        best_value=float(values[best]),
        best_params=x[best],
        per_restart_values=values,
        evaluations=objective.evaluations,
        best_restart=best,
        dims=rho.dims,
    )


def label_for(i_ph_max: float, threshold: float = ENTANGLED_THRESHOLD) -> str:
    if i_ph_max > threshold:
        return "entangled"
    if i_ph_max < -threshold:
        return "separable"
    return "boundary"


def build_report(rho: DensityMatrix, params, i_value: float, cfg: OptimizerConfig, restarts_used: int,
                 label: str = "") -> WitnessReport:
    u, v = local_unitaries(params, rho.dims)
    qubits = rho.dims.b == 2
    return WitnessReport(
        i_ph_max=float(i_value),
        y=y_triple(rho, u, v),
        u_params=np.asarray(params[:SU2_PARAMS]),
        v_params=np.asarray(params[SU2_PARAMS:]),
        u_matrix=u,
        v_matrix=v,
        ppt_min_eig=ppt_min_eigenvalue(rho),
        chsh_max=chsh_max(rho) if qubits else None,
        concurrence=concurrence(rho) if qubits else None,
        p_e=degree_of_entanglement(i_value),
        restarts_used=restarts_used,
        seed=cfg.seed,
        label=label,
    )


def classify(rho: DensityMatrix, cfg: OptimizerConfig | None = None) -> tuple[str, WitnessReport]:
    """Label a state entangled / separable / boundary from its maximized witness."""
    cfg = cfg or OptimizerConfig()
    result = maximize_i_ph(rho, cfg)
    label = label_for(result.best_value)
    report = build_report(rho, result.best_params, result.best_value, cfg, cfg.restarts, label)
    report.extra["evaluations"] = result.evaluations
    return label, report
