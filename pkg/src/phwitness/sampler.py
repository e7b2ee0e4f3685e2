"""Finite-shot simulation of the joint POVM experiment and the plug-in witness estimate.

Random numbers come from numpy's Philox4x32-10 counter-based bit generator,
seeded directly with the user seed, so counts are reproducible from the
seed alone.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .linalg import QUBIT_QUBIT, QUBIT_QUTRIT
from .witness import JointProbabilityTable, probability_coefficients, y_from_probabilities

DEFAULT_RESAMPLES = 500


def make_rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


class ShotRecordError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ShotRecord:
    """Outcome counts, rows for A's outcomes and columns for B's."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts)
        if c.shape not in ((4, 4), (4, 9)):
            raise ShotRecordError(f"unsupported count table shape {c.shape}")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(c == np.round(c)):
                raise ShotRecordError("counts must be integers")
            c = c.astype(np.int64)
        if c.min() < 0:
            raise ShotRecordError("counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def shots(self) -> int:
        return int(self.counts.sum())

    def frequencies(self) -> np.ndarray:
        if self.shots == 0:
            raise ShotRecordError("record has zero shots")
        return self.counts / self.shots

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "count"])
            for (i, j), n in np.ndenumerate(self.counts):
                writer.writerow([i + 1, j + 1, int(n)])

    @classmethod
    def from_csv(cls, path) -> "ShotRecord":
        rows = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append((int(row["i"]), int(row["j"]), int(row["count"])))
        if not rows:
            raise ShotRecordError(f"{path}: no rows")
        n_a = max(r[0] for r in rows)
        n_b = max(r[1] for r in rows)
        counts = np.zeros((n_a, n_b), dtype=np.int64)
        for i, j, n in rows:
            counts[i - 1, j - 1] = n
        return cls(counts)


@dataclass
class EstimateReport:
    i_ph_hat: float
    std_error: float
    shots: int
    bootstrap_resamples: int
    y_hat: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "i_ph_hat": float(self.i_ph_hat),
            "std_error": float(self.std_error),
            "shots": int(self.shots),
            "bootstrap_resamples": int(self.bootstrap_resamples),
            "y_hat": [float(v) for v in self.y_hat],
        }


def sample_shots(table: JointProbabilityTable, shots: int, seed) -> ShotRecord:
    """Multinomial draw of ``shots`` joint outcomes from ``table``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.clip(np.asarray(table.p, dtype=float), 0.0, None).ravel()
    p /= p.sum()
    counts = make_rng(seed).multinomial(shots, p)
    return ShotRecord(counts.reshape(table.p.shape))


def _i_ph_batch(freqs: np.ndarray) -> np.ndarray:
    """Plug-in witness for a stack of frequency tables, shape (..., nA, nB)."""
    dims = QUBIT_QUBIT if freqs.shape[-1] == 4 else QUBIT_QUTRIT
    y = np.einsum("kij,...ij->...k", probability_coefficients(dims), freqs)
    return y[..., 0] ** 2 + y[..., 1] ** 2 - y[..., 2] ** 2


def estimate_i_ph(record: ShotRecord, resamples: int = DEFAULT_RESAMPLES, seed=0) -> EstimateReport:
    """Plug-in estimate of the witness with a nonparametric bootstrap error.

    Bootstrap replicates redraw ``shots`` outcomes from the empirical
    frequencies using the Philox stream keyed by ``(seed, 1)``.  A single
    shot carries no spread information (every replicate is identical), so
    for ``shots == 1`` the error is instead the Popoviciu bound: half the range of the witness over all one-hot
    frequency tables, which bounds the standard deviation of a one-shot
    estimate.
    """
    n = record.shots
    if n == 0:
        raise ShotRecordError("cannot estimate from zero shots")
    freq = record.frequencies()
    y = y_from_probabilities(freq)
    if n == 1:
        one_hot = np.eye(freq.size).reshape((freq.size,) + freq.shape)
        values = _i_ph_batch(one_hot)
        err = 0.5 * float(values.max() - values.min())
    else:
        # bootstrap stream is keyed apart from the sampling stream of the same seed
        draws = make_rng([seed, 1]).multinomial(n, freq.ravel(), size=resamples)
        boot = _i_ph_batch(draws.reshape((resamples,) + freq.shape) / n)
        err = float(np.std(boot, ddof=1)) if resamples > 1 else 0.0
    return EstimateReport(
        i_ph_hat=y.i_ph,
        std_error=err,
        shots=n,
        bootstrap_resamples=resamples,
        y_hat=tuple(y.as_list()),
    )
