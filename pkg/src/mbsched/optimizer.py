"""Online least-squares fit of inflection point against (throughput, latency).

Regressors are scaled before fitting (throughput in MB/s, latency in s,
inflection point in KB) to keep the normal equations well conditioned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import INF_PT_MAX, INF_PT_MIN, KB, MB, NS_PER_S, HistoryRow, WindowSpec

HISTORY_WINDOW = 256


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class Betas:
    """Coefficients in scaled space plus the scales that define it."""
    b0: float
    b1: float
    b2: float
    thput_scale: float = MB
    lat_scale: float = 1.0
    inf_pt_scale: float = KB

    def raw(self) -> tuple[float, float, float]:
        """Coefficients for bytes = b0 + b1 * (bytes/s) + b2 * seconds."""
        s = self.inf_pt_scale
        return (self.b0 * s, self.b1 * s / self.thput_scale, self.b2 * s / self.lat_scale)

    def to_dict(self) -> dict:
        return {"b0": self.b0, "b1": self.b1, "b2": self.b2, "thput_scale": self.thput_scale,
                "lat_scale": self.lat_scale, "inf_pt_scale": self.inf_pt_scale}


def _row_tuple(row) -> tuple[float, float, float]:
    if isinstance(row, HistoryRow):
        return float(row.avg_thput), row.max_lat_ns / NS_PER_S, float(row.inf_pt_used)
    thput, lat, inf_pt = row
    return float(thput), float(lat), float(inf_pt)


def fit(history: Sequence) -> Betas:
    """OLS via the normal equations.

    Rows are ``HistoryRow`` or ``(avg_thput B/s, max_lat s, inf_pt B)``. A rank
    deficient design raises InsufficientHistory. A full-rank but numerically
    singular Gram matrix falls back to the pseudo-inverse.
    """
    if len(history) < 3:
        raise InsufficientHistory(f"need >= 3 rows, have {len(history)}")
    data = np.array([_row_tuple(r) for r in history], dtype=float)
    b = Betas(0.0, 0.0, 0.0)
    X = np.column_stack([np.ones(len(data)), data[:, 0] / b.thput_scale,
                         data[:, 1] / b.lat_scale])
    y = data[:, 2] / b.inf_pt_scale
    if np.linalg.matrix_rank(X) < 3:
        raise InsufficientHistory("regressors are collinear")
    gram = X.T @ X
    try:
        beta = np.linalg.solve(gram, X.T @ y)
    except np.linalg.LinAlgError:
        beta = np.linalg.pinv(X) @ y
    return Betas(float(beta[0]), float(beta[1]), float(beta[2]))


def targets(history: Sequence, window: WindowSpec) -> tuple[float, float]:
    """(target throughput B/s, target latency s) for the next prediction."""
    if not history:
        raise InsufficientHistory("empty history")
    rows = [_row_tuple(r) for r in history]
    target_thput = max(r[0] for r in rows)
    if window.slide_s > 0:
        return target_thput, float(window.slide_s)
    return target_thput, sum(r[1] for r in rows) / len(rows)


def predict(betas: Betas, target_thput, target_lat) -> int:
    b0, b1, b2 = betas.raw()
    value = b0 + b1 * float(target_thput) + b2 * float(target_lat)
    if not np.isfinite(value):
        return INF_PT_MAX if value > 0 else INF_PT_MIN
    return int(min(max(round(value), INF_PT_MIN), INF_PT_MAX))


def optimize(history: Sequence, window: WindowSpec, keep: int = HISTORY_WINDOW):
    """One optimizer round over the most recent ``keep`` rows.

    Returns ``(inf_pt, betas)`` or ``(None, None)`` when the history cannot
    support a fit; the caller then keeps its current inflection point.
    """
    recent = list(history)[-keep:] if keep else list(history)
    try:
        betas = fit(recent)
    except InsufficientHistory:
        return None, None
    thput, lat = targets(recent, window)
    return predict(betas, thput, lat), betas


@dataclass
class Mailbox:
    """Single-slot handoff from the background optimizer to the planner."""
    ready_ns: int = 0
    inf_pt: int | None = None
    betas: Betas | None = None
    full: bool = False

    def post(self, ready_ns: int, inf_pt, betas) -> None:
        self.ready_ns, self.inf_pt, self.betas, self.full = ready_ns, inf_pt, betas, True

    def take(self, now_ns: int) -> tuple[int, int | None, Betas | None]:
        """Blocks (in simulated time) until the result is ready; returns the wait."""
        if not self.full:
            return 0, None, None
        wait = max(0, self.ready_ns - now_ns)
        self.full = False
        return wait, self.inf_pt, self.betas

