"""Squeezing sweeps of the gate's figures of merit."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .metrics import duan_bound, squeezing_db
from .protocol import ExperimentConfig, run_gate


def sweep_grid(r_min: float, r_max: float, step: float) -> np.ndarray:
    if not all(np.isfinite(v) for v in (r_min, r_max, step)):
        raise ValueError("sweep limits must be finite")
    if r_min < 0:
        raise ValueError(f"r-min must be >= 0, got {r_min}")
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if r_max < r_min:
        raise ValueError(f"r-max must be >= r-min, got {r_max} < {r_min}")
    n = int(np.floor((r_max - r_min) / step + 1e-9)) + 1
    return r_min + step * np.arange(n)


def sweep_row(r: float, gain=1.0, engine: str = "heisenberg") -> dict:
    rep = run_gate(ExperimentConfig(r=float(r), gain=gain, engine=engine))
    v, db = rep.variances, rep.db
    bound = duan_bound()
    return {
        "r": float(r),
        "squeezing_db": float(squeezing_db(r)),
        "var_Xt": v["X_t"],
        "var_Xc": v["X_c"],
        "var_Yt": v["Y_t"],
        "var_Yc": v["Y_c"],
        "db_Xt": db["X_t"],
        "db_Xc": db["X_c"],
        "db_Yt": db["Y_t"],
        "db_Yc": db["Y_c"],
        "fidelity_t": rep.fidelity_t,
        "fidelity_c": rep.fidelity_c,
        "duan": rep.duan,
        "duan_bound": bound,
        "entangled": rep.duan < bound,
    }


def _row_args(args):
    return sweep_row(*args)


def run_sweep(r_min, r_max, step, gain=1.0, engine="heisenberg", jobs: int = 1) -> list:
    """Rows sorted by ``r``; points run in ``jobs`` worker processes when ``jobs > 1``."""
    grid = sweep_grid(r_min, r_max, step)
    args = [(float(r), gain, engine) for r in grid]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_args, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        rows = [sweep_row(*a) for a in args]
    return sorted(rows, key=lambda row: row["r"])


def threshold_from_rows(rows) -> dict | None:
    """First row certified entangled, or None."""
    for row in rows:
        if row["entangled"]:
            return row
    return None
