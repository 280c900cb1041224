"""Report emission: console tables, CSV and JSON.

Machine-readable outputs keep full float precision (``repr``) so that
re-reading them gives bit-identical numbers. Every file embeds a run
manifest: JSON under the ``"manifest"`` key, CSV as leading ``# key: value``
comment lines that :func:`read_csv` skips.

Sweep CSV columns (frozen)::

    r, squeezing_db, var_Xt, var_Xc, var_Yt, var_Yc,
    db_Xt, db_Xc, db_Yt, db_Yc, fidelity_t, fidelity_c,
    duan, duan_bound, entangled
"""
from __future__ import annotations

import csv
import datetime as _dt
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._accel import backend_name
from .config import config_to_dict
from .protocol import DISPLAY_ORDER, OUTPUT_NAMES, GateReport

SWEEP_COLUMNS = (
    "r",
    "squeezing_db",
    "var_Xt",
    "var_Xc",
    "var_Yt",
    "var_Yc",
    "db_Xt",
    "db_Xc",
    "db_Yt",
    "db_Yc",
    "fidelity_t",
    "fidelity_c",
    "duan",
    "duan_bound",
    "entangled",
)


@dataclass
class RunManifest:
    command: str
    config: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    seed: int | None = None
    timestamp: str = ""
    outputs: list = field(default_factory=list)

    @classmethod
    def create(cls, command, config=None, seed=None, outputs=()):
        return cls(
            command=command,
            config=config_to_dict(config) if config is not None else {},
            versions={"clusterx": __version__, "numpy": np.__version__, "kernel_backend": backend_name()},
            seed=seed,
            timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
            outputs=list(outputs),
        )

    def to_dict(self) -> dict:
        return asdict(self)


def fmt(x) -> str:
    """Six significant digits for console output."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.6g}"


def table(headers, rows) -> str:
    cells = [list(map(str, headers))] + [[c if isinstance(c, str) else fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def gate_record(report: GateReport) -> dict:
    return {
        "engine": report.engine,
        "quadratures": {
            k: {"mean": report.means[k], "variance": report.variances[k], "db": report.db[k]} for k in OUTPUT_NAMES
        },
        "covariance": [[float(v) for v in row] for row in report.cov],
        "fidelity_t": report.fidelity_t,
        "fidelity_c": report.fidelity_c,
        "duan": report.duan,
        "max_engine_deviation": report.max_engine_deviation,
    }


def gate_table(report: GateReport) -> str:
    rows = [(k + "^out", report.means[k], report.variances[k], report.db[k]) for k in DISPLAY_ORDER]
    out = [table(("quadrature", "mean", "variance", "dB vs SNL"), rows)]
    out.append(f"fidelity F_t = {fmt(report.fidelity_t)}   F_c = {fmt(report.fidelity_c)}")
    out.append(f"Duan witness V(X_t+X_c)+V(Y_c-Y_t) = {fmt(report.duan)} (separable bound 4)")
    if report.max_engine_deviation is not None:
        out.append(f"engines: covariance vs heisenberg max deviation {report.max_engine_deviation:.2e}")
    return "\n".join(out)


def write_json(path, payload: dict, manifest: RunManifest) -> None:
    data = dict(payload)
    data["manifest"] = manifest.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, allow_nan=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def csv_text(columns, rows, manifest: RunManifest | None = None) -> str:
    buf = io.StringIO()
    if manifest is not None:
        for k, v in manifest.to_dict().items():
            buf.write(f"# {k}: {json.dumps(v)}\n")
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(columns)
    for row in rows:
        values = [row[c] for c in columns] if isinstance(row, dict) else list(row)
        w.writerow([_cell(v) for v in values])
    return buf.getvalue()


def write_csv(path, columns, rows, manifest: RunManifest | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(columns, rows, manifest))


def _parse_cell(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(path_or_text, from_text: bool = False) -> tuple:
    """Return ``(manifest_dict, rows)`` with numeric cells converted back."""
    text = path_or_text if from_text else open(path_or_text, encoding="utf-8").read()
    manifest, body = {}, []
    for line in text.splitlines(keepends=True):
        if line.startswith("# ") and not body:
            k, v = line[2:].rstrip("\n").split(": ", 1)
            manifest[k] = json.loads(v)
        else:
            body.append(line)
    reader = csv.DictReader(io.StringIO("".join(body)))
    return manifest, [{k: _parse_cell(v) for k, v in row.items()} for row in reader]
