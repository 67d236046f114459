"""JSON and CSV report plumbing shared by the CLI and the suite.

Conventions (stable external format): JSON objects carry a top-level
"schema" field (currently 1) and serialize complex numbers as [re, im]
pairs; CSV uses '.' decimals, LF line endings and no locale, so identical
flags produce byte-identical files (timestamps excluded).
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

from .geometry import Model
from .dynamics import OrbitRecord

SCHEMA_VERSION = 1

ORBIT_CSV_HEADER = ["n", "re", "im", "d_n", "ratio_re", "ratio_im", "arg", "im_over_abs"]


def cpair(c: complex | None) -> list[float] | None:
    if c is None:
        return None
    c = complex(c)
    return [c.real, c.imag]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def orbit_rows(rec: OrbitRecord) -> list[list]:
    """CSV rows for an orbit; half-plane-only columns are blank on disk
    orbits, and per-step columns are blank on the final point."""
    halfplane = rec.model is Model.HALFPLANE
    rows = []
    for n, w in enumerate(rec.points):
        last = n == len(rec.points) - 1
        rows.append(
            [
                n,
                repr(w.real),
                repr(w.imag),
                "" if last else repr(rec.step_distances[n]),
                "" if (last or not halfplane) else repr(rec.ratios[n].real),
                "" if (last or not halfplane) else repr(rec.ratios[n].imag),
                repr(rec.args[n]),
                repr(w.imag / abs(w)) if halfplane else "",
            ]
        )
    return rows


def default_out_dir(flag_value: str | None) -> Path:
    """--out flag wins; then the HEINS_LAB_OUT environment variable; then a
    local ./disklab_out directory."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("HEINS_LAB_OUT")
    if env:
        return Path(env)
    return Path("disklab_out")
