"""Diagnostics series as CSV, and field checkpoints.

The CSV has one header line naming the columns of
:meth:`DiagnosticsRecord.columns` and one row per record.  Floats are written
with ``repr`` (shortest round-trip decimal), so reading a file back
reproduces every value bit for bit.

A checkpoint is the density in the binary layout of :mod:`.storage` plus a
JSON sidecar with the configuration echo and the time.
"""

import csv
import json
from pathlib import Path

from . import storage
from .diagnostics import DiagnosticsRecord


def write_series(records, path):
    """Write records (or a trajectory) to ``path``; header only when empty."""
    records = getattr(records, "records", records)
    records = list(records)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if not records:
            w.writerow(name for name, _ in _template().columns())
            return
        w.writerow(name for name, _ in records[0].columns())
        for r in records:
            w.writerow(repr(float(v)) for _, v in r.columns())


def _template():
    return DiagnosticsRecord(0.0, 0.0, (0.0, 0.0, 0.0), 0.0, 0.0, 0.0)


def read_series(path):
    """Parse a CSV written by :func:`write_series` into records."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file, expected a header line")
    header, out = rows[0], []
    for row in rows[1:]:
        if len(row) != len(header):
            raise ValueError(f"{path}: row has {len(row)} fields, header has {len(header)}")
        d = dict(zip(header, map(float, row)))
        rec = DiagnosticsRecord(
            t=d.pop("t"), mass=d.pop("mass"),
            momentum=(d.pop("momentum_x"), d.pop("momentum_y"), d.pop("momentum_z")),
            energy=d.pop("energy"), entropy=d.pop("entropy"), dissipation=d.pop("dissipation"),
            weighted_norm=d.pop("M_q"), interaction=d.pop("interaction"),
            j_gamma=d.pop("j_gamma"), coercivity=d.pop("c_coer"),
            clipped_mass=d.pop("clipped_mass"), tail_mass=d.pop("tail_mass"))
        for name, value in d.items():
            kind, _, order = name.partition("_")
            if kind == "M":
                rec.moments[float(order)] = value
            elif kind == "Lp":
                rec.lp_norms[float(order)] = value
            else:
                raise ValueError(f"{path}: unknown column {name!r}")
        out.append(rec)
    return out


def sidecar(path):
    return Path(path).with_suffix(".json")


def write_checkpoint(path, f, t, config):
    """Store the density ``f`` at time ``t`` with the configuration echo."""
    path = Path(path)
    storage.write_arrays(path, [f], n=config.n, L=config.L, gamma=config.gamma)
    meta = {"t": float(t), "config": config.to_dict(), "format": storage.FORMAT_VERSION}
    sidecar(path).write_text(json.dumps(meta, indent=2) + "\n")


def read_checkpoint(path):
    """Returns ``(f, t, config_dict)``."""
    path = Path(path)
    head = storage.read_header(path)
    n = head["n"]
    _, (f,) = storage.read_arrays(path, [(n, n, n)])
    try:
        meta = json.loads(sidecar(path).read_text())
    except FileNotFoundError:
        raise storage.StorageError(f"{path}: missing sidecar {sidecar(path)}") from None
    except json.JSONDecodeError as exc:
        raise storage.StorageError(f"{sidecar(path)}: {exc}") from None
    return f, meta["t"], meta["config"]
