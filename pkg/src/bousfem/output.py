"""Delimited result files, written atomically.

Every writer goes through :func:`atomic_write`: content lands in a
temporary file in the destination directory and is renamed into place
only when complete, so a crashed run never leaves a partial file behind.
Floating-point values are written with ``repr``, which round-trips
doubles exactly; column orders are fixed and documented in FORMATS.md.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager

import numpy as np

__all__ = [
    "atomic_write",
    "write_snapshot",
    "write_gauge",
    "write_profile",
    "write_convergence",
    "write_metrics",
]


@contextmanager
def atomic_write(path):
    """Yield a text handle; rename onto ``path`` only on clean exit."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_table(path, header, columns):
    columns = [np.asarray(c) for c in columns]
    n = columns[0].shape[0]
    if any(c.shape[0] != n for c in columns):
        raise ValueError("columns have unequal lengths")
    with atomic_write(path) as fh:
        fh.write(header + "\n")
        for i in range(n):
            fh.write(",".join(_cell(c[i]) for c in columns) + "\n")


def write_snapshot(path, xs, zeta, u, eta_b):
    """Field snapshot: columns x, zeta, u, eta_b."""
    _write_table(path, "x,zeta,u,eta_b", [xs, zeta, u, eta_b])


def write_gauge(path, t, zeta):
    """Gauge time series: columns t, zeta."""
    _write_table(path, "t,zeta", [t, zeta])


def write_profile(path, xs, zeta, u):
    """Travelling-wave profile: columns x, zeta, u."""
    _write_table(path, "x,zeta,u", [xs, zeta, u])


def write_convergence(path, Ns, errors, rates):
    """One field's refinement history: N, L2, rate, Linf, rate, H1, rate.

    ``errors`` is a sequence of per-N triples (L2, Linf, H1); ``rates``
    the matching triples with the first row blank (no coarser level).
    """
    with atomic_write(path) as fh:
        fh.write("N,L2,rate,Linf,rate,H1,rate\n")
        for i, n in enumerate(Ns):
            err = errors[i]
            cells = [str(int(n))]
            for j in range(3):
                cells.append(_cell(err[j]))
                rate = rates[i][j]
                cells.append("" if rate is None else _cell(rate))
            fh.write(",".join(cells) + "\n")


def write_metrics(path, mapping):
    """Flat summary: one ``key = value`` line per entry, insertion order."""
    with atomic_write(path) as fh:
        for key, value in mapping.items():
            if isinstance(value, str):
                fh.write(f"{key} = {value}\n")
            elif isinstance(value, (tuple, list)):
                fh.write(f"{key} = {' '.join(_cell(v) for v in value)}\n")
            else:
                fh.write(f"{key} = {_cell(value)}\n")
