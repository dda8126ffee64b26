"""Trajectory CSV and diagnostics JSON serialization.

Trajectory files carry one row per particle per snapshot with header
``t,particle,c0,...,c{d-1}``; floats are written with repr so a re-read
reproduces them bit-exactly. All writes are atomic (temp file + rename).
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np


def atomic_write_text(path, text: str) -> None:
    """Write text to ``path`` via a temp file in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_trajectory(traj, path) -> None:
    """Write a trajectory to CSV (lossless double precision)."""
    d = traj.snapshots[0].shape[1]
    lines = ["t,particle," + ",".join(f"c{c}" for c in range(d))]
    for t, snap in zip(traj.times, traj.snapshots):
        for i, row in enumerate(snap):
            lines.append(repr(t) + f",{i}," + ",".join(repr(v) for v in row.tolist()))
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_trajectory(path):
    """Read a trajectory CSV back into times and snapshots.

    Returns (times, snapshots) with snapshots a list of (N, d) arrays;
    the potential/volume series are not stored in the CSV and must be
    recomputed if needed.
    """
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["t", "particle"]:
            raise ValueError(f"unexpected trajectory header: {header}")
        d = len(header) - 2
        times: list[float] = []
        blocks: list[list[list[float]]] = []
        for row in reader:
            if not row:
                continue
            t = float(row[0])
            coords = [float(v) for v in row[2 : 2 + d]]
            if not times or t != times[-1]:
                times.append(t)
                blocks.append([])
            blocks[-1].append(coords)
    snapshots = [np.array(b, dtype=np.float64) for b in blocks]
    return times, snapshots


def save_diagnostics(report, path) -> None:
    """Write a diagnostics report as JSON."""
    atomic_write_text(path, json.dumps(report.to_dict(), indent=2) + "\n")
