"""Inference accuracy as a function of splitting point and transmission SNR.

Accuracy is tabulated: one row per splitting point, one column per
admissible SNR, plus a noiseless value used when nothing is transmitted.
Tables are either loaded from measured files or generated synthetically
with a logistic surface that is monotone in depth and SNR (deeper cuts
are less degraded by channel noise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class AccuracyLUT:
    """Accuracy table G(k, gamma). ``snr_grid`` is linear and strictly increasing."""

    snr_grid: tuple[float, ...]
    table: np.ndarray  # shape (J+1, len(snr_grid)), values in [0, 1]
    noiseless: float  # accuracy at k = J (no transmission)

    def __post_init__(self):
        table = np.asarray(self.table, dtype=float)
        object.__setattr__(self, "table", table)
        if table.ndim != 2 or table.shape[1] != len(self.snr_grid):
            raise ValueError("table must be (J+1) x len(snr_grid)")
        if table.shape[0] < 2:
            raise ValueError("need at least two splitting-point rows")
        if np.any(table < 0) or np.any(table > 1):
            raise ValueError("accuracy entries must lie in [0, 1]")
        if not 0 <= self.noiseless <= 1:
            raise ValueError("noiseless accuracy must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.snr_grid, self.snr_grid[1:])):
            raise ValueError("snr_grid must be strictly increasing")

    @property
    def last_index(self) -> int:
        return self.table.shape[0] - 1

    def snr_index(self, gamma: float) -> int:
        for i, g in enumerate(self.snr_grid):
            if math.isclose(g, gamma, rel_tol=1e-9):
                return i
        raise ValueError(f"SNR {gamma} (linear) is not on the LUT grid")


def lut_lookup(lut: AccuracyLUT, k: int, gamma: float) -> float:
    """Accuracy for splitting point k at target SNR gamma (linear).

    k = J ignores gamma and returns the noiseless accuracy. For k < J the
    SNR must be a grid member; there is no interpolation.
    """
    if not 0 <= k <= lut.last_index:
        raise ValueError(f"splitting point {k} outside 0..{lut.last_index}")
    if k == lut.last_index:
        return lut.noiseless
    return float(lut.table[k, lut.snr_index(gamma)])


@dataclass(frozen=True)
class SynthShape:
    """Parameters of the synthetic logistic accuracy surface."""

    g_max: float  # plateau accuracy in [0, 1]
    depth_slope: float  # > 0, gain per splitting-point step
    snr_slope: float  # > 0, gain per dB of SNR
    midpoint_k: float  # splitting point at half plateau (at midpoint SNR)
    midpoint_snr_db: float

    def __post_init__(self):
        if not 0 <= self.g_max <= 1:
            raise ValueError("g_max must lie in [0, 1]")
        if self.depth_slope <= 0 or self.snr_slope <= 0:
            raise ValueError("depth_slope and snr_slope must be positive")


def synth_lut(last_index: int, snr_grid: tuple[float, ...], shape: SynthShape) -> AccuracyLUT:
    """Generate a synthetic LUT: logistic in depth and SNR(dB), plateau g_max.

    The surface is strictly increasing in both k and SNR, so deeper cuts are
    never hurt by noise more than shallow ones.
    """
    if last_index < 1:
        raise ValueError("last_index must be >= 1")
    ks = np.arange(last_index + 1, dtype=float)
    snr_db = 10.0 * np.log10(np.asarray(snr_grid, dtype=float))
    arg = (
        shape.depth_slope * (ks[:, None] - shape.midpoint_k)
        + shape.snr_slope * (snr_db[None, :] - shape.midpoint_snr_db)
    )
    table = shape.g_max / (1.0 + np.exp(-arg))
    return AccuracyLUT(snr_grid=tuple(snr_grid), table=table, noiseless=shape.g_max)


def load_lut(path: str | Path) -> AccuracyLUT:
    """Load a LUT from comma-separated text.

    Format: first line ``snr_db,<g1>,<g2>,...``; one line ``k,<acc>,...``
    per splitting point, k ascending from 0; final line ``noiseless,<value>``.
    """
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty LUT file")
    header = [c.strip() for c in lines[0].split(",")]
    if header[0] != "snr_db" or len(header) < 2:
        raise ValueError(f"{path}: line 1: expected header 'snr_db,<g1>,...', got {header[0]!r}")
    try:
        snr_db = [float(c) for c in header[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: line 1: non-numeric SNR column: {exc}") from None
    snr_grid = tuple(10.0 ** (g / 10.0) for g in snr_db)
    if len(lines) < 4:
        raise ValueError(f"{path}: need at least two k rows and a noiseless line")
    if not lines[-1].startswith("noiseless"):
        raise ValueError(f"{path}: last line must be 'noiseless,<value>'")
    noiseless = float(lines[-1].split(",")[1])
    rows = []
    for i, ln in enumerate(lines[1:-1]):
        cells = [c.strip() for c in ln.split(",")]
        if len(cells) != len(snr_db) + 1:
            raise ValueError(
                f"{path}: line {i + 2}: expected {len(snr_db) + 1} columns, got {len(cells)}"
            )
        if int(cells[0]) != i:
            raise ValueError(f"{path}: line {i + 2}: k rows must ascend from 0")
        try:
            row = [float(c) for c in cells[1:]]
        except ValueError:
            raise ValueError(f"{path}: line {i + 2}: non-numeric accuracy entry") from None
        for j, v in enumerate(row):
            if not 0 <= v <= 1:
                raise ValueError(f"{path}: line {i + 2}, column {j + 2}: accuracy {v} outside [0, 1]")
        rows.append(row)
    return AccuracyLUT(snr_grid=snr_grid, table=np.array(rows), noiseless=noiseless)


def save_lut(lut: AccuracyLUT, path: str | Path) -> None:
    """Write a LUT in the format read by :func:`load_lut` (values round-trip exactly)."""
    out = ["snr_db," + ",".join(repr(10.0 * math.log10(g)) for g in lut.snr_grid)]
    for k in range(lut.last_index + 1):
        out.append(f"{k}," + ",".join(repr(float(v)) for v in lut.table[k]))
    out.append(f"noiseless,{lut.noiseless!r}")
    Path(path).write_text("\n".join(out) + "\n")
