"""Finitely supported signals on the integers and shifted dyadic interval grids.

Everything downstream (sparse forms, weight characteristics, random
transforms) consumes the types defined here.  The grids are the three
shifted dyadic grids in one dimension: grid ``t`` at level ``k`` consists of
the intervals of length ``2**k`` with left endpoint

    2**k * (m + (-1)**k * t / 3),    m integer,  t in {1, 2, 3}.

The alternating sign makes each grid nested across levels (a cube's two
children lie in the same grid), while at a fixed level the central thirds of
the cubes from the three grids tile the line with multiplicity one.

On the integers a cube is the set of lattice points in the half-open
interval; an interval of length ``2**k`` always contains exactly ``2**k``
of them, so cube measures are exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridWindow",
    "DyadicCube",
    "Signal",
    "local_average",
    "bilinear_pairing",
    "shifted_grid_cubes",
    "smallest_containing_cube",
    "save_signal_text",
    "load_signal_text",
    "save_signal_binary",
    "load_signal_binary",
]


@dataclass(frozen=True)
class GridWindow:
    """Half-open truncation window [lo, hi) for an experiment."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.hi <= self.lo:
            raise ValueError(f"empty window [{self.lo}, {self.hi})")

    def __len__(self):
        return self.hi - self.lo

    def contains(self, x: int) -> bool:
        return self.lo <= x < self.hi


def _ceil_div3(n: int) -> int:
    return -((-n) // 3)


@dataclass(frozen=True)
class DyadicCube:
    """Interval of length 2**level in one of the three shifted dyadic grids.

    ``shift`` is the grid index t in {1, 2, 3}; ``index`` is the position m
    along the grid.  All endpoint arithmetic is done with the exact integer
    ``3 * left_endpoint`` to avoid floating point at deep levels.
    """

    shift: int
    level: int
    index: int

    def __post_init__(self):
        if self.shift not in (1, 2, 3):
            raise ValueError(f"shift must be 1, 2 or 3, got {self.shift}")
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")

    @property
    def side(self) -> int:
        return 1 << self.level

    @property
    def _start3(self) -> int:
        # three times the continuum left endpoint, an exact integer
        sgn = -1 if self.level % 2 else 1
        return (3 * self.index + sgn * self.shift) << self.level

    @property
    def start(self) -> int:
        """First lattice point of the cube."""
        return _ceil_div3(self._start3)

    def interval(self) -> tuple[int, int]:
        """Lattice points of Q as a half-open range, exactly ``side`` points."""
        s = self.start
        return s, s + self.side

    def triple(self) -> tuple[int, int]:
        """Lattice points of the concentric triple 3Q, exactly ``3 * side``."""
        s = self.start
        return s - self.side, s + 2 * self.side

    def third(self) -> tuple[int, int]:
        """Lattice points of the central third of Q."""
        n3 = self._start3
        return _ceil_div3(n3 + self.side), _ceil_div3(n3 + 2 * self.side)

    def children(self) -> tuple["DyadicCube", "DyadicCube"]:
        if self.level == 0:
            raise ValueError("level-0 cube has no children")
        sgn = -1 if self.level % 2 else 1
        base = 2 * self.index + sgn * self.shift
        k = self.level - 1
        return (
            DyadicCube(self.shift, k, base),
            DyadicCube(self.shift, k, base + 1),
        )

    def parent(self) -> "DyadicCube":
        sgn = -1 if (self.level + 1) % 2 else 1
        return DyadicCube(
            self.shift, self.level + 1, (self.index - sgn * self.shift) // 2
        )

    def covers(self, lo: int, hi: int) -> bool:
        """Whether the lattice range [lo, hi) lies inside Q."""
        s = self.start
        return s <= lo and hi <= s + self.side


@dataclass
class Signal:
    """Finitely supported function on the integers.

    ``values[i]`` is the value at the point ``offset + i``.  Values may be
    real or complex; the support is contained in
    ``[offset, offset + len(values))``.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values))
        if self.values.ndim != 1:
            raise ValueError("signal values must be one-dimensional")

    @classmethod
    def delta(cls, x: int = 0, value=1.0) -> "Signal":
        return cls(x, np.array([value]))

    def __len__(self):
        return len(self.values)

    @property
    def end(self) -> int:
        return self.offset + len(self.values)

    def support(self) -> tuple[int, int]:
        """Smallest half-open range containing all nonzero points."""
        nz = np.nonzero(self.values)[0]
        if len(nz) == 0:
            return self.offset, self.offset
        return self.offset + int(nz[0]), self.offset + int(nz[-1]) + 1

    def __call__(self, x: int):
        if self.offset <= x < self.end:
            return self.values[x - self.offset]
        return 0.0

    def window_values(self, lo: int, hi: int) -> np.ndarray:
        """Values on [lo, hi), zero outside the stored range."""
        out = np.zeros(hi - lo, dtype=self.values.dtype)
        a, b = max(lo, self.offset), min(hi, self.end)
        if a < b:
            out[a - lo : b - lo] = self.values[a - self.offset : b - self.offset]
        return out

    def trimmed(self) -> "Signal":
        lo, hi = self.support()
        if lo == hi:
            return Signal(0, np.zeros(1, dtype=self.values.dtype))
        return Signal(lo, self.values[lo - self.offset : hi - self.offset].copy())


def local_average(f: Signal, cube: DyadicCube, r: float) -> float:
    """r-average of f over the triple 3Q with counting measure.

    Returns ((1/|3Q|) * sum_{x in 3Q} |f(x)|**r) ** (1/r) with
    |3Q| = 3 * 2**level points.
    """
    if r < 1:
        raise ValueError(f"average exponent must be >= 1, got r={r}")
    lo, hi = cube.triple()
    v = f.window_values(lo, hi)
    return float(np.sum(np.abs(v) ** r) / (3 * cube.side)) ** (1.0 / r)


def bilinear_pairing(f: Signal, g: Signal):
    """Unconjugated pairing sum_x f(x) g(x) over the overlap of supports."""
    lo = max(f.offset, g.offset)
    hi = min(f.end, g.end)
    if hi <= lo:
        return 0.0
    a = f.values[lo - f.offset : hi - f.offset]
    b = g.values[lo - g.offset : hi - g.offset]
    out = np.sum(a * b)
    return complex(out) if np.iscomplexobj(out) else float(out)


def shifted_grid_cubes(t: int, k: int, window: GridWindow) -> list[DyadicCube]:
    """All cubes of grid t at level k whose lattice points meet the window."""
    side = 1 << k
    sgn = -1 if k % 2 else 1
    s = sgn * t
    # start(m) = ceil(2**k (3m + s) / 3); starts increase by `side` per index
    m_lo = (3 * (window.lo - side) - s * side) // (3 * side)
    cubes = []
    m = m_lo
    while True:
        q = DyadicCube(t, k, m)
        if q.start >= window.hi:
            break
        if q.start + side > window.lo:
            cubes.append(q)
        m += 1
    return cubes


def smallest_containing_cube(lo: int, hi: int, shift: int = 3) -> DyadicCube:
    """Smallest shifted dyadic cube containing the lattice range [lo, hi).

    A single grid cannot contain every range (a range straddling one of its
    boundary points straddles it at all levels), but by the thirds-tiling
    property some grid contains the range once the side reaches three times
    its length.  Prefers the requested shift when several work at the
    minimal level.
    """
    if hi <= lo:
        raise ValueError("empty range has no containing cube")
    order = [shift] + [t for t in (1, 2, 3) if t != shift]
    k = max(0, (hi - lo - 1).bit_length())
    while k < 63:
        side = 1 << k
        sgn = -1 if k % 2 else 1
        for t in order:
            s = sgn * t
            m = (3 * lo - s * side) // (3 * side)
            q = DyadicCube(t, k, m)
            if q.covers(lo, hi):
                return q
        k += 1
    raise ValueError("range too large for a dyadic cube")


# --- signal file formats ----------------------------------------------------
#
# Text: one "index value" pair per line, real values.
# Binary: little-endian header (i64 offset, u64 length) followed by the
# f64 value array.


def save_signal_text(f: Signal, path) -> None:
    with open(path, "w") as fh:
        for i, v in enumerate(f.values):
            fh.write(f"{f.offset + i} {float(np.real(v))!r}\n")


def load_signal_text(path) -> Signal:
    idx, vals = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            idx.append(int(a))
            vals.append(float(b))
    if not idx:
        return Signal(0, np.zeros(1))
    lo, hi = min(idx), max(idx) + 1
    values = np.zeros(hi - lo)
    for i, v in zip(idx, vals):
        values[i - lo] = v
    return Signal(lo, values)


def save_signal_binary(f: Signal, path) -> None:
    vals = np.asarray(f.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qQ", f.offset, len(vals)))
        fh.write(vals.tobytes())


def load_signal_binary(path) -> Signal:
    with open(path, "rb") as fh:
        offset, length = struct.unpack("<qQ", fh.read(16))
        vals = np.frombuffer(fh.read(8 * length), dtype="<f8").copy()
    return Signal(offset, vals)
