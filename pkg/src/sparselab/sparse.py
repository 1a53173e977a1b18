"""Sparse collections, the sparse bilinear form, and domination experiments.

A collection of cubes is sparse when each cube Q carries a major subset
E_Q with |E_Q| >= c |Q| (c = 1/2 here) and the E_Q are pairwise disjoint.
Collections are produced by a stopping-time sweep: starting from the
smallest cube containing both supports, descend level by level and start a
new generation at every maximal subcube where the local r-average of either
input jumps by the factor C0; E_Q is Q minus its stopping children.

The construction is deterministic in (f, g, r, C0).  If the density
invariant fails, the whole construction retries with C0 doubled and records
the final value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .grid import DyadicCube, Signal, bilinear_pairing, local_average, smallest_containing_cube

__all__ = [
    "SparseFormParams",
    "SparseCollection",
    "sparse_form",
    "verify_sparsity",
    "build_sparse_collection",
    "domination_ratio",
]

SPARSITY_DENSITY = 0.5


@dataclass(frozen=True)
class SparseFormParams:
    """Exponents (r, s) of the sparse bilinear form."""

    r: float
    s: float

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValueError(f"form exponents must be >= 1, got ({self.r}, {self.s})")


@dataclass
class SparseCollection:
    """Cubes with designated major sets, each a list of index ranges."""

    cubes: list[DyadicCube]
    major_sets: list[list[tuple[int, int]]]
    c0: float | None = None

    def __len__(self):
        return len(self.cubes)

    def to_json(self) -> list[dict]:
        return [
            {
                "shift": q.shift,
                "level": q.level,
                "index": q.index,
                "major_set": [list(rg) for rg in ranges],
            }
            for q, ranges in zip(self.cubes, self.major_sets)
        ]

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump({"c0": self.c0, "cubes": self.to_json()}, fh, indent=1)

    @classmethod
    def from_json(cls, records, c0=None) -> "SparseCollection":
        cubes, majors = [], []
        for rec in records:
            cubes.append(DyadicCube(rec["shift"], rec["level"], rec["index"]))
            majors.append([tuple(rg) for rg in rec["major_set"]])
        return cls(cubes, majors, c0=c0)


def verify_sparsity(S: SparseCollection, c: float = SPARSITY_DENSITY):
    """Machine-check both sparsity invariants.

    Returns (ok, report); the report lists each density violation and each
    overlap between major sets.
    """
    violations = []
    all_ranges = []
    for i, (q, ranges) in enumerate(zip(S.cubes, S.major_sets)):
        qlo, qhi = q.interval()
        measure = 0
        for lo, hi in ranges:
            if hi <= lo:
                violations.append(f"cube {i}: empty or inverted range ({lo}, {hi})")
                continue
            if lo < qlo or hi > qhi:
                violations.append(f"cube {i}: major set range ({lo}, {hi}) leaves Q")
            measure += hi - lo
            all_ranges.append((lo, hi, i))
        if measure < c * q.side:
            violations.append(
                f"cube {i}: |E_Q| = {measure} < {c} * |Q| = {c * q.side}"
            )
    all_ranges.sort()
    for (lo1, hi1, i1), (lo2, hi2, i2) in zip(all_ranges, all_ranges[1:]):
        if lo2 < hi1:
            violations.append(
                f"major sets of cubes {i1} and {i2} overlap on [{lo2}, {min(hi1, hi2)})"
            )
    return len(violations) == 0, {"violations": violations}


def sparse_form(
    S: SparseCollection, f: Signal, g: Signal, params: SparseFormParams, check: bool = True
) -> float:
    """Lambda_{r,s}(f, g) = sum_Q <f>_{Q,r} <g>_{Q,s} |Q| over the collection."""
    if check:
        ok, report = verify_sparsity(S)
        if not ok:
            raise ValueError(f"collection is not sparse: {report['violations'][:3]}")
    total = 0.0
    for q in S.cubes:
        total += local_average(f, q, params.r) * local_average(g, q, params.s) * q.side
    return total


@dataclass
class _Builder:
    """Prefix-sum driven level sweep for one stopping-time construction."""

    base: int
    pf: np.ndarray
    pg: np.ndarray
    r: float

    def averages(self, starts: np.ndarray, side: int):
        lo = starts - side - self.base
        hi = starts + 2 * side - self.base
        inv = 1.0 / (3 * side)
        af = ((self.pf[hi] - self.pf[lo]) * inv) ** (1.0 / self.r)
        ag = ((self.pg[hi] - self.pg[lo]) * inv) ** (1.0 / self.r)
        return af, ag


def _power_prefix(sig: Signal, lo: int, hi: int, r: float) -> np.ndarray:
    v = np.abs(sig.window_values(lo, hi)) ** r
    return np.concatenate([[0.0], np.cumsum(v)])


def _attempt(f: Signal, g: Signal, r: float, c0: float, root: DyadicCube) -> SparseCollection:
    base, top = root.triple()
    bld = _Builder(base, _power_prefix(f, base, top, r), _power_prefix(g, base, top, r), r)

    af0, ag0 = bld.averages(np.array([root.start]), root.side)
    cubes = [root]
    carved: list[list[tuple[int, int]]] = [[]]

    # per-cube state for the sweep: start, (level, index), controlling node id
    # and the controlling node's averages
    starts = np.array([root.start], dtype=np.int64)
    indices = np.array([root.index], dtype=np.int64)
    ctrl_id = np.array([0], dtype=np.int64)
    ctrl_af = np.array([af0[0]])
    ctrl_ag = np.array([ag0[0]])

    level = root.level
    while level >= 1:
        half = 1 << (level - 1)
        sgn = -1 if level % 2 else 1
        child_starts = np.repeat(starts, 2)
        child_starts[1::2] += half
        child_indices = np.repeat(2 * indices + sgn * root.shift, 2)
        child_indices[1::2] += 1
        ctrl_id = np.repeat(ctrl_id, 2)
        ctrl_af = np.repeat(ctrl_af, 2)
        ctrl_ag = np.repeat(ctrl_ag, 2)

        af, ag = bld.averages(child_starts, half)
        viol = (af > c0 * ctrl_af) | (ag > c0 * ctrl_ag)
        for i in np.nonzero(viol)[0]:
            s = int(child_starts[i])
            carved[ctrl_id[i]].append((s, s + half))
            cubes.append(DyadicCube(root.shift, level - 1, int(child_indices[i])))
            carved.append([])
            ctrl_id[i] = len(cubes) - 1
            ctrl_af[i] = af[i]
            ctrl_ag[i] = ag[i]

        starts = child_starts
        indices = child_indices
        level -= 1

    major_sets = []
    for q, cuts in zip(cubes, carved):
        qlo, qhi = q.interval()
        ranges = []
        pos = qlo
        for lo, hi in sorted(cuts):
            if lo > pos:
                ranges.append((pos, lo))
            pos = hi
        if pos < qhi:
            ranges.append((pos, qhi))
        major_sets.append(ranges)
    return SparseCollection(cubes, major_sets, c0=c0)


def build_sparse_collection(
    f: Signal,
    g: Signal,
    r: float,
    c0: float = 16.0,
    shift: int = 3,
    max_doublings: int = 8,
) -> SparseCollection:
    """Stopping-time sparse collection adapted to the pair (f, g).

    The root is the smallest cube of the chosen grid containing both
    supports.  The stopping children of a cube Q are the maximal subcubes
    where either triple r-average exceeds c0 times its value on Q; E_Q is Q
    minus those children.  Doubles c0 until the density check passes.
    """
    flo, fhi = f.support()
    glo, ghi = g.support()
    lo, hi = min(flo, glo), max(fhi, ghi)
    if lo >= hi:
        raise ValueError("both signals are identically zero")
    root = smallest_containing_cube(lo, hi, shift=shift)
    c = c0
    for _ in range(max_doublings + 1):
        S = _attempt(f, g, r, c, root)
        ok, _report = verify_sparsity(S)
        if ok:
            return S
        c *= 2.0
    raise RuntimeError(f"sparsity not reached after doubling C0 up to {c / 2}")


def domination_ratio(apply_T, f: Signal, g: Signal, r: float, c0: float = 16.0) -> float:
    """|<T f, g>| / Lambda_r(f, g) with the collection built from (f, g).

    A ratio bounded uniformly over trials is the empirical content of the
    sparse domination bound for T.
    """
    num = abs(bilinear_pairing(apply_T(f), g))
    S = build_sparse_collection(f, g, r, c0=c0)
    lam = sparse_form(S, f, g, SparseFormParams(r, r), check=False)
    if lam == 0:
        if num == 0:
            return 0.0
        raise ArithmeticError("sparse form vanished against a nonzero pairing")
    return num / lam
