"""Muckenhoupt and reverse-Hölder characteristics over finite dyadic families.

Characteristics are suprema over the finite family of shifted dyadic cubes
fitting inside a window, hence lower bounds for the true suprema; membership
in a weight class is diagnosed through the trend of the finite-family value
as the window grows.

Conventions: the A_p and RH_r characteristics average over the cube Q itself
(so degenerate single-point cubes contribute exactly 1), while the sparse
form machinery averages over the triple 3Q as in `grid.local_average`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import DyadicCube, GridWindow, Signal, local_average, shifted_grid_cubes

__all__ = [
    "Weight",
    "WeightReport",
    "WWReport",
    "SingleScaleReport",
    "default_family",
    "ap_characteristic",
    "rh_characteristic",
    "dual_weight",
    "power_weight",
    "reverse_holder_scan",
    "check_ww_conditions",
    "weighted_lp_norm",
    "single_scale_sparse_bound",
]


@dataclass
class Weight:
    """Strictly positive function on a window of the integers."""

    window: GridWindow
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.values) != len(self.window):
            raise ValueError("weight length does not match window")
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0):
            raise ValueError("weight values must be positive and finite")

    def power(self, a: float) -> "Weight":
        return Weight(self.window, self.values**a)

    def mass(self, lo: int, hi: int) -> float:
        """w(Q) for the lattice range [lo, hi) clipped to the window."""
        a = max(lo, self.window.lo)
        b = min(hi, self.window.hi)
        if b <= a:
            return 0.0
        i = a - self.window.lo
        return float(np.sum(self.values[i : i + b - a]))


@dataclass
class WeightReport:
    """One characteristic value together with the cube attaining it."""

    characteristic: str
    p: float | None
    r: float | None
    value: float
    argmax_cube: DyadicCube | None

    def to_json(self) -> dict:
        q = self.argmax_cube
        return {
            "characteristic": self.characteristic,
            "p": self.p,
            "r": self.r,
            "argmax_cube": None
            if q is None
            else {"shift": q.shift, "level": q.level, "index": q.index},
            "value": self.value,
        }


def default_family(window: GridWindow, shifts=(1, 2, 3)) -> list[DyadicCube]:
    """All shifted dyadic cubes contained in the window, all levels.

    Degenerate single-point cubes (level 0) are included; they contribute
    exactly 1 to every characteristic.
    """
    family = []
    max_level = (len(window)).bit_length()
    for t in shifts:
        for k in range(max_level + 1):
            for q in shifted_grid_cubes(t, k, window):
                lo, hi = q.interval()
                if window.lo <= lo and hi <= window.hi:
                    family.append(q)
    return family


def _cube_means(w: Weight, family, exponent: float) -> np.ndarray:
    """Vector of (1/|Q|) * sum_Q w**exponent over the family, via prefix sums."""
    prefix = np.concatenate([[0.0], np.cumsum(w.values**exponent)])
    lo0 = w.window.lo
    starts = np.fromiter((q.start - lo0 for q in family), dtype=np.int64, count=len(family))
    sides = np.fromiter((q.side for q in family), dtype=np.int64, count=len(family))
    return (prefix[starts + sides] - prefix[starts]) / sides


def ap_characteristic(
    w: Weight, p: float, family: list[DyadicCube], report: bool = False
):
    """Finite-family Muckenhoupt characteristic.

    [w]_{A_p} = sup_Q (w(Q)/|Q|) * (sigma(Q)/|Q|)**(p-1) with
    sigma = w**(1/(1-p)), the sup running over the supplied cubes.
    """
    if p <= 1:
        raise ValueError(f"A_p characteristic needs p > 1, got p={p}")
    if not family:
        raise ValueError("empty cube family")
    mean_w = _cube_means(w, family, 1.0)
    mean_s = _cube_means(w, family, 1.0 / (1.0 - p))
    vals = mean_w * mean_s ** (p - 1.0)
    i = int(np.argmax(vals))
    if report:
        return WeightReport("A_p", p, None, float(vals[i]), family[i])
    return float(vals[i])


def rh_characteristic(
    w: Weight, r: float, family: list[DyadicCube], report: bool = False
):
    """Finite-family reverse Hölder characteristic.

    [w]_{RH_r} = sup_Q (mean_Q w**r)**(1/r) / mean_Q w.
    """
    if r <= 1:
        raise ValueError(f"RH_r characteristic needs r > 1, got r={r}")
    if not family:
        raise ValueError("empty cube family")
    mean_w = _cube_means(w, family, 1.0)
    mean_wr = _cube_means(w, family, r)
    vals = mean_wr ** (1.0 / r) / mean_w
    i = int(np.argmax(vals))
    if report:
        return WeightReport("RH_r", None, r, float(vals[i]), family[i])
    return float(vals[i])


def dual_weight(w: Weight, p: float) -> Weight:
    """The dual weight sigma = w**(1 - p') with p' = p/(p-1)."""
    if p <= 1:
        raise ValueError(f"dual weight needs p > 1, got p={p}")
    pprime = p / (p - 1.0)
    return w.power(1.0 - pprime)


def power_weight(a: float, window: GridWindow) -> Weight:
    """The standard test family w(x) = (1 + |x|)**a."""
    x = np.arange(window.lo, window.hi)
    return Weight(window, (1.0 + np.abs(x)) ** a)


def reverse_holder_scan(
    w: Weight, family: list[DyadicCube], threshold: float = 4.0, depth: int = 12
) -> float:
    """Largest r in {1 + 2**-j} with [w]_{RH_r} <= threshold.

    Operationalizes the self-improvement fact that every Muckenhoupt weight
    has some reverse Hölder exponent r > 1; returns the coarsest exponent in
    the scan at which the finite-family characteristic is still moderate.
    """
    for j in range(depth + 1):
        r = 1.0 + 2.0**-j
        if rh_characteristic(w, r, family) <= threshold:
            return r
    return 1.0 + 2.0**-depth


@dataclass
class WWReport:
    """Characteristics entering the weighted bound for the random transform."""

    alpha: float
    p: float
    r: float
    ap_power: float  # [w**(1+a)]_{A_{(1+a)(p-1)+1}}
    ap_dual_route: float  # [w]_{A_{1 + 1/((1+a)(p'-1))}}
    ap: float  # [w]_{A_p}
    rh_w: float  # [w]_{RH_r}
    rh_sigma: float  # [sigma]_{RH_r}

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "p": self.p,
            "r": self.r,
            "ap_power": self.ap_power,
            "ap_dual_route": self.ap_dual_route,
            "ap": self.ap,
            "rh_w": self.rh_w,
            "rh_sigma": self.rh_sigma,
        }


def check_ww_conditions(
    w: Weight, p: float, alpha: float, r: float, family: list[DyadicCube] | None = None
) -> WWReport:
    """Evaluate the hypothesis characteristics for the weighted corollary.

    Computes the two hypothesis characteristics for the random transform at
    parameter alpha and the derived triple ([w]_{A_p}, [w]_{RH_r},
    [sigma]_{RH_r}) on the finite family.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"need 0 < alpha < 1, got {alpha}")
    if not 1 + alpha < p < (1 + alpha) / alpha:
        raise ValueError(f"need 1+alpha < p < (1+alpha)/alpha, got p={p}")
    if r <= 1 + alpha:
        raise ValueError(f"need r > 1+alpha, got r={r}")
    if family is None:
        family = default_family(w.window)
    pprime = p / (p - 1.0)
    sigma = dual_weight(w, p)
    return WWReport(
        alpha=alpha,
        p=p,
        r=r,
        ap_power=ap_characteristic(
            w.power(1.0 + alpha), (1.0 + alpha) * (p - 1.0) + 1.0, family
        ),
        ap_dual_route=ap_characteristic(
            w, 1.0 + 1.0 / ((1.0 + alpha) * (pprime - 1.0)), family
        ),
        ap=ap_characteristic(w, p, family),
        rh_w=rh_characteristic(w, r, family),
        rh_sigma=rh_characteristic(sigma, r, family),
    )


def weighted_lp_norm(f: Signal, w: Weight, p: float) -> float:
    """(sum |f|**p w)**(1/p); the support of f must lie in the window."""
    if p < 1:
        raise ValueError(f"need p >= 1, got p={p}")
    lo, hi = f.support()
    if lo < hi and (lo < w.window.lo or hi > w.window.hi):
        raise ValueError("signal support extends beyond the weight window")
    v = f.window_values(w.window.lo, w.window.hi)
    return float(np.sum(np.abs(v) ** p * w.values)) ** (1.0 / p)


@dataclass
class SingleScaleReport:
    """One-scale sum of average products against its weighted bound."""

    k: int
    p: float
    r: float
    lhs: float
    bound: float
    ratio: float
    characteristics: dict = field(default_factory=dict)


def single_scale_sparse_bound(
    f: Signal,
    g: Signal,
    w: Weight,
    p: float,
    r: float,
    k: int,
    shift: int = 3,
    family: list[DyadicCube] | None = None,
) -> SingleScaleReport:
    """Compare the level-k sum of average products with its weighted bound.

    LHS = sum over level-k cubes of one grid of <f>_{Q,r} <g>_{Q,r} |Q|;
    bound = [w]_{A_p}^{1/p} [w]_{RH_r} [sigma]_{RH_r}
            * ||f||_{L^p(w)} ||g||_{L^{p'}(w)}.
    """
    rprime = r / (r - 1.0)
    if not r <= p <= rprime:
        raise ValueError(f"need r <= p <= r', got r={r}, p={p}")
    if family is None:
        family = default_family(w.window)
    pprime = p / (p - 1.0)
    sigma = dual_weight(w, p)

    flo, fhi = f.support()
    glo, ghi = g.support()
    lo, hi = min(flo, glo), max(fhi, ghi)
    lhs = 0.0
    if lo < hi:
        for q in shifted_grid_cubes(shift, k, GridWindow(lo, hi)):
            lhs += local_average(f, q, r) * local_average(g, q, r) * q.side

    ap = ap_characteristic(w, p, family)
    rh_w = rh_characteristic(w, r, family)
    rh_s = rh_characteristic(sigma, r, family)
    bound = (
        ap ** (1.0 / p)
        * rh_w
        * rh_s
        * weighted_lp_norm(f, w, p)
        * weighted_lp_norm(g, w, pprime)
    )
    return SingleScaleReport(
        k=k,
        p=p,
        r=r,
        lhs=lhs,
        bound=bound,
        ratio=lhs / bound if bound > 0 else float("inf"),
        characteristics={"ap": ap, "rh_w": rh_w, "rh_sigma": rh_s},
    )
