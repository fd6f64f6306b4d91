"""
A concave majorant v built from two increasing unbounded functions f, g.

The breakpoints follow a_0 = 0, a_1 = 1 and
a_{n+2} = max(g(f⁻¹(a_{n+1})), 2a_{n+1} − a_n); v is affine between
breakpoints with v(a_n) = Σ_{k=1}^{n} k^{-1/2}. Then v(f(x))/v(g(x)) stays
bounded below, and ψ = v⁻¹ is an Orlicz function.
"""

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional, Sequence

import numpy as np

from orlicz_lab.orlicz_core import (
    ExtrapolationError,
    OrliczLabError,
    PiecewiseAffineInverse,
)

logger = logging.getLogger(__name__)

MIN_N_MAX = 3


class DomainExhaustedError(OrliczLabError):
    def __init__(self, last_n: int):
        super().__init__(f"domain exhausted after a_{last_n}")
        self.last_n = last_n


class MonotoneKind(str, enum.Enum):
    POWER = "power"
    EXP = "exp"
    LOG = "log"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class MonotoneFunctionSpec:
    """
    An increasing unbounded function on [0, ``x_max``].

    ``power`` is x^q, ``exp`` is e^{cx}, ``log`` is log(1 + x), and
    ``tabulated`` interpolates strictly increasing pairs (``x``, ``y``),
    with ``x_max`` the end of the table.
    """

    kind: MonotoneKind
    q: float = 1.0
    c: float = 1.0
    x: Optional[Any] = None
    y: Optional[Any] = None
    x_max: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "kind", MonotoneKind(self.kind))
        if self.kind is MonotoneKind.POWER and not self.q > 0:
            raise ValueError(f"power needs q > 0, got {self.q}")
        if self.kind is MonotoneKind.EXP and not self.c > 0:
            raise ValueError(f"exp needs c > 0, got {self.c}")
        if self.kind is MonotoneKind.TABULATED:
            if self.x is None or self.y is None:
                raise ValueError("tabulated functions need x and y")
            xs = np.asarray(self.x, dtype=float)
            ys = np.asarray(self.y, dtype=float)
            if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
                raise ValueError("tabulated x and y need >= 2 equal-length points")
            if xs[0] < 0 or not np.all(np.isfinite(xs)):
                raise ValueError("tabulated x must be finite and >= 0")
            if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
                raise ValueError("tabulated function must be strictly increasing")
            object.__setattr__(self, "x", xs)
            object.__setattr__(self, "y", ys)
            object.__setattr__(self, "x_max", min(float(xs[-1]), self.x_max))
        if not self.x_max > 0:
            raise ValueError("x_max must be positive")

    @classmethod
    def power(cls, q: float = 1.0, x_max: float = math.inf):
        return cls(MonotoneKind.POWER, q=q, x_max=x_max)

    @classmethod
    def exp(cls, c: float = 1.0, x_max: float = math.inf):
        return cls(MonotoneKind.EXP, c=c, x_max=x_max)

    @classmethod
    def log(cls, x_max: float = math.inf):
        return cls(MonotoneKind.LOG, x_max=x_max)

    @classmethod
    def tabulated(cls, x: Sequence[float], y: Sequence[float]):
        return cls(MonotoneKind.TABULATED, x=x, y=y)

    @property
    def label(self) -> str:
        if self.kind is MonotoneKind.POWER:
            return f"x^{self.q:g}"
        if self.kind is MonotoneKind.EXP:
            return f"exp({self.c:g}x)"
        if self.kind is MonotoneKind.LOG:
            return "log(1+x)"
        return f"tabulated[{self.x.size}]"

    def evaluate(self, x):
        """
        f(x) for x in [0, x_max]; points beyond ``x_max`` give inf.
        """
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0):
            raise ValueError("monotone functions are defined for x >= 0")
        with np.errstate(over="ignore"):
            if self.kind is MonotoneKind.POWER:
                result = np.power(arr, self.q)
            elif self.kind is MonotoneKind.EXP:
                result = np.exp(self.c * arr)
            elif self.kind is MonotoneKind.LOG:
                result = np.log1p(arr)
            else:
                result = np.interp(arr, self.x, self.y, left=self.y[0])
        result = np.where(arr > self.x_max, math.inf, result)
        return float(result) if result.ndim == 0 else result

    def preimage(self, a: float) -> Optional[float]:
        """
        The largest x in [0, x_max] with f(x) <= a.

        Returns None when f(0) > a, and inf when f stays below a on the
        whole domain.
        """
        if a < self.evaluate(0.0):
            return None
        with np.errstate(over="ignore"):
            if self.kind is MonotoneKind.POWER:
                x = a ** (1 / self.q)
            elif self.kind is MonotoneKind.EXP:
                x = math.log(a) / self.c
            elif self.kind is MonotoneKind.LOG:
                x = math.expm1(a) if a < 709 else math.inf
            elif a > self.y[-1]:
                x = math.inf
            else:
                x = float(np.interp(a, self.y, self.x))
        return math.inf if x > self.x_max else x

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"kind": self.kind.value}
        if self.kind is MonotoneKind.POWER:
            data["q"] = self.q
        elif self.kind is MonotoneKind.EXP:
            data["c"] = self.c
        elif self.kind is MonotoneKind.TABULATED:
            data["x"] = self.x.tolist()
            data["y"] = self.y.tolist()
        if self.kind is not MonotoneKind.TABULATED and math.isfinite(self.x_max):
            data["x_max"] = self.x_max
        return data


class BreakpointSequence(NamedTuple):
    values: tuple[float, ...]
    exhausted: bool
    last_n: int


def build_sequence(
    f: MonotoneFunctionSpec,
    g: MonotoneFunctionSpec,
    n_max: int,
    strict: bool = False
) -> BreakpointSequence:
    """
    Return the breakpoints a_0, ..., a_{n_max}.

    b_{n+2} = sup{g(x) : f(x) <= a_{n+1}} is g(f⁻¹(a_{n+1})). The build
    stops early, marking the sequence exhausted, once f⁻¹(a_{n+1}) leaves
    the domain of f or g overflows; with ``strict`` it raises
    :py:class:`DomainExhaustedError` instead.

    >>> build_sequence(MonotoneFunctionSpec.power(1), MonotoneFunctionSpec.power(2), 5).values
    (0.0, 1.0, 2.0, 4.0, 16.0, 256.0)
    """
    if n_max < MIN_N_MAX:
        raise ValueError(f"n_max must be >= {MIN_N_MAX}, got {n_max}")
    a = [0.0, 1.0]
    exhausted = False
    while len(a) <= n_max:
        x = f.preimage(a[-1])
        if x is None:
            b = -math.inf
        elif math.isinf(x):
            exhausted = True
            break
        else:
            b = float(g.evaluate(x))
            if not math.isfinite(b):
                exhausted = True
                break
            _cross_check(f, g, a[-1], b)
        following = max(b, 2 * a[-1] - a[-2])
        if not math.isfinite(following):
            exhausted = True
            break
        a.append(following)

    last_n = len(a) - 1
    if exhausted:
        logger.warning("%s vs %s: domain exhausted after a_%d",
                       f.label, g.label, last_n)
        if strict:
            raise DomainExhaustedError(last_n)
    return BreakpointSequence(tuple(a), exhausted, last_n)


def _cross_check(f, g, a, b):
    """Compare g(f⁻¹(a)) with the sup of g over the grid of a tabulated g."""
    if g.kind is not MonotoneKind.TABULATED:
        return
    grid = g.x[f.evaluate(g.x) <= a]
    if grid.size and float(np.max(g.evaluate(grid))) > b * (1 + 1e-9):
        logger.warning("grid sup of %s exceeds g(f^-1(%r)) = %r",
                       g.label, a, b)


def partial_sum(n: int) -> float:
    """Σ_{k=1}^{n} k^{-1/2}."""
    return float(np.sum(1 / np.sqrt(np.arange(1, n + 1))))


def ratio_lower_bound(n: int) -> float:
    """
    v(a_n)/v(a_{n+2}), the bound on v(f(x))/v(g(x)) for a_n <= f(x).

    >>> round(ratio_lower_bound(10), 3)
    0.895
    """
    return partial_sum(n) / partial_sum(n + 2)


@dataclass(frozen=True, eq=False)
class ConcaveMajorant:
    """
    Piecewise-affine increasing concave v with v(0) = 0.

    ``slopes[n]`` is the slope on (a_n, a_{n+1}); ``values[n]`` is v(a_n).
    """

    breakpoints: np.ndarray
    slopes: np.ndarray
    values: np.ndarray
    provenance: dict[str, Any] = field(default_factory=dict)
    strict: bool = False

    def __post_init__(self):
        for name in ("breakpoints", "slopes", "values"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.breakpoints.size != self.values.size:
            raise ValueError("breakpoints and values must have equal length")
        if self.slopes.size != self.breakpoints.size - 1:
            raise ValueError("one slope per interval is needed")

    @property
    def n_max(self) -> int:
        return self.breakpoints.size - 1

    @property
    def domain_max(self) -> float:
        return float(self.breakpoints[-1])

    def evaluate(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr > self.domain_max):
            raise ExtrapolationError(
                f"v is only built on [0, {self.domain_max}]"
            )
        result = np.interp(arr, self.breakpoints, self.values)
        return float(result) if result.ndim == 0 else result

    def inverse(self, y):
        arr = np.asarray(y, dtype=float)
        if np.any(arr > self.values[-1]):
            raise ExtrapolationError(
                f"v⁻¹ is only built on [0, {self.values[-1]}]"
            )
        result = np.interp(arr, self.values, self.breakpoints)
        return float(result) if result.ndim == 0 else result

    def is_concave(self) -> bool:
        return bool(np.all(np.diff(self.slopes) < 0))

    def increments(self) -> np.ndarray:
        """v(a_n) − v(a_{n−1}) for n = 1..n_max."""
        return np.diff(self.values)

    def strictify(self, eps: float = 1e-6) -> "ConcaveMajorant":
        """Scale slope n by 1/(1 + eps·n) and rebuild the values."""
        n = np.arange(self.slopes.size)
        slopes = self.slopes / (1 + eps * n)
        values = np.concatenate(
            [[0.0], np.cumsum(slopes * np.diff(self.breakpoints))]
        )
        return ConcaveMajorant(self.breakpoints, slopes, values,
                               dict(self.provenance, strictified=eps),
                               strict=True)

    def to_dict(self) -> dict[str, Any]:
        return {
            "breakpoints": self.breakpoints.tolist(),
            "slopes": self.slopes.tolist(),
            "values": self.values.tolist(),
            "provenance": self.provenance,
            "strict": self.strict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ConcaveMajorant":
        data = json.loads(text)
        return cls(data["breakpoints"], data["slopes"], data["values"],
                   data.get("provenance", {}), data.get("strict", False))


def build_v(seq: BreakpointSequence | Sequence[float]) -> ConcaveMajorant:
    """
    The piecewise-affine v through (a_n, Σ_{k=1}^{n} k^{-1/2}).

    The slope on (a_n, a_{n+1}) is 1/(√(n+1)(a_{n+1} − a_n)), which is 1
    on the first interval.

    >>> round(build_v([0, 1, 2, 3]).evaluate(3.0), 4)
    2.2845
    """
    provenance: dict[str, Any] = {}
    if isinstance(seq, BreakpointSequence):
        provenance = {"exhausted": seq.exhausted, "last_n": seq.last_n}
        seq = seq.values
    a = np.asarray(seq, dtype=float)
    if a.size < 2 or a[0] != 0 or a[1] != 1:
        raise ValueError("breakpoints must start with 0, 1")
    spacing = np.diff(a)
    if np.any(spacing < 1) or np.any(np.diff(spacing) < 0):
        raise ValueError("breakpoint spacing must be nondecreasing and >= 1")

    increments = 1 / np.sqrt(np.arange(1, a.size))
    values = np.concatenate([[0.0], np.cumsum(increments)])
    slopes = increments / spacing
    return ConcaveMajorant(a, slopes, values, provenance)


class RatioDelta(NamedTuple):
    delta: float
    argmin: float
    bound: float
    bound_holds: bool
    points: int
    truncated: int


def ratio_delta(
    v: ConcaveMajorant,
    f: MonotoneFunctionSpec,
    g: MonotoneFunctionSpec,
    x_grid: Sequence[float]
) -> RatioDelta:
    """
    inf of v(f(x))/v(g(x)) over the grid points with f(x) >= a_1.

    Points whose f(x) or g(x) leave the built range of v are dropped with a
    warning. ``bound`` is v(a_n)/v(a_{n+2}) for the n with
    a_n <= f(argmin) < a_{n+1}; ``bound_holds`` says whether every checked
    point respects its own such bound.
    """
    x = np.unique(np.asarray(x_grid, dtype=float))
    fx = np.asarray(f.evaluate(x), dtype=float)
    gx = np.asarray(g.evaluate(x), dtype=float)
    a = v.breakpoints
    inside = (fx >= a[1]) & np.isfinite(gx) & (gx <= a[-1]) & (fx <= a[-1])
    truncated = int(np.sum(fx >= a[1]) - np.sum(inside))
    if truncated:
        logger.warning("ratio grid truncated: %d points leave [1, %r]",
                       truncated, float(a[-1]))
    if not np.any(inside):
        raise ValueError("no grid point lies in the built range of v")
    x, fx, gx = x[inside], fx[inside], gx[inside]

    ratios = v.evaluate(fx) / v.evaluate(gx)
    index = int(np.argmin(ratios))
    delta = float(ratios[index])

    n = np.searchsorted(a, fx, side="right") - 1
    checked = n + 2 <= v.n_max
    bounds = np.array([ratio_lower_bound(int(k)) if ok else 0.0
                       for k, ok in zip(n, checked)])
    bound_holds = bool(np.all(ratios[checked]
                              >= bounds[checked] * (1 - 1e-12)))
    if delta <= 0:
        logger.warning("ratio v(f)/v(g) reaches %r", delta)
    return RatioDelta(delta, float(x[index]), float(bounds[index]),
                      bound_holds, int(x.size), truncated)


class PropertyRow(NamedTuple):
    name: str
    n: int
    holds: bool


def check_properties(
    seq: BreakpointSequence,
    f: MonotoneFunctionSpec,
    g: MonotoneFunctionSpec,
    x_grid: Sequence[float]
) -> list[PropertyRow]:
    """
    Rows for the two properties the construction guarantees, per n:

    * ``domination``: f(x) <= a_{n+1} implies g(x) <= a_{n+2} on the grid;
    * ``spacing``: a_{n+2} − a_{n+1} >= a_{n+1} − a_n >= 1;

    and a final ``unbounded`` row, v(a_{n_max}) >= 2(√(n_max + 1) − 1).
    """
    a = np.asarray(seq.values)
    x = np.asarray(x_grid, dtype=float)
    fx = np.asarray(f.evaluate(x), dtype=float)
    gx = np.asarray(g.evaluate(x), dtype=float)
    rows = []
    for n in range(a.size - 2):
        covered = fx <= a[n + 1]
        holds = bool(np.all(gx[covered] <= a[n + 2] * (1 + 1e-12)))
        rows.append(PropertyRow("domination", n, holds))
    for n in range(a.size - 2):
        holds = bool(a[n + 2] - a[n + 1] >= a[n + 1] - a[n] >= 1)
        rows.append(PropertyRow("spacing", n, holds))
    last = a.size - 1
    rows.append(PropertyRow(
        "unbounded", last,
        partial_sum(last) >= 2 * (math.sqrt(last + 1) - 1)
    ))
    return rows


def orlicz_from_v(v: ConcaveMajorant) -> PiecewiseAffineInverse:
    """
    ψ = v⁻¹, linear between the points (v(a_n), a_n).

    >>> psi = orlicz_from_v(build_v([0, 1, 2, 3, 4]))
    >>> round(float(psi.evaluate(1 + 2 ** -0.5)), 12)
    2.0
    """
    if v.breakpoints.size < 4:
        raise ValueError("ψ needs a majorant with >= 4 breakpoints")
    return PiecewiseAffineInverse(v.breakpoints, v.values, majorant=v)


def profile_reciprocal(profile) -> MonotoneFunctionSpec:
    """
    The tabulated g(x) = 1/P(1/x) of a window-mass profile P.

    Cells with zero mass are dropped; the table starts with (0, 0) and
    (1, 1) and keeps only points where 1/P strictly increases.
    """
    pairs = sorted(
        (1 / record.h, 1 / record.estimate)
        for record in profile.records if record.estimate > 0
    )
    xs, ys = [0.0, 1.0], [0.0, 1.0]
    for x, y in pairs:
        if x > xs[-1] and y > ys[-1]:
            xs.append(x)
            ys.append(y)
    if len(xs) < 4:
        raise ValueError("profile has fewer than two usable cells")
    return MonotoneFunctionSpec.tabulated(xs, ys)


class Construction(NamedTuple):
    sequence: BreakpointSequence
    majorant: ConcaveMajorant
    ratio: RatioDelta


def majorant_for_profile(profile, n_max: int = 40) -> Construction:
    """
    Run the construction with f(x) = x^N and g the reciprocal profile.

    The returned ratio is ψ⁻¹(x^N)/ψ⁻¹(g(x)) for ψ = v⁻¹ over the cells of
    the profile.
    """
    f = MonotoneFunctionSpec.power(profile.exponent)
    g = profile_reciprocal(profile)
    seq = build_sequence(f, g, n_max)
    v = build_v(seq)
    ratio = ratio_delta(v, f, g, g.x[1:])
    return Construction(seq, v, ratio)
