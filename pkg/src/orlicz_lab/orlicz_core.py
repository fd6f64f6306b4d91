"""
Orlicz functions, their inverses, and certificates of growth-class membership.

Every class check runs on logarithms of ψ-values, so functions such as
``e^{x^2} - 1`` can be compared far beyond the floating range of ψ itself.
"""

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path as _Path
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq as _brentq

_MODULE_DIR = _Path(__file__).resolve().parent

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


class OrliczLabError(Exception):
    """Base class of every error raised by :py:mod:`orlicz_lab`."""


class InverseOutOfRangeError(OrliczLabError, ValueError):
    """Raised when ψ⁻¹ is requested at a saturated or non-finite value."""


class ExtrapolationError(OrliczLabError, ValueError):
    """Raised when a tabulated function is evaluated outside its table."""


class GridTooSmallError(OrliczLabError, ValueError):
    """Raised when a certification grid has fewer than 8 usable points."""


def _filename_to_list(
    filename: str,
    prepend_module_dir: bool = True
) -> list[str]:
    if prepend_module_dir:
        filename = str(_MODULE_DIR / filename)

    with open(filename) as file:
        return file.read().strip().lower().splitlines()


# Populated in a moment by set_witness_candidates().
WITNESS_CANDIDATES: dict[str, tuple[float, ...]] = {}

_WITNESS_KEYS = ("nabla2", "delta2", "delta_sharp2", "nabla0_c", "nabla0_b")


def set_witness_candidates(filename: Optional[str] = None) -> None:
    """
    Get new candidate witness sets for :py:func:`certify` from a file.

    Each line of the file starts with a key followed by the candidate
    constants, separated by whitespace::

        nabla2 1.5 2 4
        delta2 2 4 8 16

    The keys are ``nabla2`` (the β of the ∇₂-Condition), ``delta2`` (K),
    ``delta_sharp2`` (C), ``nabla0_c`` (the constants C_B of the
    ∇₀-Condition) and ``nabla0_b`` (the tested values of B). Keys missing
    from the file keep their bundled values.

    If ``filename`` is None, the default file
    (``orlicz_lab/witness_candidates.txt``) will be used.
    """
    if filename is None:
        args = "witness_candidates.txt", True
    else:
        args = filename, False

    parsed = {}
    for line in _filename_to_list(*args):
        words = line.split()
        if not words or words[0].startswith("#"):
            continue
        key = words[0]
        if key not in _WITNESS_KEYS:
            raise ValueError(f"unknown witness key {key!r} in {args[0]}")
        values = tuple(float(word) for word in words[1:])
        if not values or min(values) <= 0:
            raise ValueError(f"witness key {key!r} needs positive values")
        parsed[key] = values

    if filename is None:
        WITNESS_CANDIDATES.clear()
    WITNESS_CANDIDATES.update(parsed)


set_witness_candidates()


class Family(str, enum.Enum):
    POWER = "power"
    EXP_POWER = "exp_power"
    LOG_EXP = "log_exp"
    PIECEWISE_AFFINE_INVERSE = "piecewise_affine_inverse"
    TABULATED = "tabulated"


class Condition(str, enum.Enum):
    NABLA2 = "Nabla2"
    NABLA0 = "Nabla0"
    UNIFORM_NABLA0 = "UniformNabla0"
    DELTA2 = "Delta2"
    DELTA_SHARP2 = "DeltaSharp2"
    INVERSE_POWER = "InversePower"


class Verdict(str, enum.Enum):
    PASS = "Pass"
    FAIL = "Fail"
    INCONCLUSIVE = "Inconclusive"


def _as_nonneg_array(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Orlicz functions are evaluated at finite x only")
    if np.any(arr < 0):
        raise ValueError("Orlicz functions are evaluated at x >= 0 only")
    return arr


def _restore(template: ArrayLike, arr: np.ndarray) -> Union[float, np.ndarray]:
    if np.ndim(template) == 0:
        return float(arr)
    return arr


def _log_expm1(t: np.ndarray) -> np.ndarray:
    """ln(e^t - 1) for t >= 0 without overflow; -inf at t = 0."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        small = np.log(np.expm1(np.minimum(t, 30.0)))
        large = t + np.log1p(-np.exp(-np.maximum(t, 30.0)))
    return np.where(t > 30.0, large, small)


def is_saturated(value: float) -> bool:
    """True for the "+inf" sentinel returned by overflowing evaluations."""
    return not math.isfinite(value)


class OrliczFunction:
    """
    Common interface of the Orlicz function families.

    Subclasses provide :py:meth:`evaluate` and :py:meth:`log_evaluate`;
    inverses default to a bracketed root search on the logarithm of ψ, grown
    geometrically from ``[0, 1]``.
    """

    family: Family
    domain_max: float = math.inf

    def evaluate(self, x: ArrayLike) -> Union[float, np.ndarray]:
        raise NotImplementedError

    def log_evaluate(self, x: ArrayLike) -> Union[float, np.ndarray]:
        raise NotImplementedError

    def __call__(self, x: ArrayLike) -> Union[float, np.ndarray]:
        return self.evaluate(x)

    def to_spec(self) -> dict[str, Any]:
        raise NotImplementedError

    @property
    def label(self) -> str:
        params = self.to_spec()["params"]
        shown = ", ".join(
            f"{key}={value:g}" for key, value in params.items()
            if isinstance(value, (int, float))
        )
        return f"{self.family.value}({shown})"

    def _check_domain(self, arr: np.ndarray) -> None:
        if np.any(arr > self.domain_max):
            raise ExtrapolationError(
                f"{self.family.value} is only known on [0, {self.domain_max}]"
            )

    def inverse(self, y: float, tol: float = 1e-12) -> float:
        y = float(y)
        if not math.isfinite(y):
            raise InverseOutOfRangeError(f"inverse out of range: y={y}")
        if y < 0:
            raise ValueError("inverse is defined for y >= 0 only")
        if y == 0:
            return 0.0
        return self.inverse_of_log(math.log(y), tol=tol)

    def inverse_of_log(self, log_y: float, tol: float = 1e-12) -> float:
        """Return ψ⁻¹(exp(log_y)) for arguments of any size."""
        log_y = float(log_y)
        if math.isnan(log_y) or log_y == math.inf:
            raise InverseOutOfRangeError(f"inverse out of range: log y={log_y}")
        if log_y == -math.inf:
            return 0.0

        def gap(x):
            return float(self.log_evaluate(x)) - log_y

        lo, hi = 0.0, 1.0
        while gap(hi) < 0:
            lo, hi = hi, 2 * hi
            if hi > min(self.domain_max, 2.0 ** 1020):
                raise InverseOutOfRangeError(
                    f"inverse out of range: log y={log_y} for {self.label}"
                )
        if lo == 0.0:
            # log ψ is -inf at 0; start the bracket just above it.
            lo = hi * 2.0 ** -60
            while gap(lo) > 0:
                lo *= 2.0 ** -60
                if lo == 0.0:
                    return 0.0
        return _brentq(gap, lo, hi, xtol=1e-300, rtol=max(tol, 1e-15),
                       maxiter=400)


@dataclass(frozen=True)
class Power(OrliczFunction):
    p: float
    family = Family.POWER

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"power Orlicz function needs p >= 1, got {self.p}")

    def evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(over="ignore"):
            return _restore(x, np.power(arr, self.p))

    def log_evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(divide="ignore"):
            return _restore(x, self.p * np.log(arr))

    def inverse(self, y, tol=1e-12):
        y = float(y)
        if not math.isfinite(y):
            raise InverseOutOfRangeError(f"inverse out of range: y={y}")
        if y < 0:
            raise ValueError("inverse is defined for y >= 0 only")
        return y ** (1.0 / self.p)

    def inverse_of_log(self, log_y, tol=1e-12):
        if math.isnan(log_y) or log_y == math.inf:
            raise InverseOutOfRangeError(f"inverse out of range: log y={log_y}")
        return math.exp(log_y / self.p)

    def to_spec(self):
        return {"family": self.family.value, "params": {"p": self.p}}


@dataclass(frozen=True)
class ExpPower(OrliczFunction):
    a: float
    b: float
    family = Family.EXP_POWER

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"exp_power needs a > 0, got {self.a}")
        if not self.b >= 1:
            raise ValueError(f"exp_power needs b >= 1, got {self.b}")

    def evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(over="ignore"):
            return _restore(x, np.expm1(self.a * np.power(arr, self.b)))

    def log_evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(over="ignore"):
            return _restore(x, _log_expm1(self.a * np.power(arr, self.b)))

    def inverse(self, y, tol=1e-12):
        y = float(y)
        if not math.isfinite(y):
            raise InverseOutOfRangeError(f"inverse out of range: y={y}")
        if y < 0:
            raise ValueError("inverse is defined for y >= 0 only")
        return (math.log1p(y) / self.a) ** (1.0 / self.b)

    def inverse_of_log(self, log_y, tol=1e-12):
        if math.isnan(log_y) or log_y == math.inf:
            raise InverseOutOfRangeError(f"inverse out of range: log y={log_y}")
        # ln(1 + e^L)
        return (float(np.logaddexp(0.0, log_y)) / self.a) ** (1.0 / self.b)

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"a": self.a, "b": self.b}}


@dataclass(frozen=True)
class LogExp(OrliczFunction):
    """x ↦ exp(a (ln(x + 1))^b) − 1; inverted by bracketed root search."""

    a: float
    b: float
    family = Family.LOG_EXP

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"log_exp needs a > 0, got {self.a}")
        if not self.b >= 1:
            raise ValueError(f"log_exp needs b >= 1, got {self.b}")

    def evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(over="ignore"):
            return _restore(
                x, np.expm1(self.a * np.power(np.log1p(arr), self.b))
            )

    def log_evaluate(self, x):
        arr = _as_nonneg_array(x)
        with np.errstate(over="ignore"):
            return _restore(
                x, _log_expm1(self.a * np.power(np.log1p(arr), self.b))
            )

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"a": self.a, "b": self.b}}


class _TableMixin:
    """Monotone linear interpolation between strictly increasing pairs."""

    @staticmethod
    def _validated(xs: Sequence[float], ys: Sequence[float], what: str):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError(f"{what} needs two equal-length lists of >= 2 points")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError(f"{what} values must be finite")
        if xs[0] != 0 or ys[0] != 0:
            raise ValueError(f"{what} must start at the pair (0, 0)")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError(f"{what} must be strictly increasing")
        xs.setflags(write=False)
        ys.setflags(write=False)
        return xs, ys


@dataclass(frozen=True, eq=False)
class Tabulated(_TableMixin, OrliczFunction):
    """
    A ψ known only through a table of (x, ψ(x)) pairs.

    The table must start at (0, 0) and increase strictly; values outside
    the table raise :py:class:`ExtrapolationError`.
    """

    x: Any
    y: Any
    family = Family.TABULATED

    def __post_init__(self):
        xs, ys = self._validated(self.x, self.y, "tabulated Orlicz function")
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "y", ys)

    @property
    def domain_max(self) -> float:
        return float(self.x[-1])

    def evaluate(self, x):
        arr = _as_nonneg_array(x)
        self._check_domain(arr)
        return _restore(x, np.interp(arr, self.x, self.y))

    def log_evaluate(self, x):
        with np.errstate(divide="ignore"):
            return _restore(x, np.log(np.asarray(self.evaluate(x))))

    def inverse(self, y, tol=1e-12):
        y = float(y)
        if not math.isfinite(y) or y > self.y[-1]:
            raise InverseOutOfRangeError(f"inverse out of range: y={y}")
        if y < 0:
            raise ValueError("inverse is defined for y >= 0 only")
        return float(np.interp(y, self.y, self.x))

    def inverse_of_log(self, log_y, tol=1e-12):
        if log_y == -math.inf:
            return 0.0
        if log_y > math.log(self.y[-1]):
            raise InverseOutOfRangeError(f"inverse out of range: log y={log_y}")
        return self.inverse(math.exp(log_y), tol)

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"x": self.x.tolist(), "y": self.y.tolist()}}


@dataclass(frozen=True, eq=False)
class PiecewiseAffineInverse(_TableMixin, OrliczFunction):
    """
    ψ = v⁻¹ for a piecewise-affine increasing concave v.

    ``breakpoints`` are the nodes a_n of v and ``values`` the v(a_n); ψ maps
    ``values`` back onto ``breakpoints`` linearly.
    """

    breakpoints: Any
    values: Any
    majorant: Any = field(default=None, compare=False, repr=False)
    family = Family.PIECEWISE_AFFINE_INVERSE

    def __post_init__(self):
        a, v = self._validated(self.breakpoints, self.values,
                               "piecewise-affine inverse")
        object.__setattr__(self, "breakpoints", a)
        object.__setattr__(self, "values", v)

    @property
    def domain_max(self) -> float:
        return float(self.values[-1])

    def evaluate(self, x):
        arr = _as_nonneg_array(x)
        self._check_domain(arr)
        return _restore(x, np.interp(arr, self.values, self.breakpoints))

    def log_evaluate(self, x):
        with np.errstate(divide="ignore"):
            return _restore(x, np.log(np.asarray(self.evaluate(x))))

    def inverse(self, y, tol=1e-12):
        y = float(y)
        if not math.isfinite(y) or y > self.breakpoints[-1]:
            raise InverseOutOfRangeError(f"inverse out of range: y={y}")
        if y < 0:
            raise ValueError("inverse is defined for y >= 0 only")
        return float(np.interp(y, self.breakpoints, self.values))

    def inverse_of_log(self, log_y, tol=1e-12):
        if log_y == -math.inf:
            return 0.0
        if log_y > 709.0:
            raise InverseOutOfRangeError(f"inverse out of range: log y={log_y}")
        return self.inverse(math.exp(log_y), tol)

    def to_spec(self):
        return {"family": self.family.value,
                "params": {"breakpoints": self.breakpoints.tolist(),
                           "values": self.values.tolist()}}


def orlicz_from_spec(spec: dict[str, Any]) -> OrliczFunction:
    """
    Build an Orlicz function from ``{"family": ..., "params": {...}}``.

    >>> orlicz_from_spec({"family": "power", "params": {"p": 2}}).evaluate(3.0)
    9.0
    """
    try:
        family = Family(spec["family"])
    except (KeyError, ValueError):
        raise ValueError(f"unknown Orlicz family in {spec!r}") from None
    params = dict(spec.get("params", {}))
    builders = {
        Family.POWER: lambda: Power(float(params["p"])),
        Family.EXP_POWER: lambda: ExpPower(float(params["a"]),
                                           float(params["b"])),
        Family.LOG_EXP: lambda: LogExp(float(params["a"]), float(params["b"])),
        Family.TABULATED: lambda: Tabulated(params["x"], params["y"]),
        Family.PIECEWISE_AFFINE_INVERSE: lambda: PiecewiseAffineInverse(
            params["breakpoints"], params["values"]
        ),
    }
    try:
        return builders[family]()
    except KeyError as error:
        raise ValueError(
            f"{family.value} is missing parameter {error.args[0]!r}"
        ) from None


def evaluate(psi: OrliczFunction, x: ArrayLike) -> Union[float, np.ndarray]:
    """
    Return ψ(x); overflow gives the ``inf`` sentinel.

    >>> evaluate(Power(2), 3.0)
    9.0
    """
    return psi.evaluate(x)


def log_evaluate(psi: OrliczFunction, x: ArrayLike) -> Union[float, np.ndarray]:
    return psi.log_evaluate(x)


def inverse(psi: OrliczFunction, y: float, tol: float = 1e-12) -> float:
    """
    Return x with ψ(x) = y.

    Power and exp_power use their closed forms; every other family is
    inverted by a bracketed root search.
    """
    return psi.inverse(y, tol=tol)


def inverse_of_log(psi: OrliczFunction, log_y: float,
                   tol: float = 1e-12) -> float:
    return psi.inverse_of_log(log_y, tol=tol)


def default_x_grid() -> np.ndarray:
    return 2.0 ** np.arange(4, 81)


def _superlinearity_grid() -> np.ndarray:
    return 2.0 ** np.arange(4, 41)


def check_invariants(
    psi: OrliczFunction,
    grid: Optional[ArrayLike] = None,
    tol: float = 1e-9
) -> list[tuple[str, bool]]:
    """
    Sample the defining properties of an Orlicz function.

    Returns ``(name, holds)`` pairs for ψ(0) = 0, monotonicity, midpoint
    convexity and the superlinearity proxy ψ(x)/x nondecreasing.
    """
    if grid is None:
        grid = _superlinearity_grid()
    grid = np.asarray(grid, dtype=float)
    grid = grid[(grid > 0) & (grid <= psi.domain_max)]

    rows = [("psi(0) == 0", float(psi.evaluate(0.0)) == 0.0)]
    if grid.size < 2:
        rows.append(("grid", False))
        return rows

    dense = np.linspace(0.0, float(grid[-1]), 257)
    values = np.asarray(psi.log_evaluate(dense[1:]))
    rows.append(("nondecreasing", bool(np.all(np.diff(values) >= -tol))))

    left, right = dense[:-2:2], dense[2::2]
    with np.errstate(over="ignore"):
        mid = np.asarray(psi.evaluate((left + right) / 2))
        avg = (np.asarray(psi.evaluate(left))
               + np.asarray(psi.evaluate(right))) / 2
    finite = np.isfinite(avg)
    rows.append((
        "midpoint convex",
        bool(np.all(mid[finite] <= avg[finite] * (1 + tol) + tol))
    ))

    log_ratio = np.asarray(psi.log_evaluate(grid)) - np.log(grid)
    log_ratio = log_ratio[np.isfinite(log_ratio)]
    slack = tol * np.maximum(1.0, np.abs(log_ratio[1:]))
    rows.append((
        "psi(x)/x nondecreasing",
        bool(np.all(np.diff(log_ratio) >= -slack))
    ))
    return rows


@dataclass(frozen=True)
class ClassCertificate:
    """
    The outcome of :py:func:`certify` with everything needed to re-check it.

    ``witness`` holds the constants that made the inequality hold (for
    ``Pass``) and ``x0``, the first grid point of the tail on which it holds.
    """

    condition: Condition
    verdict: Verdict
    witness: dict[str, Any]
    test_grid: tuple[float, ...]
    function: dict[str, Any]
    exponent: float = 2.0
    b_grid: tuple[float, ...] = ()
    candidates: tuple[float, ...] = ()

    def revalidate(self, psi: Optional[OrliczFunction] = None) -> bool:
        """
        Re-evaluate the defining inequality with the stored witness.

        Certificates other than ``Pass`` have nothing to re-validate and
        return False.
        """
        if self.verdict is not Verdict.PASS:
            return False
        if psi is None:
            psi = orlicz_from_spec(self.function)
        grid = np.asarray(self.test_grid)
        tail = grid[grid >= self.witness["x0"]]

        if self.condition in (Condition.NABLA0, Condition.UNIFORM_NABLA0):
            pairs = self.witness["c_by_b"]
            return all(
                _nabla0_tail_holds(psi, tail, float(b), float(c))
                for b, c in pairs.items()
            )

        constant = float(self.witness["constant"])
        lhs, rhs = _SIDES[self.condition](psi, tail, constant, self.exponent)
        return bool(np.all(_holds(lhs, rhs)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition": self.condition.value,
            "verdict": self.verdict.value,
            "witness": self.witness,
            "test_grid": list(self.test_grid),
            "function": self.function,
            "exponent": self.exponent,
            "b_grid": list(self.b_grid),
            "candidates": list(self.candidates),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ClassCertificate":
        witness = dict(data["witness"])
        if "c_by_b" in witness:
            witness["c_by_b"] = {
                float(b): float(c) for b, c in witness["c_by_b"].items()
            }
        return cls(
            condition=Condition(data["condition"]),
            verdict=Verdict(data["verdict"]),
            witness=witness,
            test_grid=tuple(data["test_grid"]),
            function=data["function"],
            exponent=float(data.get("exponent", 2.0)),
            b_grid=tuple(data.get("b_grid", ())),
            candidates=tuple(data.get("candidates", ())),
        )


def _holds(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Elementwise lhs <= rhs with a relative slack for rounding."""
    slack = 1e-9 * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return lhs <= rhs + slack


def _log(psi, x):
    return np.asarray(psi.log_evaluate(x), dtype=float)


def _nabla2_sides(psi, x, beta, _exponent):
    # ψ(βx) >= 2βψ(x), written as lhs <= rhs
    return math.log(2 * beta) + _log(psi, x), _log(psi, beta * x)


def _delta2_sides(psi, x, k, _exponent):
    return _log(psi, 2 * x), math.log(k) + _log(psi, x)


def _delta_sharp2_sides(psi, x, c, exponent):
    return exponent * _log(psi, x), _log(psi, c * x)


def _inverse_power_sides(psi, x, c, exponent):
    logs = np.log(x)
    lhs = np.array([psi.inverse_of_log(exponent * t) for t in logs])
    rhs = c * np.array([psi.inverse_of_log(t) for t in logs])
    return np.log(lhs), np.log(rhs)


_SIDES = {
    Condition.NABLA2: _nabla2_sides,
    Condition.DELTA2: _delta2_sides,
    Condition.DELTA_SHARP2: _delta_sharp2_sides,
    Condition.INVERSE_POWER: _inverse_power_sides,
}


def _nabla0_margins(psi, x, b, c):
    """Return (cummax of log ψ(Bx)/ψ(x), log ψ(Cy)/ψ(By)) along the grid."""
    lhs = _log(psi, b * x) - _log(psi, x)
    rhs = _log(psi, c * x) - _log(psi, b * x)
    return lhs, rhs


def _nabla0_tail_holds(psi, tail, b, c) -> bool:
    lhs, rhs = _nabla0_margins(psi, tail, b, c)
    return bool(np.all(_holds(np.maximum.accumulate(lhs), rhs)))


def _first_passing_start(ok_from: list[bool]) -> Optional[int]:
    for start, ok in enumerate(ok_from):
        if ok:
            return start
    return None


def _usable_grid(psi, grid, factors) -> np.ndarray:
    """Drop grid points whose ψ-logarithms are saturated for any factor."""
    grid = grid[grid * max(factors) <= psi.domain_max]
    if grid.size == 0:
        return grid
    keep = np.ones(grid.size, dtype=bool)
    for factor in factors:
        keep &= np.isfinite(_log(psi, factor * grid))
    if not np.all(keep):
        logger.warning("%s: dropping %d saturated grid points",
                       psi.label, int(np.sum(~keep)))
    return grid[keep]


def certify(
    psi: OrliczFunction,
    condition: Union[Condition, str],
    x_grid: Optional[ArrayLike] = None,
    candidates: Optional[Sequence[float]] = None,
    b_grid: Optional[Sequence[float]] = None,
    exponent: float = 2.0
) -> ClassCertificate:
    """
    Certify membership of ψ in one growth class on a finite grid.

    The verdict is Pass if some candidate constant satisfies the defining
    inequality on every grid point from some x0 in the lower half of the
    grid onwards, Fail if every candidate is violated inside the top decade
    of the grid, and Inconclusive otherwise.

    ``exponent`` is the power s in ψ(x)^s <= ψ(Cx) for
    :py:attr:`Condition.DELTA_SHARP2` (2 by default), and the power in
    ψ⁻¹(x^s) <= Cψ⁻¹(x) for :py:attr:`Condition.INVERSE_POWER`.

    The default grid is x = 2^k, k = 4..80; candidate constants come from
    :py:data:`WITNESS_CANDIDATES`.
    """
    condition = Condition(condition)
    grid = default_x_grid() if x_grid is None else np.asarray(x_grid, float)
    grid = np.unique(grid[grid > 0])

    if condition in (Condition.NABLA0, Condition.UNIFORM_NABLA0):
        return _certify_nabla0(psi, condition, grid, candidates, b_grid)

    if candidates is None:
        key = {
            Condition.NABLA2: "nabla2",
            Condition.DELTA2: "delta2",
            Condition.DELTA_SHARP2: "delta_sharp2",
            Condition.INVERSE_POWER: "delta_sharp2",
        }[condition]
        candidates = WITNESS_CANDIDATES[key]
    candidates = tuple(float(c) for c in candidates)

    factors = {
        Condition.NABLA2: (1.0,) + candidates,
        Condition.DELTA2: (1.0, 2.0),
        Condition.DELTA_SHARP2: (1.0,) + candidates,
        Condition.INVERSE_POWER: (1.0,),
    }[condition]
    usable = _usable_grid(psi, grid, factors)
    if usable.size < 8:
        raise GridTooSmallError(
            f"{condition.value} needs >= 8 usable grid points, "
            f"got {usable.size}"
        )

    half = usable.size // 2
    top = usable >= usable[-1] / 10
    witness: dict[str, Any] = {}
    all_fail = True
    for candidate in candidates:
        lhs, rhs = _SIDES[condition](psi, usable, candidate, exponent)
        ok = _holds(lhs, rhs)
        # ok_from[i]: the inequality holds on usable[i:]
        ok_from = list(np.logical_and.accumulate(ok[::-1])[::-1][:half + 1])
        start = _first_passing_start(ok_from)
        if start is not None and not witness:
            witness = {"constant": candidate, "x0": float(usable[start])}
        if np.all(ok[top]):
            all_fail = False

    if witness:
        verdict = Verdict.PASS
    elif all_fail:
        verdict = Verdict.FAIL
    else:
        verdict = Verdict.INCONCLUSIVE

    logger.debug("%s %s: %s %s", psi.label, condition.value, verdict.value,
                 witness)
    return ClassCertificate(
        condition=condition,
        verdict=verdict,
        witness=witness,
        test_grid=tuple(float(x) for x in usable),
        function=psi.to_spec(),
        exponent=float(exponent),
        candidates=candidates,
    )


def _certify_nabla0(psi, condition, grid, candidates, b_grid):
    if candidates is None:
        candidates = WITNESS_CANDIDATES["nabla0_c"]
    if b_grid is None:
        b_grid = WITNESS_CANDIDATES["nabla0_b"]
    candidates = tuple(float(c) for c in candidates)
    b_grid = tuple(float(b) for b in b_grid)

    usable = _usable_grid(psi, grid, (1.0,) + b_grid + candidates)
    if usable.size < 8:
        raise GridTooSmallError(
            f"{condition.value} needs >= 8 usable grid points, "
            f"got {usable.size}"
        )
    half = usable.size // 2
    top_start = int(np.argmax(usable >= usable[-1] / 10))

    # passes[b][c] = index of the first tail start that works, or None
    passes: dict[float, dict[float, Optional[int]]] = {}
    fails: dict[float, dict[float, bool]] = {}
    for b in b_grid:
        passes[b], fails[b] = {}, {}
        for c in candidates:
            lhs, rhs = _nabla0_margins(psi, usable, b, c)
            starts = [
                start for start in range(half + 1)
                if np.all(_holds(np.maximum.accumulate(lhs[start:]),
                                 rhs[start:]))
            ]
            passes[b][c] = starts[0] if starts else None
            top_lhs = np.maximum.accumulate(lhs[top_start:])
            fails[b][c] = not np.all(_holds(top_lhs, rhs[top_start:]))

    witness: dict[str, Any] = {}
    if condition is Condition.NABLA0:
        chosen = {}
        for b in b_grid:
            for c in candidates:
                if passes[b][c] is not None:
                    chosen[b] = c
                    break
        if len(chosen) == len(b_grid):
            start = max(passes[b][chosen[b]] for b in b_grid)
            witness = {"c_by_b": chosen, "x0": float(usable[start])}
            verdict = Verdict.PASS
        elif any(all(fails[b].values()) for b in b_grid):
            verdict = Verdict.FAIL
        else:
            verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.INCONCLUSIVE
        for c in candidates:
            if all(passes[b][c] is not None for b in b_grid):
                start = max(passes[b][c] for b in b_grid)
                witness = {"c_by_b": {b: c for b in b_grid},
                           "constant": c, "x0": float(usable[start])}
                verdict = Verdict.PASS
                break
        else:
            if all(any(fails[b][c] for b in b_grid) for c in candidates):
                verdict = Verdict.FAIL

    return ClassCertificate(
        condition=condition,
        verdict=verdict,
        witness=witness,
        test_grid=tuple(float(x) for x in usable),
        function=psi.to_spec(),
        b_grid=b_grid,
        candidates=candidates,
    )


def certify_all(
    psi: OrliczFunction,
    x_grid: Optional[ArrayLike] = None
) -> list[ClassCertificate]:
    """Certify ψ against the five growth conditions, in a fixed order."""
    order = (Condition.NABLA2, Condition.NABLA0, Condition.UNIFORM_NABLA0,
             Condition.DELTA2, Condition.DELTA_SHARP2)
    return [certify(psi, condition, x_grid=x_grid) for condition in order]


def inverse_power_check(
    psi: OrliczFunction,
    exponent: float,
    candidates: Optional[Sequence[float]] = None,
    x_grid: Optional[ArrayLike] = None
) -> ClassCertificate:
    """Certify ψ⁻¹(x^s) <= Cψ⁻¹(x) for large x, with s = ``exponent``."""
    return certify(psi, Condition.INVERSE_POWER, x_grid=x_grid,
                   candidates=candidates, exponent=exponent)


_IMPLICATIONS = (
    (Condition.UNIFORM_NABLA0, Condition.NABLA2),
    (Condition.UNIFORM_NABLA0, Condition.NABLA0),
    (Condition.DELTA_SHARP2, Condition.UNIFORM_NABLA0),
)


def check_implications(
    certificates: Sequence[ClassCertificate]
) -> list[tuple[str, str]]:
    """
    Check the observed verdicts against the known implications between
    classes.

    Each row is ``(implication, status)`` where status is ``consistent``,
    ``inconsistent`` (the premise passed and the conclusion failed),
    ``undetermined`` or ``untested`` (a certificate is missing).
    """
    by_condition = {}
    for certificate in certificates:
        if (certificate.condition is Condition.DELTA_SHARP2
                and certificate.exponent != 2.0):
            continue
        by_condition[certificate.condition] = certificate.verdict

    rows = []
    for premise, conclusion in _IMPLICATIONS:
        name = f"{premise.value} => {conclusion.value}"
        if premise not in by_condition or conclusion not in by_condition:
            status = "untested"
        elif by_condition[premise] is not Verdict.PASS:
            status = "consistent"
        elif by_condition[conclusion] is Verdict.PASS:
            status = "consistent"
        elif by_condition[conclusion] is Verdict.FAIL:
            status = "inconsistent"
            logger.warning("certification bug: %s passed but %s failed",
                           premise.value, conclusion.value)
        else:
            status = "undetermined"
        rows.append((name, status))
    return rows
