"""Nearest-neighbour (m=2) analytic suite: recurrence, series, free energy, poles.

With q2 = (1-p1)/p2 the partition sequence Z_n = Z_{n,2} satisfies

    p2 * Z_{n+2} = p2 (1+p1) Z_{n+1} + p1 (1-p1-p2) Z_n        (n >= 2)

and has rational generating function

    sum_n Z_n x^n = (2 - x - p1 x) p2 / (p2 - p2 x (1+p1) - x^2 p1 (1-p1-p2)).

The numerator of the site-density sequence Z_n * P[site occupied] has the
generating function p1 x (1 - x + q2 x) over the same denominator (scaled by
p2). The exponential growth rate F = lim (1/n) log Z_n comes from the dominant
denominator root x_plus as F = -log x_plus, with a removable singularity on
the line p1 + p2 = 1 where F = log(1+p1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .closedforms import partition_formula
from .errors import BudgetExceeded, DegenerateDenominator, DomainError, ParamError
from .model import ModelParams

__all__ = [
    "SERIES_CAP",
    "REMOVABLE_WINDOW",
    "SeriesCoefficients",
    "PoleData",
    "q2_parameter",
    "gf_denominator",
    "z2_recurrence",
    "z2_log_recurrence",
    "z2_series",
    "density_series",
    "free_energy",
    "free_energy_grid",
    "pole_data",
    "asymptotic_z2",
]

# long-division expansions are meant for finite checks, not asymptotics
SERIES_CAP = 10_000
# width of the p1 + p2 = 1 window treated as the removable singularity
REMOVABLE_WINDOW = 1e-9


def _validate(p1: float, p2: float) -> tuple[float, float]:
    if not 0 < p1 < 1:
        raise ParamError(f"p1 must lie in (0,1), got {p1!r}")
    if not 0 < p2 <= 1:
        raise ParamError(f"p2 must lie in (0,1], got {p2!r}")
    return float(p1), float(p2)


def q2_parameter(p1: float, p2: float) -> float:
    """The derived parameter q2 = (1-p1)/p2 controlling the m=2 analytics."""
    p1, p2 = _validate(p1, p2)
    return (1.0 - p1) / p2


def _on_removable_line(p1: float, p2: float) -> bool:
    return abs(p1 + p2 - 1.0) < REMOVABLE_WINDOW


# ---- Recurrence ----


def z2_recurrence(n_max: int, p1: float, p2: float) -> tuple[float, ...]:
    """Z_{0,2} .. Z_{n_max,2} by the three-term recurrence.

    Seeds are Z_0 = 2 and Z_1 = 1 + p1; Z_2 comes from the general partition
    formula because the recurrence itself only holds from n = 2 on.
    """
    p1, p2 = _validate(p1, p2)
    if n_max < 2:
        raise ParamError(f"need n_max >= 2, got {n_max}")
    z = [2.0, 1.0 + p1, float(partition_formula(ModelParams(2, 2, p1, p2)))]
    for n in range(n_max - 2):
        z.append((p1 * (1.0 - p1 - p2) * z[-2] + p2 * (1.0 + p1) * z[-1]) / p2)
    return tuple(z)


def z2_log_recurrence(n_max: int, p1: float, p2: float) -> tuple[float, ...]:
    """log Z_{0,2} .. log Z_{n_max,2}, overflow-safe for large n.

    Iterates the successive ratio r_n = Z_{n+1}/Z_n, which obeys
    r_{n+1} = (1+p1) + p1 (q2 - 1) / r_n, and accumulates its logs.
    """
    p1, p2 = _validate(p1, p2)
    if n_max < 2:
        raise ParamError(f"need n_max >= 2, got {n_max}")
    z2 = float(partition_formula(ModelParams(2, 2, p1, p2)))
    out = [math.log(2.0), math.log1p(p1), math.log(z2)]
    a = 1.0 + p1
    b = p1 * (q2_parameter(p1, p2) - 1.0)
    r = z2 / (1.0 + p1)  # r_1 = Z_2 / Z_1
    for n in range(n_max - 2):
        r = a + b / r
        out.append(out[-1] + math.log(r))
    return tuple(out)


# ---- Series expansion ----


@dataclass(frozen=True)
class SeriesCoefficients:
    """Finite power-series prefix c_0..c_K of one of the two m=2 generating functions."""

    kind: str  # "partition" or "density"
    p1: float
    p2: float
    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("partition", "density"):
            raise ParamError(f"kind must be 'partition' or 'density', got {self.kind!r}")
        if len(self.coeffs) < 3:
            raise ParamError("series must carry at least c_0..c_2")


def _divide_series(num: list[float], den: list[float], n_max: int) -> tuple[float, ...]:
    # coefficient recursion of num(x)/den(x); den[0] != 0
    coeffs = []
    for k in range(n_max + 1):
        parts = [num[k]] if k < len(num) else []
        parts += [-den[j] * coeffs[k - j] for j in range(1, min(k, len(den) - 1) + 1)]
        coeffs.append(math.fsum(parts) / den[0])
    return tuple(coeffs)


def z2_series(n_max: int, p1: float, p2: float) -> SeriesCoefficients:
    """Long-division expansion of the partition generating function.

    Coefficient n equals Z_{n,2}.
    """
    p1, p2 = _validate(p1, p2)
    if n_max < 2:
        raise ParamError(f"need n_max >= 2, got {n_max}")
    if n_max > SERIES_CAP:
        raise BudgetExceeded(f"series expansion capped at n_max <= {SERIES_CAP}")
    num = [2.0 * p2, -(1.0 + p1) * p2]
    den = [p2, -p2 * (1.0 + p1), -p1 * (1.0 - p1 - p2)]
    return SeriesCoefficients("partition", p1, p2, _divide_series(num, den, n_max))


def density_series(n_max: int, p1: float, p2: float) -> SeriesCoefficients:
    """Long-division expansion of the density-numerator generating function.

    Coefficient n equals Z_{n,2} times the stationary single-site occupation
    probability, so c_n / Z_{n,2} recovers the density.
    """
    p1, p2 = _validate(p1, p2)
    if n_max < 2:
        raise ParamError(f"need n_max >= 2, got {n_max}")
    if n_max > SERIES_CAP:
        raise BudgetExceeded(f"series expansion capped at n_max <= {SERIES_CAP}")
    q2 = q2_parameter(p1, p2)
    num = [0.0, p1, p1 * (q2 - 1.0)]
    den = [1.0, -(1.0 + p1), p1 * (1.0 - q2)]
    return SeriesCoefficients("density", p1, p2, _divide_series(num, den, n_max))


# ---- Free energy and poles ----


def free_energy(p1: float, p2: float) -> float:
    """Exponential growth rate F = lim (1/n) log Z_{n,2}.

    On the removable line p1 + p2 = 1 (within REMOVABLE_WINDOW) the limit
    value log(1+p1) is returned; elsewhere the closed form

        -log[ (-p2(1+p1) + sqrt(p2(1-p1)(4p1+p2-p1p2))) / (2p1(1-p1-p2)) ]

    is evaluated directly.

    Raises:
        DomainError: if the radicand is negative (impossible for valid
            parameters; indicates corrupted inputs).
    """
    p1, p2 = _validate(p1, p2)
    if _on_removable_line(p1, p2):
        return math.log1p(p1)
    radicand = p2 * (1.0 - p1) * (4.0 * p1 + p2 - p1 * p2)
    if radicand < 0:
        raise DomainError(f"negative radicand {radicand} for (p1,p2)=({p1},{p2})")
    bracket = (-p2 * (1.0 + p1) + math.sqrt(radicand)) / (2.0 * p1 * (1.0 - p1 - p2))
    return -math.log(bracket)


def free_energy_grid(
    count: int, lo: float = 0.02, hi: float = 0.98
) -> list[tuple[float, float, float]]:
    """(p1, p2, F) rows over a count x count grid, p2 varying slowest."""
    if count < 1:
        raise ParamError(f"need count >= 1, got {count}")
    if not 0 < lo <= hi:
        raise ParamError(f"need 0 < lo <= hi, got lo={lo}, hi={hi}")
    if count == 1:
        values = [lo]
    else:
        values = [lo + (hi - lo) * i / (count - 1) for i in range(count)]
    return [(p1, p2, free_energy(p1, p2)) for p2 in values for p1 in values]


def gf_denominator(x: float, p1: float, p2: float) -> float:
    """The quadratic denominator p2 - p2 x (1+p1) - x^2 p1 (1-p1-p2)."""
    return p2 - p2 * x * (1.0 + p1) - x * x * p1 * (1.0 - p1 - p2)


@dataclass(frozen=True)
class PoleData:
    """Real roots of the partition generating function denominator."""

    x_plus: float
    x_minus: float
    q2: float


def pole_data(p1: float, p2: float) -> PoleData:
    """Both denominator roots x_plus (dominant, |x_plus| < |x_minus|) and x_minus.

    Raises:
        DegenerateDenominator: on the line p1 + p2 = 1 (q2 = 1), where the
            denominator is linear and has a single root 1/(1+p1).
    """
    p1, p2 = _validate(p1, p2)
    if _on_removable_line(p1, p2):
        raise DegenerateDenominator(
            "denominator is linear on p1 + p2 = 1; no quadratic pole pair exists"
        )
    q2 = q2_parameter(p1, p2)
    # q2 - 1 computed without cancellation; it controls both roots near the line
    delta = (1.0 - p1 - p2) / p2
    disc = (1.0 - p1) ** 2 + 4.0 * p1 * q2
    root = math.sqrt(disc)
    # rationalized form of the (-(1+p1) + root) branch: no cancellation near q2 = 1
    x_plus = 2.0 / ((1.0 + p1) + root)
    x_minus = -((1.0 + p1) + root) / (2.0 * p1 * delta)
    for x in (x_plus, x_minus):
        # residual relative to the largest term; x_minus diverges as q2 -> 1
        scale = max(1.0, abs(p2 * (1.0 + p1) * x), abs(p1 * (1.0 - p1 - p2) * x * x))
        assert abs(gf_denominator(x, p1, p2)) < 1e-12 * scale, (x, p1, p2)
    return PoleData(x_plus=x_plus, x_minus=x_minus, q2=q2)


def asymptotic_z2(n: int, p1: float, p2: float) -> float:
    """Leading-order approximation of Z_{n,2} from the dominant pole.

    Away from q2 = 1 this evaluates Z0(x_plus) / (x_plus (x_minus - x_plus))
    * x_plus^(-n) with Z0(x) = (x + p1 x - 2)/(p1 (q2-1)). On the q2 = 1 line
    the generating function collapses to (2 - (1+p1)x)/(1 - (1+p1)x) and the
    coefficient extraction is exact: Z_n = (1+p1)^n for n >= 1 (and Z_0 = 2),
    so that value is returned instead of an approximation.
    """
    p1, p2 = _validate(p1, p2)
    if n < 0:
        raise ParamError(f"need n >= 0, got {n}")
    if _on_removable_line(p1, p2):
        return 2.0 if n == 0 else (1.0 + p1) ** n
    poles = pole_data(p1, p2)
    xp, xm = poles.x_plus, poles.x_minus
    delta = (1.0 - p1 - p2) / p2

    def z0(x: float) -> float:
        return (x + p1 * x - 2.0) / (p1 * delta)

    return z0(xp) / (xp * (xm - xp)) * xp ** (-n)
