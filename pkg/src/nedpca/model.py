"""Core model: ring configurations, update rules, one-step transition law.

The process lives on a ring of n sites, each holding 0 or 1. All sites update
simultaneously. Site i reads the cyclic window (a_i, a_{i+1}, ..., a_{i+m-1})
of the OLD configuration and draws its new value:

    window 0^m          (open vacancy)     -> 1 with probability p1
    window 0^{m-1} 1    (blocked vacancy)  -> 1 with probability 1 - p2
    any other window    (forced)           -> 0 surely

An occupied site always starts its own window with a 1, so every particle
evaporates each step; survival of density is carried entirely by deposition.

Conventions used throughout the package:

  * sites are 1-based in the API; site arithmetic wraps modulo n
  * integer encoding maps site i to bit i-1, so site 1 is the least
    significant bit and the all-ones state on n sites is 2**n - 1
  * string form writes site 1 leftmost ("0110" has site 2 and 3 occupied);
    under this encoding the usual ascending integer order 0, 1, 2, ...
    matches the order in which stationary vectors are reported
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

from .errors import ParamError

__all__ = [
    "ModelParams",
    "Configuration",
    "ConfigLike",
    "PatternCounts",
    "SiteWindow",
    "count_patterns",
    "classify_window",
    "site_update_prob",
    "transition_prob",
    "step_sample",
    "scalar_step",
    "window_masks",
    "ror",
]

Real = Union[float, Fraction]


# ---- Parameters ----


@dataclass(frozen=True)
class ModelParams:
    """Ring size n, window size m, deposition probability p1, blocking p2.

    p1 and p2 may be floats or exact `fractions.Fraction` values; the exact
    form switches downstream evaluators into rational arithmetic.
    """

    n: int
    m: int
    p1: Real
    p2: Real

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not isinstance(self.m, int):
            raise ParamError(f"n and m must be integers, got n={self.n!r} m={self.m!r}")
        if not 2 <= self.m <= self.n:
            raise ParamError(f"need 2 <= m <= n, got m={self.m}, n={self.n}")
        if not 0 < self.p1 < 1:
            raise ParamError(f"p1 must lie in (0,1), got {self.p1!r}")
        # p2 = 1 is allowed: a blocked vacancy then deterministically stays 0.
        if not 0 < self.p2 <= 1:
            raise ParamError(f"p2 must lie in (0,1], got {self.p2!r}")

    @property
    def exact(self) -> bool:
        """True when both probabilities are exact fractions."""
        return isinstance(self.p1, Fraction) and isinstance(self.p2, Fraction)

    @property
    def n_states(self) -> int:
        return 1 << self.n


# ---- Configurations ----


def ror(code: int, k: int, n: int) -> int:
    """Cyclic right rotation within n bits: bit i of the result is bit (i+k) mod n."""
    k %= n
    if k == 0:
        return code
    mask = (1 << n) - 1
    return ((code >> k) | (code << (n - k))) & mask


@dataclass(frozen=True)
class Configuration:
    """An n-site ring state in canonical integer encoding (site 1 = bit 0)."""

    code: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParamError(f"ring size must be positive, got {self.n}")
        if not 0 <= self.code < (1 << self.n):
            raise ParamError(f"code {self.code} out of range for n={self.n}")

    @classmethod
    def from_string(cls, s: str) -> "Configuration":
        """Parse a binary string with site 1 leftmost, e.g. "0110"."""
        if not s or any(c not in "01" for c in s):
            raise ParamError(f"configuration string must be nonempty over 0/1, got {s!r}")
        code = 0
        for i, c in enumerate(s):
            if c == "1":
                code |= 1 << i
        return cls(code, len(s))

    @classmethod
    def coerce(cls, value: "ConfigLike", n: int) -> "Configuration":
        """Accept a Configuration, an integer code, or a binary string."""
        if isinstance(value, Configuration):
            if value.n != n:
                raise ParamError(f"configuration has n={value.n}, expected n={n}")
            return value
        if isinstance(value, str):
            conf = cls.from_string(value)
            if conf.n != n:
                raise ParamError(f"string length {conf.n} does not match n={n}")
            return conf
        if isinstance(value, int):
            return cls(value, n)
        raise ParamError(f"cannot interpret {value!r} as a configuration")

    def bit(self, site: int) -> int:
        """Value at a 1-based site index, wrapping around the ring."""
        return (self.code >> ((site - 1) % self.n)) & 1

    def bits(self) -> tuple[int, ...]:
        return tuple((self.code >> i) & 1 for i in range(self.n))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits())

    def popcount(self) -> int:
        return self.code.bit_count()

    def rotated(self, k: int = 1) -> "Configuration":
        """The configuration read k sites further along: site i becomes old site i+k."""
        return Configuration(ror(self.code, k, self.n), self.n)

    def __str__(self) -> str:
        return self.to_string()


ConfigLike = Union[Configuration, int, str]


# ---- Pattern statistics ----


@dataclass(frozen=True)
class PatternCounts:
    """Cyclic occurrence counts driving the stationary weight of a state.

    n1 counts 1s. n10r1[r-1] counts occurrences of 1 0^r 1 for r = 1..m-2.
    n0m1 counts occurrences of 0^{m-1} 1. All windows wrap around the ring.
    """

    n1: int
    n10r1: tuple[int, ...]
    n0m1: int

    @property
    def m(self) -> int:
        return len(self.n10r1) + 2

    def weight_zero_exponent(self) -> int:
        # exponent of (1-p1) in the stationary weight: each counted pattern
        # pins down its interior zeros
        return sum((r + 1) * c for r, c in enumerate(self.n10r1)) + (self.m - 1) * self.n0m1


def count_patterns(beta: ConfigLike, params: ModelParams) -> PatternCounts:
    """Count the cyclic patterns 1, 1 0^r 1, and 0^{m-1} 1 in a configuration.

    Args:
        beta: configuration (object, integer code, or binary string).
        params: model parameters fixing n and m.

    Returns:
        PatternCounts with all windows evaluated cyclically.
    """
    conf = Configuration.coerce(beta, params.n)
    n, m = params.n, params.m
    code = conf.code
    mask = (1 << n) - 1
    zeros = ~code & mask

    n10r1 = []
    # zero_run holds, at bit i, whether sites i+1 .. i+r are all empty
    zero_run = mask
    for r in range(1, m - 1):
        zero_run &= ror(zeros, r, n)
        n10r1.append((code & zero_run & ror(code, r + 1, n)).bit_count())
    blocked = zeros & zero_run & ror(code, m - 1, n)
    return PatternCounts(code.bit_count(), tuple(n10r1), blocked.bit_count())


# ---- Window classification and site law ----


class SiteWindow(Enum):
    OPEN_VACANCY = "open-vacancy"  # window 0^m
    BLOCKED_VACANCY = "blocked-vacancy"  # window 0^{m-1} 1
    FORCED = "forced"  # any window with a 1 among the first m-1 symbols


def classify_window(alpha: ConfigLike, site: int, params: ModelParams) -> SiteWindow:
    """Class of the window (a_site, ..., a_{site+m-1}), site given 1-based."""
    conf = Configuration.coerce(alpha, params.n)
    if not 1 <= site <= params.n:
        raise ParamError(f"site must lie in 1..{params.n}, got {site}")
    if any(conf.bit(site + t) for t in range(params.m - 1)):
        return SiteWindow.FORCED
    if conf.bit(site + params.m - 1):
        return SiteWindow.BLOCKED_VACANCY
    return SiteWindow.OPEN_VACANCY


def site_update_prob(window: SiteWindow, new_bit: int, params: ModelParams) -> Real:
    """Probability that a site with the given window takes the given new value."""
    if new_bit not in (0, 1):
        raise ParamError(f"new_bit must be 0 or 1, got {new_bit!r}")
    if window is SiteWindow.OPEN_VACANCY:
        return params.p1 if new_bit else 1 - params.p1
    if window is SiteWindow.BLOCKED_VACANCY:
        return 1 - params.p2 if new_bit else params.p2
    # forced sites evaporate surely; integer constants stay exact in both
    # float and Fraction arithmetic
    return 0 if new_bit else 1


def transition_prob(alpha: ConfigLike, beta: ConfigLike, params: ModelParams) -> Real:
    """One-step probability P[alpha -> beta]: product of independent site factors."""
    a = Configuration.coerce(alpha, params.n)
    b = Configuration.coerce(beta, params.n)
    prob: Real = 1
    for site in range(1, params.n + 1):
        prob *= site_update_prob(classify_window(a, site, params), b.bit(site), params)
        if prob == 0:
            break
    return prob


# ---- Stepping kernels ----


def window_masks(code: int, params: ModelParams) -> tuple[int, int]:
    """Bit masks of open and blocked vacancies, via word-level rotations.

    Bit i of the first mask is set when site i+1 sees the window 0^m, bit i of
    the second when it sees 0^{m-1} 1. Everything else is forced. Costs O(m)
    word operations regardless of n.
    """
    n, m = params.n, params.m
    mask = (1 << n) - 1
    occupied_ahead = code  # OR of the first m-1 window symbols, per site
    for t in range(1, m - 1):
        occupied_ahead |= ror(code, t, n)
    closing = ror(code, m - 1, n)
    open_mask = ~occupied_ahead & ~closing & mask
    blocked_mask = ~occupied_ahead & closing & mask
    return open_mask, blocked_mask


def scalar_step(code: int, params: ModelParams, u: Sequence[float]) -> int:
    """Reference one-step update, site by site.

    u must supply n uniforms indexed 0..n-1. Draw i is compared against p1 at
    an open vacancy and against 1-p2 at a blocked one; it is ignored (but
    still consumed) at forced sites, so any kernel fed the same stream makes
    identical decisions.
    """
    n, m = params.n, params.m
    p1 = params.p1
    r2 = 1 - params.p2
    new = 0
    for i in range(n):
        forced = False
        for t in range(m - 1):
            if (code >> ((i + t) % n)) & 1:
                forced = True
                break
        if forced:
            continue
        if (code >> ((i + m - 1) % n)) & 1:
            if u[i] < r2:
                new |= 1 << i
        elif u[i] < p1:
            new |= 1 << i
    return new


def step_sample(alpha: ConfigLike, params: ModelParams, rng) -> Configuration:
    """Draw one synchronous update of alpha; consumes exactly n uniforms from rng.

    All windows are classified against the old configuration before any bit is
    written, matching the simultaneous-update semantics.
    """
    conf = Configuration.coerce(alpha, params.n)
    u = rng.random(params.n)
    return Configuration(scalar_step(conf.code, params, u), params.n)
