"""Closed-form budget bounds, the adaptivity-gap envelope and the
rumor-center distance distribution on regular trees.

Entropies are non-negative. Inside ``f_ln`` and ``f_la`` they are taken in
bits so they pair with the explicit ``log2(d)`` term; everywhere else logs
are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import ParameterError


@dataclass(frozen=True)
class BoundInputs:
    """Parameters shared by the budget formulas.

    ``C_d`` and ``H_T`` stand in for the unspecified degree constant and the
    infection-time entropy; both default to 1 and are the caller's to set
    (see :func:`H_T_upper` for a crude ceiling on the latter).
    """

    delta: float
    p: float
    q: float
    d: int
    C_d: float = 1.0
    H_T: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if self.d < 3:
            raise ParameterError(f"d must be >= 3, got {self.d}")
        if not 0.5 < self.p <= 1.0:
            raise ParameterError(f"p must lie in (1/2, 1], got {self.p}")
        if not 1.0 / self.d < self.q <= 1.0:
            raise ParameterError(f"q must lie in (1/d, 1] = ({1 / self.d:.6g}, 1], got {self.q}")
        if self.C_d <= 0 or self.H_T <= 0:
            raise ParameterError("C_d and H_T must be positive")

    @property
    def alpha(self) -> int:
        return 1 if self.p == 1.0 else 2


class BudgetBound(NamedTuple):
    budget: float
    r_star: int


@dataclass(frozen=True)
class GapEnvelope:
    lower: float
    upper: float
    alpha: int


def entropy_id(p: float, base: float = math.e) -> float:
    """Entropy of a Bernoulli(p) id answer."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    h = 0.0
    for x in (p, 1.0 - p):
        if x > 0.0:
            h -= x * math.log(x)
    return h / math.log(base)


def entropy_dir(q: float, d: int, base: float = math.e) -> float:
    """Entropy of a dir answer: truth w.p. ``q``, each of ``d - 1`` lies w.p. ``(1-q)/(d-1)``."""
    if not 0.0 <= q <= 1.0:
        raise ParameterError(f"q must lie in [0, 1], got {q}")
    if d < 2:
        raise ParameterError(f"d must be >= 2, got {d}")
    h = -q * math.log(q) if q > 0.0 else 0.0
    if q < 1.0:
        h -= (1.0 - q) * math.log((1.0 - q) / (d - 1))
    return h / math.log(base)


def _check_pq(p: float, q: float, d: int) -> None:
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    if not 0.5 <= p <= 1.0:
        raise ParameterError(f"p must lie in [1/2, 1], got {p}")
    if not 1.0 / d <= q <= 1.0:
        raise ParameterError(f"q must lie in [1/d, 1], got {q}")


def f_ln(p: float, q: float, d: int) -> float:
    _check_pq(p, q, d)
    return (1 - entropy_id(p, 2)) + p * (1 - p) * (math.log2(d) - entropy_dir(q, d, 2))


def f_n(p: float, q: float, d: int) -> float:
    _check_pq(p, q, d)
    return 3 * (p - 0.5) ** 2 + (d - 1) * p * (1 - p) / (3 * d) * (q - 1 / d) ** 2


def f_la(p: float, q: float, d: int) -> float:
    _check_pq(p, q, d)
    return (1 - entropy_id(p, 2)) + p * (math.log2(d) - entropy_dir(q, d, 2))


def f_a(p: float, q: float, d: int) -> float:
    _check_pq(p, q, d)
    return 2 * d / (d - 1) * (p - 0.5) ** 2 + (d - 1) / (d - 2) * (q - 1 / d) ** 3


def H_T_upper(K: float, r: float) -> float:
    """Ceiling ``K / r`` on the infection-time entropy under unit rates."""
    if K <= 0 or r <= 0:
        raise ParameterError("K and r must be positive")
    return K / r


def _iterated_log(x: float, name: str) -> float:
    # log(log(x)) must be positive, i.e. x > e
    if not x > math.e:
        raise ParameterError(f"{name} = {x:.6g} must exceed e for log(log(.)) > 0")
    return math.log(math.log(x))


def _check_rstar(p: float, q: float, d: int, K: float, k_min: int) -> None:
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    if K < k_min:
        raise ParameterError(f"K must be >= {k_min}, got {K}")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ParameterError(f"p and q must lie in [0, 1], got p={p}, q={q}")


def r_star_na_necessary(p: float, q: float, d: int, K: float) -> int:
    _check_rstar(p, q, d, K, 2)
    growth = 4 * (1 - p) * (7 * entropy_id(p) + 2 * entropy_dir(q, d)) * math.log(K)
    return max(1, math.floor(1 + growth / (3 * math.e * math.log(d - 1))))


def r_star_na_sufficient(p: float, q: float, d: int, K: float) -> int:
    _check_rstar(p, q, d, K, 2)
    growth = 2 * (1 - p) * (1 + (1 - q) ** 2) * math.log(K)
    return max(1, math.floor(1 + growth / (math.e * math.log(d - 1))))


def r_star_ad_necessary(p: float, q: float, d: int, K: float) -> int:
    _check_rstar(p, q, d, K, 3)
    growth = 7 * d * p * (3 * entropy_id(p) + 2 * d * entropy_dir(q, d)) * math.log(math.log(K))
    return max(1, math.floor(1 + growth / (2 * (d - 1))))


def r_star_ad_sufficient(p: float, q: float, d: int, K: float) -> int:
    _check_rstar(p, q, d, K, 3)
    growth = 7 * d**2 * (2 * (1 - p) ** 3 + (1 - q) ** 2) * math.log(math.log(K))
    return max(1, math.floor(1 + growth / (3 * (d - 1))))


def necessary_budget_na(inp: BoundInputs) -> BudgetBound:
    """Budget below which no non-adaptive scheme reaches ``1 - delta``."""
    ll = _iterated_log(2 / inp.delta, "2/delta")
    K = inp.C_d * inp.H_T * math.sqrt(2 / inp.delta) / (f_ln(inp.p, inp.q, inp.d) * ll)
    return BudgetBound(K, r_star_na_necessary(inp.p, inp.q, inp.d, max(K, 2)))


def sufficient_budget_na(inp: BoundInputs) -> BudgetBound:
    """Budget at which MVNA(r*) reaches ``1 - delta``, with that r*."""
    ll = _iterated_log(2 / inp.delta, "2/delta")
    d = inp.d
    K = 12 * d / (d - 2) * (2 / inp.delta) / (f_n(inp.p, inp.q, d) * ll)
    return BudgetBound(K, r_star_na_sufficient(inp.p, inp.q, inp.d, max(K, 2)))


def necessary_budget_ad(inp: BoundInputs) -> BudgetBound:
    """Budget below which no adaptive scheme reaches ``1 - delta``."""
    ll = _iterated_log(7 / inp.delta, "7/delta")
    L = math.log(7 / inp.delta)
    K = inp.C_d * inp.H_T * L ** (inp.alpha / 2) / (f_la(inp.p, inp.q, inp.d) * ll)
    return BudgetBound(K, r_star_ad_necessary(inp.p, inp.q, inp.d, max(K, 3)))


def sufficient_budget_ad(inp: BoundInputs) -> BudgetBound:
    """Budget at which MVAD(r*) reaches ``1 - delta``, with that r*."""
    ll = _iterated_log(7 / inp.delta, "7/delta")
    L = math.log(7 / inp.delta)
    d = inp.d
    K = 2 * (2 * d - 3) / d * L**inp.alpha / (f_a(inp.p, inp.q, d) * ll)
    return BudgetBound(K, r_star_ad_sufficient(inp.p, inp.q, inp.d, max(K, 3)))


def adaptivity_gap_envelope(inp: BoundInputs, U1: float = 1.0, U2: float = 1.0) -> GapEnvelope:
    if U1 <= 0 or U2 <= 0:
        raise ParameterError("U1 and U2 must be positive")
    inv = 1 / inp.delta
    L = math.log(inv)
    a = inp.alpha
    return GapEnvelope(U1 * math.sqrt(inv) / L**a, U2 * inv / L ** (a / 2), a)


def g_combinatorial(a: int, b: int, d: int) -> int:
    """Elementary symmetric polynomial ``e_b(x_1..x_a)`` with ``x_i = 1 + i(d-2)``."""
    if a < 0 or b < 0:
        raise ParameterError(f"a and b must be non-negative, got a={a}, b={b}")
    if b > a:
        raise ParameterError(f"b={b} exceeds a={a}")
    e = [1] + [0] * b
    for i in range(1, a + 1):
        x = 1 + i * (d - 2)
        for j in range(min(i, b), 0, -1):
            e[j] += x * e[j - 1]
    return e[b]


def _realizations(d: int, k: int) -> int:
    return math.prod(2 + j * (d - 2) for j in range(1, k))


def distance_pmf_exact(d: int, k: int, l: int) -> Fraction:
    """``P(d(v_1, v_k) = l)`` on a d-regular tree, as an exact rational."""
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if not 1 <= l <= k - 1:
        raise ParameterError(f"l must lie in [1, {k - 1}], got {l}")
    num = g_combinatorial(k - 2, k - l - 1, d) * d * (d - 1) ** (l - 1)
    return Fraction(num, _realizations(d, k))


def distance_pmf(d: int, k: int, l: int) -> float:
    return float(distance_pmf_exact(d, k, l))


def distance_pmf_single_hop_exact(d: int, k: int) -> Fraction:
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    num = math.prod(1 + i * (d - 2) for i in range(1, k - 1)) * d
    return Fraction(num, _realizations(d, k))


def distance_pmf_single_hop(d: int, k: int) -> float:
    return float(distance_pmf_single_hop_exact(d, k))
