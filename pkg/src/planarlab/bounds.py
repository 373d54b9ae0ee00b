"""Closed-form quantities and bound evaluators.

The unspecified constants (C, C_tilde, C1, c, B0, B1) are always arguments.
Nothing here asserts an inequality whose constant is unknown; evaluators
return values, verdicts and margins and leave the judgement to the caller.
"""
from __future__ import annotations

from dataclasses import dataclass
import math
from typing import NamedTuple
import warnings

import numpy as np


class DomainError(ValueError):
    """A parameter is outside the range where a formula is defined."""

    def __init__(self, name, value, constraint):
        self.name = name
        self.value = value
        self.constraint = constraint
        super().__init__(f"{name}={value!r} violates {constraint}")

    def as_dict(self):
        return {"parameter": self.name, "value": self.value, "constraint": self.constraint}


class RegimeWarning(UserWarning):
    """Evaluated outside the range where the result is claimed."""


def _require(cond, name, value, constraint):
    if not cond:
        raise DomainError(name, value, constraint)


def _sizes(r, s, k):
    _require(r >= 1, "r", r, "r >= 1")
    _require(s >= 1, "s", s, "s >= 1")
    _require(k >= 1, "k", k, "k >= 1")


@dataclass(frozen=True)
class BoundParams:
    delta: float
    epsilon: float
    alpha: float
    beta: float
    C: float = 1.0
    C_tilde: float = 1.0
    C1: float = 1.0
    c: float = 1.0
    B0: float = 1.0
    B1: float = 1.0

    def __post_init__(self):
        _require(0 < self.delta < 1, "delta", self.delta, "0 < delta < 1")
        _require(0 < self.epsilon < 1, "epsilon", self.epsilon, "0 < epsilon < 1")
        _require(0.5 < self.alpha < self.beta < 0.75, "alpha, beta", (self.alpha, self.beta),
                 "1/2 < alpha < beta < 3/4")
        for name in ("C", "C_tilde", "C1", "c", "B0", "B1"):
            value = getattr(self, name)
            _require(value > 0, name, value, f"{name} > 0")


class FlaggedValue(NamedTuple):
    value: float
    in_window: bool
    reason: str | None = None


@dataclass(frozen=True)
class RegimeVerdict:
    ok: bool
    which: str
    failed: tuple[str, ...]
    conditions: dict

    def as_dict(self):
        return {"ok": self.ok, "which": self.which, "failed": list(self.failed), "conditions": self.conditions}


def m_upper(r, s, k, delta) -> float:
    """2(1 + delta) sqrt(rs/k)."""
    _sizes(r, s, k)
    _require(0 <= delta < 1, "delta", delta, "0 <= delta < 1")
    return 2.0 * (1.0 + delta) * math.sqrt(r * s / k)


def m_lower(r, s, k, delta) -> float:
    """2(1 - delta) sqrt(rs/k)."""
    _sizes(r, s, k)
    _require(0 <= delta < 1, "delta", delta, "0 <= delta < 1")
    return 2.0 * (1.0 - delta) * math.sqrt(r * s / k)


def prop5_regime_check(r, s, k, delta, C, which="upper") -> RegimeVerdict:
    """Whether (r, s, k) lies in the small-graph regime for the given side.

    upper: rs >= Ck and (r + s) sqrt(rs) <= delta k^{3/2} / 6
    lower: rs >= Ck and r + s <= delta k / 6
    """
    _sizes(r, s, k)
    _require(0 < delta < 1, "delta", delta, "0 < delta < 1")
    _require(C > 0, "C", C, "C > 0")
    _require(which in ("upper", "lower"), "which", which, "'upper' or 'lower'")
    conds = {"size": {"lhs": r * s, "rhs": C * k, "holds": r * s >= C * k}}
    if which == "upper":
        lhs = (r + s) * math.sqrt(r * s)
        rhs = delta * k**1.5 / 6.0
    else:
        lhs = r + s
        rhs = delta * k / 6.0
    conds["spread"] = {"lhs": lhs, "rhs": rhs, "holds": lhs <= rhs}
    failed = tuple(name for name, c in conds.items() if not c["holds"])
    return RegimeVerdict(not failed, which, failed, conds)


def prop5_tail_upper(r, s, k, delta, t) -> float:
    """2 exp(-t^2 / (8 (m_u + t))), bound on P(L >= m_u + t)."""
    _require(t >= 0, "t", t, "t >= 0")
    mu = m_upper(r, s, k, delta)
    return 2.0 * math.exp(-t * t / (8.0 * (mu + t)))


def prop5_tail_lower(r, s, k, delta, t) -> float:
    """2 exp(-t^2 / (8 m_u)), bound on P(L <= m_l - t); the exponent uses m_u."""
    _require(t >= 0, "t", t, "t >= 0")
    mu = m_upper(r, s, k, delta)
    return 2.0 * math.exp(-t * t / (8.0 * mu))


def _bdj_window(N, lam, B0, hi):
    lo = B0 / N ** (1.0 / 3.0) if B0 is not None else 0.0
    if B0 is None and lam <= 0:
        return False, "lambda must be positive"
    if lam < lo:
        return False, f"lambda < B0/N^(1/3) = {lo:.6g}"
    if lam > hi:
        return False, f"lambda > {hi:.6g}"
    return True, None


def bdj_tail_upper(N, lam, B1, c, B0=None) -> FlaggedValue:
    """B1 exp(-c lam^{3/5} N^{1/5}), window B0/N^{1/3} <= lam <= sqrt(N) - 2."""
    _require(N >= 1, "N", N, "N >= 1")
    _require(lam >= 0, "lambda", lam, "lambda >= 0")
    ok, why = _bdj_window(N, lam, B0, math.sqrt(N) - 2.0)
    return FlaggedValue(B1 * math.exp(-c * lam**0.6 * N**0.2), ok, why)


def bdj_tail_lower(N, lam, B1, c, B0=None) -> FlaggedValue:
    """B1 exp(-c lam^3 N), window B0/N^{1/3} <= lam <= 2."""
    _require(N >= 1, "N", N, "N >= 1")
    _require(lam >= 0, "lambda", lam, "lambda >= 0")
    ok, why = _bdj_window(N, lam, B0, 2.0)
    return FlaggedValue(B1 * math.exp(-c * lam**3 * N), ok, why)


def chebyshev_indicator_bound(EX, Delta, t) -> float:
    """(EX (1 - EX) + Delta) / t^2 for a sum of indicators X.

    Delta is the sum of E[X_i X_j] over ordered pairs i != j. The numerator is
    exactly Var(X), so this is Chebyshev's inequality written in those terms.
    """
    _require(t > 0, "t", t, "t > 0")
    _require(EX >= 0, "EX", EX, "EX >= 0")
    _require(Delta >= 0, "Delta", Delta, "Delta >= 0")
    return (EX * (1.0 - EX) + Delta) / (t * t)


@dataclass(frozen=True)
class TypeCountBound:
    log_count: float  # 5 * max_{q <= q_max} log C(n, q)
    argmax_q: int
    closed_form: float  # C1 (n / ell) log ell
    holds: bool
    margin: float  # closed_form - log_count


def log_binomials(n, q_max) -> np.ndarray:
    """log C(n, q) for q = 0..q_max, accumulated as sums of logs."""
    q = np.arange(1, q_max + 1, dtype=np.float64)
    steps = np.log((n - q + 1.0) / q)
    return np.concatenate([[0.0], np.cumsum(steps)])


def type_count_log_bound(n, ell, q_max, C1) -> TypeCountBound:
    _require(n >= 1, "n", n, "n >= 1")
    _require(1 <= q_max <= n, "q_max", q_max, "1 <= q_max <= n")
    _require(ell >= 1, "ell", ell, "ell >= 1")
    _require(C1 > 0, "C1", C1, "C1 > 0")
    logs = log_binomials(n, int(q_max))
    q_best = int(np.argmax(logs))
    value = 5.0 * float(logs[q_best])
    closed = C1 * (n / ell) * math.log(ell)
    return TypeCountBound(value, q_best, closed, value <= closed, closed - value)


@dataclass(frozen=True)
class BlockParameters:
    ell: int
    e_max: int
    m_max: float
    n_large_enough: bool | None  # n >= k^beta, when beta is given


def _floor_power(k, alpha):
    x = k**alpha
    # absorb rounding when k^alpha is an exact integer (e.g. 4096^(2/3))
    f = math.floor(x)
    if x - f > 1.0 - 1e-9:
        f += 1
    return f


def block_parameters(n, k, delta, epsilon, alpha, beta=None) -> BlockParameters:
    """ell = floor(k^alpha), m_max = (1+eps) 2n/sqrt(k), e_max = floor(ell m_max / (delta n))."""
    _require(n >= 1, "n", n, "n >= 1")
    _require(k >= 1, "k", k, "k >= 1")
    _require(0 < delta < 1, "delta", delta, "0 < delta < 1")
    _require(0 < epsilon < 1, "epsilon", epsilon, "0 < epsilon < 1")
    _require(0.5 < alpha < 0.75, "alpha", alpha, "1/2 < alpha < 3/4")
    if beta is not None:
        _require(alpha < beta < 0.75, "beta", beta, "alpha < beta < 3/4")
    ell = _floor_power(k, alpha)
    m_max = (1.0 + epsilon) * 2.0 * n / math.sqrt(k)
    e_max = math.floor((1.0 / delta) * (ell / n) * m_max)
    large = None if beta is None else n >= k**beta
    return BlockParameters(ell, e_max, m_max, large)


@dataclass(frozen=True)
class LowerBoundParameters:
    n_tilde: int
    epsilon: float  # from (1 - 2 delta)^2 = 1 - epsilon
    expectation_floor: float  # (1 - epsilon) 2 n_tilde / sqrt(k)
    gate_value: float  # exp(-delta^2 C_tilde / (4 (1 + delta)))
    gate_holds: bool  # gate_value <= delta
    size_condition: bool  # n_tilde >= C_tilde sqrt(k)


def lower_bound_parameters(k, delta, C_tilde) -> LowerBoundParameters:
    _require(k >= 1, "k", k, "k >= 1")
    _require(0 < delta < 1, "delta", delta, "0 < delta < 1")
    _require(C_tilde > 0, "C_tilde", C_tilde, "C_tilde > 0")
    n_tilde = math.floor(delta * k / 12.0)
    eps = 1.0 - (1.0 - 2.0 * delta) ** 2
    floor_ = (1.0 - eps) * 2.0 * n_tilde / math.sqrt(k)
    gate = math.exp(-delta * delta * C_tilde / (4.0 * (1.0 + delta)))
    return LowerBoundParameters(n_tilde, eps, floor_, gate, gate <= delta, n_tilde >= C_tilde * math.sqrt(k))


def theorem_tail_form(n, k_or_p, epsilon, c, model="words") -> float:
    """exp(-c n / sqrt(k)) for words, exp(-c n sqrt(p)) for binomial.

    ``epsilon`` is validated but does not enter: c is the constant chosen for it.
    """
    _require(n >= 1, "n", n, "n >= 1")
    _require(epsilon > 0, "epsilon", epsilon, "epsilon > 0")
    _require(c >= 0, "c", c, "c >= 0")
    if model == "words":
        _require(k_or_p >= 1, "k", k_or_p, "k >= 1")
        return math.exp(-c * n / math.sqrt(k_or_p))
    if model == "binomial":
        _require(0 < k_or_p < 1, "p", k_or_p, "0 < p < 1")
        return math.exp(-c * n * math.sqrt(k_or_p))
    raise DomainError("model", model, "'words' or 'binomial'")


def johansson_limit(p) -> float:
    """(1 + sqrt(1 - p))^2 / p: limit of E[max weight]/n for geometric weights."""
    _require(0 < p < 1, "p", p, "0 < p < 1")
    return (1.0 + math.sqrt(1.0 - p)) ** 2 / p


def odb_limit(p) -> float:
    """2 sqrt(p (1 - p)): ODB height per row, claimed for p < 1/2.

    Warns with :class:`RegimeWarning` for p >= 1/2 and still returns the value.
    """
    _require(0 < p < 1, "p", p, "0 < p < 1")
    if p >= 0.5:
        warnings.warn(f"odb_limit is stated for p < 1/2, got p={p}", RegimeWarning, stacklevel=2)
    return 2.0 * math.sqrt(p * (1.0 - p))


def odb_limit_in_regime(p) -> bool:
    return 0 < p < 0.5
