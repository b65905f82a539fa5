"""Parameters and closed-form exponent formulas for structurally damped sigma-evolution systems.

Everything here is exact: numeric inputs are converted to ``fractions.Fraction``
(floats convert exactly to their binary value), so boundary cases such as
``q == 103/26`` are classified by literal comparison without rounding.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import operator
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, MissingRegularity, ScopeError

Number = int | float | Fraction | str

DEFAULT_EPS_SLACK = Fraction(1, 1000)


def exact(x: Number) -> Fraction:
    """Convert ``x`` to a Fraction. Strings like ``"3/2"`` are accepted."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(x)


def _opt_exact(x: Number | None) -> Fraction | None:
    return None if x is None else exact(x)


class Regime(enum.Enum):
    BELOW_HALF = "BelowHalf"
    HALF = "Half"
    ABOVE_HALF = "AboveHalf"


class Theorem(enum.Enum):
    T1A = "T1A"
    T1B = "T1B"
    T2A = "T2A"
    T2B = "T2B"
    T3 = "T3"
    T4 = "T4"
    T5 = "T5"
    T6 = "T6"
    BLOWUP = "Blowup"

    @classmethod
    def parse(cls, value: "Theorem | str") -> "Theorem":
        if isinstance(value, cls):
            return value
        for member in cls:
            if value in (member.value, member.name):
                return member
        raise ValueError(f"unknown theorem {value!r}")


class Corollary(enum.Enum):
    C21 = "C21"  # any space dimension
    C22 = "C22"  # sharper, needs n > m0 * k_minus

    @classmethod
    def parse(cls, value: "Corollary | str") -> "Corollary":
        if isinstance(value, cls):
            return value
        return cls(value)


# Which coupled system each existence theorem is about.
THEOREM_SYSTEM = {
    Theorem.T1A: "UU",
    Theorem.T1B: "UU",
    Theorem.T2A: "UU",
    Theorem.T2B: "UU",
    Theorem.T3: "UU",
    Theorem.T4: "UU",
    Theorem.T5: "TT",
    Theorem.T6: "UT",
    Theorem.BLOWUP: "UU",
}


@dataclass(frozen=True)
class ModelParams:
    """Full parameter tuple of the model.

    ``p`` and ``q`` may be left unset for purely linear work; functions that
    need them raise ``DomainError``.
    """

    sigma: Fraction
    delta: Fraction
    n: int
    p: Fraction | None = None
    q: Fraction | None = None
    m: Fraction = Fraction(1)
    s1: Fraction | None = None
    s2: Fraction | None = None

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "sigma", exact(self.sigma))
        set_(self, "delta", exact(self.delta))
        set_(self, "m", exact(self.m))
        set_(self, "p", _opt_exact(self.p))
        set_(self, "q", _opt_exact(self.q))
        set_(self, "s1", _opt_exact(self.s1))
        set_(self, "s2", _opt_exact(self.s2))
        if exact(self.n).denominator != 1:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        set_(self, "n", int(self.n))

        if self.sigma < 1:
            raise ValueError(f"sigma must be >= 1, got {self.sigma}")
        if not 0 < self.delta < self.sigma:
            raise ValueError(f"delta must lie in (0, sigma), got {self.delta}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.m < 2:
            raise ValueError(f"m must lie in [1, 2), got {self.m}")
        for name in ("p", "q"):
            val = getattr(self, name)
            if val is not None and val <= 1:
                raise ValueError(f"{name} must be > 1, got {val}")
        for name in ("s1", "s2"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be >= 0, got {val}")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    @property
    def exponents(self) -> tuple[Fraction, Fraction]:
        if self.p is None or self.q is None:
            raise DomainError("p and q must both be set")
        return self.p, self.q

    def as_dict(self) -> dict:
        out = {}
        for key in ("sigma", "delta", "n", "p", "q", "m", "s1", "s2"):
            val = getattr(self, key)
            out[key] = None if val is None else (val if isinstance(val, int) else str(val))
        return out


@dataclass(frozen=True)
class DerivedConstants:
    k_minus: Fraction
    k_plus: Fraction
    m0: Fraction
    regime: Regime


def derive_constants(params: ModelParams) -> DerivedConstants:
    sigma, two_delta = params.sigma, 2 * params.delta
    if two_delta < sigma:
        regime = Regime.BELOW_HALF
    elif two_delta == sigma:
        regime = Regime.HALF
    else:
        regime = Regime.ABOVE_HALF
    return DerivedConstants(
        k_minus=min(sigma, two_delta),
        k_plus=max(sigma, two_delta),
        m0=2 * params.m / (2 - params.m),
        regime=regime,
    )


def critical_exponent(params: ModelParams) -> Fraction:
    """Threshold ``1 + m(k+ + sigma) / (n - m k-)`` separating the two existence regimes."""
    c = derive_constants(params)
    denom = params.n - params.m * c.k_minus
    if denom <= 0:
        raise DomainError(f"critical exponent needs n > m*k_minus, got n={params.n}, m*k_minus={params.m * c.k_minus}")
    return 1 + params.m * (c.k_plus + params.sigma) / denom


# --------------------------------------------------------------------------
# region checks

_OPS = {
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
}


@dataclass(frozen=True)
class Violation:
    """One failed inequality ``lhs <relation> rhs``, both sides evaluated."""

    name: str
    lhs: Fraction
    relation: str
    rhs: Fraction

    def __str__(self) -> str:
        return f"{self.name}: {_fmt(self.lhs)} {self.relation} {_fmt(self.rhs)} fails"


def _fmt(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x} (~{float(x):.6g})"
    return str(x)


@dataclass(frozen=True)
class RegionVerdict:
    theorem: Theorem
    admissible: bool
    violated: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def first_violated(self) -> str:
        return self.violated[0].name if self.violated else ""


class _Checker:
    """Evaluates every constraint and keeps the failing ones (no short-circuit)."""

    def __init__(self):
        self.violated: list[Violation] = []

    def require(self, name: str, lhs, relation: str, rhs) -> bool:
        ok = _OPS[relation](lhs, rhs)
        if not ok:
            self.violated.append(Violation(name, lhs, relation, rhs))
        return ok

    def verdict(self, theorem: Theorem) -> RegionVerdict:
        return RegionVerdict(theorem, not self.violated, tuple(self.violated))


def _needs_regularity(params: ModelParams, theorem: Theorem, both: bool = True):
    missing = [k for k in (("s1", "s2") if both else ("s1",)) if getattr(params, k) is None]
    if missing:
        raise MissingRegularity(f"{theorem.value} needs {', '.join(missing)}")


def _critical_or_none(params: ModelParams, ck: _Checker) -> Fraction | None:
    c = derive_constants(params)
    if ck.require("n_gt_m_kminus", Fraction(params.n), ">", params.m * c.k_minus):
        return critical_exponent(params)
    return None


def _loss_regime_conditions(params: ModelParams, ck: _Checker):
    """Exponent conditions of the loss-of-decay theorems (1-A, 2-A)."""
    c = derive_constants(params)
    p, q = params.exponents
    lo, hi = min(p, q), max(p, q)
    weighted = params.m * (c.k_minus + (c.k_plus + params.sigma) * (1 + hi) / (p * q - 1))
    ck.require("weighted_sum_lt_n", weighted, "<", Fraction(params.n))
    crit = _critical_or_none(params, ck)
    if crit is not None:
        ck.require("min_exponent_le_critical", lo, "<=", crit)
        ck.require("critical_lt_max_exponent", crit, "<", hi)


def _above_critical(params: ModelParams, ck: _Checker):
    p, q = params.exponents
    crit = _critical_or_none(params, ck)
    if crit is not None:
        ck.require("min_exponent_gt_critical", min(p, q), ">", crit)


def _dimension_floor(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    ck.require("n_gt_m0_kminus", Fraction(params.n), ">", c.m0 * c.k_minus)


def _energy_gn(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    n, m = Fraction(params.n), params.m
    two_over_m = 2 / m
    ck.require("p_ge_2_over_m", p, ">=", two_over_m)
    ck.require("q_ge_2_over_m", q, ">=", two_over_m)
    if n <= 2 * c.k_plus:
        return
    top = 4 * c.k_plus / (2 - m)
    if ck.require("n_le_gn_dimension_limit", n, "<=", top):
        bound = n / (n - 2 * c.k_plus)
        ck.require("p_le_gn_upper", p, "<=", bound)
        ck.require("q_le_gn_upper", q, "<=", bound)


def _sobolev_gn(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    s1, s2 = params.s1, params.s2
    n, m = Fraction(params.n), params.m
    ck.require("s1_gt_0", s1, ">", 0)
    ck.require("s1_le_s2", s1, "<=", s2)
    ck.require("s2_lt_kplus", s2, "<", c.k_plus)
    two_over_m = 2 / m
    ck.require("p_ge_2_over_m", p, ">=", two_over_m)
    ck.require("q_ge_2_over_m", q, ">=", two_over_m)
    if n <= 2 * s1:
        return
    top = 4 * s1 / (2 - m)
    if n <= min(2 * s2, top):
        ck.require("q_le_gn_upper_s1", q, "<=", n / (n - 2 * s1))
    elif 2 * s2 < n <= top:
        ck.require("p_le_gn_upper_s2", p, "<=", n / (n - 2 * s2))
        ck.require("q_le_gn_upper_s1", q, "<=", n / (n - 2 * s1))
    else:
        ck.require("n_le_gn_dimension_limit", n, "<=", top)


def _regular_lower_bounds(params: ModelParams, ck: _Checker, s_p: Fraction, s_q: Fraction):
    c = derive_constants(params)
    p, q = params.exponents
    denom = params.n - params.m * c.k_minus
    if denom > 0:
        ck.require("p_ge_regularity_bound", p, ">=", 1 + params.m * s_p / denom)
        ck.require("q_ge_regularity_bound", q, ">=", 1 + params.m * s_q / denom)


def _time_derivative_bound(params: ModelParams, s: Fraction) -> Fraction:
    c = derive_constants(params)
    return 1 + params.m * (s + c.k_minus - 2 * params.sigma) / (params.n + 2 * params.m * (c.k_plus - 2 * params.delta))


def _check_t3(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    s1, s2, n = params.s1, params.s2, Fraction(params.n)
    ck.require("s1_gt_kplus", s1, ">", c.k_plus)
    ck.require("s1_le_s2", s1, "<=", s2)
    ck.require("s2_le_half_n_plus_kplus", s2, "<=", n / 2 + c.k_plus)
    ck.require("s2_minus_s1_lt_kplus", s2 - s1, "<", c.k_plus)
    _dimension_floor(params, ck)
    ck.require("p_gt_chain_rule_bound", p, ">", 1 + math.ceil(s1 - c.k_plus))
    ck.require("q_gt_chain_rule_bound", q, ">", 1 + math.ceil(s2 - c.k_plus))
    if 2 * s1 < n <= 2 * s2:
        ck.require("q_le_gn_upper_s1", q, "<=", 1 + 2 * c.k_plus / (n - 2 * s1))
    elif n > 2 * s2:
        ck.require("p_le_gn_upper_s2", p, "<=", 1 + 2 * c.k_plus / (n - 2 * s2))
        ck.require("q_le_gn_upper_s1", q, "<=", 1 + 2 * c.k_plus / (n - 2 * s1))
    _above_critical(params, ck)
    _regular_lower_bounds(params, ck, s1, s2)


def _check_t4(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    s1, s2, n = params.s1, params.s2, Fraction(params.n)
    ck.require("s1_gt_half_n_plus_kplus", s1, ">", n / 2 + c.k_plus)
    ck.require("s1_le_s2", s1, "<=", s2)
    ck.require("s2_minus_s1_le_kplus", s2 - s1, "<=", c.k_plus)
    _dimension_floor(params, ck)
    ck.require("p_gt_embedding_bound", p, ">", 1 + max(s1 - c.k_plus, Fraction(1)))
    ck.require("q_gt_embedding_bound", q, ">", 1 + max(s2 - c.k_plus, Fraction(1)))
    _above_critical(params, ck)
    _regular_lower_bounds(params, ck, s1, s2)


def _check_t5(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    s, n = params.s1, Fraction(params.n)
    if params.s2 is not None:
        ck.require("s1_eq_s2", params.s1, "==", params.s2)
    ck.require("s_gt_half_n_plus_kplus", s, ">", n / 2 + c.k_plus)
    _dimension_floor(params, ck)
    lo = min(p, q)
    ck.require("min_exponent_gt_embedding_bound", lo, ">",
               1 + max(2 * params.m * params.delta / n, s - c.k_plus, Fraction(1)))
    ck.require("min_exponent_ge_derivative_bound", lo, ">=", _time_derivative_bound(params, s))


def _check_t6(params: ModelParams, ck: _Checker):
    c = derive_constants(params)
    p, q = params.exponents
    s1, s2, n = params.s1, params.s2, Fraction(params.n)
    ck.require("s2_gt_half_n_plus_kplus", s2, ">", n / 2 + c.k_plus)
    ck.require("s2_le_s1", s2, "<=", s1)
    ck.require("s1_minus_s2_le_kplus", s1 - s2, "<=", c.k_plus)
    _dimension_floor(params, ck)
    denom = n - params.m * c.k_minus
    crit_gap = params.m * (c.k_plus + params.sigma) / denom if denom > 0 else None
    if crit_gap is None:
        ck.require("n_gt_m_kminus", n, ">", params.m * c.k_minus)
    else:
        ck.require("p_gt_embedding_bound", p, ">", 1 + max(crit_gap, s1 - c.k_plus, Fraction(1)))
        ck.require("p_ge_regularity_bound", p, ">=", 1 + params.m * s1 / denom)
    ck.require("q_gt_embedding_bound", q, ">",
               1 + max(2 * params.m * params.delta / n, s2 - c.k_plus, Fraction(1)))
    ck.require("q_ge_derivative_bound", q, ">=", _time_derivative_bound(params, s2))


def check_region(params: ModelParams, theorem: Theorem | str) -> RegionVerdict:
    """Evaluate every hypothesis of ``theorem`` at ``params``.

    All constraints are evaluated, and every failing one is reported with
    both sides, so the verdict can drive a phase diagram.
    """
    theorem = Theorem.parse(theorem)
    if theorem is Theorem.BLOWUP:
        return blowup_condition(params)
    params.exponents  # raises if p or q unset
    ck = _Checker()
    if theorem in (Theorem.T1A, Theorem.T1B):
        _dimension_floor(params, ck)
        _energy_gn(params, ck)
        if theorem is Theorem.T1A:
            _loss_regime_conditions(params, ck)
        else:
            _above_critical(params, ck)
    elif theorem in (Theorem.T2A, Theorem.T2B):
        _needs_regularity(params, theorem)
        _dimension_floor(params, ck)
        _sobolev_gn(params, ck)
        if theorem is Theorem.T2A:
            _loss_regime_conditions(params, ck)
        else:
            _above_critical(params, ck)
    elif theorem is Theorem.T3:
        _needs_regularity(params, theorem)
        _check_t3(params, ck)
    elif theorem is Theorem.T4:
        _needs_regularity(params, theorem)
        _check_t4(params, ck)
    elif theorem is Theorem.T5:
        _needs_regularity(params, theorem, both=False)
        _check_t5(params, ck)
    elif theorem is Theorem.T6:
        _needs_regularity(params, theorem)
        _check_t6(params, ck)
    return ck.verdict(theorem)


def blowup_condition(params: ModelParams) -> RegionVerdict:
    """Blow-up dimension condition for integer sigma and delta.

    ``admissible`` means the nonexistence statement applies (for data with
    positive integral of ``u1 + (-Delta)^delta u0`` and likewise for v).
    """
    if params.sigma.denominator != 1 or params.delta.denominator != 1:
        raise ScopeError(
            f"blow-up statement needs integer sigma and delta, got sigma={params.sigma}, delta={params.delta}"
        )
    p, q = params.exponents
    c = derive_constants(params)
    ck = _Checker()
    rhs = c.k_minus + 2 * params.sigma * (1 + max(p, q)) / (p * q - 1)
    ck.require("n_le_blowup_bound", Fraction(params.n), "<=", rhs)
    return ck.verdict(Theorem.BLOWUP)


def lifespan_exponent(params: ModelParams) -> Fraction:
    """Power of epsilon in the lifespan upper bound ``T_eps <= C eps^(this)``.

    Uses the convention ``q = max(p, q)``.
    """
    if params.sigma.denominator != 1 or params.delta.denominator != 1:
        raise ScopeError("lifespan estimate needs integer sigma and delta")
    p, q = params.exponents
    p, q = min(p, q), max(p, q)
    c = derive_constants(params)
    denom = c.k_minus + 2 * params.sigma * (q + 1) / (p * q) - params.n
    if denom <= 0:
        raise DomainError(f"no power-law lifespan: denominator {denom} <= 0")
    return -(2 * params.sigma - c.k_minus) / denom


# --------------------------------------------------------------------------
# decay rates


def loss_of_decay(params: ModelParams, exponent: Number, eps_slack: Number = DEFAULT_EPS_SLACK) -> Fraction:
    """Positive part of the loss-of-decay term attached to a power ``exponent``."""
    c = derive_constants(params)
    e = exact(exponent)
    width = c.k_plus - params.delta
    val = 1 - params.n * (e - 1) / (2 * params.m * width) + e * c.k_minus / (2 * width) + exact(eps_slack)
    return max(val, Fraction(0))


@dataclass(frozen=True)
class DecayPrediction:
    """Time exponents for ``||d_t^j |D|^a w(t)||_{L^2}`` from w0 and from w1 data.

    ``reg_data0`` and ``reg_data1`` are the Sobolev orders the data need.
    """

    j: int
    a: Fraction
    exponent_data0: Fraction
    exponent_data1: Fraction
    loss: Fraction
    corollary: Corollary
    m: Fraction
    reg_data0: Fraction
    reg_data1: Fraction


def decay_prediction(
    params: ModelParams,
    j: int,
    a: Number,
    corollary: Corollary | str = Corollary.C22,
    m: Number | None = None,
) -> DecayPrediction:
    """Linear decay exponents.

    ``m`` overrides ``params.m``; ``m=2`` selects the L^2-L^2 branch, where
    the factor ``1/m - 1/2`` vanishes and the dimension restriction is void.
    """
    corollary = Corollary.parse(corollary)
    if j not in (0, 1):
        raise ValueError(f"j must be 0 or 1, got {j}")
    a = exact(a)
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a}")
    m = params.m if m is None else exact(m)
    if not 1 <= m <= 2:
        raise ValueError(f"m must lie in [1, 2], got {m}")
    c = derive_constants(params)
    width = 2 * (c.k_plus - params.delta)
    gain = params.n * (1 / m - Fraction(1, 2)) / width
    if corollary is Corollary.C22:
        if m < 2:
            m0 = 2 * m / (2 - m)
            if params.n <= m0 * c.k_minus:
                raise DomainError(
                    f"sharper estimate needs n > m0*k_minus = {m0 * c.k_minus}, got n={params.n}"
                )
        e0 = -gain - (a + j * (2 * params.sigma - c.k_minus)) / width
        e1 = e0 + c.k_minus / width
    else:
        e0 = -gain - (a + j * c.k_minus) / width
        e1 = e0 + 1
    return DecayPrediction(
        j=j,
        a=a,
        exponent_data0=e0,
        exponent_data1=e1,
        loss=Fraction(0),
        corollary=corollary,
        m=m,
        reg_data0=a + j * (2 * params.sigma - c.k_plus),
        reg_data1=max(a + (j - 1) * c.k_plus, Fraction(0)),
    )


@dataclass(frozen=True)
class RateLine:
    component: str  # "u" or "v"
    j: int
    a: Fraction
    exponent: Fraction
    loss: Fraction


def _rate_schedule(params: ModelParams, theorem: Theorem):
    c = derive_constants(params)
    kp = c.k_plus
    if theorem in (Theorem.T1A, Theorem.T1B):
        return {"u": [(0, 0), (0, kp), (1, 0)], "v": [(0, 0), (0, kp), (1, 0)]}
    if theorem in (Theorem.T2A, Theorem.T2B):
        return {"u": [(0, 0), (0, params.s1)], "v": [(0, 0), (0, params.s2)]}
    if theorem in (Theorem.T3, Theorem.T4, Theorem.T6):
        s1, s2 = params.s1, params.s2
        return {"u": [(0, 0), (1, 0), (0, s1), (1, s1 - kp)], "v": [(0, 0), (1, 0), (0, s2), (1, s2 - kp)]}
    if theorem is Theorem.T5:
        s = params.s1
        return {"u": [(0, 0), (1, 0), (0, s), (1, s - kp)], "v": [(0, 0), (1, 0), (0, s), (1, s - kp)]}
    raise ValueError(f"no decay statement for {theorem.value}")


def theorem_rates(params: ModelParams, theorem: Theorem | str, eps_slack: Number = DEFAULT_EPS_SLACK) -> list[RateLine]:
    """Decay exponents asserted for the semilinear solution under ``theorem``.

    The loss-of-decay theorems add ``[eps(p)]^+`` to u and ``[eps(q)]^+`` to v.
    """
    theorem = Theorem.parse(theorem)
    sched = _rate_schedule(params, theorem)
    lossy = theorem in (Theorem.T1A, Theorem.T2A)
    out = []
    for comp, pairs in sched.items():
        loss = Fraction(0)
        if lossy:
            p, q = params.exponents
            loss = loss_of_decay(params, p if comp == "u" else q, eps_slack)
        for j, a in pairs:
            pred = decay_prediction(params, j, a, Corollary.C22)
            out.append(RateLine(comp, j, exact(a), pred.exponent_data1 + loss, loss))
    return out


# --------------------------------------------------------------------------
# phase diagram


EXISTENCE_THEOREMS = (Theorem.T1A, Theorem.T1B, Theorem.T2A, Theorem.T2B, Theorem.T3, Theorem.T4, Theorem.T5, Theorem.T6)


def phase_diagram(
    params: ModelParams,
    p_values: Iterable[Number],
    q_values: Iterable[Number],
    theorems: Sequence[Theorem | str] | None = None,
) -> list[dict]:
    """Region verdicts on a (p, q) grid.

    Theorems whose prerequisites are absent (missing s1/s2, non-integer
    sigma for blow-up) are reported with ``admissible = None``.
    """
    if theorems is None:
        theorems = EXISTENCE_THEOREMS + (Theorem.BLOWUP,)
    theorems = [Theorem.parse(t) for t in theorems]
    rows = []
    q_values = [exact(q) for q in q_values]
    for p in p_values:
        p = exact(p)
        for q in q_values:
            point = params.with_(p=p, q=q)
            for th in theorems:
                try:
                    v = check_region(point, th)
                    admissible, first = v.admissible, v.first_violated
                except (MissingRegularity, ScopeError) as exc:
                    admissible, first = None, f"out_of_scope: {exc}"
                rows.append({"p": p, "q": q, "theorem": th.value, "admissible": admissible, "first_violated": first})
    return rows


PHASE_COLUMNS = ("p", "q", "theorem", "admissible", "first_violated")


def phase_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(PHASE_COLUMNS)
    for r in rows:
        adm = r["admissible"]
        writer.writerow([
            _num_str(r["p"]),
            _num_str(r["q"]),
            r["theorem"],
            "" if adm is None else str(adm).lower(),
            r["first_violated"],
        ])
    return buf.getvalue()


def _num_str(x) -> str:
    x = exact(x)
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))
