"""Closed-form bound evaluators and exact rational exponent-range arithmetic.

Two kinds of machinery live here:

- floating-point evaluators for the proven right-hand sides (the coprime
  trilinear bound, its fixed-denominator-factor refinement, and the
  squarefree mean-square bound), each reporting its additive terms
  separately so term dominance can be studied, plus an empirical
  implied-constant estimator over a list of reports;
- exact ``fractions.Fraction`` arithmetic for the admissible exponent
  ranges of the unbalanced-convolution corollaries (nothing here ever
  rounds: every comparison is a rational comparison).

Reporting convention: ``terms`` are the displayed additive terms of a
formula (sizes only); ``scale`` collects the displayed global multipliers
(norms, the (1 + |theta| A / ...)^(1/2 or 1/4) prefactor, the epsilon
bump); ``total = scale * sum(terms)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = [
    "EmptyList",
    "ZeroRHS",
    "InvalidExponent",
    "RationalExponent",
    "RhsReport",
    "BoundReport",
    "ConstantEstimate",
    "NExponentCeiling",
    "ConditionResult",
    "RangeCheck",
    "parse_exponent",
    "rhs_trilinear_coprime",
    "rhs_trilinear_fixed_factor",
    "rhs_mean_square_bound",
    "implied_constant_estimate",
    "admissible_n_exponent",
    "extremal_q_exponent",
    "check_range_conditions",
    "COROLLARY_TABLES",
    "FIXED_N_CAPS",
    "HANDOFF_N_EXPONENT",
]

# Exponents of X are exact rationals throughout the range arithmetic.
RationalExponent = Fraction


class EmptyList(ValueError):
    """Raised when an estimate is requested over no reports."""


class ZeroRHS(ValueError):
    """Raised when a report in an estimate has rhs_total = 0."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"report at index {index} has zero right-hand side")


class InvalidExponent(ValueError):
    """Raised for exponents outside their admissible interval or unparseable text."""


def parse_exponent(text: str) -> Fraction:
    """Parse "p/q" (or a plain integer/decimal) into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidExponent(f"cannot parse exponent {text!r}: {exc}") from None


@dataclass(frozen=True)
class RhsReport:
    """Right-hand side of a bound: named additive terms, the global scale
    multiplier, the combined total, hypothesis flags, and extra diagnostics."""

    terms: tuple[tuple[str, float], ...]
    scale: float
    total: float
    flags: tuple[str, ...] = ()
    meta: Mapping[str, float] = field(default_factory=dict)

    def term(self, name: str) -> float:
        for key, val in self.terms:
            if key == name:
                return val
        raise KeyError(name)

    def term_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.terms)


@dataclass(frozen=True)
class BoundReport:
    """A measured left-hand side against an evaluated right-hand side."""

    lhs: float
    rhs: RhsReport
    params: Mapping[str, object] = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        if self.rhs.total > 0:
            return self.lhs / self.rhs.total
        return math.nan


def _sum_report(
    terms: Sequence[tuple[str, float]],
    scale: float,
    flags: Sequence[str] = (),
    meta: Mapping[str, float] | None = None,
) -> RhsReport:
    total = scale * math.fsum(v for _, v in terms)
    return RhsReport(tuple(terms), scale, total, tuple(flags), dict(meta or {}))


def rhs_trilinear_coprime(
    M: float,
    N: float,
    A: float,
    theta: int,
    norms: tuple[float, float, float],
    epsilon: float = 0.0,
) -> RhsReport:
    """The two-term bound for the coprime trilinear form (no fixed factor):

        norms * (1 + |theta| A / (MN))^(1/2)
              * ( (AMN)^(7/20+eps) (M+N)^(1/4) + (AMN)^(3/8+eps) (AN+AM)^(1/8) )
    """
    amn = A * M * N
    terms = [
        ("term1", amn ** (7 / 20 + epsilon) * (M + N) ** (1 / 4)),
        ("term2", amn ** (3 / 8 + epsilon) * (A * N + A * M) ** (1 / 8)),
    ]
    prefactor = math.sqrt(1.0 + abs(theta) * A / (M * N))
    scale = norms[0] * norms[1] * norms[2] * prefactor
    return _sum_report(terms, scale, meta={"prefactor": prefactor})


_VARIANT_ALIASES = {
    "statement": "statement",
    "theorem_statement": "statement",
    "proof": "proof",
    "proof_final": "proof",
}


def rhs_trilinear_fixed_factor(
    M: float,
    N: float,
    A: float,
    R: float,
    theta: int,
    norms: tuple[float, float, float],
    epsilon: float = 0.0,
    exponent_variant: str = "statement",
) -> RhsReport:
    """The five-term bound for the trilinear form with fixed denominator factor R:

        M^eps * norms * (AMN)^(1/2) R^(1/4) (1 + |theta| A / (MN))^(1/4)
          * ( 1/N^(1/8) + R^(1/8) N^(1/8) / M^(1/4)
            + M^(1/10) / (R^(3/20) A^x N^(3/20))
            + N^(3/20) / (A^(3/20) M^(1/5)) + N^(3/8) / M^(1/2) )

    The A-exponent x in the third term is 1/20 under variant "statement" and
    3/10 under variant "proof"; the two displayed versions disagree and both
    are exposed.  The working hypotheses M << N^2 and R << M^A are not
    enforced; violations are reported as flags and the value is still
    computed so sweeps can map where the formula degrades.
    """
    variant = _VARIANT_ALIASES.get(exponent_variant)
    if variant is None:
        raise ValueError(f"unknown exponent_variant {exponent_variant!r}")
    x3 = 1 / 20 if variant == "statement" else 3 / 10
    terms = [
        ("term1", N ** (-1 / 8)),
        ("term2", R ** (1 / 8) * N ** (1 / 8) / M ** (1 / 4)),
        ("term3", M ** (1 / 10) / (R ** (3 / 20) * A**x3 * N ** (3 / 20))),
        ("term4", N ** (3 / 20) / (A ** (3 / 20) * M ** (1 / 5))),
        ("term5", N ** (3 / 8) / M ** (1 / 2)),
    ]
    flags = []
    if M > N * N:
        flags.append("M>N^2")
    if (M > 1 and math.log(R) > A * math.log(M)) or (M <= 1 and R > 1):
        flags.append("R>M^A")
    prefactor = (1.0 + abs(theta) * A / (M * N)) ** (1 / 4)
    scale = (
        M**epsilon
        * norms[0]
        * norms[1]
        * norms[2]
        * (A * M * N) ** (1 / 2)
        * R ** (1 / 4)
        * prefactor
    )
    return _sum_report(terms, scale, flags, meta={"prefactor": prefactor})


def rhs_mean_square_bound(
    M: float,
    N: float,
    A: float,
    b: float,
    theta: int,
    norms_beta_nu: tuple[float, float],
    epsilon: float = 0.0,
) -> RhsReport:
    """The six-term bound for the squarefree mean square with denominator n*b:

        ||beta||^2 ||nu||^2 M^eps (1 + |theta| A / (bMN))^(1/2)
          * ( AM(bN)^(1/2) + b^(3/4) A M^(1/2) N^(5/4) + A M^(6/5) N^(1/10) / b^(2/5)
            + b^(1/5) A^(2/5) M^(6/5) N^(7/10) + b^(1/2) A^(7/10) M^(3/5) N^(13/10)
            + b^(1/2) A N^(7/4) )
    """
    terms = [
        ("term1", A * M * (b * N) ** (1 / 2)),
        ("term2", b ** (3 / 4) * A * M ** (1 / 2) * N ** (5 / 4)),
        ("term3", A * M ** (6 / 5) * N ** (1 / 10) / b ** (2 / 5)),
        ("term4", b ** (1 / 5) * A ** (2 / 5) * M ** (6 / 5) * N ** (7 / 10)),
        ("term5", b ** (1 / 2) * A ** (7 / 10) * M ** (3 / 5) * N ** (13 / 10)),
        ("term6", b ** (1 / 2) * A * N ** (7 / 4)),
    ]
    prefactor = math.sqrt(1.0 + abs(theta) * A / (b * M * N))
    scale = norms_beta_nu[0] ** 2 * norms_beta_nu[1] ** 2 * M**epsilon * prefactor
    return _sum_report(terms, scale, meta={"prefactor": prefactor})


@dataclass(frozen=True)
class ConstantEstimate:
    max_ratio: float
    argmax_index: int
    argmax_params: Mapping[str, object]


def implied_constant_estimate(reports: Sequence[BoundReport]) -> ConstantEstimate:
    """Empirical implied constant: the max lhs/rhs ratio over the reports,
    together with the parameter point achieving it."""
    if not reports:
        raise EmptyList("no reports supplied")
    for i, rep in enumerate(reports):
        if not rep.rhs.total > 0:
            raise ZeroRHS(i)
    best = max(range(len(reports)), key=lambda i: reports[i].ratio)
    return ConstantEstimate(reports[best].ratio, best, dict(reports[best].params))


# ---------------------------------------------------------------------------
# Exact exponent-range arithmetic for the unbalanced-convolution corollaries.
#
# Each corollary admits N <= X^(ceiling) under one of three variants:
#   (i)  a ceiling linear in the Q-exponent,
#   (ii)/(iii) fixed ceilings valid up to a Q-exponent cap.
# "new" is the fixed-factor improvement; "fr" the baseline it improves on.
# ---------------------------------------------------------------------------

COROLLARY_TABLES: dict[str, dict[str, Fraction]] = {
    "new": {
        "i_const": Fraction(17, 28),
        "i_slope": Fraction(33, 28),
        "q_cap": Fraction(45, 89),
    },
    "fr": {
        "i_const": Fraction(17, 36),
        "i_slope": Fraction(11, 12),
        "q_cap": Fraction(53, 105),
    },
}

FIXED_N_CAPS: dict[str, Fraction] = {
    "ii": Fraction(7, 90),
    "iii": Fraction(101, 630),
}

# N-exponent where variants (ii)/(iii) hand off to the complementary
# wide-modulus ranges: the variant-(i) ceiling evaluated at the Q-cap.
HANDOFF_N_EXPONENT = Fraction(1, 89)

_COROLLARY_ALIASES = {
    "new": "new",
    "new_cor": "new",
    "fr": "fr",
    "fr_cor11": "fr",
}


def _corollary_key(corollary: str) -> str:
    key = _COROLLARY_ALIASES.get(str(corollary).lower())
    if key is None:
        raise ValueError(f"unknown corollary {corollary!r}; expected 'fr' or 'new'")
    return key


@dataclass(frozen=True)
class NExponentCeiling:
    """Exact N-exponent ceiling (before the -eps) for one corollary variant."""

    corollary: str
    variant: str
    q_exp: Fraction
    ceiling: Fraction
    feasible: bool
    q_admissible: bool
    extremal_q: Fraction


def extremal_q_exponent(corollary: str) -> Fraction:
    """The Q-exponent at which the variant-(i) ceiling hits zero."""
    tab = COROLLARY_TABLES[_corollary_key(corollary)]
    return tab["i_const"] / tab["i_slope"]


def admissible_n_exponent(corollary: str, variant: str, q_exp: Fraction) -> NExponentCeiling:
    """Exact rational N-exponent ceiling for the given corollary and variant.

    Variant "i" returns const - slope * q_exp (negative means the variant is
    infeasible at that Q-exponent).  Variants "ii"/"iii" return their fixed
    caps and report whether q_exp lies under the corollary's Q-cap; the -eps
    slack of the actual statements is left to the caller.
    """
    key = _corollary_key(corollary)
    q = Fraction(q_exp)
    if not Fraction(0) < q < Fraction(1):
        raise InvalidExponent(f"q-exponent must lie in (0, 1), got {q}")
    tab = COROLLARY_TABLES[key]
    if variant == "i":
        ceiling = tab["i_const"] - tab["i_slope"] * q
        extremal = tab["i_const"] / tab["i_slope"]
        return NExponentCeiling(key, variant, q, ceiling, ceiling > 0, q < extremal, extremal)
    if variant in ("ii", "iii"):
        cap = FIXED_N_CAPS[variant]
        ok = q <= tab["q_cap"]
        return NExponentCeiling(key, variant, q, cap, ok, ok, tab["q_cap"])
    raise ValueError(f"unknown variant {variant!r}; expected 'i', 'ii' or 'iii'")


@dataclass(frozen=True)
class ConditionResult:
    satisfied: bool
    slack: Fraction


@dataclass(frozen=True)
class RangeCheck:
    variants: frozenset[str]
    conditions: Mapping[str, ConditionResult]
    m_exp: Fraction


def check_range_conditions(
    n_exp: Fraction,
    q_exp: Fraction,
    a_exp: Fraction,
    epsilon: Fraction,
    corollary: str = "new",
) -> RangeCheck:
    """Exact rational check of the admissibility conditions at a parameter point.

    The M-exponent is inferred as 1 - n_exp (the product of the two ranges
    sits at X).  Returns per-condition truth values with their exact slacks,
    the set of satisfied variants, and flags for the two classical
    complementary ranges Q <= min(sqrt(NX), X^(4/7) N^(-6/7)) and
    Q <= min(sqrt(NX), X^(5/8) N^(-3/4)).
    """
    key = _corollary_key(corollary)
    n = Fraction(n_exp)
    q = Fraction(q_exp)
    a = Fraction(a_exp)
    eps = Fraction(epsilon)
    if not Fraction(0) < n < Fraction(1):
        raise InvalidExponent(f"n-exponent must lie in (0, 1), got {n}")
    if not Fraction(0) < q < Fraction(1):
        raise InvalidExponent(f"q-exponent must lie in (0, 1), got {q}")
    if a < 0 or a > 1:
        raise InvalidExponent(f"a-exponent must lie in [0, 1], got {a}")
    if eps < 0 or eps >= 1:
        raise InvalidExponent(f"epsilon must lie in [0, 1), got {eps}")
    m = 1 - n
    tab = COROLLARY_TABLES[key]

    def strict(slack: Fraction) -> ConditionResult:
        return ConditionResult(slack > 0, slack)

    def weak(slack: Fraction) -> ConditionResult:
        return ConditionResult(slack >= 0, slack)

    conds: dict[str, ConditionResult] = {}
    # The two size conditions the variant-(i) ceiling is solved from.
    conds["mqn1"] = strict((1 - eps) - (m / 2 + q * Fraction(15, 16) + n * Fraction(11, 8)))
    conds["mqn2"] = strict(
        (1 - eps) - (m * Fraction(23, 40) + q * Fraction(33, 40) + n * Fraction(51, 40))
    )
    ceiling_i = tab["i_const"] - tab["i_slope"] * q
    conds["n_ceiling_i"] = weak((ceiling_i - eps) - n)
    conds["n_cap_ii"] = weak((FIXED_N_CAPS["ii"] - eps) - n)
    conds["n_cap_iii"] = weak((FIXED_N_CAPS["iii"] - eps) - n)
    conds["q_cap"] = weak((tab["q_cap"] - eps) - q)
    conds["a_bounded"] = weak(1 - a)
    conds["a_tiny"] = weak(eps / 1000 - a)
    # Complementary classical ranges (wide-modulus regimes).
    sqrt_nx = (1 + n) / 2
    conds["complement_range_47"] = weak(min(sqrt_nx, Fraction(4, 7) - Fraction(6, 7) * n) - eps - q)
    conds["complement_range_58"] = weak(min(sqrt_nx, Fraction(5, 8) - Fraction(3, 4) * n) - eps - q)

    variants = set()
    if conds["n_ceiling_i"].satisfied and conds["a_bounded"].satisfied:
        variants.add("i")
    if conds["n_cap_ii"].satisfied and conds["q_cap"].satisfied and conds["a_bounded"].satisfied:
        variants.add("ii")
    if conds["n_cap_iii"].satisfied and conds["q_cap"].satisfied and conds["a_tiny"].satisfied:
        variants.add("iii")
    return RangeCheck(frozenset(variants), conds, m)
