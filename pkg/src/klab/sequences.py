"""Coefficient sequences, dyadic supports, and an equidistribution checker.

A :class:`CoefficientSequence` is an immutable complex-valued map on a
finite integer support with cached l1/l2 norms and an optional divisor
bound tag (|value(n)| <= tau_k(n)).  Sequences can be built from a few
standard kinds, serialized to a plain text table, and probed for their
discrepancy in arithmetic progressions.
"""

from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from math import fsum, gcd
from typing import Iterable, Iterator, Mapping, NamedTuple

from .arith import euler_phi, moebius, tau_k

__all__ = [
    "EmptySupport",
    "NotCoprime",
    "DivisorBoundViolation",
    "DyadicRange",
    "CoefficientSequence",
    "Norms",
    "set_default_convention",
    "default_convention",
    "make_sequence",
    "build_sequence",
    "sequence_norms",
    "sw_discrepancy",
    "sw_discrepancy_table",
    "sequence_to_text",
    "sequence_from_text",
]

CONVENTIONS = ("half-open", "closed")

_default_convention = "half-open"


class EmptySupport(ValueError):
    """Raised when a sequence is requested on an empty support."""


class NotCoprime(ValueError):
    """Raised when a residue class a mod q with gcd(a, q) > 1 is supplied."""


class DivisorBoundViolation(ValueError):
    """Raised when divisor_bound_k is asserted but some |value(n)| > tau_k(n)."""


def set_default_convention(convention: str) -> None:
    """Set the global dyadic-range convention ("half-open" (T, 2T] or "closed" [T, 2T])."""
    global _default_convention
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    _default_convention = convention


def default_convention() -> str:
    return _default_convention


@dataclass(frozen=True)
class DyadicRange:
    """The integers in (T, 2T] (half-open) or [T, 2T] (closed) for base T."""

    base: int
    convention: str | None = None

    def __post_init__(self):
        if self.base < 1:
            raise ValueError(f"base must be positive, got {self.base}")
        conv = self.convention if self.convention is not None else _default_convention
        if conv not in CONVENTIONS:
            raise ValueError(f"unknown convention {conv!r}; expected one of {CONVENTIONS}")
        object.__setattr__(self, "convention", conv)

    def indices(self) -> range:
        if self.convention == "half-open":
            return range(self.base + 1, 2 * self.base + 1)
        return range(self.base, 2 * self.base + 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices())

    def __len__(self) -> int:
        return len(self.indices())

    def __contains__(self, n: object) -> bool:
        return n in self.indices()


def _support_indices(support: DyadicRange | Iterable[int]) -> list[int]:
    if isinstance(support, DyadicRange):
        return list(support.indices())
    return sorted(set(int(n) for n in support))


@dataclass(frozen=True)
class CoefficientSequence:
    """Immutable complex sequence on a finite support with cached norms."""

    support: DyadicRange | frozenset[int]
    values: Mapping[int, complex]
    l1_norm: float
    l2_norm: float
    divisor_bound_k: int | None = None

    def value(self, n: int) -> complex:
        return self.values.get(n, 0j)

    def __getitem__(self, n: int) -> complex:
        return self.values.get(n, 0j)

    def indices(self) -> list[int]:
        return sorted(self.values)

    def nonzero_items(self) -> list[tuple[int, complex]]:
        return [(n, v) for n, v in sorted(self.values.items()) if v != 0]

    def support_indices(self) -> list[int]:
        return _support_indices(self.support)

    def __len__(self) -> int:
        return len(self.values)


def make_sequence(
    values: Mapping[int, complex],
    support: DyadicRange | Iterable[int] | None = None,
    divisor_bound_k: int | None = None,
) -> CoefficientSequence:
    """Build a sequence from an explicit index -> value map, validating invariants."""
    vals = {int(n): complex(v) for n, v in values.items()}
    if support is None:
        supp: DyadicRange | frozenset[int] = frozenset(vals)
    elif isinstance(support, DyadicRange):
        supp = support
    else:
        supp = frozenset(int(n) for n in support)
    supp_set = set(_support_indices(supp))
    if not supp_set:
        raise EmptySupport("sequence support is empty")
    stray = set(vals) - supp_set
    if stray:
        raise ValueError(f"indices outside the support: {sorted(stray)[:5]}")
    if divisor_bound_k is not None:
        if divisor_bound_k < 1:
            raise ValueError("divisor_bound_k must be a positive integer")
        for n, v in vals.items():
            bound = tau_k(n, divisor_bound_k)
            if abs(v) > bound * (1 + 1e-12) + 1e-12:
                raise DivisorBoundViolation(
                    f"|value({n})| = {abs(v)} exceeds tau_{divisor_bound_k}({n}) = {bound}"
                )
    l1 = fsum(abs(v) for v in vals.values())
    l2 = math.sqrt(fsum(abs(v) ** 2 for v in vals.values()))
    return CoefficientSequence(supp, vals, l1, l2, divisor_bound_k)


def build_sequence(
    kind: str,
    support: DyadicRange | Iterable[int],
    *,
    k: int | None = None,
    seed: int | None = None,
    values: Mapping[int, complex] | Iterable[complex] | None = None,
) -> CoefficientSequence:
    """Build one of the standard test sequences on the given support.

    kind is one of:

    - ``"ones"``      constant 1 (divisor bound k=1)
    - ``"moebius"``   the Moebius function (divisor bound k=1)
    - ``"tau_k"``     the k-fold divisor function; requires ``k`` (bound k)
    - ``"random_unit"`` i.i.d. uniform phases e(u) drawn from
      ``random.Random(seed)`` in increasing index order, then scaled so the
      whole sequence has l2 norm exactly 1; requires ``seed``
    - ``"explicit"``  caller-supplied values (mapping, or iterable aligned
      with the sorted support)
    """
    idx = _support_indices(support)
    if not idx:
        raise EmptySupport("sequence support is empty")
    supp = support if isinstance(support, DyadicRange) else frozenset(idx)

    if kind == "ones":
        return make_sequence({n: 1 + 0j for n in idx}, supp, divisor_bound_k=1)
    if kind == "moebius":
        return make_sequence({n: complex(moebius(n)) for n in idx}, supp, divisor_bound_k=1)
    if kind == "tau_k":
        if k is None:
            raise ValueError("kind 'tau_k' requires k")
        return make_sequence({n: complex(tau_k(n, k)) for n in idx}, supp, divisor_bound_k=k)
    if kind == "random_unit":
        if seed is None:
            raise ValueError("kind 'random_unit' requires seed")
        rng = random.Random(seed)
        raw = {n: cmath.exp(2j * math.pi * rng.random()) for n in idx}
        scale = 1.0 / math.sqrt(len(idx))
        return make_sequence({n: v * scale for n, v in raw.items()}, supp)
    if kind == "explicit":
        if values is None:
            raise ValueError("kind 'explicit' requires values")
        if isinstance(values, Mapping):
            vals = dict(values)
        else:
            seq = list(values)
            if len(seq) != len(idx):
                raise ValueError(f"{len(seq)} values for a support of size {len(idx)}")
            vals = dict(zip(idx, seq))
        return make_sequence(vals, supp)
    raise ValueError(f"unknown sequence kind {kind!r}")


class Norms(NamedTuple):
    l1: float
    l2: float
    l2_ceiling: float | None


def sequence_norms(s: CoefficientSequence) -> Norms:
    """Recompute l1/l2 norms; for divisor-bounded sequences also return the
    T^(1/2) (log 2T)^(k^2-1) ceiling that such an l2 norm is expected to obey."""
    l1 = fsum(abs(v) for v in s.values.values())
    l2 = math.sqrt(fsum(abs(v) ** 2 for v in s.values.values()))
    ceiling = None
    if s.divisor_bound_k is not None:
        if isinstance(s.support, DyadicRange):
            t = s.support.base
        else:
            t = max(s.support)
        k = s.divisor_bound_k
        ceiling = math.sqrt(t) * math.log(2 * t) ** (k * k - 1)
    return Norms(l1, l2, ceiling)


def _csum(parts: list[complex]) -> complex:
    return complex(fsum(p.real for p in parts), fsum(p.imag for p in parts))


def sw_discrepancy(beta: CoefficientSequence, q: int, a: int, r: int = 1) -> float:
    """Discrepancy of beta in the class a mod q against its phi(q)-normalized mean.

    Returns |sum_{n = a (q), (n,r)=1} beta_n - (1/phi(q)) sum_{(n,qr)=1} beta_n|
    computed exactly over the support.  Any coprime pair (q, a) is accepted;
    classifying the sequence asymptotically is out of scope here.
    """
    if q < 1 or r < 1:
        raise ValueError("q and r must be positive")
    if gcd(a, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) = {gcd(a, q)} > 1")
    cls = a % q
    ap_terms = [v for n, v in sorted(beta.values.items()) if n % q == cls and gcd(n, r) == 1]
    cop_terms = [v for n, v in sorted(beta.values.items()) if gcd(n, q * r) == 1]
    return abs(_csum(ap_terms) - _csum(cop_terms) / euler_phi(q))


def sw_discrepancy_table(
    beta: CoefficientSequence,
    pairs: Iterable[tuple[int, int]],
    r: int = 1,
) -> list[tuple[int, int, float]]:
    """Finite-scale discrepancy table: one (q, a, discrepancy) row per pair.

    The tool only reports this table; whether the sequence satisfies the
    asymptotic equidistribution property is deliberately not decided here.
    """
    return [(q, a, sw_discrepancy(beta, q, a, r)) for q, a in pairs]


def sequence_to_text(s: CoefficientSequence) -> str:
    """Serialize as a text table: header line, then "index value_re value_im" lines."""
    if isinstance(s.support, DyadicRange):
        header = f"# support {s.support.base} {s.support.convention}"
    else:
        header = "# support explicit"
    lines = [header]
    for n in sorted(s.values):
        v = s.values[n]
        lines.append(f"{n} {v.real:.17g} {v.imag:.17g}")
    return "\n".join(lines) + "\n"


def sequence_from_text(text: str) -> CoefficientSequence:
    """Parse the table format written by :func:`sequence_to_text`."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing '# support ...' header line")
    head = lines[0].lstrip("#").split()
    if not head or head[0] != "support":
        raise ValueError(f"malformed header {lines[0]!r}")
    vals: dict[int, complex] = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"malformed row {ln!r}")
        vals[int(parts[0])] = complex(float(parts[1]), float(parts[2]))
    if head[1] == "explicit":
        support: DyadicRange | frozenset[int] = frozenset(vals)
    else:
        support = DyadicRange(int(head[1]), head[2])
    return make_sequence(vals, support)
