"""Atomic measure spaces, simple functions, Lp norms and support truncation.

Everything downstream works over a fixed finite partition: a measure space is
an ordered list of atoms, each carrying a nonnegative (possibly infinite)
measure, and a simple function assigns one real coefficient per atom.  The
distinguished value ``INFINITE`` (``math.inf``) is allowed as an atom measure;
it is never produced by arithmetic, and the measure-theoretic convention
``0 * INFINITE = 0`` is applied throughout.

Exponents live in [1, oo] and are stored as exact rationals (``Fraction``)
when finite so that conjugation is an exact involution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

INFINITE = math.inf

__all__ = [
    "INFINITE",
    "MeasureSpace",
    "Exponent",
    "SimpleFunction",
    "TruncationResult",
    "conjugate",
    "norm",
    "pointwise_product",
    "truncate_support",
]


def fsum_or_inf(terms) -> float:
    """math.fsum, saturating to INFINITE where doubles run out of range."""
    try:
        return math.fsum(terms)
    except OverflowError:
        return INFINITE


def pow_or_inf(base: float, expo: float) -> float:
    """base ** expo, saturating to INFINITE instead of raising on overflow."""
    try:
        return base**expo
    except OverflowError:
        return INFINITE


# ---------------------------------------------------------------------------
# Measure spaces
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MeasureSpace:
    """A finite atomic measure space.

    Parameters
    ----------
    atoms : tuple of str
        Unique atom identifiers, in a fixed order.
    measures : tuple of float
        One nonnegative measure per atom; ``INFINITE`` is allowed.
    units : str
        Free-form label for the measure's units; carried, never interpreted.
    """

    atoms: tuple
    measures: tuple
    units: str = ""

    def __post_init__(self):
        atoms = tuple(self.atoms)
        measures = tuple(float(m) for m in self.measures)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "measures", measures)
        if len(atoms) != len(measures):
            raise ValueError("atom and measure counts differ")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom identifiers must be unique")
        for m in measures:
            if math.isnan(m) or m < 0:
                raise ValueError(f"atom measure must be >= 0 or INFINITE, got {m!r}")

    def __len__(self) -> int:
        return len(self.atoms)

    @classmethod
    def from_measures(cls, measures: Iterable[float]) -> "MeasureSpace":
        ms = tuple(float(m) for m in measures)
        return cls(tuple(f"a{i}" for i in range(len(ms))), ms)

    @classmethod
    def counting(cls, n: int) -> "MeasureSpace":
        """Counting measure on n atoms; turns L_p into the sequence space l_p."""
        return cls.from_measures([1.0] * n)

    def total_measure(self) -> float:
        if any(math.isinf(m) for m in self.measures):
            return INFINITE
        return fsum_or_inf(self.measures)

    def index_of(self, atom_id) -> int:
        return self.atoms.index(atom_id)

    def subspace(self, indices: Sequence[int]) -> "MeasureSpace":
        """The restriction to a subset of atoms (kept in the original order)."""
        return MeasureSpace(
            tuple(self.atoms[i] for i in indices),
            tuple(self.measures[i] for i in indices),
            self.units,
        )


# ---------------------------------------------------------------------------
# Exponents and conjugation
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Exponent:
    """A norm exponent p in [1, oo].

    Finite values are normalized to exact ``Fraction``s (conversion from a
    float is exact), which makes ``conjugate(conjugate(p)) == p`` hold
    exactly rather than merely to rounding.
    """

    value: Union[Fraction, float]

    def __post_init__(self):
        v = self.value
        if isinstance(v, str):
            v = INFINITE if v == "inf" else Fraction(v)
        if isinstance(v, float) and math.isinf(v):
            object.__setattr__(self, "value", INFINITE)
            return
        v = Fraction(v)
        if v < 1:
            raise ValueError(f"exponent must lie in [1, oo], got {v}")
        object.__setattr__(self, "value", v)

    @property
    def is_infinite(self) -> bool:
        return isinstance(self.value, float) and math.isinf(self.value)

    def __float__(self) -> float:
        return float(self.value)

    def reciprocal(self) -> float:
        """1/p as a float, with 1/oo = 0."""
        return 0.0 if self.is_infinite else float(Fraction(1) / self.value)

    def conjugate(self) -> "Exponent":
        return conjugate(self)

    def to_json(self):
        if self.is_infinite:
            return "inf"
        return float(self.value)


def conjugate(p: Union[Exponent, float, int, Fraction]) -> Exponent:
    """The Hoelder conjugate q with 1/p + 1/q = 1.

    ``conjugate(1)`` is oo and ``conjugate(oo)`` is 1; the involution is exact
    because finite exponents are handled as rationals.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    if p.is_infinite:
        return Exponent(1)
    v = p.value
    if v == 1:
        return Exponent(INFINITE)
    return Exponent(v / (v - 1))


# ---------------------------------------------------------------------------
# Simple functions
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SimpleFunction:
    """A simple function: one finite real coefficient per atom of a space."""

    space: MeasureSpace
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if len(coeffs) != len(self.space):
            raise ValueError(
                f"{len(coeffs)} coefficients for {len(self.space)} atoms"
            )
        for c in coeffs:
            if not math.isfinite(c):
                raise ValueError(f"coefficients must be finite reals, got {c!r}")

    def __len__(self) -> int:
        return len(self.coefficients)

    @classmethod
    def zero(cls, space: MeasureSpace) -> "SimpleFunction":
        return cls(space, (0.0,) * len(space))

    def replace_coefficients(self, coefficients: Iterable[float]) -> "SimpleFunction":
        return SimpleFunction(self.space, tuple(coefficients))


def _same_space(f: SimpleFunction, g: SimpleFunction) -> None:
    if f.space is not g.space and f.space != g.space:
        raise ValueError("simple functions live on different measure spaces")


def pointwise_product(f: SimpleFunction, g: SimpleFunction) -> SimpleFunction:
    """The atomwise product fg on the shared space."""
    _same_space(f, g)
    return SimpleFunction(
        f.space, tuple(a * b for a, b in zip(f.coefficients, g.coefficients))
    )


def norm(f: SimpleFunction, p: Union[Exponent, float, int, Fraction]) -> float:
    """The L_p norm of a simple function.

    For finite p this is ``(sum |a_n|^p mu(A_n)) ** (1/p)`` with the
    convention ``0 * INFINITE = 0``; a nonzero coefficient on an
    INFINITE-measure atom makes the norm INFINITE, as does a sum beyond
    double range.  For p = oo it is the essential supremum: the largest
    |a_n| over atoms of positive measure.  For p > 1 the largest magnitude
    is factored out before raising to the power, so intermediate overflow
    cannot occur when the norm itself is representable.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    coeffs = f.coefficients
    measures = f.space.measures
    if p.is_infinite:
        best = 0.0
        for c, m in zip(coeffs, measures):
            if m > 0 and abs(c) > best:
                best = abs(c)
        return best
    pf = float(p)
    entries = []
    scale = 0.0
    for c, m in zip(coeffs, measures):
        if c == 0.0 or m == 0.0:
            continue
        if math.isinf(m):
            return INFINITE
        t = abs(c)
        entries.append((t, m))
        if t > scale:
            scale = t
    if not entries:
        return 0.0
    if pf == 1.0:
        return fsum_or_inf(t * m for t, m in entries)
    total = fsum_or_inf((t / scale) ** pf * m for t, m in entries)
    if math.isinf(total):
        return INFINITE
    return scale * total ** (1.0 / pf)


# ---------------------------------------------------------------------------
# Support truncation
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class TruncationResult:
    """A finite-measure set A on which f is bounded, with a small L1 tail.

    Fields
    ------
    kept_atoms : tuple of atom identifiers (the set A)
    kept_indices : tuple of int, the positions of A in the space
    tail_value : float, the integral of |f| outside A
    sup_on_A : float, the largest |f| over A (0 for empty A)
    level : int, the threshold k with A = {1/k <= |f| <= k}
    """

    kept_atoms: tuple
    kept_indices: tuple
    tail_value: float
    sup_on_A: float
    level: int


def _entry_level(t: float) -> int:
    """The smallest integer k >= 1 with 1/k <= t <= k, for t > 0.

    Exact: ceil on a float is exact, and for t < 1 the reciprocal is taken
    in rational arithmetic, so the answer never suffers from rounding and
    never needs a correction walk (whose step count would be unbounded at
    extreme magnitudes).
    """
    if t >= 1.0:
        # 1/k <= 1 <= t holds for every k; only t <= k binds.
        return max(1, math.ceil(t))
    # t <= k holds for every k >= 1; only 1/k <= t, i.e. k >= 1/t, binds.
    return math.ceil(Fraction(1) / Fraction(t))


def truncate_support(f: SimpleFunction, eps: float) -> TruncationResult:
    """Find A = {1/k <= |f| <= k} with integral of |f| outside A below eps.

    Uses the smallest k that satisfies the tail bound.  Requires f to be in
    L1 (finite 1-norm); eps must be positive.  The empty set is a valid
    result when the whole 1-norm is already below eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if math.isinf(norm(f, 1)):
        raise ValueError("truncation requires a function with finite 1-norm")
    coeffs = f.coefficients
    measures = f.space.measures
    # Atoms with |f| = 0 never satisfy 1/k <= |f| and never contribute tail.
    levels = []  # (entry level, index, |f| * mu contribution)
    for i, (c, m) in enumerate(zip(coeffs, measures)):
        t = abs(c)
        if t == 0.0:
            continue
        levels.append((_entry_level(t), i, t * m if m > 0 else 0.0))
    levels.sort(key=lambda item: item[0])

    # tail(k) drops only when k passes an entry level; scan candidates upward.
    n = len(levels)
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + levels[i][2]

    # k* is 1 if even tail(1) is small enough, otherwise the first entry
    # level whose inclusion brings the tail below eps.  tail(k) only drops
    # when k passes an entry level, so those are the only candidates.
    chosen = 1
    i = 0
    while i < n and levels[i][0] == 1:
        i += 1
    kept_upto = i
    if suffix[i] >= eps:
        while i < n:
            level = levels[i][0]
            j = i
            while j < n and levels[j][0] == level:
                j += 1
            if suffix[j] < eps:
                chosen, kept_upto = level, j
                break
            i = j
        else:
            # Unreachable: the tail after the last entry level is 0 < eps.
            raise AssertionError("no truncation level found")
    kept = sorted(levels[i][1] for i in range(kept_upto))
    tail = suffix[kept_upto]
    sup_on_a = max((abs(coeffs[i]) for i in kept), default=0.0)
    return TruncationResult(
        kept_atoms=tuple(f.space.atoms[i] for i in kept),
        kept_indices=tuple(kept),
        tail_value=tail,
        sup_on_A=sup_on_a,
        level=chosen,
    )
