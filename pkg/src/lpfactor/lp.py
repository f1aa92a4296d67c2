"""The full L_p x L_q factorization pipeline for simple functions.

The bounded stage quantizes f and g onto an arithmetic grid, the target h
onto a signed geometric grid, solves the quantized problem with the
countably-valued solver at a reduced radius, and repairs the quantization of
h with a multiplicative correction factor alpha = h/h' in [1, 1/d].  The
general stage first reserves a tail budget gamma, truncates the supports to
a finite-measure set where everything is bounded, runs the bounded stage
there, and extends the factors across the tail by explicit formulas (signed
power splitting for p > 1, a gamma-grid divisor for p = 1).

Parameter selection only has to satisfy strict inequalities, so every
parameter is pinned deterministically: eps1 by 64-step bisection, the grid
steps at half their admissible supremum, and the geometric ratio d at the
midpoint of its feasible interval, kept as an exact rational because the
feasible interval can sit closer to 1 than floating point can represent.
When a grid is finer than double precision can resolve, quantization
degenerates to the identity, which is exactly the correctly rounded result
of the true grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

from .certificates import FactorizationCertificate
from .countable import factor_countable
from .errors import FeasibilityError
from .measure import (
    Exponent,
    SimpleFunction,
    conjugate,
    fsum_or_inf,
    norm,
    pow_or_inf,
    truncate_support,
)

__all__ = [
    "QuantizationParams",
    "select_params",
    "quantize_grid",
    "quantize_geometric",
    "snap_to_gamma_grid",
    "factor_bounded",
    "factor_general",
]

_TINY = 5e-324  # smallest positive double; keeps "half the sup bound" positive
_GRID_LIMIT = 2.0**53  # beyond this many grid steps a double cannot resolve one


@dataclass(frozen=True)
class QuantizationParams:
    """Every parameter pinned by one pipeline run.

    m bounds the total measure and |f|, |g|, |h|; eps1 is the quantization
    error budget; delta the arithmetic grid step; d the geometric grid ratio
    (an exact rational in (0, 1), since its distance to 1 may be smaller
    than one double ulp); eps_bar the radius passed to the inner countable
    solve.  gamma, outer_delta and g_sup are set only by the general stage:
    the tail budget, the radius of the inner bounded solve, and the
    essential sup of g off the truncation set (p = 1 only).
    """

    m: float
    eps1: float
    delta: float
    d: Fraction
    eps_bar: float
    gamma: Optional[float] = None
    outer_delta: Optional[float] = None
    g_sup: Optional[float] = None

    def to_json(self) -> dict:
        d_float = float(self.d)
        return {
            "m": self.m,
            "eps1": self.eps1,
            "delta": self.delta,
            "d": d_float,
            "d_exact": f"{self.d.numerator}/{self.d.denominator}",
            "eps_bar": self.eps_bar,
            "gamma": self.gamma,
            "outer_delta": self.outer_delta,
            "g_sup": self.g_sup,
        }


def select_params(
    defect: float,
    m: float,
    p: Union[Exponent, float],
    eps: float,
) -> QuantizationParams:
    """Pick eps1, delta, d and eps_bar for a bounded-stage run.

    Requires defect < eps^2/4 strictly and m >= the sups it is supposed to
    bound (the caller computes m).  eps1 is found by bisection against
    ``eps1 + sqrt(4 defect + 8 eps1) < eps`` and set to half the feasible
    supremum; delta to half its admissible bound; d to the midpoint of its
    feasible interval, computed in exact rational arithmetic.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    bound = eps * eps / 4.0
    if not defect < bound:
        raise FeasibilityError(defect, bound, context="parameter selection")
    if m <= 0:
        raise ValueError("m must be positive")

    def admissible(t: float) -> bool:
        return t + math.sqrt(4.0 * defect + 8.0 * t) < eps

    lo, hi = 0.0, eps
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        # Float-boundary defect: no representable budget survives rounding.
        raise FeasibilityError(defect, bound, context="parameter selection")
    eps1 = lo / 2.0
    eps_bar = math.sqrt(4.0 * defect + 8.0 * eps1)

    inv_p = p.reciprocal()
    inv_q = conjugate(p).reciprocal()
    half_sq = 0.5 / m / m  # (2 m^2)^-1 without overflowing m*m first
    delta_bound = eps1 * min(
        pow_or_inf(m, -inv_p), pow_or_inf(m, -inv_q) if inv_q else 1.0, half_sq
    )
    delta = max(delta_bound / 2.0, _TINY)

    # Both constraints on d are of the form 1 - d < s_max; work with
    # s = 1 - d exactly, since s_max can be far below one ulp of 1.0.
    s_flat = Fraction(eps1) / (Fraction(m) * Fraction(m))
    margin = eps - eps1 - eps_bar  # > 0 whenever eps1 was admissible
    if margin <= 0:
        raise FeasibilityError(defect, bound, context="parameter selection")
    growth = pow_or_inf(m, 1.0 + inv_p)
    if math.isinf(growth):
        denom = Fraction(m) * Fraction(m) + 1  # >= m^(1+1/p) once m >= 1
    else:
        denom = Fraction(growth) + Fraction(eps - eps1)
    s_slope = Fraction(margin) / denom
    s_star = min(s_flat, s_slope, Fraction(1))
    d = 1 - s_star / 2
    return QuantizationParams(m=m, eps1=eps1, delta=delta, d=d, eps_bar=eps_bar)


def quantize_grid(f: SimpleFunction, delta: float) -> SimpleFunction:
    """Truncate each coefficient toward zero onto the grid {k delta}.

    Pointwise, |f - f'| <= delta and |f'| <= |f|; grid points are fixed.
    Where the grid is finer than double precision resolves (more than 2^53
    steps to reach the value), the coefficient is already the correctly
    rounded grid value and is kept as is.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    out = []
    for c in f.coefficients:
        t = abs(c)
        if t == 0.0:
            out.append(0.0)
            continue
        steps = t / delta
        if steps >= _GRID_LIMIT:
            out.append(c)
            continue
        k = int(steps)
        while (k + 1) * delta <= t:
            k += 1
        while k > 0 and k * delta > t:
            k -= 1
        out.append(math.copysign(k * delta, c))
    return f.replace_coefficients(out)


def quantize_geometric(
    h: SimpleFunction,
    d: Union[float, Fraction],
    m: float,
) -> SimpleFunction:
    """Snap |h| down onto the geometric grid {d^n m}, preserving sign.

    Zero stays zero; elsewhere 1 <= h/h' <= 1/d and |h - h'| <= (1 - d) m.
    Requires |h| <= m pointwise and 0 < d < 1.  When d is within one double
    ulp of 1 the grid is finer than double precision and the identity is
    the correctly rounded result.
    """
    if not 0 < d < 1:
        raise ValueError("d must lie strictly between 0 and 1")
    if m <= 0:
        raise ValueError("m must be positive")
    d_f = float(d)
    for c in h.coefficients:
        if abs(c) > m:
            raise ValueError(f"|h| exceeds the declared bound m: {c!r} > {m!r}")
    if d_f >= 1.0:
        return h
    log_d = math.log(d_f)
    out = []
    for c in h.coefficients:
        t = abs(c)
        if t == 0.0:
            out.append(0.0)
            continue
        # logs taken separately: t/m may underflow even though both are fine
        s = (math.log(t) - math.log(m)) / log_d
        if s >= _GRID_LIMIT / 2.0:
            # Grid levels this deep differ by less than a double can hold.
            out.append(c)
            continue
        j = max(1, math.ceil(s))
        guard = 0
        while m * d_f**j > t:
            j += 1
            guard += 1
            if guard > 10000:
                raise AssertionError("geometric bracket search did not settle")
        while j > 1 and m * d_f ** (j - 1) <= t:
            j -= 1
        val = m * d_f**j
        if val <= 0.0:
            # d^j underflowed on its own even though the level itself is
            # representable; recover it in log space, or keep t when the
            # level sits below the subnormal floor.
            try:
                val = math.exp(math.log(m) + j * log_d)
            except OverflowError:
                val = 0.0
            if val <= 0.0:
                val = t
        out.append(math.copysign(val, c))
    return h.replace_coefficients(out)


def snap_to_gamma_grid(value: float, gamma: float, cap: float) -> float:
    """The off-support divisor for the p = 1 tail extension.

    Values in [0, cap] snap up to the next positive multiple of gamma
    (value in [k gamma, (k+1) gamma) gives (k+1) gamma); values in [-cap, 0)
    snap to -(k+1) gamma for value in [-(k+1) gamma, -k gamma).  Values
    beyond the cap in magnitude return 1 (they only occur on null atoms).
    The result is never smaller than gamma in magnitude and never farther
    than gamma from the input.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    t = abs(value)
    if t > cap:
        return 1.0
    if t / gamma >= _GRID_LIMIT:
        # The grid cannot be resolved at this magnitude; the value itself
        # already satisfies both contracts (|v| >= gamma, |v - g| <= gamma).
        return math.copysign(t, 1.0 if value >= 0 else -1.0)
    if value >= 0:
        k = int(t / gamma)
        while (k + 1) * gamma <= t:
            k += 1
        while k > 0 and k * gamma > t:
            k -= 1
    else:
        k = max(0, math.ceil(t / gamma) - 1)
        while k * gamma >= t and k > 0:
            k -= 1
        while (k + 1) * gamma < t:
            k += 1
    return math.copysign((k + 1) * gamma, 1.0 if value >= 0 else -1.0)


def _copy_pair(x: float, y: float, z: float):
    """The exact split for an atom that needs no correction."""
    if z == x * y:
        return x, y
    # Null atom with a disagreeing target: balanced square-root split.
    root = math.sqrt(abs(z))
    return root, (math.copysign(root, z) if z != 0 else 0.0)


def _lp_defect(f, g, h) -> float:
    terms = []
    for x, y, z, mu in zip(
        f.coefficients, g.coefficients, h.coefficients, f.space.measures
    ):
        d = abs(z - x * y)
        if d == 0.0 or mu == 0.0:
            continue
        terms.append(d * mu)
    return fsum_or_inf(terms)


def _check_memberships(f, g, h, p) -> None:
    q = conjugate(p)
    for name, fn, expo in (("f", f, p), ("g", g, q), ("h", h, Exponent(1))):
        if math.isinf(norm(fn, expo)):
            raise ValueError(f"{name} has infinite norm; not a member of its space")


def factor_bounded(
    f: SimpleFunction,
    g: SimpleFunction,
    h: SimpleFunction,
    p: Union[Exponent, float],
    eps: float,
) -> FactorizationCertificate:
    """Bounded finite-measure stage: quantize, solve, repair.

    Requires a finite total measure over the atoms that need correction and
    ``||h - fg||_1 < eps^2/4``.  Atoms where h = fg exactly, and null atoms,
    are routed around the pipeline untouched, so an exact instance returns
    (f, g) verbatim.  Both returned bounds are strict.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if p.is_infinite:
        swapped = factor_bounded(g, f, h, Exponent(1), eps)
        return FactorizationCertificate(
            u=swapped.v,
            v=swapped.u,
            radius_u=eps,
            radius_v=eps,
            params=swapped.params,
        )

    defect = _lp_defect(f, g, h)
    bound = eps * eps / 4.0
    if not defect < bound:
        raise FeasibilityError(defect, bound, context="bounded factorization")

    measures = f.space.measures
    u = list(f.coefficients)
    v = list(g.coefficients)
    working = []
    for i, (x, y, z) in enumerate(
        zip(f.coefficients, g.coefficients, h.coefficients)
    ):
        if z == x * y or measures[i] == 0.0:
            u[i], v[i] = _copy_pair(x, y, z)
        else:
            working.append(i)
    if not working:
        return FactorizationCertificate(
            u=tuple(u), v=tuple(v), radius_u=eps, radius_v=eps
        )

    sub = f.space.subspace(working)
    f2 = SimpleFunction(sub, tuple(f.coefficients[i] for i in working))
    g2 = SimpleFunction(sub, tuple(g.coefficients[i] for i in working))
    h2 = SimpleFunction(sub, tuple(h.coefficients[i] for i in working))
    mu_total = fsum_or_inf(sub.measures)
    if math.isinf(mu_total):
        raise ValueError("bounded stage requires finite measure where h != fg")
    m = (
        max(
            mu_total,
            max(abs(c) for c in f2.coefficients),
            max(abs(c) for c in g2.coefficients),
            max(abs(c) for c in h2.coefficients),
        )
        + 1.0
    )
    params = select_params(defect, m, p, eps)
    f_q = quantize_grid(f2, params.delta)
    g_q = quantize_grid(g2, params.delta)
    h_q = quantize_geometric(h2, params.d, m)
    inner = factor_countable(f_q, g_q, h_q, p, params.eps_bar)
    for pos, i in enumerate(working):
        target = h2.coefficients[pos]
        snapped = h_q.coefficients[pos]
        alpha = target / snapped if snapped != 0.0 else 1.0
        u[i] = alpha * inner.u[pos]
        v[i] = inner.v[pos]
    return FactorizationCertificate(
        u=tuple(u), v=tuple(v), radius_u=eps, radius_v=eps, params=params
    )


def factor_general(
    f: SimpleFunction,
    g: SimpleFunction,
    h: SimpleFunction,
    p: Union[Exponent, float],
    eps: float,
) -> FactorizationCertificate:
    """General stage: truncate to a bounded core, solve there, extend.

    Picks an inner radius delta with ``||h - fg||_1 < delta^2/4`` and a tail
    budget gamma with delta + 2 gamma < eps, truncates the supports so the
    tails cost less than gamma, runs the bounded stage on the core, and
    extends across the tail: for p > 1 by u = |h|^(1/p),
    v = |h|^(1/q) sgn h, and for p = 1 by a gamma-grid divisor under g with
    u = h/v.  Both returned bounds are strict.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if p.is_infinite:
        swapped = factor_general(g, f, h, Exponent(1), eps)
        return FactorizationCertificate(
            u=swapped.v,
            v=swapped.u,
            radius_u=eps,
            radius_v=eps,
            params=swapped.params,
        )
    _check_memberships(f, g, h, p)
    defect = _lp_defect(f, g, h)
    bound = eps * eps / 4.0
    if not defect < bound:
        raise FeasibilityError(defect, bound, context="general factorization")

    measures = f.space.measures
    u = list(f.coefficients)
    v = list(g.coefficients)
    working = []
    for i, (x, y, z) in enumerate(
        zip(f.coefficients, g.coefficients, h.coefficients)
    ):
        if z == x * y:
            continue  # u, v already copy x, y
        working.append(i)
    if not working:
        return FactorizationCertificate(
            u=tuple(u), v=tuple(v), radius_u=eps, radius_v=eps
        )

    # Inner radius and tail budget: midpoint of (2 sqrt(defect), eps), then
    # half of gamma's admissible supremum (eps - delta)/2.
    delta = (2.0 * math.sqrt(defect) + eps) / 2.0
    guard = 0
    while not defect < delta * delta / 4.0:
        delta = (delta + eps) / 2.0
        guard += 1
        if guard > 64:
            raise FeasibilityError(defect, bound, context="general factorization")
    gamma = (eps - delta) / 4.0
    if not (delta < eps and gamma > 0):
        # Float-boundary defect: no room left for a tail budget.
        raise FeasibilityError(defect, bound, context="general factorization")

    q = conjugate(p)
    p_f, q_f = float(p), (math.inf if q.is_infinite else float(q))
    sub = f.space.subspace(working)
    f2 = tuple(f.coefficients[i] for i in working)
    g2 = tuple(g.coefficients[i] for i in working)
    h2 = tuple(h.coefficients[i] for i in working)
    # The envelope steers the truncation; null atoms are invisible to every
    # integral (and their powers may overflow), so they are zeroed here and
    # land off the core, where the extensions handle them measure-free.
    live = tuple(f.space.measures[i] > 0 for i in working)
    saturated = False

    def powered(t, e):
        nonlocal saturated
        if t == 0.0:
            return 0.0
        val = pow_or_inf(t, e)
        if val == 0.0 or math.isinf(val):
            saturated = True
        return val

    if q.is_infinite:  # p = 1: control |f| and |h| on the core
        envelope = tuple(
            max(abs(x), abs(z)) if alive else 0.0
            for x, z, alive in zip(f2, h2, live)
        )
        tail_budget = min(gamma, gamma * gamma)
    else:
        envelope = tuple(
            max(powered(abs(x), p_f), powered(abs(y), q_f), abs(z))
            if alive
            else 0.0
            for x, y, z, alive in zip(f2, g2, h2, live)
        )
        tail_budget = min(powered(gamma, p_f), powered(gamma, q_f))
    if tail_budget < 1e-290:
        saturated = True
    if saturated:
        # The exponents push the tail budget or the envelope outside what
        # binary64 can represent; the only truncation whose tails provably
        # cost nothing is the one that keeps every positive-measure atom.
        core = set(j for j in range(len(working)) if live[j])
    else:
        trunc = truncate_support(SimpleFunction(sub, envelope), tail_budget)
        core = set(trunc.kept_indices)
    core_atoms = [working[j] for j in sorted(core)]
    off_atoms = [working[j] for j in range(len(working)) if j not in core]

    core_space = f.space.subspace(core_atoms)
    inner = factor_bounded(
        SimpleFunction(core_space, tuple(f.coefficients[i] for i in core_atoms)),
        SimpleFunction(core_space, tuple(g.coefficients[i] for i in core_atoms)),
        SimpleFunction(core_space, tuple(h.coefficients[i] for i in core_atoms)),
        p,
        delta,
    )
    for pos, i in enumerate(core_atoms):
        u[i] = inner.u[pos]
        v[i] = inner.v[pos]

    g_sup = None
    if q.is_infinite:
        g_sup = max(
            (abs(g.coefficients[i]) for i in off_atoms if measures[i] > 0),
            default=0.0,
        )
        for i in off_atoms:
            divisor = snap_to_gamma_grid(g.coefficients[i], gamma, g_sup)
            v[i] = divisor
            u[i] = h.coefficients[i] / divisor
    else:
        inv_p, inv_q = 1.0 / p_f, 1.0 / q_f
        for i in off_atoms:
            z = h.coefficients[i]
            t = abs(z)
            u[i] = t**inv_p
            v[i] = math.copysign(t**inv_q, z) if z != 0 else 0.0

    params = inner.params
    if params is not None:
        params = replace(params, gamma=gamma, outer_delta=delta, g_sup=g_sup)
    return FactorizationCertificate(
        u=tuple(u), v=tuple(v), radius_u=eps, radius_v=eps, params=params
    )
