"""Factorization of near-products of simple functions on a common partition.

Given f in L_p, g in L_q (conjugate exponents) and a target h with
``||h - fg||_1 < eps^2/4``, produce u, v with uv = h, ``||u - f||_p < eps``
and ``||v - g||_q`` within eps (strictly for p > 1, closed for p = 1).

The construction splits the atoms into an agreement set E (targets equal to
the product, or null atoms) copied through verbatim, and distributes the
remaining defect across the other atoms with weights lambda_n proportional
to each atom's share ``|z_n - x_n y_n| mu(A_n)``.  Each such atom then gets
per-atom radii that multiply out to more than four times its defect, and the
scalar kernel does the rest.

With counting measure (all atom measures 1) this specializes to the
sequence spaces l_p x l_q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .certificates import FactorizationCertificate
from .errors import FeasibilityError
from .measure import Exponent, SimpleFunction, conjugate, fsum_or_inf, norm
from .scalar import ScalarBox, factor_scalar

__all__ = ["AgreementSplit", "agreement_split", "factor_countable"]


@dataclass(frozen=True)
class AgreementSplit:
    """The agreement set E, the defect eta, and the per-atom weight scheme.

    ``lambdas`` maps atom indices outside E to weights in (0, 1]; ``radii``
    maps the same indices to the (r_k, R_k) pair fed to the scalar kernel.
    ``scheme`` records which weight scheme produced the split: the weights
    sum to 1 exactly for the "lemma2" and "seq-finite" schemes and to at
    most 1 for "seq-tail".
    """

    agree: frozenset
    eta: float
    lambdas: dict
    radii: dict
    scheme: str


def _split_indices(f: SimpleFunction, g: SimpleFunction, h: SimpleFunction):
    """Indices of E (exact agreement or null atom) and of the defect atoms."""
    agree = []
    working = []
    measures = f.space.measures
    for i, (x, y, z) in enumerate(
        zip(f.coefficients, g.coefficients, h.coefficients)
    ):
        if z == x * y or measures[i] == 0.0:
            agree.append(i)
        else:
            working.append(i)
    return agree, working


def agreement_split(
    f: SimpleFunction,
    g: SimpleFunction,
    h: SimpleFunction,
    p: Union[Exponent, float],
    eps: float,
) -> AgreementSplit:
    """Compute E, eta, the weights and the per-atom radii for one instance.

    Raises FeasibilityError when the defect eta is not strictly below
    eps^2/4.  p must be finite (the p = oo entry point swaps arguments
    before splitting).
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    if p.is_infinite:
        raise ValueError("agreement_split requires finite p; swap the factors")
    if eps <= 0:
        raise ValueError("eps must be positive")
    agree, working = _split_indices(f, g, h)
    measures = f.space.measures
    defects = {
        i: abs(h.coefficients[i] - f.coefficients[i] * g.coefficients[i])
        for i in working
    }
    eta = fsum_or_inf(defects[i] * measures[i] for i in working)
    bound = eps * eps / 4.0
    if not eta < bound:
        raise FeasibilityError(eta, bound, context="countable factorization")

    # The radius ratio lambda_k / mu(A_k) reduces to |z_k - x_k y_k| / eta:
    # the measure cancels, so compute it that way, immune to the spurious
    # under/overflow a share / eta / mu round trip can suffer.  eta_scale
    # guards the all-shares-subnormal edge where eta itself rounds to zero
    # while the atoms still need positive radii.
    eta_scale = max(eta, len(working) * 5e-324)
    inv_p = p.reciprocal()
    inv_q = conjugate(p).reciprocal()
    lambdas = {}
    radii = {}
    for i in working:
        lambdas[i] = defects[i] * measures[i] / eta if eta > 0 else 0.0
        ratio = defects[i] / eta_scale
        if inv_q == 0.0:  # p = 1: r_k = lambda_k eps / mu(A_k), R_k = eps
            radii[i] = (eps * ratio, eps)
        else:
            radii[i] = (eps * ratio**inv_p, eps * ratio**inv_q)
    return AgreementSplit(
        agree=frozenset(agree),
        eta=eta,
        lambdas=lambdas,
        radii=radii,
        scheme="lemma2",
    )


def factor_countable(
    f: SimpleFunction,
    g: SimpleFunction,
    h: SimpleFunction,
    p: Union[Exponent, float],
    eps: float,
) -> FactorizationCertificate:
    """Factor h = uv with u within eps of f in L_p and v within eps of g in L_q.

    For p > 1 both bounds are strict; for p = 1 the v-side bound is the
    closed one (``||v - g||_oo <= eps``, flagged via strict_v=False).  p = oo
    is answered by swapping the two factors, solving at p = 1, and swapping
    back; the closed bound then sits on the u side.
    """
    if not isinstance(p, Exponent):
        p = Exponent(p)
    if p.is_infinite:
        swapped = factor_countable(g, f, h, Exponent(1), eps)
        return FactorizationCertificate(
            u=swapped.v,
            v=swapped.u,
            radius_u=eps,
            radius_v=eps,
            strict_u=swapped.strict_v,
            strict_v=swapped.strict_u,
        )
    for name, fn, q_ in (("f", f, p), ("g", g, conjugate(p)), ("h", h, Exponent(1))):
        if math.isinf(norm(fn, q_)):
            raise ValueError(f"{name} has infinite norm; not a member of its space")

    split = agreement_split(f, g, h, p, eps)
    measures = f.space.measures
    u = list(f.coefficients)
    v = list(g.coefficients)
    for i in split.agree:
        z = h.coefficients[i]
        if z != f.coefficients[i] * g.coefficients[i]:
            # Null atom with a disagreeing target: invisible to every norm,
            # so a balanced exact square root splits it.
            root = math.sqrt(abs(z))
            u[i] = root
            v[i] = math.copysign(root, z) if z != 0 else 0.0
    for i, (r, big_r) in split.radii.items():
        x, y, z = f.coefficients[i], g.coefficients[i], h.coefficients[i]
        if 0.0 < r < math.inf and 0.0 < big_r < math.inf:
            try:
                pair = factor_scalar(ScalarBox(x, y, r, big_r), z)
                u[i], v[i] = pair.u, pair.v
                continue
            except FeasibilityError:
                pass
        # Rounding starved an atom whose budget holds analytically (the
        # radius under- or overflowed, or the strict bound flipped by one
        # ulp): split by exact division against the larger coordinate, or
        # fall back to a power split when both coordinates are negligible.
        u[i], v[i] = _starved_pair(x, y, z, p, eps)
    return FactorizationCertificate(
        u=tuple(u),
        v=tuple(v),
        radius_u=eps,
        radius_v=eps,
        strict_u=True,
        strict_v=p.value != 1,
    )


def _starved_pair(x: float, y: float, z: float, p: Exponent, eps: float):
    """An exact split for an atom whose kernel radii collapsed in floats.

    Only reachable when |z - xy| is many orders below the instance defect,
    so any pair with correspondingly negligible distances is admissible.
    """
    big = max(abs(x), abs(y))
    d = abs(z - x * y)
    if big > 0.0 and d <= big * big:
        # The correction |d / big| is no larger than big, and in the
        # starved regime far smaller than any radius in play.
        if abs(x) >= abs(y):
            return x, z / x
        return z / y, y
    # Both coordinates are below sqrt(d): every quantity here is tiny.
    if p.value != 1:
        inv_p = p.reciprocal()
        inv_q = conjugate(p).reciprocal()
        t = abs(z)
        return t**inv_p, (math.copysign(t**inv_q, z) if z != 0 else 0.0)
    divisor = math.copysign(min(1.0, eps) / 2.0, z if z != 0 else 1.0)
    return z / divisor, divisor
