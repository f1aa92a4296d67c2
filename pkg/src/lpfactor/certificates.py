"""Factorization certificates: the factor pair plus the promised radii.

A certificate is checkable by recomputation alone; it carries no solver
state.  ``strict_u`` / ``strict_v`` record whether the promise on that side
is an open ball (strict inequality) or a closed one; the closed v-side
appears in the countably-valued p = 1 construction, and the closed u-side
only via the p = oo argument swap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["FactorizationCertificate"]

PRODUCT_TOL_DEFAULT = 1e-9


@dataclass(frozen=True)
class FactorizationCertificate:
    u: tuple
    v: tuple
    radius_u: float
    radius_v: float
    strict_u: bool = True
    strict_v: bool = True
    product_tolerance: float = PRODUCT_TOL_DEFAULT
    # Parameter record for audit (not part of the verifiable payload).
    params: Optional[object] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(c) for c in self.u))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))
        if len(self.u) != len(self.v):
            raise ValueError("factor pair lengths differ")

    def to_json(self) -> dict:
        return {
            "u": list(self.u),
            "v": list(self.v),
            "radius_u": self.radius_u,
            "radius_v": self.radius_v,
            "strict_u": self.strict_u,
            "strict_v": self.strict_v,
            "product_tolerance": self.product_tolerance,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FactorizationCertificate":
        return cls(
            u=tuple(data["u"]),
            v=tuple(data["v"]),
            radius_u=float(data["radius_u"]),
            radius_v=float(data["radius_v"]),
            strict_u=bool(data.get("strict_u", True)),
            strict_v=bool(data["strict_v"]),
            product_tolerance=float(data.get("product_tolerance", PRODUCT_TOL_DEFAULT)),
        )
