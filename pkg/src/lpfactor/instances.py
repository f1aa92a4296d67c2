"""Problem instances and their JSON interchange format.

An LP instance is a triple (f, g, h) of simple functions over one atomic
measure space together with the exponent p and the radius eps; a sequence
instance is a triple (x, y, z) of finite prefixes (implicit all-zero tails)
with the radius eps.  Numbers round-trip exactly through JSON; INFINITE
measures and p = oo serialize as the string "inf".
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Union

from .measure import INFINITE, Exponent, MeasureSpace, SimpleFunction, fsum_or_inf

__all__ = [
    "LpInstance",
    "SeqInstance",
    "instance_from_json",
    "load_instance",
    "space_to_json",
    "space_from_json",
    "simple_function_to_json",
    "simple_function_from_json",
]


def space_to_json(space: MeasureSpace) -> dict:
    payload = {
        "atoms": [
            {"id": a, "measure": "inf" if math.isinf(m) else m}
            for a, m in zip(space.atoms, space.measures)
        ]
    }
    if space.units:
        payload["units"] = space.units
    return payload


def space_from_json(data: dict) -> MeasureSpace:
    atoms = tuple(entry["id"] for entry in data["atoms"])
    measures = tuple(
        INFINITE if entry["measure"] == "inf" else float(entry["measure"])
        for entry in data["atoms"]
    )
    return MeasureSpace(atoms, measures, data.get("units", ""))


def simple_function_to_json(f: SimpleFunction) -> dict:
    return {"space": space_to_json(f.space), "coefficients": list(f.coefficients)}


def simple_function_from_json(data: dict) -> SimpleFunction:
    return SimpleFunction(space_from_json(data["space"]), tuple(data["coefficients"]))


@dataclass(frozen=True)
class LpInstance:
    f: SimpleFunction
    g: SimpleFunction
    h: SimpleFunction
    p: Exponent
    eps: float

    kind = "lp"

    def __post_init__(self):
        if not (self.f.space == self.g.space == self.h.space):
            raise ValueError("f, g, h must share one measure space")

    @property
    def space(self) -> MeasureSpace:
        return self.f.space

    def defect(self) -> float:
        """The L1 distance between h and fg, summed atom by atom."""
        terms = []
        for x, y, z, m in zip(
            self.f.coefficients,
            self.g.coefficients,
            self.h.coefficients,
            self.space.measures,
        ):
            d = abs(z - x * y)
            if d == 0.0 or m == 0.0:
                continue
            terms.append(d * m)
        return fsum_or_inf(terms)

    def feasibility_bound(self) -> float:
        return self.eps * self.eps / 4.0

    def to_json(self) -> dict:
        return {
            "kind": "lp",
            "space": space_to_json(self.space),
            "f": list(self.f.coefficients),
            "g": list(self.g.coefficients),
            "h": list(self.h.coefficients),
            "p": self.p.to_json(),
            "eps": self.eps,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LpInstance":
        space = space_from_json(data["space"])
        return cls(
            f=SimpleFunction(space, tuple(data["f"])),
            g=SimpleFunction(space, tuple(data["g"])),
            h=SimpleFunction(space, tuple(data["h"])),
            p=Exponent(data["p"]),
            eps=float(data["eps"]),
        )


@dataclass(frozen=True)
class SeqInstance:
    x: tuple
    y: tuple
    z: tuple
    eps: float

    kind = "seq"

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(c) for c in self.x))
        object.__setattr__(self, "y", tuple(float(c) for c in self.y))
        object.__setattr__(self, "z", tuple(float(c) for c in self.z))

    def padded(self) -> tuple:
        n = max(len(self.x), len(self.y), len(self.z))
        pad = lambda s: s + (0.0,) * (n - len(s))
        return pad(self.x), pad(self.y), pad(self.z)

    def defect(self) -> float:
        x, y, z = self.padded()
        return fsum_or_inf(abs(c - a * b) for a, b, c in zip(x, y, z))

    def feasibility_bound(self) -> float:
        return self.eps * self.eps / 16.0

    def to_json(self) -> dict:
        return {
            "kind": "seq",
            "x": list(self.x),
            "y": list(self.y),
            "z": list(self.z),
            "eps": self.eps,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SeqInstance":
        return cls(
            x=tuple(data["x"]),
            y=tuple(data["y"]),
            z=tuple(data["z"]),
            eps=float(data["eps"]),
        )


Instance = Union[LpInstance, SeqInstance]


def instance_from_json(data: dict) -> Instance:
    kind = data.get("kind", "lp" if "space" in data else "seq")
    if kind == "lp":
        return LpInstance.from_json(data)
    if kind == "seq":
        return SeqInstance.from_json(data)
    raise ValueError(f"unknown instance kind {kind!r}")


def load_instance(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(json.load(fh))
