"""Rational Burnside ring of O(2) as locally constant functions on conjugacy classes.

The relevant space has one point for SO(2), one point D_2k for each k >= 1 and
the limit point O(2).  A continuous rational function is therefore a value at
SO(2) plus an eventually constant sequence over the dihedral points, whose
eventual value is the value at O(2).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .exactlin import Rat, format_rat, parse_rat
from .germ import Germ


@dataclass(frozen=True)
class BurnsideElement:
    """so2 is the value at SO(2); dihedral.generic is the value at O(2)."""

    so2: Fraction = Fraction(0)
    dihedral: Germ = field(default_factory=lambda: Germ({}, Fraction(0)))

    def __post_init__(self):
        object.__setattr__(self, "so2", Fraction(self.so2))
        object.__setattr__(self, "dihedral", self.dihedral.map(Fraction))

    @classmethod
    def constant(cls, q) -> "BurnsideElement":
        q = Fraction(q)
        return cls(q, Germ({}, q))

    @property
    def at_o2(self) -> Fraction:
        return self.dihedral.generic

    def at_dihedral(self, k: int) -> Fraction:
        return self.dihedral.at(k)

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        return BurnsideElement(self.so2 + other.so2, self.dihedral + other.dihedral)

    def __sub__(self, other: "BurnsideElement") -> "BurnsideElement":
        return BurnsideElement(self.so2 - other.so2, self.dihedral - other.dihedral)

    def __mul__(self, other: "BurnsideElement") -> "BurnsideElement":
        return BurnsideElement(self.so2 * other.so2, self.dihedral * other.dihedral)

    def __neg__(self) -> "BurnsideElement":
        return BurnsideElement(-self.so2, -self.dihedral)

    def scale(self, q) -> "BurnsideElement":
        q = Fraction(q)
        return BurnsideElement(q * self.so2, self.dihedral.map(lambda x: q * x))

    def is_idempotent(self) -> bool:
        return self * self == self

    def __str__(self):
        parts = ", ".join(f"{k}: {format_rat(v)}" for k, v in self.dihedral.items())
        return (f"{{so2: {format_rat(self.so2)}, dihedral: {{{parts}}}, "
                f"generic: {format_rat(self.at_o2)}}}")


def zero() -> BurnsideElement:
    return BurnsideElement.constant(0)


def one() -> BurnsideElement:
    return BurnsideElement.constant(1)


def e_cyclic() -> BurnsideElement:
    """Characteristic function of SO(2)."""
    return BurnsideElement(Fraction(1), Germ({}, Fraction(0)))


def e_dihedral() -> BurnsideElement:
    return one() - e_cyclic()


def _check_index(n: int):
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"dihedral index must be a positive integer, got {n!r}")


def e_n(n: int) -> BurnsideElement:
    """Characteristic function of the single point D_2n."""
    _check_index(n)
    return BurnsideElement(Fraction(0), Germ({n: Fraction(1)}, Fraction(0)))


def f_n(n: int) -> BurnsideElement:
    """e_D minus the idempotents e_1, ..., e_{n-1}."""
    _check_index(n)
    out = e_dihedral()
    for k in range(1, n):
        out = out - e_n(k)
    return out


_EXPR = re.compile(r"^\s*(e_C|e_D|e_(\d+)|f_(\d+)|-?\d+(?:/\d+)?)\s*$")


def parse_expression(text: str) -> BurnsideElement:
    """Parse a sum of named idempotents, e.g. ``e_C + 2*e_3 - f_2``."""
    out = zero()
    tokens = re.split(r"(?=[+-])", text.replace(" ", ""))
    for tok in tokens:
        if not tok:
            continue
        sign = Fraction(1)
        if tok[0] in "+-":
            sign = Fraction(-1 if tok[0] == "-" else 1)
            tok = tok[1:]
        coeff = Fraction(1)
        if "*" in tok:
            c, tok = tok.split("*", 1)
            coeff = parse_rat(c)
        m = _EXPR.match(tok)
        if not m:
            raise ValueError(f"cannot parse Burnside term {tok!r}")
        if tok == "e_C":
            term = e_cyclic()
        elif tok == "e_D":
            term = e_dihedral()
        elif m.group(2):
            term = e_n(int(m.group(2)))
        elif m.group(3):
            term = f_n(int(m.group(3)))
        else:
            term = BurnsideElement.constant(parse_rat(tok))
        out = out + term.scale(sign * coeff)
    return out


# ---------------------------------------------------------------- Hasse square


def hasse_decompose(f: BurnsideElement) -> tuple[Germ, tuple[Fraction, Fraction]]:
    """Split f into its dihedral sequence and the (SO(2), O(2)) corner."""
    return f.dihedral, (f.so2, f.at_o2)


def hasse_assemble(germ_part: Germ, corner: tuple) -> BurnsideElement:
    so2, o2 = (Fraction(x) for x in corner)
    if Fraction(germ_part.generic) != o2:
        raise ValueError(f"incompatible Hasse data: sequence tends to {germ_part.generic}, "
                         f"value at O(2) is {o2}")
    return BurnsideElement(so2, germ_part)


# ---------------------------------------------------------------- finite dihedral groups


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


@dataclass(frozen=True)
class DihedralBurnside:
    """Element of A(D_2n) tensor Q in the basis of primitive idempotents.

    Keys are ("C", k) for e_{C_k} and ("D", k) for e_{D_2k}, with k | n.
    """

    n: int
    coords: tuple  # sorted ((kind, k), Fraction) pairs, zero entries dropped

    def __post_init__(self):
        _check_index(self.n)
        clean = {}
        for (kind, k), q in dict(self.coords).items():
            if kind not in ("C", "D") or self.n % k:
                raise ValueError(f"no idempotent e_{kind}{k} in A(D_{2 * self.n})")
            q = Fraction(q)
            if q:
                clean[(kind, k)] = q
        object.__setattr__(self, "coords", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, n: int, values: dict) -> "DihedralBurnside":
        return cls(n, tuple(values.items()))

    def basis(self) -> list[tuple[str, int]]:
        return [(kind, k) for kind in ("C", "D") for k in divisors(self.n)]

    def coord(self, kind: str, k: int) -> Fraction:
        return dict(self.coords).get((kind, k), Fraction(0))

    def _pointwise(self, other: "DihedralBurnside", op) -> "DihedralBurnside":
        if self.n != other.n:
            raise ValueError("elements of different dihedral Burnside rings")
        return DihedralBurnside.of(self.n, {b: op(self.coord(*b), other.coord(*b)) for b in self.basis()})

    def __add__(self, other):
        return self._pointwise(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._pointwise(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._pointwise(other, lambda a, b: a * b)

    def __str__(self):
        if not self.coords:
            return "0"
        terms = []
        for (kind, k), q in self.coords:
            name = f"e_C{k}" if kind == "C" else f"e_D{2 * k}"
            terms.append(name if q == 1 else f"{format_rat(q)}*{name}")
        return " + ".join(terms)


def dihedral_one(n: int) -> DihedralBurnside:
    return DihedralBurnside.of(n, {(kind, k): 1 for kind in ("C", "D") for k in divisors(n)})


def dihedral_idempotents(n: int) -> list[DihedralBurnside]:
    return [DihedralBurnside.of(n, {(kind, k): 1}) for kind in ("C", "D") for k in divisors(n)]


def restrict(f: BurnsideElement, n: int) -> DihedralBurnside:
    """Restriction along D_2n -> O(2).

    A cyclic subgroup C_k of D_2n is sent into SO(2) and a dihedral D_2k to the
    point D_2k, so restriction is evaluation of f at those points.
    """
    _check_index(n)
    values = {}
    for k in divisors(n):
        values[("C", k)] = f.so2
        values[("D", k)] = f.at_dihedral(k)
    return DihedralBurnside.of(n, values)


__all__ = [
    "Rat", "BurnsideElement", "DihedralBurnside", "zero", "one", "e_cyclic", "e_dihedral",
    "e_n", "f_n", "parse_expression", "hasse_decompose", "hasse_assemble", "divisors",
    "dihedral_one", "dihedral_idempotents", "restrict",
]
