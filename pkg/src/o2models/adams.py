"""Adams short exact sequences: Hom and Ext terms and the resulting dimensions of maps.

The sequences are of rational vector spaces, so dimensions add; the reports
never claim a splitting.  The Ext term uses the suspension of the source,
which moves degrees up by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .burnside import e_dihedral
from .exactlin import GradedVec
from .model_c import CObject, hom_set_c
from .model_d import DObject, SectionSpace, cq, hom_ext, i_k, regular_stalk, shift_d

UNAVAILABLE = "unavailable"


@dataclass(frozen=True)
class AdamsReport:
    """``ext`` is None when the Ext term is not computed."""

    degrees: tuple
    hom: SectionSpace
    ext: GradedVec | None
    total: SectionSpace | None
    notes: tuple = ()

    def as_dict(self) -> dict:
        def space(s: SectionSpace | None):
            if s is None:
                return UNAVAILABLE
            return {
                "start": s.start,
                "per_index": {str(k): {str(n): v[n] for n in self.degrees} for k, v in s.per_index.items()},
                "generic": {str(n): s.generic[n] for n in self.degrees},
                "infinity": {str(n): s.infinity[n] for n in self.degrees},
            }

        return {
            "kind": "adams_report",
            "degrees": list(self.degrees),
            "hom": space(self.hom),
            "ext": UNAVAILABLE if self.ext is None else {str(n): self.ext[n] for n in self.degrees},
            "total": space(self.total),
            "notes": list(self.notes),
        }


def _add_finite(s: SectionSpace, extra: GradedVec) -> SectionSpace:
    return SectionSpace(s.start, s.per_index, s.generic, s.infinity + extra)


def adams_dihedral(x: DObject, y: DObject, degrees: Iterable[int] = (0,)) -> AdamsReport:
    """dim [X, Y]_n = dim Hom_n + dim Ext^1(Sigma X, Y)_n, degreewise in germ form."""
    degrees = tuple(sorted(degrees))
    hom = hom_ext(x, y, degrees).hom
    ext = hom_ext(shift_d(x, 1), y, degrees).ext
    total = _add_finite(hom, ext)
    for n in degrees:
        assert total.infinity[n] == hom.infinity[n] + ext[n]
    notes = ("degree n counts maps raising degree by n",
             "the Ext term is taken for the suspension of the source, shifting degrees up by one",
             "dimensions only: the sequence need not split naturally")
    return AdamsReport(degrees, hom, ext, total, notes)


def adams_cyclic_hom(x: CObject, y: CObject, degrees: Iterable[int] = (0,), keys=None) -> AdamsReport:
    """Only the Hom term: no resolution is available for the Ext term in this model."""
    degrees = tuple(sorted(degrees))
    dims = {n: hom_set_c(x, y, n, keys).dim for n in degrees}
    hom = SectionSpace(1, {}, GradedVec(), GradedVec(dims))
    notes = ("Hom counts W-equivariant maps, constant away from the exceptional indices",
             "Ext is not computed for this model")
    return AdamsReport(degrees, hom, None, None, notes)


# ---------------------------------------------------------------- generator table


def fixed_hom_dim(i: int, j: int) -> int:
    """dim Hom(Q[W]^(x)i, Q[W]^(x)j)^W by characters.

    The fixed part has dimension (chi(1) + chi(w)) / 2 for the conjugation
    character chi(g) = chi_i(g) chi_j(g); Q[W]^(x)i has chi(1) = 2^i and
    chi(w) = 0 for i >= 1 (the trivial module for i = 0).
    """
    def char(n: int) -> tuple[int, int]:
        return (2 ** n, 0 if n else 1)

    a, b = char(i), char(j)
    return int(Fraction(a[0] * b[0] + a[1] * b[1], 2))


@dataclass
class TableLine:
    name: str
    expected: object
    computed: object

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


@dataclass
class GeneratorTable:
    lines: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(line.ok for line in self.lines)

    def failures(self) -> list[str]:
        return [line.name for line in self.lines if not line.ok]

    def render(self) -> str:
        out = []
        for line in self.lines:
            mark = "PASS" if line.ok else "FAIL"
            out.append(f"{mark}  {line.name}: expected {line.expected}, got {line.computed}")
        out.append(f"{sum(l.ok for l in self.lines)}/{len(self.lines)} lines pass")
        return "\n".join(out)


def _burnside_shape() -> tuple[int, int]:
    """(dimension at each dihedral point, dimension at O(2)) of e_D A(O(2)) as locally constant functions."""
    e = e_dihedral()
    return int(e.at_dihedral(e.dihedral.bound) != 0), int(e.at_o2 != 0)


def _total_dim(report: AdamsReport, n: int) -> int:
    dims = report.total.finite_dims()
    if dims is None:
        raise ValueError("infinite dimensional total")
    return dims[n]


def generator_table(max_power: int = 4, index: int = 2, other_index: int = 3,
                    degrees: Iterable[int] = (-1, 0, 1)) -> GeneratorTable:
    """Recompute the hom table between the generators cQ and i_k Q[W]^(x)i."""
    degrees = tuple(degrees)
    table = GeneratorTable()
    c = cq()
    rep = adams_dihedral(c, c, degrees)
    per_point, at_limit = _burnside_shape()
    got = (dict(rep.total.per_index), rep.total.generic[0], rep.total.infinity[0])
    table.lines.append(TableLine("[cQ, cQ] in degree 0 is e_D A(O(2))", ({}, per_point, at_limit), got))
    others = [n for n in degrees if n]
    zero_elsewhere = all(rep.total.generic[n] == 0 and rep.total.infinity[n] == 0 for n in others)
    table.lines.append(TableLine("[cQ, cQ] vanishes in nonzero degrees", True, zero_elsewhere))
    for i in range(1, max_power + 1):
        gen = i_k(index, regular_stalk(i))
        r = adams_dihedral(gen, c, degrees)
        table.lines.append(TableLine(f"[i_k QW^{i}, cQ]", fixed_hom_dim(i, 0), _total_dim(r, 0)))
        r = adams_dihedral(c, gen, degrees)
        table.lines.append(TableLine(f"[cQ, i_k QW^{i}]", fixed_hom_dim(0, i), _total_dim(r, 0)))
    for j in range(1, max_power + 1):
        for i in range(1, max_power + 1):
            src, tgt = i_k(index, regular_stalk(j)), i_k(index, regular_stalk(i))
            r = adams_dihedral(src, tgt, degrees)
            table.lines.append(TableLine(f"[i_k QW^{j}, i_k QW^{i}]", fixed_hom_dim(i, j), _total_dim(r, 0)))
            r = adams_dihedral(i_k(other_index, regular_stalk(j)), tgt, degrees)
            table.lines.append(TableLine(f"[i_m QW^{j}, i_k QW^{i}], m != k", 0,
                                         sum(_total_dim(r, n) for n in degrees)))
    return table


__all__ = [
    "UNAVAILABLE", "AdamsReport", "adams_dihedral", "adams_cyclic_hom", "fixed_hom_dim", "TableLine",
    "GeneratorTable", "generator_table",
]
