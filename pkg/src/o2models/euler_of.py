"""Euler classes, the ring of operations O_F and finitely presented modules.

O_F is the product over k >= 1 of polynomial rings Q[c_k] with c_k in degree -2.
A module over it is stored componentwise as a :class:`Germ` of graded
presentations over Q[c]: finitely many exceptional components and one generic
presentation shared by all remaining indices.

Localized modules (over E^-1 O_F) keep Laurent presentations at the
exceptional indices.  Their generic entry is kept over Q[c]: it is the germ at
infinity of the localized module, which is the germ of the original module,
because an Euler class only inverts finitely many c_k.  At any specific index
outside the exceptional set the localized module is that germ read over
Q[c, 1/c].
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactlin import (
    DegreeError, GradedMatrix, Mat, Quotient, Ring, allowed_exponent, block_diag, format_rat,
    graded_kernel, hstack, rank, smith, solve,
)
from .germ import Germ, joint_indices

O_F = "O_F"
LOCALIZED = "E^-1 O_F"


class ModuleError(ValueError):
    """Ill-formed module data, naming the offending component when known."""

    def __init__(self, message: str, component=None):
        where = "" if component is None else f"component {_name(component)}: "
        super().__init__(where + message)
        self.component = component


def _name(k) -> str:
    return "generic" if k is None else str(k)


# ---------------------------------------------------------------- Euler classes


@dataclass(frozen=True)
class EulerClass:
    """c^v for a finitely supported exponent function v on the indices k >= 1."""

    exponents: tuple = ()

    def __post_init__(self):
        raw = dict(self.exponents)
        clean = {}
        for k, e in raw.items():
            k, e = int(k), int(e)
            if k < 1 or e < 0:
                raise ValueError(f"Euler class needs k >= 1 and exponent >= 0, got {k}: {e}")
            if e:
                clean[k] = e
        object.__setattr__(self, "exponents", tuple(sorted(clean.items())))

    @classmethod
    def of(cls, mapping: Mapping[int, int] | None = None) -> "EulerClass":
        return cls(tuple((mapping or {}).items()))

    def at(self, k: int) -> int:
        return dict(self.exponents).get(k, 0)

    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.exponents)

    def degree_at(self, k: int) -> int:
        return -2 * self.at(k)

    def as_dict(self) -> dict[int, int]:
        return dict(self.exponents)

    def __mul__(self, other: "EulerClass") -> "EulerClass":
        out = self.as_dict()
        for k, e in other.exponents:
            out[k] = out.get(k, 0) + e
        return EulerClass.of(out)

    def __pow__(self, n: int) -> "EulerClass":
        return EulerClass.of({k: n * e for k, e in self.exponents})

    def __str__(self):
        return "{" + ", ".join(f"{k}: {e}" for k, e in self.exponents) + "}"


def euler_mul(a: EulerClass, b: EulerClass) -> EulerClass:
    return a * b


@dataclass(frozen=True)
class AdmissibleRep:
    """The circle representation sum_j z^{n_j}, with every n_j >= 1."""

    chars: tuple = ()

    def __post_init__(self):
        chars = tuple(sorted(int(n) for n in self.chars))
        if any(n < 1 for n in chars):
            raise ValueError("admissible representations have no trivial summand")
        object.__setattr__(self, "chars", chars)

    def __add__(self, other: "AdmissibleRep") -> "AdmissibleRep":
        return AdmissibleRep(self.chars + other.chars)

    def fixed_dim(self, k: int) -> int:
        """Complex dimension of the C_k-fixed points."""
        return sum(1 for n in self.chars if n % k == 0)


def dimension_function(rep: AdmissibleRep) -> EulerClass:
    out: dict[int, int] = {}
    for n in rep.chars:
        for k in range(1, n + 1):
            if n % k == 0:
                out[k] = out.get(k, 0) + 1
    return EulerClass.of(out)


# ---------------------------------------------------------------- elements of O_F


@dataclass(frozen=True)
class OFElement:
    """Element of O_F or E^-1 O_F as homogeneous pieces.

    A piece ``(degree, coeffs)`` has value coeffs.at(k) * c_k^(-degree/2) at
    index k; its generic coefficient is the eventual value.
    """

    pieces: tuple = ()
    localized: bool = False

    def __post_init__(self):
        merged: dict[int, Germ] = {}
        for deg, coeffs in self.pieces:
            deg = int(deg)
            coeffs = coeffs.map(Fraction)
            merged[deg] = merged[deg] + coeffs if deg in merged else coeffs
        clean = []
        for deg in sorted(merged):
            coeffs = merged[deg]
            if coeffs == Germ({}, Fraction(0)):
                continue
            if deg % 2:
                raise ValueError(f"O_F is concentrated in even degrees, got {deg}")
            if deg > 0 and not self.localized:
                raise ValueError(f"O_F has nothing in positive degree {deg}")
            if deg > 0 and coeffs.generic:
                raise ValueError(f"in degree {deg} only finitely many components may be nonzero")
            clean.append((deg, coeffs))
        object.__setattr__(self, "pieces", tuple(clean))

    @classmethod
    def homogeneous(cls, degree: int, coeffs: Germ, localized: bool = True) -> "OFElement":
        return cls(((degree, coeffs),), localized)

    @classmethod
    def scalar(cls, q, localized: bool = True) -> "OFElement":
        return cls.homogeneous(0, Germ({}, Fraction(q)), localized)

    @property
    def degree(self) -> int | None:
        if not self.pieces:
            return None
        if len(self.pieces) > 1:
            raise ValueError("element is not homogeneous")
        return self.pieces[0][0]

    def coefficient(self, k: int | None, degree: int) -> Fraction:
        for deg, coeffs in self.pieces:
            if deg == degree:
                return coeffs.generic if k is None else coeffs.at(k)
        return Fraction(0)

    def indices(self) -> tuple[int, ...]:
        return joint_indices(*(c for _, c in self.pieces))

    def is_zero(self) -> bool:
        return not self.pieces

    def __add__(self, other: "OFElement") -> "OFElement":
        return OFElement(self.pieces + other.pieces, self.localized or other.localized)

    def __mul__(self, other: "OFElement") -> "OFElement":
        out = []
        for da, ca in self.pieces:
            for db, cb in other.pieces:
                out.append((da + db, ca * cb))
        return OFElement(tuple(out), self.localized or other.localized)

    def scale(self, q) -> "OFElement":
        q = Fraction(q)
        return OFElement(tuple((d, c.map(lambda x: q * x)) for d, c in self.pieces), self.localized)


# ---------------------------------------------------------------- presentations


def vector_sign(signs: Sequence[int], degrees: Sequence[int], vec: Sequence, degree: int) -> int:
    """W-eigenvalue of a homogeneous vector, with w acting on c by -1."""
    found = None
    for s, g, x in zip(signs, degrees, vec):
        if x:
            e = (g - degree) // 2
            val = s * (-1) ** (e % 2)
            if found is None:
                found = val
            elif found != val:
                raise ModuleError("vector is not a W-eigenvector")
    return 1 if found is None else found


@dataclass(frozen=True)
class Presentation:
    """Graded module over Q[c] or Q[c, 1/c]: free on ``gens`` modulo ``rels``.

    Column i of ``rels`` is the relation of degree ``rel_degrees[i]``,
    sum_j rels[j, i] c^((gens[j] - rel_degrees[i]) / 2) g_j.  Optional signs
    record a W-action on generators and relations, with w acting on c by -1.
    """

    ring: Ring
    gens: tuple = ()
    rel_degrees: tuple = ()
    rels: Mat | None = None
    gen_signs: tuple | None = None
    rel_signs: tuple | None = None

    def __post_init__(self):
        if self.ring not in (Ring.POLY, Ring.LAURENT):
            raise ModuleError(f"presentations live over Q[c] or Q[c,c^-1], not {self.ring}")
        object.__setattr__(self, "gens", tuple(int(g) for g in self.gens))
        object.__setattr__(self, "rel_degrees", tuple(int(r) for r in self.rel_degrees))
        rels = self.rels if self.rels is not None else Mat.zeros(len(self.gens), len(self.rel_degrees))
        object.__setattr__(self, "rels", rels)
        try:
            GradedMatrix(self.ring, self.rel_degrees, self.gens, rels)
        except DegreeError as exc:
            raise ModuleError(f"relation {exc.col} is not homogeneous at generator {exc.row}") from exc
        except ValueError as exc:
            raise ModuleError(str(exc)) from exc
        if (self.gen_signs is None) != (self.rel_signs is None):
            raise ModuleError("W-signs must be given for both generators and relations")
        if self.gen_signs is not None:
            gs = tuple(int(s) for s in self.gen_signs)
            rs = tuple(int(s) for s in self.rel_signs)
            if len(gs) != len(self.gens) or len(rs) != len(self.rel_degrees):
                raise ModuleError("wrong number of W-signs")
            if any(s not in (1, -1) for s in gs + rs):
                raise ModuleError("W-signs must be +1 or -1")
            for i in range(len(rs)):
                for j in range(len(gs)):
                    if rels[j, i]:
                        e = (self.gens[j] - self.rel_degrees[i]) // 2
                        if gs[j] * (-1) ** (e % 2) != rs[i]:
                            raise ModuleError(f"relation {i} is not a W-eigenvector")
            object.__setattr__(self, "gen_signs", gs)
            object.__setattr__(self, "rel_signs", rs)

    # -- constructors

    @classmethod
    def free(cls, degrees: Sequence[int], ring: Ring = Ring.POLY, signs=None) -> "Presentation":
        return cls(ring, tuple(degrees), (), None, None if signs is None else tuple(signs),
                   None if signs is None else ())

    @classmethod
    def zero(cls, ring: Ring = Ring.POLY, w: bool = False) -> "Presentation":
        return cls(ring, (), (), None, () if w else None, () if w else None)

    @property
    def ngens(self) -> int:
        return len(self.gens)

    @property
    def has_w(self) -> bool:
        return self.gen_signs is not None

    def signs_or_trivial(self) -> tuple[tuple, tuple]:
        if self.has_w:
            return self.gen_signs, self.rel_signs
        return (1,) * self.ngens, (1,) * len(self.rel_degrees)

    def relation_matrix(self) -> GradedMatrix:
        return GradedMatrix(self.ring, self.rel_degrees, self.gens, self.rels)

    def as_ring(self, ring: Ring) -> "Presentation":
        if ring is self.ring:
            return self
        return Presentation(ring, self.gens, self.rel_degrees, self.rels, self.gen_signs, self.rel_signs)

    def forget_w(self) -> "Presentation":
        return Presentation(self.ring, self.gens, self.rel_degrees, self.rels)

    def with_w(self, gen_signs, rel_signs) -> "Presentation":
        return Presentation(self.ring, self.gens, self.rel_degrees, self.rels, tuple(gen_signs), tuple(rel_signs))

    # -- degree pieces

    def active(self, degree: int) -> list[int]:
        """Generators with a multiple in the given degree."""
        return [j for j, g in enumerate(self.gens) if allowed_exponent(self.ring, g, degree) is not None]

    def relation_span(self, degree: int) -> Mat:
        cols = [i for i, r in enumerate(self.rel_degrees) if allowed_exponent(self.ring, r, degree) is not None]
        return self.rels.submatrix(range(self.ngens), cols)

    def piece(self, degree: int) -> Quotient:
        """The degree piece as a quotient of Q^ngens (inactive coordinates are zero)."""
        return _piece(self, degree)

    def dim(self, degree: int) -> int:
        return len(self.active(degree)) - rank(self.relation_span(degree))

    def degree_bounds(self) -> tuple[int, int]:
        """Below the first value nothing changes (except by parity); above the second it is zero."""
        degs = list(self.gens) + list(self.rel_degrees)
        if not degs:
            return (0, 0)
        return (min(degs) - 2, max(self.gens, default=0))

    def contains(self, vec: Sequence, degree: int) -> bool:
        """Whether a coordinate vector of the given degree lies in the relation submodule."""
        act = set(self.active(degree))
        if any(x and j not in act for j, x in enumerate(vec)):
            raise ModuleError(f"vector has coordinates outside degree {degree}")
        span = self.relation_span(degree)
        if not any(vec):
            return True
        return solve(span, Mat.from_columns([list(vec)], self.ngens)) is not None

    # -- structure

    def shift(self, k: int) -> "Presentation":
        return Presentation(self.ring, tuple(g + k for g in self.gens), tuple(r + k for r in self.rel_degrees),
                            self.rels, self.gen_signs, self.rel_signs)

    def simplify(self) -> tuple["Presentation", Mat, Mat]:
        """Minimal presentation from the Smith form.

        Returns ``(P, to_new, to_old)``: ``to_new`` rewrites old generator
        coordinates in the new generators, ``to_old`` expresses the new
        generators in the old ones.  Both are homogeneous of degree 0.
        """
        sf = smith(self.relation_matrix())
        keep, new_rels, rel_degs = [], [], []
        for t in range(self.ngens):
            if t < sf.rank:
                if self.ring is Ring.POLY and sf.factors[t] > 0:
                    keep.append(t)
                    rel_degs.append(sf.src[t])
                    new_rels.append(len(keep) - 1)
            else:
                keep.append(t)
        n = len(keep)
        rels = Mat.from_columns([[Fraction(int(i == r)) for i in range(n)] for r in new_rels], n)
        to_new = sf.P.submatrix(keep, range(self.ngens))
        to_old = sf.Pinv.submatrix(range(self.ngens), keep)
        gens = tuple(sf.tgt[t] for t in keep)
        gsigns = rsigns = None
        if self.has_w:
            gsigns = tuple(vector_sign(self.gen_signs, self.gens, to_old.column(i), gens[i]) for i in range(n))
            rsigns = tuple(gsigns[r] * (-1) ** (((gens[r] - d) // 2) % 2) for r, d in zip(new_rels, rel_degs))
        return Presentation(self.ring, gens, tuple(rel_degs), rels, gsigns, rsigns), to_new, to_old

    def simplified(self) -> "Presentation":
        return self.simplify()[0]

    def is_zero(self) -> bool:
        return self.simplified().ngens == 0

    def invariants(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        """Free generator degrees and (generator degree, c-exponent) torsion summands, sorted."""
        p = self.simplified()
        torsion_gens = {}
        for i, d in enumerate(p.rel_degrees):
            j = next(j for j in range(p.ngens) if p.rels[j, i])
            torsion_gens[j] = (p.gens[j], (p.gens[j] - d) // 2)
        free = sorted(p.gens[j] for j in range(p.ngens) if j not in torsion_gens)
        return tuple(free), tuple(sorted(torsion_gens.values()))

    def is_free(self) -> bool:
        return not self.invariants()[1]

    def torsion_free_rank(self) -> int:
        return len(self.invariants()[0])

    def describe(self) -> str:
        free, tors = self.invariants()
        parts = [f"{self.ring.value}<{d}>" for d in free]
        parts += [f"{self.ring.value}<{d}>/c^{e}" for d, e in tors]
        return " + ".join(parts) if parts else "0"


@functools.lru_cache(maxsize=8192)
def _piece(pres: Presentation, degree: int) -> Quotient:
    act = set(pres.active(degree))
    inactive = [[Fraction(int(i == j)) for i in range(pres.ngens)] for j in range(pres.ngens) if j not in act]
    sub = hstack([pres.relation_span(degree), Mat.from_columns(inactive, pres.ngens)], nrows=pres.ngens)
    return Quotient(pres.ngens, sub)


def direct_sum(a: Presentation, b: Presentation) -> Presentation:
    ring = _join_ring(a.ring, b.ring)
    w = a.has_w and b.has_w
    return Presentation(ring, a.gens + b.gens, a.rel_degrees + b.rel_degrees, block_diag([a.rels, b.rels]),
                        a.gen_signs + b.gen_signs if w else None, a.rel_signs + b.rel_signs if w else None)


def _join_ring(a: Ring, b: Ring) -> Ring:
    return Ring.LAURENT if Ring.LAURENT in (a, b) else Ring.POLY


def tensor(a: Presentation, b: Presentation) -> Presentation:
    """Tensor product; generator (i, j) sits at index i * b.ngens + j."""
    ring = _join_ring(a.ring, b.ring)
    na, nb = a.ngens, b.ngens
    gens = tuple(x + y for x in a.gens for y in b.gens)
    cols, degs = [], []
    for r, rd in enumerate(a.rel_degrees):
        for j, g in enumerate(b.gens):
            col = [Fraction(0)] * (na * nb)
            for i in range(na):
                col[i * nb + j] = a.rels[i, r]
            cols.append(col)
            degs.append(rd + g)
    for r, rd in enumerate(b.rel_degrees):
        for i, g in enumerate(a.gens):
            col = [Fraction(0)] * (na * nb)
            for j in range(nb):
                col[i * nb + j] = b.rels[j, r]
            cols.append(col)
            degs.append(g + rd)
    gs = rs = None
    if a.has_w and b.has_w:
        gs = tuple(x * y for x in a.gen_signs for y in b.gen_signs)
        rs = tuple(x * y for x in a.rel_signs for y in b.gen_signs) + \
            tuple(y * x for x in b.rel_signs for y in a.gen_signs)
    return Presentation(ring, gens, tuple(degs), Mat.from_columns(cols, na * nb), gs, rs)


def map_is_well_defined(src: Presentation, tgt: Presentation, mat: Mat, degree: int) -> bool:
    """Whether g_j -> sum_m mat[m, j] c^.. h_m (raising degree by ``degree``) respects relations."""
    image = mat @ src.rels
    for i, rd in enumerate(src.rel_degrees):
        if not tgt.contains(image.column(i), rd + degree):
            return False
    return True


def check_map(src: Presentation, tgt: Presentation, mat: Mat, degree: int) -> None:
    ring = _join_ring(src.ring, tgt.ring)
    if src.ring is Ring.LAURENT and tgt.ring is Ring.POLY and not mat.is_zero():
        raise ModuleError("no nonzero maps from a Laurent module to a polynomial one")
    try:
        GradedMatrix(ring, tuple(g + degree for g in src.gens), tgt.gens, mat)
    except DegreeError as exc:
        raise ModuleError(f"map entry ({exc.row}, {exc.col}) is not homogeneous") from exc
    if not map_is_well_defined(src, tgt, mat, degree):
        raise ModuleError("map does not respect relations")


def submodule(pres: Presentation, degrees: Sequence[int], vectors: Mat, simplify: bool = True
              ) -> tuple[Presentation, Mat]:
    """Submodule generated by homogeneous elements (columns of ``vectors``).

    Returns the presentation and its inclusion, a matrix from the new
    generators to the generators of ``pres``.
    """
    degrees = tuple(int(d) for d in degrees)
    n = len(degrees)
    big = GradedMatrix(pres.ring, degrees + pres.rel_degrees, pres.gens,
                       hstack([vectors, pres.rels], nrows=pres.ngens))
    ker = graded_kernel(big)
    syz = ker.mat.submatrix(range(n), range(ker.mat.ncols))
    keep = [i for i in range(syz.ncols) if any(syz.column(i))]
    syz = syz.submatrix(range(n), keep)
    syz_deg = tuple(ker.src[i] for i in keep)
    gs = rs = None
    if pres.has_w:
        gs = tuple(vector_sign(pres.gen_signs, pres.gens, vectors.column(i), degrees[i]) for i in range(n))
        rs = tuple(vector_sign(gs, degrees, syz.column(i), syz_deg[i]) for i in range(len(syz_deg)))
    sub = Presentation(pres.ring, degrees, syz_deg, syz, gs, rs)
    if not simplify:
        return sub, vectors
    small, _, to_old = sub.simplify()
    return small, vectors @ to_old


def kernel(src: Presentation, tgt: Presentation, mat: Mat, degree: int = 0) -> tuple[Presentation, Mat]:
    """Kernel of a module map, computed over the ring of ``src``, with its inclusion into ``src``."""
    if src.ring is Ring.POLY and tgt.ring is Ring.LAURENT:
        # the image lies in a finitely generated Q[c]-lattice of the free Laurent module
        free, to_new, _ = tgt.simplify()
        mat = to_new @ mat
        lift = 0
        for m in range(free.ngens):
            for j in range(src.ngens):
                if mat[m, j]:
                    lift = max(lift, (src.gens[j] + degree - free.gens[m]) // 2)
        tgt = Presentation(Ring.POLY, tuple(g + 2 * lift for g in free.gens), (), None,
                           free.gen_signs, () if free.has_w else None)
    ring = _join_ring(src.ring, tgt.ring)
    src = src.as_ring(ring)
    tgt = tgt.as_ring(ring)
    n = src.ngens
    shifted = tuple(g + degree for g in src.gens)
    big = GradedMatrix(ring, shifted + tgt.rel_degrees, tgt.gens, hstack([mat, tgt.rels], nrows=tgt.ngens))
    ker = graded_kernel(big)
    vecs = ker.mat.submatrix(range(n), range(ker.mat.ncols))
    keep = [i for i in range(vecs.ncols) if any(vecs.column(i))]
    return submodule(src, tuple(ker.src[i] - degree for i in keep), vecs.submatrix(range(n), keep))


def cokernel(src: Presentation, tgt: Presentation, mat: Mat, degree: int = 0) -> Presentation:
    """Cokernel; its generators are those of ``tgt``."""
    ring = _join_ring(src.ring, tgt.ring)
    w = src.has_w and tgt.has_w
    return Presentation(ring, tgt.gens, tgt.rel_degrees + tuple(g + degree for g in src.gens),
                        hstack([tgt.rels, mat], nrows=tgt.ngens), tgt.gen_signs if w else None,
                        tgt.rel_signs + src.gen_signs if w else None)


def hom_ring(src: Ring, tgt: Ring) -> Ring | None:
    """Ring of the hom module between components; None when it vanishes."""
    if src is Ring.LAURENT and tgt is Ring.POLY:
        return None
    return _join_ring(src, tgt)


def hom(src: Presentation, tgt: Presentation) -> tuple[Presentation, Mat]:
    """Internal hom of presentations.

    Returns the hom module and a matrix whose columns are its generators as
    vectors indexed by (j, m) -> j * tgt.ngens + m, meaning g_j -> h_m.
    """
    ring = hom_ring(src.ring, tgt.ring)
    w = src.has_w and tgt.has_w
    if ring is None or src.ngens == 0 or tgt.ngens == 0:
        return Presentation.zero(ring or Ring.POLY, w), Mat.zeros(src.ngens * tgt.ngens, 0)
    n, m = src.ngens, tgt.ngens
    ssig, rsig = src.signs_or_trivial()
    tsig, trsig = tgt.signs_or_trivial()

    def free_hom(domain_degs, domain_signs):
        gens = tuple(h - g for g in domain_degs for h in tgt.gens)
        cols, degs, csigns = [], [], []
        for a, g in enumerate(domain_degs):
            for r, rd in enumerate(tgt.rel_degrees):
                col = [Fraction(0)] * (len(domain_degs) * m)
                for b in range(m):
                    col[a * m + b] = tgt.rels[b, r]
                cols.append(col)
                degs.append(rd - g)
                csigns.append(domain_signs[a] * trsig[r])
        gsigns = tuple(s * t for s in domain_signs for t in tsig)
        return Presentation(ring, gens, tuple(degs), Mat.from_columns(cols, len(gens)),
                            gsigns if w else None, tuple(csigns) if w else None)

    on_gens = free_hom(src.gens, ssig)
    on_rels = free_hom(src.rel_degrees, rsig)
    nr = len(src.rel_degrees)
    restrict = [[Fraction(0)] * (n * m) for _ in range(nr * m)]
    for j in range(n):
        for i in range(nr):
            x = src.rels[j, i]
            if x:
                for b in range(m):
                    restrict[i * m + b][j * m + b] = x
    return kernel(on_gens, on_rels, Mat(restrict, n * m), 0)


# ---------------------------------------------------------------- modules over O_F


@dataclass(frozen=True)
class Support:
    """A set of indices given either as a finite set or as a cofinite complement."""

    indices: frozenset = frozenset()
    cofinite: bool = False

    @classmethod
    def finite(cls, ks: Iterable[int]) -> "Support":
        return cls(frozenset(ks), False)

    @classmethod
    def all_but(cls, ks: Iterable[int] = ()) -> "Support":
        return cls(frozenset(ks), True)

    def __contains__(self, k: int) -> bool:
        return (k not in self.indices) if self.cofinite else (k in self.indices)

    def __and__(self, other: "Support") -> "Support":
        if self.cofinite and other.cofinite:
            return Support(self.indices | other.indices, True)
        if self.cofinite:
            return Support(frozenset(k for k in other.indices if k not in self.indices), False)
        if other.cofinite:
            return other & self
        return Support(self.indices & other.indices, False)


class FpModule:
    """Finitely presented module over O_F (ring ``O_F``) or E^-1 O_F (``E^-1 O_F``)."""

    __slots__ = ("ring", "parts")

    def __init__(self, ring: str, parts: Germ):
        if ring not in (O_F, LOCALIZED):
            raise ModuleError(f"unknown ring {ring!r}")
        gen = parts.generic
        if not isinstance(gen, Presentation) or gen.ring is not Ring.POLY:
            raise ModuleError("the generic component must be a presentation over Q[c]", None)
        want = Ring.POLY if ring == O_F else Ring.LAURENT
        exc = {}
        for k, p in parts.items():
            if p.ring is not want:
                raise ModuleError(f"expected a presentation over {want.value}", k)
            if ring == LOCALIZED and p == gen.as_ring(Ring.LAURENT):
                continue
            exc[k] = p
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "parts", Germ(exc, gen))

    def __setattr__(self, name, value):
        raise AttributeError("FpModule is immutable")

    def __eq__(self, other):
        return isinstance(other, FpModule) and self.ring == other.ring and self.parts == other.parts

    def __hash__(self):
        return hash((self.ring, self.parts))

    def __repr__(self):
        return f"FpModule({self.ring!r}, {self.parts!r})"

    @classmethod
    def constant(cls, pres: Presentation, ring: str = O_F) -> "FpModule":
        return cls(ring, Germ({}, pres.as_ring(Ring.POLY)))

    @classmethod
    def free(cls, degrees: Sequence[int] = (0,), ring: str = O_F) -> "FpModule":
        return cls.constant(Presentation.free(degrees), ring)

    @classmethod
    def zero(cls, ring: str = O_F) -> "FpModule":
        return cls.constant(Presentation.zero(), ring)

    @classmethod
    def at_indices(cls, parts: Mapping[int, Presentation], generic: Presentation | None = None,
                   ring: str = O_F) -> "FpModule":
        return cls(ring, Germ(dict(parts), generic if generic is not None else Presentation.zero()))

    @property
    def component_ring(self) -> Ring:
        return Ring.POLY if self.ring == O_F else Ring.LAURENT

    @property
    def generic(self) -> Presentation:
        """The germ at infinity (always over Q[c])."""
        return self.parts.generic

    def indices(self) -> tuple[int, ...]:
        return self.parts.exceptional_indices()

    def at(self, k: int | None) -> Presentation:
        """The component at a specific index; None means an index outside the exceptional set."""
        if k is not None and k in self.parts.exceptional:
            return self.parts.at(k)
        return self.generic.as_ring(self.component_ring)

    def components(self, extra: Iterable[int] = ()) -> list[tuple[int | None, Presentation]]:
        keys = sorted(set(self.indices()) | set(extra))
        return [(k, self.at(k)) for k in keys] + [(None, self.at(None))]

    @property
    def has_w(self) -> bool:
        return self.generic.has_w

    def dim(self, k: int | None, degree: int) -> int:
        return self.at(k).dim(degree)

    def map_components(self, f, ring: str | None = None) -> "FpModule":
        """Apply f(k, presentation) to exceptional components and f(None, germ) to the germ."""
        ring = ring or self.ring
        return FpModule(ring, Germ({k: f(k, p) for k, p in self.parts.items()}, f(None, self.generic)))

    def simplified(self) -> "FpModule":
        return self.map_components(lambda k, p: p.simplified())

    def is_zero(self) -> bool:
        return all(p.is_zero() for _, p in self.parts.items()) and self.generic.is_zero()

    def forget_w(self) -> "FpModule":
        return self.map_components(lambda k, p: p.forget_w())


def _coerce(ring: str, p: Presentation, k) -> Presentation:
    if k is None:
        return p.as_ring(Ring.POLY)
    return p.as_ring(Ring.POLY if ring == O_F else Ring.LAURENT)


def module_sum(a: FpModule, b: FpModule) -> FpModule:
    ring = LOCALIZED if LOCALIZED in (a.ring, b.ring) else O_F
    keys = sorted(set(a.indices()) | set(b.indices()))
    exc = {k: _coerce(ring, direct_sum(a.at(k), b.at(k)), k) for k in keys}
    return FpModule(ring, Germ(exc, direct_sum(a.generic, b.generic)))


def module_tensor(a: FpModule, b: FpModule) -> FpModule:
    ring = LOCALIZED if LOCALIZED in (a.ring, b.ring) else O_F
    keys = sorted(set(a.indices()) | set(b.indices()))
    exc = {k: _coerce(ring, tensor(a.at(k), b.at(k)), k) for k in keys}
    return FpModule(ring, Germ(exc, tensor(a.generic, b.generic)))


def module_hom(a: FpModule, b: FpModule) -> FpModule:
    """Hom over O_F; from a localized module into an unlocalized one it vanishes."""
    if a.ring == LOCALIZED and b.ring == O_F:
        return FpModule.zero(O_F)
    ring = b.ring
    keys = sorted(set(a.indices()) | set(b.indices()))
    exc = {k: _coerce(ring, hom(a.at(k), b.at(k))[0], k) for k in keys}
    return FpModule(ring, Germ(exc, hom(a.generic, b.generic)[0]))


def sigma(module: FpModule, rep: AdmissibleRep, sign: int = 1) -> FpModule:
    """Suspension by a representation: component k moves up by 2 dim V^{C_k}."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    v = dimension_function(rep)
    return shift_by_euler(module, v, sign)


def shift_by_euler(module: FpModule, v: EulerClass, sign: int = 1) -> FpModule:
    keys = sorted(set(module.indices()) | set(v.support()))
    exc = {k: module.at(k).shift(2 * sign * v.at(k)) for k in keys}
    return FpModule(module.ring, Germ(exc, module.generic))


def localize(module: FpModule) -> FpModule:
    """E^-1 M: exceptional components become Laurent, the germ is kept."""
    if module.ring == LOCALIZED:
        return module
    exc = {k: p.as_ring(Ring.LAURENT).simplified() for k, p in module.parts.items()}
    return FpModule(LOCALIZED, Germ(exc, module.generic.simplified()))


def rep_sphere_module(rep: AdmissibleRep) -> FpModule:
    """O_F(V): at index k the submodule of Q[c, 1/c] generated by c^(-v(k))."""
    return euler_sphere_module(dimension_function(rep))


def euler_sphere_module(v: EulerClass) -> FpModule:
    exc = {k: Presentation.free((2 * e,)) for k, e in v.exponents}
    return FpModule(O_F, Germ(exc, Presentation.free((0,))))


def is_fg_projective(module: FpModule) -> tuple[bool, object]:
    """Projectivity test; the witness is the free generator degrees or the failing component."""
    free_degs = {}
    for k, p in module.components():
        free, tors = p.invariants()
        if tors:
            return False, k
        free_degs[k] = free
    germ_free, germ_tors = module.generic.invariants()
    if germ_tors:
        return False, None
    return True, Germ({k: d for k, d in free_degs.items() if k is not None}, germ_free)


def is_euler_torsion(module: FpModule) -> bool:
    """Every element is killed by some Euler class: zero germ, torsion components."""
    if not module.generic.is_zero():
        return False
    return all(not p.invariants()[0] for _, p in module.parts.items())


def e_phi(module: FpModule, phi: Support) -> FpModule:
    """Keep only the components indexed by phi."""
    zero = Presentation.zero(module.component_ring, module.has_w)
    if phi.cofinite:
        exc = {k: p for k, p in module.parts.items() if k in phi}
        exc.update({k: zero for k in phi.indices})
        return FpModule(module.ring, Germ(exc, module.generic))
    exc = {k: module.at(k) for k in phi.indices}
    return FpModule(module.ring, Germ(exc, Presentation.zero(Ring.POLY, module.has_w)))


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class ModuleElement:
    """Homogeneous element: at index k the coordinates in that component's generators."""

    module: FpModule
    degree: int
    coords: Germ = field(default_factory=lambda: Germ({}, ()))

    def __post_init__(self):
        coords = self.coords.map(lambda v: tuple(Fraction(x) for x in v))
        object.__setattr__(self, "coords", coords)
        for k in sorted(set(self.module.indices()) | set(coords.exceptional_indices())) + [None]:
            pres = self.module.at(k)
            vec = self.at(k)
            if len(vec) != pres.ngens:
                raise ModuleError(f"element has {len(vec)} coordinates for {pres.ngens} generators", k)
            act = set(pres.active(self.degree))
            if any(x and j not in act for j, x in enumerate(vec)):
                raise ModuleError(f"coordinates do not fit degree {self.degree}", k)

    def at(self, k: int | None) -> tuple:
        vec = self.coords.generic if k is None else self.coords.at(k)
        n = self.module.at(k).ngens
        return tuple(vec) if vec else (Fraction(0),) * n

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.coords, self.module.parts)

    def is_zero_at(self, k: int | None) -> bool:
        return self.module.at(k).contains(self.at(k), self.degree)



@dataclass(frozen=True)
class ModuleMap:
    """Module map raising degree by ``degree``; matrices per component, as for presentations."""

    src: FpModule
    tgt: FpModule
    mats: Germ
    degree: int = 0

    def at(self, k: int | None) -> Mat:
        return self.mats.generic if k is None else self.mats.at(k)

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.mats, self.src.parts, self.tgt.parts)

    def check(self) -> None:
        for k in list(self.indices()) + [None]:
            try:
                check_map(self.src.at(k), self.tgt.at(k), self.at(k), self.degree)
            except ModuleError as exc:
                raise ModuleError(str(exc), k) from exc
        check_map(self.src.generic, self.tgt.generic, self.mats.generic, self.degree)

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        keys = joint_indices(self.mats, other.mats)
        return ModuleMap(other.src, self.tgt, Germ({k: self.at(k) @ other.at(k) for k in keys},
                                                   self.mats.generic @ other.mats.generic),
                         self.degree + other.degree)


def module_kernel(f: ModuleMap) -> tuple[FpModule, ModuleMap]:
    """Kernel and its inclusion."""
    exc, incl = {}, {}
    for k in f.indices():
        exc[k], incl[k] = kernel(f.src.at(k), f.tgt.at(k), f.at(k), f.degree)
    gen, gincl = kernel(f.src.generic, f.tgt.generic, f.mats.generic, f.degree)
    mod = FpModule(f.src.ring, Germ(exc, gen))
    return mod, ModuleMap(mod, f.src, Germ(incl, gincl), 0)


def module_cokernel(f: ModuleMap) -> tuple[FpModule, ModuleMap]:
    """Cokernel and the quotient map (identity on generators)."""
    exc = {k: cokernel(f.src.at(k), f.tgt.at(k), f.at(k), f.degree) for k in f.indices()}
    gen = cokernel(f.src.generic, f.tgt.generic, f.mats.generic, f.degree)
    mod = FpModule(f.tgt.ring, Germ(exc, gen))
    proj = Germ({k: Mat.identity(f.tgt.at(k).ngens) for k in f.indices()}, Mat.identity(f.tgt.generic.ngens))
    return mod, ModuleMap(f.tgt, mod, proj, 0)


def module_submodule(module: FpModule, degrees: Germ, vectors: Germ) -> tuple[FpModule, ModuleMap]:
    """Submodule generated componentwise by the columns of ``vectors`` (degrees per component)."""
    keys = joint_indices(module.parts, degrees, vectors)
    exc, incl = {}, {}
    for k in keys:
        exc[k], incl[k] = submodule(module.at(k), degrees.at(k), vectors.at(k))
    gen, gincl = submodule(module.generic, degrees.generic, vectors.generic)
    sub = FpModule(module.ring, Germ(exc, gen))
    return sub, ModuleMap(sub, module, Germ(incl, gincl), 0)


__all__ = [
    "O_F", "LOCALIZED", "ModuleError", "EulerClass", "euler_mul", "AdmissibleRep", "dimension_function",
    "OFElement", "Presentation", "vector_sign", "direct_sum", "tensor", "submodule", "kernel", "cokernel",
    "hom", "hom_ring", "map_is_well_defined", "check_map", "Support", "FpModule", "module_sum",
    "module_tensor", "module_hom", "sigma", "shift_by_euler", "localize", "rep_sphere_module",
    "euler_sphere_module", "is_fg_projective", "is_euler_torsion", "e_phi", "ModuleElement",
    "format_rat", "ModuleMap", "module_kernel", "module_cokernel", "module_submodule",
]
