"""Objects with an action of W = O(2)/SO(2), induction from the circle model, and R_a-diagrams.

W acts on c by -1, so a W-structure on a presentation is a sign on each
generator and relation; an element c^e g then has sign sign(g) * (-1)^e.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .euler_of import (
    LOCALIZED, O_F, EulerClass, FpModule, ModuleError, ModuleMap, Presentation,
    cokernel as pres_cokernel, kernel as pres_kernel,
)
from .exactlin import Mat, Ring, allowed_exponent, rank, solve
from .germ import Germ, joint_indices
from .model_t import (
    HomSpace, TMap, TObject, UnsupportedInput, ValidationError, Vertex, _inverse_beta, hom_set,
    tensor_t,
)


class CObject(TObject):
    """An object whose nub and vertex carry compatible W-signs."""

    __slots__ = ()

    def __init__(self, nub: FpModule, vertex: Vertex, beta: Germ, validate: bool = True):
        super().__init__(nub, vertex, beta, validate)
        if vertex.signs is None or not nub.has_w:
            raise ValidationError("objects with W-action need signs on nub and vertex")

    @classmethod
    def of(cls, obj: TObject, validate: bool = False) -> "CObject":
        return cls(obj.nub, obj.vertex, obj.beta, validate)


def sphere_c(v: EulerClass | None = None, sign: int = 1) -> CObject:
    """S^V with W acting on the vertex by ``sign``."""
    v = v or EulerClass()
    exc = {k: Presentation.free((2 * e,), Ring.POLY, (sign * (-1) ** (e % 2),)) for k, e in v.exponents}
    nub = FpModule(O_F, Germ(exc, Presentation.free((0,), Ring.POLY, (sign,))))
    return CObject(nub, Vertex((0,), (sign,)), Germ({}, Mat([[1]])))


def unit_c() -> CObject:
    return sphere_c()


def forget(a: TObject) -> TObject:
    """The underlying object without W-action."""
    return a.forget_w()


def _parity_sign(e: int) -> int:
    return -1 if e % 2 else 1


def _twist_component(pres: Presentation, b: Mat, vertex: Vertex) -> tuple[Presentation, Mat]:
    rels = Mat([[pres.rels[j, i] * _parity_sign((g - r) // 2) for i, r in enumerate(pres.rel_degrees)]
                for j, g in enumerate(pres.gens)], len(pres.rel_degrees))
    beta = Mat([[b[u, j] * _parity_sign((d - g) // 2) for j, g in enumerate(pres.gens)]
                for u, d in enumerate(vertex.degrees)], pres.ngens)
    return Presentation(pres.ring, pres.gens, pres.rel_degrees, rels), beta


def twist(a: TObject) -> TObject:
    """j*A: the same object with c acting by -c."""
    a = a.forget_w()
    exc_n, exc_b = {}, {}
    for k in a.indices():
        exc_n[k], exc_b[k] = _twist_component(*a.component(k), a.vertex)
    gen_n, gen_b = _twist_component(a.nub.generic, a.beta.generic, a.vertex)
    return TObject(FpModule(a.nub.ring, Germ(exc_n, gen_n)), a.vertex, Germ(exc_b, gen_b))


def _induce_component(pres: Presentation, b: Mat, vertex: Vertex) -> tuple[Presentation, Mat]:
    """Generators h_j^+ (index 2j) and h_j^- (index 2j+1) spanning N + j*N, swapped by W."""
    n, nr = pres.ngens, len(pres.rel_degrees)
    rels = [[Fraction(0)] * (2 * nr) for _ in range(2 * n)]
    for i, r in enumerate(pres.rel_degrees):
        for j, g in enumerate(pres.gens):
            x = pres.rels[j, i]
            if not x:
                continue
            flip = (g - r) // 2 % 2
            # the + relation uses h^{(-1)^e}, the - relation the opposite generator
            rels[2 * j + flip][2 * i] = x
            rels[2 * j + 1 - flip][2 * i + 1] = x
    gens = tuple(g for g in pres.gens for _ in (0, 1))
    rel_degs = tuple(r for r in pres.rel_degrees for _ in (0, 1))
    new = Presentation(pres.ring, gens, rel_degs, Mat(rels, 2 * nr), (1, -1) * n, (1, -1) * nr)
    beta = [[Fraction(0)] * (2 * n) for _ in range(2 * vertex.dim)]
    for u, d in enumerate(vertex.degrees):
        for j, g in enumerate(pres.gens):
            x = b[u, j]
            if not x:
                continue
            flip = (d - g) // 2 % 2
            beta[2 * u + flip][2 * j] = x
            beta[2 * u + 1 - flip][2 * j + 1] = x
    return new, Mat(beta, 2 * n)


def induce_D(a: TObject) -> CObject:
    """The left adjoint of the forgetful functor: nub N + j*N with W swapping the summands."""
    a = a.forget_w()
    vertex = Vertex(tuple(d for d in a.vertex.degrees for _ in (0, 1)), (1, -1) * a.vertex.dim)
    exc_n, exc_b = {}, {}
    for k in a.indices():
        exc_n[k], exc_b[k] = _induce_component(*a.component(k), a.vertex)
    gen_n, gen_b = _induce_component(a.nub.generic, a.beta.generic, a.vertex)
    return CObject(FpModule(a.nub.ring, Germ(exc_n, gen_n)), vertex, Germ(exc_b, gen_b))


def induction_unit(a: TObject) -> TMap:
    """A -> forget(induce_D(A)), g_j -> (h_j^+ + h_j^-)/2 and likewise on the vertex."""
    a = a.forget_w()
    target = forget(induce_D(a))
    half = Fraction(1, 2)

    def doubled(n: int) -> Mat:
        return Mat([[half if i // 2 == j else 0 for j in range(n)] for i in range(2 * n)], n)

    theta = Germ({k: doubled(a.nub.at(k).ngens) for k in a.indices()}, doubled(a.nub.generic.ngens))
    return TMap(a, target, doubled(a.vertex.dim), theta, 0)


def tensor_c(a: CObject, b: CObject) -> CObject:
    """Tensor product with the diagonal W-action."""
    return CObject.of(tensor_t(a, b))


def hom_set_c(a: CObject, b: CObject, degree: int = 0, keys: Iterable[int] | None = None) -> HomSpace:
    """W-equivariant maps: the fixed part of the hom space under conjugation."""
    if not (a.has_w and b.has_w):
        raise UnsupportedInput("equivariant hom sets need W-structure on both objects")
    return hom_set(a, b, degree, keys, equivariant=True)


# ---------------------------------------------------------------- R_a diagrams


def _free_on(vertex: Vertex) -> Presentation:
    return Presentation.free(vertex.degrees, Ring.POLY, vertex.signs)


def _check_equivariant(src: Presentation, tgt: Presentation, mat: Mat, degree: int, k) -> None:
    if not (src.has_w and tgt.has_w):
        return
    ring = Ring.LAURENT if Ring.LAURENT in (src.ring, tgt.ring) else Ring.POLY
    for m, h in enumerate(tgt.gens):
        for j, g in enumerate(src.gens):
            if mat[m, j]:
                e = allowed_exponent(ring, h, g + degree)
                if tgt.gen_signs[m] * _parity_sign(e) != src.gen_signs[j]:
                    raise ValidationError(f"map entry ({m}, {j}) is not W-equivariant", k)


@dataclass(frozen=True)
class RaDiagramModule:
    """A module over the diagram O_F -> E^-1 O_F <- Q.

    ``a`` is an O_F-module, ``b`` an E^-1 O_F-module and ``c`` a graded vector
    space; ``alpha`` maps E^-1 a to b (in the generators of a) and ``gamma``
    maps E^-1 O_F (x) c to b.
    """

    a: FpModule
    b: FpModule
    c: Vertex
    alpha: Germ
    gamma: Germ

    def __post_init__(self):
        if self.a.ring != O_F or self.b.ring != LOCALIZED:
            raise ValidationError("a must be an O_F-module and b an E^-1 O_F-module")
        free = _free_on(self.c)
        keys = joint_indices(self.a.parts, self.b.parts, self.alpha, self.gamma)
        for k in list(keys) + [None]:
            loc_a = self.a.at(k).as_ring(Ring.LAURENT)
            bk = self.b.at(k)
            al = self.alpha.generic if k is None else self.alpha.at(k)
            ga = self.gamma.generic if k is None else self.gamma.at(k)
            try:
                ModuleMap(FpModule.constant(loc_a, LOCALIZED), FpModule.constant(bk, LOCALIZED),
                          Germ({}, al)).check()
                ModuleMap(FpModule.constant(free, LOCALIZED), FpModule.constant(bk, LOCALIZED),
                          Germ({}, ga)).check()
            except ModuleError as exc:
                raise ValidationError(str(exc), k) from exc
            _check_equivariant(loc_a, bk, al, 0, k)
            _check_equivariant(free.as_ring(Ring.LAURENT), bk, ga, 0, k)

    def alpha_at(self, k) -> Mat:
        return self.alpha.generic if k is None else self.alpha.at(k)

    def gamma_at(self, k) -> Mat:
        return self.gamma.generic if k is None else self.gamma.at(k)

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.a.parts, self.b.parts, self.alpha, self.gamma)


def include_k(a: TObject) -> RaDiagramModule:
    """(N, id, E^-1 N, beta^-1, V)."""
    loc = FpModule(LOCALIZED, Germ({k: a.nub.at(k).as_ring(Ring.LAURENT) for k in a.nub.indices()},
                                   a.nub.generic))
    alpha = Germ({k: Mat.identity(a.nub.at(k).ngens) for k in a.nub.indices()},
                 Mat.identity(a.nub.generic.ngens))
    keys = a.indices()
    gamma = Germ({k: _inverse_beta(a.nub.at(k), a.beta_at(k), a.vertex, Ring.LAURENT) for k in keys},
                 _inverse_beta(a.nub.generic, a.beta.generic, a.vertex, Ring.LAURENT))
    return RaDiagramModule(a.nub, loc, a.vertex, alpha, gamma)


def _gamma_injective(free: Presentation, bk: Presentation, ga: Mat) -> bool:
    for parity in (0, 1):
        src = free.piece(parity)
        tgt = bk.piece(parity)
        if src.dim and rank(src.induced(tgt, ga)) < src.dim:
            return False
    return True


def _gamma_component(m: RaDiagramModule, k) -> tuple[Presentation, Mat]:
    ak = m.a.at(k)
    bk = m.b.at(k).as_ring(Ring.LAURENT)
    free = _free_on(m.c).as_ring(Ring.LAURENT)
    ga = m.gamma_at(k)
    if not _gamma_injective(free, bk, ga):
        raise UnsupportedInput("the pullback is computed only for injective gamma")
    quotient = pres_cokernel(free, bk, ga, 0)
    nub, incl = pres_kernel(ak, quotient, m.alpha_at(k), 0)
    delta = [[Fraction(0)] * nub.ngens for _ in range(m.c.dim)]
    for i, p in enumerate(nub.gens):
        piece = bk.piece(p)
        image = m.alpha_at(k) @ Mat.from_columns([incl.column(i)], ak.ngens)
        us = [u for u, d in enumerate(m.c.degrees) if (d - p) % 2 == 0]
        cols = ga.submatrix(range(ga.nrows), us)
        y = solve(piece.coords(cols), piece.coords(image))
        if y is None:
            raise AssertionError("element of the pullback without a vertex preimage")
        for pos, u in enumerate(us):
            delta[u][i] = y[pos, 0]
    return nub, Mat(delta, nub.ngens)


def gamma_v(m: RaDiagramModule) -> TObject:
    """The pullback P of a -> E^-1 a -> b <- E^-1 O_F (x) c, with its map to E^-1 O_F (x) c.

    The result is not validated: localizing it need not give an isomorphism.
    """
    exc_n, exc_b = {}, {}
    for k in m.indices():
        exc_n[k], exc_b[k] = _gamma_component(m, k)
    gen_n, gen_b = _gamma_component(m, None)
    nub = FpModule(O_F, Germ(exc_n, gen_n))
    if m.c.signs is not None and nub.has_w:
        return CObject(nub, m.c, Germ(exc_b, gen_b), validate=False)
    return TObject(nub, m.c, Germ(exc_b, gen_b), validate=False)


__all__ = [
    "CObject", "sphere_c", "unit_c", "forget", "twist", "induce_D", "induction_unit", "tensor_c",
    "hom_set_c", "RaDiagramModule", "include_k", "gamma_v",
]
