"""Objects beta: N -> E^-1 O_F (x) V of the circle-group model and their calculus.

An object has an O_F-module N (the nub), a finite graded vector space V (the
vertex) and a structure map beta that becomes an isomorphism after inverting
Euler classes.  Components are handled one index at a time: each exceptional
index, plus a representative index outside the exceptional set (``None``).

Structure maps are scalar matrices with rows indexed by the vertex basis and
columns by nub generators; the power of c in each entry is forced by degrees.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactlin import (
    GradedMatrix, GradedVec, Mat, Quotient, Ring, allowed_exponent, block_diag, column_space,
    complement_basis, hstack, kron, linear_pullback, nullspace, rank, solve, vstack, DegreeError,
)
from .euler_of import (
    LOCALIZED, O_F, EulerClass, FpModule, ModuleElement, ModuleError, OFElement, Presentation,
    check_map, cokernel as pres_cokernel, hom as pres_hom, hom_ring, is_euler_torsion,
    is_fg_projective, kernel as pres_kernel, module_sum, module_tensor, shift_by_euler, submodule,
    vector_sign,
)
from .germ import Germ, joint_indices


class ValidationError(ValueError):
    """An object or map fails its defining conditions at a named component."""

    def __init__(self, message: str, component=None):
        where = "generic component" if component is None else f"component {component}"
        super().__init__(f"{where}: {message}")
        self.component = component


class UnsupportedInput(ValueError):
    """Input outside the class of objects for which an answer is computed."""


class CoverDefect(RuntimeError):
    """The covering search did not terminate; this signals a bug in validation."""


# ---------------------------------------------------------------- vertices


@dataclass(frozen=True)
class Vertex:
    """Ordered homogeneous basis of a finite graded vector space, optionally with W-signs."""

    degrees: tuple = ()
    signs: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        if self.signs is not None:
            signs = tuple(int(s) for s in self.signs)
            if len(signs) != len(self.degrees) or any(s not in (1, -1) for s in signs):
                raise ValueError("vertex signs must be +1/-1, one per basis vector")
            object.__setattr__(self, "signs", signs)

    @classmethod
    def of(cls, dims: GradedVec | dict) -> "Vertex":
        dims = dims.dims if isinstance(dims, GradedVec) else dims
        return cls(tuple(d for d in sorted(dims) for _ in range(dims[d])))

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def graded(self) -> GradedVec:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return GradedVec(out)

    def signs_or_trivial(self) -> tuple:
        return self.signs if self.signs is not None else (1,) * self.dim

    def __add__(self, other: "Vertex") -> "Vertex":
        w = self.signs is not None and other.signs is not None
        return Vertex(self.degrees + other.degrees, self.signs + other.signs if w else None)

    def tensor(self, other: "Vertex") -> "Vertex":
        w = self.signs is not None and other.signs is not None
        return Vertex(tuple(a + b for a in self.degrees for b in other.degrees),
                      tuple(a * b for a in self.signs for b in other.signs) if w else None)

    def hom(self, other: "Vertex") -> "Vertex":
        """Basis (a -> b) at index a * other.dim + b."""
        w = self.signs is not None and other.signs is not None
        return Vertex(tuple(b - a for a in self.degrees for b in other.degrees),
                      tuple(a * b for a in self.signs for b in other.signs) if w else None)

    def shift(self, k: int) -> "Vertex":
        return Vertex(tuple(d + k for d in self.degrees), self.signs)

    def forget_w(self) -> "Vertex":
        return Vertex(self.degrees)


def graded_kernel_basis(phi: Mat, src: Sequence[int], tgt: Sequence[int], degree: int = 0) -> Mat:
    """Homogeneous basis of the kernel of a degree-``degree`` linear map of graded spaces."""
    cols = []
    for d in sorted(set(src)):
        s_idx = [i for i, x in enumerate(src) if x == d]
        t_idx = [i for i, x in enumerate(tgt) if x == d + degree]
        block = phi.submatrix(t_idx, s_idx)
        for v in nullspace(block).columns():
            full = [Fraction(0)] * len(src)
            for i, x in zip(s_idx, v):
                full[i] = x
            cols.append(full)
    return Mat.from_columns(cols, len(src))


def graded_image_complement(phi: Mat, tgt: Sequence[int]) -> tuple[list[int], Mat]:
    """Homogeneous complement of the image spanned by target basis vectors.

    Returns the chosen basis indices and the projection onto them (rows).
    """
    chosen, rows_out = [], []
    for d in sorted(set(tgt)):
        t_idx = [i for i, x in enumerate(tgt) if x == d]
        img = phi.submatrix(t_idx, range(phi.ncols))
        q = Quotient(len(t_idx), img)
        proj = q.coords(Mat.identity(len(t_idx)))
        for r, col in enumerate(q.basis.columns()):
            chosen.append(t_idx[col.index(1)])
            row = [Fraction(0)] * len(tgt)
            for i, x in zip(t_idx, proj.rows[r]):
                row[i] = x
            rows_out.append(row)
    return chosen, Mat(rows_out, len(tgt))


# ---------------------------------------------------------------- objects


class TObject:
    """beta: N -> E^-1 O_F (x) V, validated on construction."""

    __slots__ = ("nub", "vertex", "beta")

    def __init__(self, nub: FpModule, vertex: Vertex, beta: Germ, validate: bool = True):
        object.__setattr__(self, "nub", nub)
        object.__setattr__(self, "vertex", vertex)
        object.__setattr__(self, "beta", beta)
        if validate:
            validate_t(self)

    def __setattr__(self, name, value):
        raise AttributeError("TObject is immutable")

    def __repr__(self):
        return f"TObject(nub={self.nub!r}, vertex={self.vertex!r}, beta={self.beta!r})"

    def __eq__(self, other):
        return (isinstance(other, TObject) and self.nub == other.nub and self.vertex == other.vertex
                and self.beta == other.beta)

    def __hash__(self):
        return hash((self.nub, self.vertex, self.beta))

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.nub.parts, self.beta)

    def beta_at(self, k: int | None) -> Mat:
        return self.beta.generic if k is None else self.beta.at(k)

    def component(self, k: int | None) -> tuple[Presentation, Mat]:
        return self.nub.at(k), self.beta_at(k)

    def components(self, extra: Iterable[int] = ()) -> list:
        keys = sorted(set(self.indices()) | set(extra))
        return [(k,) + self.component(k) for k in keys] + [(None,) + self.component(None)]

    @property
    def has_w(self) -> bool:
        return self.vertex.signs is not None

    def simplified(self) -> "TObject":
        """Minimal nub presentations, structure map rewritten accordingly."""
        exc_n, exc_b = {}, {}
        for k in self.indices():
            p, b = self.component(k)
            small, _, to_old = p.simplify()
            exc_n[k] = small
            exc_b[k] = b @ to_old
        gsmall, _, gto_old = self.nub.generic.simplify()
        nub = FpModule(self.nub.ring, Germ(exc_n, gsmall))
        return TObject(nub, self.vertex, Germ(exc_b, self.beta.generic @ gto_old), validate=False)

    def forget_w(self) -> "TObject":
        return TObject(self.nub.forget_w(), self.vertex.forget_w(), self.beta, validate=False)


def _vertex_active(vertex: Vertex, degree: int, ring: Ring) -> list[int]:
    return [i for i, u in enumerate(vertex.degrees) if allowed_exponent(ring, u, degree) is not None]


def validate_t(obj: TObject) -> None:
    nub, vertex = obj.nub, obj.vertex
    if nub.has_w != (vertex.signs is not None):
        raise ValidationError("W-structure must be given on both nub and vertex")
    for k, pres, b in obj.components():
        _check_component(k, pres, b, vertex, Ring.LAURENT)
        if k is not None:
            _check_laurent_iso(k, pres, b, vertex)
    germ, gb = nub.generic, obj.beta.generic
    _check_component(None, germ, gb, vertex, Ring.POLY)
    _check_germ_iso(germ, gb, vertex)


def _check_component(k, pres: Presentation, b: Mat, vertex: Vertex, ring: Ring) -> None:
    if b.shape != (vertex.dim, pres.ngens):
        raise ValidationError(f"structure map has shape {b.shape}, expected ({vertex.dim}, {pres.ngens})", k)
    try:
        GradedMatrix(ring, pres.gens, vertex.degrees, b)
    except DegreeError as exc:
        raise ValidationError(f"structure map entry ({exc.row}, {exc.col}) has the wrong degree", k) from exc
    if not (b @ pres.rels).is_zero():
        raise ValidationError("structure map does not kill the relations", k)
    if pres.has_w:
        for u in range(vertex.dim):
            for j in range(pres.ngens):
                if b[u, j]:
                    e = (vertex.degrees[u] - pres.gens[j]) // 2
                    if vertex.signs[u] * (-1) ** (e % 2) != pres.gen_signs[j]:
                        raise ValidationError(f"structure map is not W-equivariant at ({u}, {j})", k)


def _check_laurent_iso(k, pres: Presentation, b: Mat, vertex: Vertex) -> None:
    for parity in (0, 1):
        js = [j for j, g in enumerate(pres.gens) if g % 2 == parity]
        us = [u for u, d in enumerate(vertex.degrees) if d % 2 == parity]
        rs = [i for i, d in enumerate(pres.rel_degrees) if d % 2 == parity]
        module_dim = len(js) - rank(pres.rels.submatrix(js, rs))
        r = rank(b.submatrix(us, js))
        if r < len(us):
            raise ValidationError(f"localized structure map is not surjective in parity {parity}", k)
        if module_dim > r:
            raise ValidationError(f"localized structure map is not injective in parity {parity}", k)


def _check_germ_iso(pres: Presentation, b: Mat, vertex: Vertex) -> None:
    degs = list(pres.gens) + list(pres.rel_degrees) + list(vertex.degrees)
    if not degs:
        return
    for d in range(min(degs) - 3, max(degs) + 1):
        act = pres.active(d)
        us = _vertex_active(vertex, d, Ring.POLY)
        module_dim = pres.dim(d)
        r = rank(b.submatrix(us, act))
        if r < len(us):
            raise ValidationError(f"structure map is not surjective in degree {d}", None)
        if module_dim > r:
            raise ValidationError(f"structure map is not injective in degree {d}", None)


def make_t(nub: FpModule, vertex: Vertex, beta: Germ | Mat) -> TObject:
    if isinstance(beta, Mat):
        beta = Germ({}, beta)
    return TObject(nub, vertex, beta)


# ---------------------------------------------------------------- maps


@dataclass(frozen=True)
class TMap:
    """A map of objects raising degree by ``degree``: theta on nubs, phi on vertices."""

    src: TObject
    tgt: TObject
    phi: Mat
    theta: Germ
    degree: int = 0

    def theta_at(self, k: int | None) -> Mat:
        return self.theta.generic if k is None else self.theta.at(k)

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.theta, self.src.nub.parts, self.tgt.nub.parts, self.src.beta, self.tgt.beta)

    def check(self) -> None:
        a, b, n = self.src, self.tgt, self.degree
        if self.phi.shape != (b.vertex.dim, a.vertex.dim):
            raise ValidationError("vertex map has the wrong shape")
        for u in range(a.vertex.dim):
            for v in range(b.vertex.dim):
                if self.phi[v, u] and b.vertex.degrees[v] != a.vertex.degrees[u] + n:
                    raise ValidationError(f"vertex map entry ({v}, {u}) has the wrong degree")
        for k in list(self.indices()) + [None]:
            pa, ba = a.component(k)
            pb, bb = b.component(k)
            th = self.theta_at(k)
            try:
                check_map(pa, pb, th, n)
            except ModuleError as exc:
                raise ValidationError(str(exc), k) from exc
            if bb @ th != self.phi @ ba:
                raise ValidationError("the square does not commute", k)

    def compose(self, other: "TMap") -> "TMap":
        """self after other."""
        keys = joint_indices(self.theta, other.theta, *(x.nub.parts for x in (other.src, self.src, self.tgt)))
        theta = Germ({k: self.theta_at(k) @ other.theta_at(k) for k in keys},
                     self.theta.generic @ other.theta.generic)
        return TMap(other.src, self.tgt, self.phi @ other.phi, theta, self.degree + other.degree)

    def __add__(self, other: "TMap") -> "TMap":
        keys = joint_indices(self.theta, other.theta)
        return TMap(self.src, self.tgt, self.phi + other.phi,
                    Germ({k: self.theta_at(k) + other.theta_at(k) for k in keys},
                         self.theta.generic + other.theta.generic), self.degree)

    def scale(self, q) -> "TMap":
        return TMap(self.src, self.tgt, self.phi.scale(q), self.theta.map(lambda m: m.scale(q)), self.degree)


def identity(a: TObject) -> TMap:
    theta = Germ({k: Mat.identity(a.nub.at(k).ngens) for k in a.nub.indices()},
                 Mat.identity(a.nub.generic.ngens))
    return TMap(a, a, Mat.identity(a.vertex.dim), theta, 0)


def zero_map(a: TObject, b: TObject, degree: int = 0) -> TMap:
    keys = joint_indices(a.nub.parts, b.nub.parts)
    theta = Germ({k: Mat.zeros(b.nub.at(k).ngens, a.nub.at(k).ngens) for k in keys},
                 Mat.zeros(b.nub.generic.ngens, a.nub.generic.ngens))
    return TMap(a, b, Mat.zeros(b.vertex.dim, a.vertex.dim), theta, degree)


# ---------------------------------------------------------------- hom sets


def _annihilator(span: Mat, n: int) -> Mat:
    """Rows spanning the linear forms vanishing on the columns of ``span``."""
    if span.ncols == 0:
        return Mat.identity(n)
    return nullspace(span.T).T


@dataclass
class _ComponentSystem:
    key: int | None
    theta_vars: list           # (m, j) positions
    solutions: Mat             # columns: [phi part; theta part]
    trivial: Mat               # columns: theta-part vectors of maps that are zero on the module


@dataclass
class HomSpace:
    """Maps A -> B of a fixed degree, modulo maps that vanish on nubs.

    Nub maps are taken constant on indices outside ``keys``.
    """

    src: TObject
    tgt: TObject
    degree: int
    keys: tuple
    phi_vars: list
    systems: list
    phi_space: Mat
    dim: int

    def basis(self) -> list[TMap]:
        """A basis of the space of maps (lifts chosen once and for all)."""
        out = []
        nphi = len(self.phi_vars)
        for col in self.phi_space.columns():
            thetas = {}
            for sysm in self.systems:
                top = sysm.solutions.submatrix(range(nphi), range(sysm.solutions.ncols))
                y = solve(top, Mat.from_columns([col], nphi))
                if y is None:
                    raise AssertionError("hom_set: vertex map does not lift")
                th = sysm.solutions @ y
                thetas[sysm.key] = [th[i, 0] for i in range(nphi, th.nrows)]
            out.append(self._assemble(col, thetas))
        for sysm in self.systems:
            nphi_rows = range(nphi)
            top = sysm.solutions.submatrix(nphi_rows, range(sysm.solutions.ncols))
            kern = sysm.solutions @ nullspace(top)
            nth = len(sysm.theta_vars)
            kern_theta = kern.submatrix(range(nphi, nphi + nth), range(kern.ncols))
            extra = complement_basis(sysm.trivial, kern_theta)
            for v in extra.columns():
                thetas = {s.key: [Fraction(0)] * len(s.theta_vars) for s in self.systems}
                thetas[sysm.key] = v
                out.append(self._assemble([Fraction(0)] * nphi, thetas))
        return out

    def vector(self, m: TMap) -> list:
        """Entries of m at the unknowns of the linear system."""
        vec = [m.phi[v, u] for v, u in self.phi_vars]
        for sysm in self.systems:
            th = m.theta_at(sysm.key)
            vec += [th[i, j] for i, j in sysm.theta_vars]
        return vec

    def coordinates(self, m: TMap) -> list:
        """Coordinates of m in :meth:`basis`, ignoring parts that vanish on nubs."""
        basis = self.basis()
        cols = [self.vector(b) for b in basis]
        nphi, offset = len(self.phi_vars), 0
        total = nphi + sum(len(s.theta_vars) for s in self.systems)
        for sysm in self.systems:
            for v in sysm.trivial.columns():
                full = [Fraction(0)] * total
                full[nphi + offset:nphi + offset + len(v)] = v
                cols.append(full)
            offset += len(sysm.theta_vars)
        sol = solve(Mat.from_columns(cols, total), Mat.from_columns([self.vector(m)], total))
        if sol is None:
            raise ValueError("not a map in this hom space")
        return [sol[i, 0] for i in range(len(basis))]

    def _assemble(self, phi_vec, thetas: dict) -> TMap:
        a, b = self.src, self.tgt
        phi = [[Fraction(0)] * a.vertex.dim for _ in range(b.vertex.dim)]
        for (v, u), x in zip(self.phi_vars, phi_vec):
            phi[v][u] = x
        mats = {}
        for sysm in self.systems:
            pa, pb = a.nub.at(sysm.key), b.nub.at(sysm.key)
            th = [[Fraction(0)] * pa.ngens for _ in range(pb.ngens)]
            for (m, j), x in zip(sysm.theta_vars, thetas[sysm.key]):
                th[m][j] = x
            mats[sysm.key] = Mat(th, pa.ngens)
        generic = mats.pop(None)
        return TMap(a, b, Mat(phi, a.vertex.dim), Germ(mats, generic), self.degree)


def hom_set(a: TObject, b: TObject, degree: int = 0, keys: Iterable[int] | None = None,
            equivariant: bool = False) -> HomSpace:
    """Maps a -> b raising degree by ``degree``.

    ``keys`` lists the indices at which nub maps may differ from the common
    value used everywhere else; it defaults to the exceptional indices of a
    and b and must contain them.  With ``equivariant`` only W-equivariant maps
    are counted, which is the fixed part under conjugation.
    """
    base = set(a.indices()) | set(b.indices())
    keys = tuple(sorted(base if keys is None else set(keys) | base))
    n = degree
    va, vb = a.vertex, b.vertex
    sa, sb = va.signs_or_trivial(), vb.signs_or_trivial()
    phi_vars = [(v, u) for u in range(va.dim) for v in range(vb.dim)
                if vb.degrees[v] == va.degrees[u] + n and (not equivariant or sa[u] == sb[v])]
    nphi = len(phi_vars)
    systems = []
    phi_space = Mat.identity(nphi)
    for k in list(keys) + [None]:
        sysm = _component_system(k, a, b, n, phi_vars, equivariant)
        systems.append(sysm)
        top = sysm.solutions.submatrix(range(nphi), range(sysm.solutions.ncols))
        phi_space = _intersect(phi_space, column_space(top) if top.ncols else top, nphi)
    dim = phi_space.ncols
    for sysm in systems:
        top = sysm.solutions.submatrix(range(nphi), range(sysm.solutions.ncols))
        dim += sysm.solutions.ncols - rank(top) - sysm.trivial.ncols
    return HomSpace(a, b, n, keys, phi_vars, systems, phi_space, dim)


def _intersect(x: Mat, y: Mat, n: int) -> Mat:
    if x.ncols == 0 or y.ncols == 0:
        return Mat.zeros(n, 0)
    ker = nullspace(hstack([x, y.scale(-1)]))
    inter = x @ ker.submatrix(range(x.ncols), range(ker.ncols))
    return column_space(inter) if inter.ncols else inter


def _component_system(k, a: TObject, b: TObject, n: int, phi_vars, equivariant: bool) -> _ComponentSystem:
    pa, ba = a.component(k)
    pb, bb = b.component(k)
    ring = hom_ring(pa.ring, pb.ring)
    sa, _ = pa.signs_or_trivial()
    sb, _ = pb.signs_or_trivial()
    theta_vars = []
    if ring is not None:
        for j in range(pa.ngens):
            for m in range(pb.ngens):
                e = allowed_exponent(ring, pb.gens[m], pa.gens[j] + n)
                if e is None:
                    continue
                if equivariant and sb[m] * (-1) ** (e % 2) != sa[j]:
                    continue
                theta_vars.append((m, j))
    nphi, nth = len(phi_vars), len(theta_vars)
    rows = []
    # commutation: bb theta = phi ba, entry (v, j)
    for v in range(b.vertex.dim):
        for j in range(pa.ngens):
            row = [Fraction(0)] * (nphi + nth)
            for idx, (vv, u) in enumerate(phi_vars):
                if vv == v and ba[u, j]:
                    row[idx] -= ba[u, j]
            for idx, (m, jj) in enumerate(theta_vars):
                if jj == j and bb[v, m]:
                    row[nphi + idx] += bb[v, m]
            if any(row):
                rows.append(row)
    # relations of a go into the relation submodule of b
    for i, rd in enumerate(pa.rel_degrees):
        ann = _annihilator(pb.relation_span(rd + n), pb.ngens)
        for r in range(ann.nrows):
            row = [Fraction(0)] * (nphi + nth)
            for idx, (m, j) in enumerate(theta_vars):
                coef = ann[r, m] * pa.rels[j, i]
                if coef:
                    row[nphi + idx] += coef
            if any(row):
                rows.append(row)
    system = Mat(rows, nphi + nth)
    sols = nullspace(system)
    # maps whose every column lies in the relation submodule of b
    triv_cols = []
    for j in range(pa.ngens):
        idxs = [idx for idx, (m, jj) in enumerate(theta_vars) if jj == j]
        if not idxs:
            continue
        span = pb.relation_span(pa.gens[j] + n)
        if span.ncols == 0:
            continue
        allowed_rows = {theta_vars[idx][0] for idx in idxs}
        bad = [m for m in range(pb.ngens) if m not in allowed_rows]
        ys = nullspace(span.submatrix(bad, range(span.ncols))) if bad else Mat.identity(span.ncols)
        vecs = span @ ys
        for v in vecs.columns():
            if not any(v):
                continue
            full = [Fraction(0)] * nth
            for idx in idxs:
                full[idx] = v[theta_vars[idx][0]]
            triv_cols.append(full)
    trivial = Mat.from_columns(triv_cols, nth)
    trivial = column_space(trivial) if trivial.ncols else trivial
    return _ComponentSystem(k, theta_vars, sols, trivial)


def hom_dims(a: TObject, b: TObject, window: Iterable[int], keys=None, equivariant: bool = False) -> dict[int, int]:
    return {n: hom_set(a, b, n, keys, equivariant).dim for n in window}


# ---------------------------------------------------------------- isomorphism search


def _bijective_on_pieces(src: Presentation, tgt: Presentation, theta: Mat, degree: int) -> bool:
    if src.ring is Ring.LAURENT or tgt.ring is Ring.LAURENT:
        srcl, tgtl = src.as_ring(Ring.LAURENT), tgt.as_ring(Ring.LAURENT)
        degs = [0, 1]
    else:
        srcl, tgtl = src, tgt
        allg = list(src.gens) + list(src.rel_degrees) + [g - degree for g in tgt.gens] + \
            [r - degree for r in tgt.rel_degrees]
        if not allg:
            return True
        degs = range(min(allg) - 3, max(allg) + 1)
    for d in degs:
        qs, qt = srcl.piece(d), tgtl.piece(d + degree)
        if qs.dim != qt.dim:
            return False
        if qs.dim and rank(qs.induced(qt, theta)) != qs.dim:
            return False
    return True


def is_isomorphism(m: TMap) -> bool:
    if m.phi.nrows != m.phi.ncols or (m.phi.nrows and rank(m.phi) != m.phi.nrows):
        return False
    for k in list(m.indices()) + [None]:
        if not _bijective_on_pieces(m.src.nub.at(k), m.tgt.nub.at(k), m.theta_at(k), m.degree):
            return False
    return _bijective_on_pieces(m.src.nub.generic, m.tgt.nub.generic, m.theta.generic, m.degree)


def find_isomorphism(a: TObject, b: TObject, trials: int = 8, seed: int = 0,
                     equivariant: bool = False) -> TMap | None:
    """Search for an isomorphism among random combinations of a basis of degree-0 maps."""
    if a.vertex.graded() != b.vertex.graded():
        return None
    space = hom_set(a, b, 0, equivariant=equivariant)
    basis = space.basis()
    if not basis:
        empty = zero_map(a, b)
        return empty if is_isomorphism(empty) else None
    rng = random.Random(seed)
    for _ in range(trials):
        m = basis[0].scale(rng.randint(1, 97))
        for extra in basis[1:]:
            m = m + extra.scale(rng.randint(-97, 97))
        if is_isomorphism(m):
            return m
    return None


def isomorphic(a: TObject, b: TObject, **kw) -> bool:
    return find_isomorphism(a, b, **kw) is not None


# ---------------------------------------------------------------- standard objects


def sphere(v: EulerClass | None = None) -> TObject:
    """S^V for V with dimension function v: nub generated by c^-v, structure map the inclusion."""
    v = v or EulerClass()
    exc = {k: Presentation.free((2 * e,)) for k, e in v.exponents}
    nub = FpModule(O_F, Germ(exc, Presentation.free((0,))))
    return TObject(nub, Vertex((0,)), Germ({}, Mat([[1]])))


def unit() -> TObject:
    return sphere()


def zero_object(w: bool = False) -> TObject:
    return TObject(FpModule.constant(Presentation.zero(Ring.POLY, w)), Vertex((), () if w else None),
                   Germ({}, Mat.zeros(0, 0)))


def e_torsion(module: FpModule) -> TObject:
    """The object T -> 0 for an Euler-torsion module T."""
    if not is_euler_torsion(module):
        raise UnsupportedInput("T -> 0 is an object only when T is Euler torsion")
    w = module.has_w
    beta = Germ({k: Mat.zeros(0, module.at(k).ngens) for k in module.indices()},
                Mat.zeros(0, module.generic.ngens))
    return TObject(module, Vertex((), () if w else None), beta)


def f_vertex(vertex: Vertex | GradedVec | dict) -> TObject:
    """The object id: E^-1 O_F (x) V -> E^-1 O_F (x) V."""
    if not isinstance(vertex, Vertex):
        vertex = Vertex.of(vertex)
    pres = Presentation.free(vertex.degrees, Ring.POLY, vertex.signs)
    return TObject(FpModule(LOCALIZED, Germ({}, pres)), vertex, Germ({}, Mat.identity(vertex.dim)))


def vertex_of(a: TObject) -> Vertex:
    return a.vertex


def nub_of(a: TObject) -> FpModule:
    return a.nub


def _poly_target(pres: Presentation, b: Mat, vertex: Vertex) -> tuple[Presentation, int]:
    """A free Q[c]-module c^-L (x) V receiving beta."""
    lift = 0
    for u in range(vertex.dim):
        for j in range(pres.ngens):
            if b[u, j]:
                lift = max(lift, (pres.gens[j] - vertex.degrees[u]) // 2)
    return Presentation.free(tuple(d + 2 * lift for d in vertex.degrees), Ring.POLY, vertex.signs), lift


def e_kernel(a: TObject) -> FpModule:
    """The Euler-torsion part of the nub: the kernel of the structure map."""
    exc = {}
    for k in a.indices():
        pres, b = a.component(k)
        if pres.ring is Ring.LAURENT:
            exc[k] = Presentation.zero(Ring.LAURENT, pres.has_w)
            continue
        target, _ = _poly_target(pres, b, a.vertex)
        exc[k] = pres_kernel(pres, target, b, 0)[0]
    pres, b = a.component(None)
    if pres.ring is Ring.POLY:
        target, _ = _poly_target(pres, b, a.vertex)
        if not pres_kernel(pres, target, b, 0)[0].is_zero():
            raise UnsupportedInput("kernel at almost every index is not finitely presented over O_F")
    kern = FpModule(a.nub.ring, Germ(exc, Presentation.zero(Ring.POLY, pres.has_w)))
    return kern.simplified()


# ---------------------------------------------------------------- monoidal structure


def coproduct(a: TObject, b: TObject) -> TObject:
    keys = joint_indices(a.nub.parts, b.nub.parts, a.beta, b.beta)
    nub = module_sum(a.nub, b.nub)
    beta = Germ({k: block_diag([a.beta_at(k), b.beta_at(k)]) for k in keys},
                block_diag([a.beta.generic, b.beta.generic]))
    return TObject(nub, a.vertex + b.vertex, beta)


product = coproduct


def tensor_t(a: TObject, b: TObject) -> TObject:
    keys = joint_indices(a.nub.parts, b.nub.parts, a.beta, b.beta)
    nub = module_tensor(a.nub, b.nub)
    beta = Germ({k: kron(a.beta_at(k), b.beta_at(k)) for k in keys}, kron(a.beta.generic, b.beta.generic))
    return TObject(nub, a.vertex.tensor(b.vertex), beta).simplified()


def _inverse_beta(pres: Presentation, b: Mat, vertex: Vertex, ring: Ring) -> Mat:
    """X with b X = identity, homogeneous of degree 0 over ``ring`` (a section of beta)."""
    support = [(j, u) for u in range(vertex.dim) for j in range(pres.ngens)
               if allowed_exponent(ring, pres.gens[j], vertex.degrees[u]) is not None]
    rows, rhs = [], []
    for v in range(vertex.dim):
        for u in range(vertex.dim):
            row = [Fraction(0)] * len(support)
            for idx, (j, uu) in enumerate(support):
                if uu == u and b[v, j]:
                    row[idx] = b[v, j]
            rows.append(row)
            rhs.append([Fraction(int(u == v))])
    sol = solve(Mat(rows, len(support)), Mat(rhs, 1))
    if sol is None:
        raise ValidationError("structure map has no section")
    x = [[Fraction(0)] * vertex.dim for _ in range(pres.ngens)]
    for idx, (j, u) in enumerate(support):
        x[j][u] = sol[idx, 0]
    return Mat(x, vertex.dim)


def _function_component(pa: Presentation, ba: Mat, pb: Presentation, bb: Mat,
                        va: Vertex, vb: Vertex, ring: Ring) -> tuple[Presentation, Mat]:
    h, gens_as_maps = pres_hom(pa, pb)
    x = _inverse_beta(pa, ba, va, ring)
    cols = []
    for c in range(gens_as_maps.ncols):
        vec = gens_as_maps.column(c)
        theta = Mat([[vec[j * pb.ngens + m] for j in range(pa.ngens)] for m in range(pb.ngens)], pa.ngens)
        img = bb @ theta @ x
        cols.append([img[bidx, aidx] for aidx in range(va.dim) for bidx in range(vb.dim)])
    return h, Mat.from_columns(cols, va.dim * vb.dim)


def function_object(a: TObject, b: TObject) -> TObject:
    """Internal hom F(A, B): nub hom_{O_F}(N, M), structure map theta -> beta_B theta beta_A^-1."""
    va, vb = a.vertex, b.vertex
    if a.nub.ring == LOCALIZED and b.nub.ring == O_F:
        return zero_object(a.has_w and b.has_w)
    ring = b.nub.ring
    keys = joint_indices(a.nub.parts, b.nub.parts, a.beta, b.beta)
    exc_n, exc_b = {}, {}
    for k in keys:
        pa, ba = a.component(k)
        pb, bb = b.component(k)
        h, beta = _function_component(pa, ba, pb, bb, va, vb, Ring.LAURENT)
        want = Ring.POLY if ring == O_F else Ring.LAURENT
        exc_n[k] = h.as_ring(want)
        exc_b[k] = beta
    h, beta = _function_component(a.nub.generic, a.beta.generic, b.nub.generic, b.beta.generic, va, vb, Ring.POLY)
    nub = FpModule(ring, Germ(exc_n, h))
    return TObject(nub, va.hom(vb), Germ(exc_b, beta)).simplified()


def is_dualisable(a: TObject) -> bool:
    if a.nub.ring == LOCALIZED:
        return a.nub.is_zero()
    return is_fg_projective(a.nub)[0]


def dual(a: TObject) -> TObject:
    return function_object(a, unit())


def suspend(a: TObject, k: int) -> TObject:
    """Integer suspension: every degree moves up by k."""
    nub = a.nub.map_components(lambda _, p: p.shift(k))
    return TObject(nub, a.vertex.shift(k), a.beta, validate=False)


def sigma_t(a: TObject, v: EulerClass, sign: int = 1) -> TObject:
    """Suspension by a representation with dimension function v (nub only; the vertex is unchanged)."""
    nub = shift_by_euler(a.nub, v, sign)
    return TObject(nub, a.vertex, a.beta)


# ---------------------------------------------------------------- limits and colimits


def cokernel(m: TMap) -> TObject:
    """Cokernel of a degree-0 map; its nub generators are those of the target."""
    if m.degree:
        raise UnsupportedInput("cokernel of a map of nonzero degree")
    a, b = m.src, m.tgt
    chosen, proj = graded_image_complement(m.phi, b.vertex.degrees)
    signs = None if b.vertex.signs is None else tuple(b.vertex.signs[i] for i in chosen)
    vertex = Vertex(tuple(b.vertex.degrees[i] for i in chosen), signs)
    keys = m.indices()
    exc_n, exc_b = {}, {}
    for k in keys:
        exc_n[k] = pres_cokernel(a.nub.at(k), b.nub.at(k), m.theta_at(k))
        exc_b[k] = proj @ b.beta_at(k)
    gen = pres_cokernel(a.nub.generic, b.nub.generic, m.theta.generic)
    nub = FpModule(b.nub.ring, Germ(exc_n, gen))
    return TObject(nub, vertex, Germ(exc_b, proj @ b.beta.generic)).simplified()


def kernel(m: TMap) -> TObject:
    if m.degree:
        raise UnsupportedInput("kernel of a map of nonzero degree")
    a = m.src
    kb = graded_kernel_basis(m.phi, a.vertex.degrees, m.tgt.vertex.degrees)
    kdeg = tuple(next(a.vertex.degrees[i] for i in range(a.vertex.dim) if col[i]) for col in kb.columns())
    signs = None
    if a.vertex.signs is not None:
        signs = tuple(vector_sign(a.vertex.signs, a.vertex.degrees, col, d) for col, d in zip(kb.columns(), kdeg))
    vertex = Vertex(kdeg, signs)
    keys = m.indices()
    exc_n, exc_b = {}, {}

    def part(k, pa, ba, pb, th):
        kp, incl = pres_kernel(pa, pb, th, 0)
        img = ba @ incl
        y = solve(kb, img) if kb.ncols else Mat.zeros(0, img.ncols)
        if y is None:
            raise AssertionError("kernel: nub kernel does not land in vertex kernel")
        return kp, y

    for k in keys:
        pa, ba = a.component(k)
        exc_n[k], exc_b[k] = part(k, pa, ba, m.tgt.nub.at(k), m.theta_at(k))
    gp, gb = part(None, a.nub.generic, a.beta.generic, m.tgt.nub.generic, m.theta.generic)
    want = Ring.POLY if a.nub.ring == O_F else Ring.LAURENT
    exc_n = {k: p.as_ring(want) for k, p in exc_n.items()}
    return TObject(FpModule(a.nub.ring, Germ(exc_n, gp.as_ring(Ring.POLY))), vertex, Germ(exc_b, gb)).simplified()


def _pair_map(f: TMap, g: TMap, sign: int) -> TMap:
    """(f, sign*g): B (+) C -> D from f: B -> D and g: C -> D."""
    src = coproduct(f.src, g.src)
    keys = joint_indices(f.theta, g.theta, src.nub.parts, f.tgt.nub.parts)
    theta = Germ({k: hstack([f.theta_at(k), g.theta_at(k).scale(sign)]) for k in keys},
                 hstack([f.theta.generic, g.theta.generic.scale(sign)]))
    return TMap(src, f.tgt, hstack([f.phi, g.phi.scale(sign)]), theta, 0)


def _copair_map(f: TMap, g: TMap, sign: int) -> TMap:
    """(f, sign*g): A -> B (+) C."""
    tgt = coproduct(f.tgt, g.tgt)
    keys = joint_indices(f.theta, g.theta, tgt.nub.parts, f.src.nub.parts)
    theta = Germ({k: vstack([f.theta_at(k), g.theta_at(k).scale(sign)]) for k in keys},
                 vstack([f.theta.generic, g.theta.generic.scale(sign)]))
    return TMap(f.src, tgt, vstack([f.phi, g.phi.scale(sign)]), theta, 0)


def pullback(f: TMap, g: TMap) -> TObject:
    """Limit of B -> D <- C.  Inverting Euler classes is exact, so the termwise pullback is an object."""
    return kernel(_pair_map(f, g, -1))


def pushout(f: TMap, g: TMap) -> TObject:
    """Colimit of B <- A -> C."""
    return cokernel(_copair_map(f, g, -1))


# ---------------------------------------------------------------- wide spheres


@dataclass(frozen=True)
class WideSphereData:
    """Generators c^{a_i} u_i and sum_i sigma_i u_i inside E^-1 O_F (x) U.

    ``degrees`` gives the degrees of the basis vectors u_i of U.
    """

    a: tuple
    sigma: tuple
    degrees: tuple = ()

    def __post_init__(self):
        degs = tuple(self.degrees) or (0,) * len(self.a)
        object.__setattr__(self, "degrees", tuple(int(d) for d in degs))
        if not (len(self.a) == len(self.sigma) == len(self.degrees)):
            raise ValueError("wide sphere data needs one Euler class, coefficient and degree per vector")
        self.total_degree()

    @property
    def d(self) -> int:
        return len(self.a)

    def total_degree(self) -> int | None:
        """Degree of the extra generator sum_i sigma_i u_i (None when it is zero)."""
        found = None
        for s, u in zip(self.sigma, self.degrees):
            if s.is_zero():
                continue
            deg = s.degree + u
            if found is not None and found != deg:
                raise ValueError("the coefficients sigma_i u_i do not have a common degree")
            found = deg
        return found

    def indices(self) -> tuple[int, ...]:
        ks = set()
        for a in self.a:
            ks.update(a.support())
        for s in self.sigma:
            ks.update(s.indices())
        return tuple(sorted(ks))


def _wide_component(data: WideSphereData, k: int | None, lift: int | None = None):
    """Unsimplified nub at one index: (presentation, spanning vectors, lift L)."""
    d = data.d
    total = data.total_degree()
    coeffs = [Fraction(0)] * d
    if total is not None:
        coeffs = [data.sigma[i].coefficient(k, total - data.degrees[i]) for i in range(d)]
    a = [0 if k is None else data.a[i].at(k) for i in range(d)]
    if lift is None:
        lift = 0
        for i in range(d):
            if coeffs[i]:
                lift = max(lift, (total - data.degrees[i]) // 2)
    target = Presentation.free(tuple(u + 2 * lift for u in data.degrees))
    degs = [data.degrees[i] - 2 * a[i] for i in range(d)]
    vecs = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    if total is not None:
        degs.append(total)
        vecs.append(coeffs)
    return target, tuple(degs), Mat.from_columns(vecs, d)


def _wide_nub(data: WideSphereData, k):
    target, degs, vecs = _wide_component(data, k)
    sub, _ = submodule(target, degs, vecs, simplify=False)
    return sub, vecs


def wide_sphere(data: WideSphereData) -> TObject:
    if data.d == 0:
        warnings.warn("wide sphere with no generators is the zero object", stacklevel=2)
        return zero_object()
    obj, _ = _wide_sphere_with_spanning(data)
    return obj


def _wide_sphere_with_spanning(data: WideSphereData):
    """The wide sphere and, per index, the matrix expressing spanning elements in its generators."""
    vertex = Vertex(data.degrees)
    exc_n, exc_b, spans = {}, {}, {}
    for k in list(data.indices()) + [None]:
        sub, vecs = _wide_nub(data, k)
        small, to_new, to_old = sub.simplify()
        if k is None:
            gen_n, gen_b = small, vecs @ to_old
        else:
            exc_n[k], exc_b[k] = small, vecs @ to_old
        spans[k] = to_new
    obj = TObject(FpModule(O_F, Germ(exc_n, gen_n)), vertex, Germ(exc_b, gen_b))
    return obj, spans


# ---------------------------------------------------------------- covering by wide spheres


@dataclass
class CoverResult:
    sphere: TObject
    map: TMap
    preimage: ModuleElement
    data: WideSphereData


def _minimal_power(pres: Presentation, b: Mat, vertex: Vertex, i: int) -> tuple[int, list]:
    """Least b >= 0 with c^b u_i in the image of beta, and a preimage."""
    target = Mat.from_columns([[Fraction(int(u == i)) for u in range(vertex.dim)]], vertex.dim)
    for power in range(200):
        deg = vertex.degrees[i] - 2 * power
        act = pres.active(deg)
        y = solve(b.submatrix(range(vertex.dim), act), target)
        if y is not None:
            vec = [Fraction(0)] * pres.ngens
            for idx, j in enumerate(act):
                vec[j] = y[idx, 0]
            return power, vec
    raise CoverDefect(f"no multiple of basis vector {i} lies in the image of the structure map")


def cover(a: TObject, n: ModuleElement, max_rounds: int = 64) -> CoverResult:
    """A wide sphere W and a map W -> A whose nub image contains n."""
    if n.module != a.nub:
        raise ValueError("the element must belong to the nub of the object")
    if a.nub.ring != O_F:
        raise UnsupportedInput("covering is implemented for objects with nub over O_F")
    d = n.degree
    keys = sorted(set(a.indices()) | set(n.indices()))
    comps = keys + [None]
    vertex = a.vertex
    s_at, x_at = {}, {}
    for k in comps:
        pres, b = a.component(k)
        x = list(n.at(k))
        x_at[k] = x
        s_at[k] = b.apply(x)
    extended = any(not any(s_at[k]) and not a.nub.at(k).contains(x_at[k], d) for k in comps)
    dv = vertex.dim
    powers = {k: [0] * dv for k in keys}
    pre = {}
    for k in comps:
        pres, b = a.component(k)
        pre[k] = []
        for i in range(dv):
            if k is None:
                power, vec = _minimal_power(pres, b, vertex, i)
                if power:
                    raise CoverDefect("structure map is not onto at almost every index")
            else:
                power, vec = _minimal_power(pres, b, vertex, i)
                powers[k][i] = power
            pre[k].append(vec)
    extra_power = {k: 0 for k in keys}

    def make_data():
        a_cls, sig = [], []
        for i in range(dv):
            a_cls.append(EulerClass.of({k: powers[k][i] for k in keys}))
            deg = d - vertex.degrees[i]
            coeff = Germ({k: s_at[k][i] for k in keys}, s_at[None][i])
            sig.append(OFElement.homogeneous(deg, coeff) if deg % 2 == 0 else OFElement())
        degs = vertex.degrees
        if extended:
            a_cls.append(EulerClass.of(extra_power))
            sig.append(OFElement.scalar(1))
            degs = degs + (d,)
        return WideSphereData(tuple(a_cls), tuple(sig), degs)

    for _ in range(max_rounds):
        data = make_data()
        failing = []
        thetas = {}
        for k in comps:
            sub, vecs = _wide_nub(data, k)
            pres = a.nub.at(k)
            cols = [list(pre[k][i]) for i in range(dv)]
            if extended:
                cols.append([Fraction(0)] * pres.ngens)
            cols.append(x_at[k])
            theta = Mat.from_columns(cols[:sub.ngens], pres.ngens)
            try:
                check_map(sub, pres, theta, 0)
            except ModuleError:
                failing.append(k)
                continue
            thetas[k] = theta
        if not failing:
            break
        if None in failing:
            raise CoverDefect("covering map is not well defined at almost every index")
        for k in failing:
            powers[k] = [p + 1 for p in powers[k]]
            extra_power[k] += 1
    else:
        raise CoverDefect("covering search exceeded its round limit")

    sphere_obj, _ = _wide_sphere_with_spanning(data)
    theta_small, coords = {}, {}
    last = data.d if data.total_degree() is not None else None
    for k in comps:
        sub, _ = _wide_nub(data, k)
        _, to_new, to_old = sub.simplify()
        theta_small[k] = thetas[k] @ to_old
        e = [Fraction(int(j == last)) for j in range(sub.ngens)]
        coords[k] = tuple(to_new.apply(e))
    phi_cols = [[Fraction(int(r == i)) for r in range(dv)] for i in range(dv)]
    if extended:
        phi_cols.append([Fraction(0)] * dv)
    phi = Mat.from_columns(phi_cols, dv)
    generic = theta_small.pop(None)
    m = TMap(sphere_obj, a, phi, Germ(theta_small, generic), 0)
    m.check()
    gen_coords = coords.pop(None)
    preimage = ModuleElement(sphere_obj.nub, d, Germ(coords, gen_coords))
    for k in comps:
        img = m.theta_at(k).apply(preimage.at(k))
        diff = [p - q for p, q in zip(img, x_at[k])]
        if not a.nub.at(k).contains(diff, d):
            raise CoverDefect("covering map misses the element")
    return CoverResult(sphere_obj, m, preimage, data)


# ---------------------------------------------------------------- the torsion adjoint g


class GTruncation:
    """g(N) cut down to indices k <= truncation and vertex degrees in a window.

    The vertex of g(N) is E^-1 N regarded as a graded vector space, far too
    big to store.  Keeping the summands L_{k', e} with k' <= truncation and e
    in the window gives a finite vertex Y; the nub piece at (k, d) is the
    pullback of N_{k,d} -> L_{k,d} <- Y_d, where L = E^-1 N.
    """

    def __init__(self, module: FpModule, truncation: int, window: tuple[int, int]):
        if module.ring != O_F:
            raise UnsupportedInput("g is defined on O_F-modules")
        self.module = module
        self.truncation = truncation
        self.window = window
        self._cache: dict = {}
        self._pinned: dict = {}  # keeps objects whose ids appear in cache keys alive

    def _pin(self, *objs) -> tuple:
        for o in objs:
            self._pinned[id(o)] = o
        return tuple(id(o) for o in objs)

    def _local(self, k: int) -> Presentation:
        key = ("local", k)
        if key not in self._cache:
            self._cache[key] = self.module.at(k).as_ring(Ring.LAURENT)
        return self._cache[key]

    def blocks(self, d: int) -> list[tuple[int, int]]:
        lo, hi = self.window
        return [(kk, e) for kk in range(1, self.truncation + 1) for e in range(lo, hi + 1)
                if (e - d) % 2 == 0]

    def vertex_dim(self, d: int) -> int:
        return sum(self._local(kk).piece(e).dim for kk, e in self.blocks(d))

    def piece(self, k: int, d: int):
        """The pullback of N_{k,d} -> L_{k,d} <- Y^k_d over the blocks with k' = k.

        The blocks with k' != k map to zero, so they split off: the full nub
        piece is this pullback plus those blocks unchanged.  Returns (dim,
        basis in nub coordinates, basis in Y^k coordinates).
        """
        key = (k, d)
        if key not in self._cache:
            nub_q = self.module.at(k).piece(d)
            loc_q = self._local(k).piece(d)
            iota = nub_q.induced(loc_q, Mat.identity(self.module.at(k).ngens))
            copies = sum(1 for kk, _ in self.blocks(d) if kk == k)
            mu = hstack([Mat.identity(loc_q.dim)] * copies, nrows=loc_q.dim)
            self._cache[key] = linear_pullback(iota, mu)
        return self._cache[key]

    def _other_blocks(self, k: int, d: int) -> list[tuple[int, int]]:
        return [(kk, e) for kk, e in self.blocks(d) if kk != k]

    def nub_dim(self, k: int, d: int) -> int:
        rest = sum(self._local(kk).piece(e).dim for kk, e in self._other_blocks(k, d))
        return self.piece(k, d)[0] + rest

    def _block_map(self, other: "GTruncation", f, kk: int, e: int) -> Mat:
        key = ("block", *self._pin(other, f), kk, e)
        if key not in self._cache:
            self._cache[key] = self._local(kk).piece(e).induced(other._local(kk).piece(e), f.at(kk))
        return self._cache[key]

    def _block_maps(self, other: "GTruncation", f, blocks) -> Mat:
        mats = [self._block_map(other, f, kk, e) for kk, e in blocks]
        return block_diag(mats) if mats else Mat.zeros(0, 0)

    def vertex_map(self, other: "GTruncation", f, d: int) -> Mat:
        """The vertex map in degree d induced by a module map (matrices via ``f.at``)."""
        key = ("vertex", *self._pin(other, f), d)
        if key not in self._cache:
            self._cache[key] = self._block_maps(other, f, self.blocks(d))
        return self._cache[key]

    def nub_map(self, other: "GTruncation", f, k: int, d: int) -> Mat:
        """The map of nub pieces at (k, d) induced by a degree-0 module map."""
        n, px, py = self.piece(k, d)
        n2, qx, qy = other.piece(k, d)
        fx = self.module.at(k).piece(d).induced(other.module.at(k).piece(d), f.at(k))
        own = [(kk, e) for kk, e in self.blocks(d) if kk == k]
        fy = self._block_maps(other, f, own)
        image = vstack([fx @ px, fy @ py], ncols=n)
        sol = solve(vstack([qx, qy], ncols=n2), image)
        if sol is None:
            raise AssertionError("induced map leaves the pullback")
        rest = self._block_maps(other, f, self._other_blocks(k, d))
        return block_diag([sol, rest])


def g(module: FpModule, truncation: int | None = None, window: tuple[int, int] | None = None):
    """The right adjoint of the torsion-kernel functor.

    For Euler-torsion N this is the object N -> 0.  Otherwise the vertex is
    infinite dimensional and a truncation and degree window are required.
    """
    if is_euler_torsion(module):
        return e_torsion(module)
    if truncation is None or window is None:
        raise UnsupportedInput("g(N) for N not Euler torsion needs a truncation and a degree window")
    return GTruncation(module, truncation, window)


def g_sequence_failures(f, h, truncation: int, window: tuple[int, int]) -> list:
    """Places where g applied to 0 -> A -f-> B -h-> C -> 0 fails to be short exact.

    Checked on nub pieces (k, d) with k <= truncation and on vertex degrees.
    """
    ga, gb, gc = (GTruncation(m, truncation, window) for m in (f.src, f.tgt, h.tgt))
    lo, hi = window
    failures = []

    def short_exact(x: Mat, y: Mat, na: int, nb: int, nc: int) -> bool:
        ok = rank(x) == na and rank(y) == nc and (y @ x).is_zero()
        return ok and na + nc == nb

    for d in range(lo, hi + 1):
        for k in range(1, truncation + 1):
            x, y = ga.nub_map(gb, f, k, d), gb.nub_map(gc, h, k, d)
            if not short_exact(x, y, ga.nub_dim(k, d), gb.nub_dim(k, d), gc.nub_dim(k, d)):
                failures.append(("nub", k, d))
        x, y = ga.vertex_map(gb, f, d), gb.vertex_map(gc, h, d)
        if not short_exact(x, y, ga.vertex_dim(d), gb.vertex_dim(d), gc.vertex_dim(d)):
            failures.append(("vertex", None, d))
    return failures


# ---------------------------------------------------------------- differential objects


class DGTObject:
    """An object with a differential of degree -1, a self-map squaring to zero."""

    def __init__(self, obj: TObject, differential: TMap):
        if differential.src is not obj or differential.tgt is not obj or differential.degree != -1:
            raise ValidationError("the differential must be a degree -1 self-map")
        differential.check()
        square = differential.compose(differential)
        if not square.phi.is_zero():
            raise ValidationError("d o d is nonzero on the vertex")
        for k in list(square.indices()) + [None]:
            pres = obj.nub.at(k) if k is not None else obj.nub.generic
            th = square.theta_at(k)
            for j in range(pres.ngens):
                if not pres.contains(th.column(j), pres.gens[j] - 2):
                    raise ValidationError("d o d is nonzero on the nub", k)
        self.obj = obj
        self.d = differential

    @classmethod
    def trivial(cls, obj: TObject) -> "DGTObject":
        return cls(obj, zero_map(obj, obj, -1))

    def vertex_homology(self) -> GradedVec:
        degs = self.obj.vertex.degrees
        out = {}
        for n in set(degs):
            here = [i for i, x in enumerate(degs) if x == n]
            below = [i for i, x in enumerate(degs) if x == n - 1]
            above = [i for i, x in enumerate(degs) if x == n + 1]
            out[n] = len(here) - rank(self.d.phi.submatrix(below, here)) - rank(self.d.phi.submatrix(here, above))
        return GradedVec(out)

    def nub_homology(self, k: int | None) -> Presentation:
        """Homology of the nub at one component, as a presentation."""
        pres = self.obj.nub.at(k)
        dmat = self.d.theta_at(k)
        kern, incl = pres_kernel(pres, pres, dmat, -1)
        # express each boundary d(g_j) in the generators of the kernel
        rows, gens = [], []
        for j, gdeg in enumerate(pres.gens):
            target = gdeg - 1
            cols = [i for i in range(kern.ngens) if allowed_exponent(pres.ring, kern.gens[i], target) is not None]
            rcols = [i for i, r in enumerate(pres.rel_degrees) if allowed_exponent(pres.ring, r, target) is not None]
            sub = hstack([incl.submatrix(range(pres.ngens), cols),
                          pres.rels.submatrix(range(pres.ngens), rcols)], nrows=pres.ngens)
            active = pres.active(target)
            sub = sub.submatrix(active, range(sub.ncols))
            sol = solve(sub, Mat.from_columns([[dmat[a, j] for a in active]], len(active)))
            if sol is None:
                raise AssertionError("boundary outside the cycles")
            y = [Fraction(0)] * kern.ngens
            for pos, i in enumerate(cols):
                y[i] = sol[pos, 0]
            rows.append(y)
            gens.append(target)
        boundaries = Presentation.free(tuple(gens), pres.ring)
        return pres_cokernel(boundaries, kern, Mat.from_columns(rows, kern.ngens), 0).simplified()


def mapping_complex(a: DGTObject, b: DGTObject, window: Iterable[int]) -> tuple[dict, dict]:
    """Hom spaces in each degree of the window and the differentials between them.

    The differential sends f of degree n to d_B f + (-1)^(n+1) f d_A.
    Returns (spaces by degree, matrices by degree n for Hom_n -> Hom_{n-1}).
    """
    window = sorted(window)
    keys = sorted(set(a.obj.indices()) | set(b.obj.indices()) | set(a.d.indices()) | set(b.d.indices()))
    spaces = {n: hom_set(a.obj, b.obj, n, keys) for n in window}
    diffs = {}
    for n in window:
        if n - 1 not in spaces:
            continue
        sign = -1 if n % 2 == 0 else 1
        cols = []
        for f in spaces[n].basis():
            df = b.d.compose(f) + f.compose(a.d).scale(sign)
            cols.append(spaces[n - 1].coordinates(df))
        diffs[n] = Mat.from_columns(cols, spaces[n - 1].dim)
    return spaces, diffs
