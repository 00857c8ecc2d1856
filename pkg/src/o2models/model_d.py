"""The dihedral model: sheaves of Q[W]-complexes over the space {1, 2, ..., infinity}.

An object has a complex V_k of Q[W]-modules at each finite index and a
rational complex V_inf at the limit point, with a structure map from V_inf
into the tails colim_n prod_{k >= n} V_k.  We only store objects whose stalks
are eventually constant (a :class:`Germ`) and whose structure map is the
diagonal of a single map ``sigma`` from V_inf into the W-fixed part of the
generic stalk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .burnside import e_dihedral, restrict
from .exactlin import (
    ChainCx, GradedVec, Mat, Quotient, WChainCx, WVec, block_diag, hstack,
    induced_on_homology, homology_basis, kron, nullspace, rank, regular_power, solve, tensor_layout,
    vstack,
)
from .germ import Germ, combine, joint_indices
from .model_t import UnsupportedInput, ValidationError


def _zero_cx() -> ChainCx:
    return ChainCx(GradedVec())


def _degrees(*cxs) -> list[int]:
    out: set[int] = set()
    for cx in cxs:
        out.update(cx.dims.degrees())
    return sorted(out)


def _map_at(f: Mapping[int, Mat], n: int, rows: int, cols: int) -> Mat:
    m = f.get(n)
    return m if m is not None else Mat.zeros(rows, cols)


def _is_chain_map(src: ChainCx, tgt: ChainCx, f: Mapping[int, Mat]) -> bool:
    for n in set(_degrees(src, tgt)) | {n + 1 for n in _degrees(src, tgt)}:
        fn = _map_at(f, n, tgt.dims[n], src.dims[n])
        fm = _map_at(f, n - 1, tgt.dims[n - 1], src.dims[n - 1])
        if tgt.d(n) @ fn != fm @ src.d(n):
            return False
    return True


def _check_shapes(src: ChainCx, tgt: ChainCx, f: Mapping[int, Mat], what: str) -> None:
    for n, m in f.items():
        if m.shape != (tgt.dims[n], src.dims[n]):
            raise ValidationError(f"{what} in degree {n} has shape {m.shape}, "
                                  f"expected {(tgt.dims[n], src.dims[n])}")


@dataclass(frozen=True)
class WChainMap:
    """A W-equivariant chain map as its two eigenspace blocks, degreewise."""

    plus: Mapping[int, Mat] = field(default_factory=dict)
    minus: Mapping[int, Mat] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "plus", {n: m for n, m in sorted(self.plus.items()) if not m.is_zero()})
        object.__setattr__(self, "minus", {n: m for n, m in sorted(self.minus.items()) if not m.is_zero()})

    def __hash__(self):
        return hash((tuple(self.plus.items()), tuple(self.minus.items())))

    def check(self, src: WChainCx, tgt: WChainCx) -> None:
        _check_shapes(src.plus, tgt.plus, self.plus, "map of +1 parts")
        _check_shapes(src.minus, tgt.minus, self.minus, "map of -1 parts")
        if not (_is_chain_map(src.plus, tgt.plus, self.plus) and _is_chain_map(src.minus, tgt.minus, self.minus)):
            raise ValidationError("stalk map is not a chain map")

    def compose(self, other: "WChainMap", mid: WChainCx, src: WChainCx, tgt: WChainCx) -> "WChainMap":
        return WChainMap(_compose(self.plus, other.plus, src.plus, mid.plus, tgt.plus),
                         _compose(self.minus, other.minus, src.minus, mid.minus, tgt.minus))


def _compose(f, g, src: ChainCx, mid: ChainCx, tgt: ChainCx) -> dict:
    out = {}
    for n in src.dims.degrees():
        out[n] = _map_at(f, n, tgt.dims[n], mid.dims[n]) @ _map_at(g, n, mid.dims[n], src.dims[n])
    return out


class DObject:
    """Eventually constant stalks, the limit-point complex and sigma: V_inf -> (generic stalk)^W."""

    __slots__ = ("stalks", "infty", "sigma")

    def __init__(self, stalks: Germ, infty: ChainCx, sigma: Mapping[int, Mat] | None = None):
        sigma = {n: m for n, m in sorted((sigma or {}).items()) if not m.is_zero()}
        object.__setattr__(self, "stalks", stalks)
        object.__setattr__(self, "infty", infty)
        object.__setattr__(self, "sigma", sigma)
        gen = stalks.generic
        for k, s in list(stalks.items()) + [(None, gen)]:
            if not isinstance(s, WChainCx):
                raise ValidationError("stalks must be complexes of Q[W]-modules", k)
        _check_shapes(infty, gen.plus, sigma, "sigma")
        if not _is_chain_map(infty, gen.plus, sigma):
            raise ValidationError("sigma is not a chain map")

    def __setattr__(self, name, value):
        raise AttributeError("DObject is immutable")

    def __eq__(self, other):
        return (isinstance(other, DObject) and self.stalks == other.stalks and self.infty == other.infty
                and self.sigma == other.sigma)

    def __hash__(self):
        return hash((self.stalks, self.infty.dims, tuple(self.sigma.items())))

    def __repr__(self):
        return f"DObject(stalks={self.stalks!r}, infty={self.infty!r}, sigma={self.sigma!r})"

    @property
    def generic(self) -> WChainCx:
        return self.stalks.generic

    def stalk(self, k: int | None) -> WChainCx:
        return self.generic if k is None else self.stalks.at(k)

    def indices(self) -> tuple[int, ...]:
        return self.stalks.exceptional_indices()

    @property
    def bound(self) -> int:
        return self.stalks.bound

    def sigma_at(self, n: int) -> Mat:
        return _map_at(self.sigma, n, self.generic.plus.dims[n], self.infty.dims[n])

    @property
    def is_graded(self) -> bool:
        return self.infty.is_graded and all(s.is_graded for _, s in self.stalks.items()) and self.generic.is_graded


def graded_d(stalks: Mapping[int, WVec] | None = None, generic: WVec | None = None,
             infty: GradedVec | Mapping[int, int] | None = None, sigma: Mapping[int, Mat] | None = None
             ) -> DObject:
    """A DObject with zero differentials."""
    def cx(v: WVec) -> WChainCx:
        return WChainCx(ChainCx(v.plus), ChainCx(v.minus))

    infty = infty if isinstance(infty, GradedVec) else GradedVec(infty or {})
    germ = Germ({k: cx(v) for k, v in (stalks or {}).items()}, cx(generic or WVec()))
    return DObject(germ, ChainCx(infty), sigma)


def make_d(stalks: Mapping[int, WChainCx], generic: WChainCx, infty: ChainCx,
           sigma: Mapping[int, Mat] | None = None, bound: int | None = None) -> DObject:
    """Validate raw data; ``sigma`` maps into the whole generic stalk (+1 rows first, then -1 rows)."""
    if bound is not None:
        late = [k for k in stalks if k >= bound and stalks[k] != generic]
        if late:
            raise ValidationError(f"stalk at index {late[0]} differs from the generic one beyond the bound")
    fixed = {}
    for n, m in (sigma or {}).items():
        p, q = generic.plus.dims[n], generic.minus.dims[n]
        if m.shape != (p + q, infty.dims[n]):
            raise ValidationError(f"sigma in degree {n} has shape {m.shape}, expected {(p + q, infty.dims[n])}")
        if not m.submatrix(range(p, p + q), range(m.ncols)).is_zero():
            raise ValidationError(f"sigma does not land in the W-fixed part in degree {n}")
        fixed[n] = m.submatrix(range(p), range(m.ncols))
    return DObject(Germ(dict(stalks), generic), infty, fixed)


class DMap:
    """Chain maps f_inf and f_k (a germ of W-maps) commuting with the structure maps."""

    __slots__ = ("src", "tgt", "f_infty", "f_stalks")

    def __init__(self, src: DObject, tgt: DObject, f_infty: Mapping[int, Mat], f_stalks: Germ,
                 check: bool = True):
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "f_infty", {n: m for n, m in f_infty.items() if not m.is_zero()})
        object.__setattr__(self, "f_stalks", f_stalks)
        if check:
            self.check()

    def __setattr__(self, name, value):
        raise AttributeError("DMap is immutable")

    def at(self, k: int | None) -> WChainMap:
        return self.f_stalks.generic if k is None else self.f_stalks.at(k)

    def indices(self) -> tuple[int, ...]:
        return joint_indices(self.f_stalks, self.src.stalks, self.tgt.stalks)

    def check(self) -> None:
        a, b = self.src, self.tgt
        _check_shapes(a.infty, b.infty, self.f_infty, "map at infinity")
        if not _is_chain_map(a.infty, b.infty, self.f_infty):
            raise ValidationError("map at infinity is not a chain map")
        for k in list(self.indices()) + [None]:
            try:
                self.at(k).check(a.stalk(k), b.stalk(k))
            except ValidationError as exc:
                raise ValidationError(str(exc), k) from exc
        gen = self.at(None)
        for n in _degrees(a.infty):
            left = _map_at(gen.plus, n, b.generic.plus.dims[n], a.generic.plus.dims[n]) @ a.sigma_at(n)
            right = b.sigma_at(n) @ _map_at(self.f_infty, n, b.infty.dims[n], a.infty.dims[n])
            if left != right:
                raise ValidationError(f"the square with the structure maps does not commute in degree {n}")

    def compose(self, other: "DMap") -> "DMap":
        """self after other."""
        a, m, b = other.src, other.tgt, self.tgt
        keys = joint_indices(self.f_stalks, other.f_stalks, a.stalks, m.stalks, b.stalks)
        stalks = Germ({k: self.at(k).compose(other.at(k), m.stalk(k), a.stalk(k), b.stalk(k)) for k in keys},
                      self.at(None).compose(other.at(None), m.generic, a.generic, b.generic))
        return DMap(a, b, _compose(self.f_infty, other.f_infty, a.infty, m.infty, b.infty), stalks)


def identity_d(v: DObject) -> DMap:
    def ident(s: WChainCx) -> WChainMap:
        return WChainMap({n: Mat.identity(s.plus.dims[n]) for n in s.plus.dims.degrees()},
                         {n: Mat.identity(s.minus.dims[n]) for n in s.minus.dims.degrees()})

    return DMap(v, v, {n: Mat.identity(v.infty.dims[n]) for n in v.infty.dims.degrees()},
                Germ({k: ident(s) for k, s in v.stalks.items()}, ident(v.generic)))


# ---------------------------------------------------------------- section spaces


@dataclass(frozen=True)
class SectionSpace:
    """A graded space made of one piece per index k >= start plus a piece at infinity.

    Indices listed in ``per_index`` carry their own piece, every other index
    k >= start carries ``generic``.  The whole space is the direct sum, so it
    is infinite dimensional as soon as ``generic`` is nonzero.
    """

    start: int
    per_index: Mapping[int, GradedVec]
    generic: GradedVec
    infinity: GradedVec

    def __post_init__(self):
        clean = {k: v for k, v in sorted(self.per_index.items()) if k >= self.start and v != self.generic}
        object.__setattr__(self, "per_index", clean)

    def __hash__(self):
        return hash((self.start, tuple(self.per_index.items()), self.generic, self.infinity))

    def at(self, k: int) -> GradedVec:
        return self.per_index.get(k, self.generic) if k >= self.start else GradedVec()

    def truncated(self, top: int) -> GradedVec:
        """The part supported on indices start..top plus the piece at infinity."""
        out = self.infinity
        for k in range(self.start, top + 1):
            out = out + self.at(k)
        return out

    def finite_dims(self) -> GradedVec | None:
        """Total dimensions, or None when the space is infinite dimensional."""
        if self.generic.total:
            return None
        out = self.infinity
        for v in self.per_index.values():
            out = out + v
        return out

    def is_zero(self) -> bool:
        return self.finite_dims() == GradedVec()

    def describe(self) -> str:
        parts = [f"k={k}: {dict(v.dims)}" for k, v in self.per_index.items()]
        parts.append(f"other k>={self.start}: {dict(self.generic.dims)}")
        parts.append(f"infinity: {dict(self.infinity.dims)}")
        return "; ".join(parts)


def pitchfork(v: DObject, start: int, fixed: bool = False) -> SectionSpace:
    """Sections over {start, start+1, ..., infinity}.

    A section is x_inf with a sequence (x_k) agreeing with sigma(x_inf) for
    large k, so it is x_inf plus a finitely supported sequence.
    """
    if start < 1:
        raise ValueError("the pitchfork starts at an index >= 1")

    def part(s: WChainCx) -> GradedVec:
        return s.plus.dims if fixed else s.spaces.total

    return SectionSpace(start, {k: part(s) for k, s in v.stalks.items()}, part(v.generic), v.infty.dims)


def global_sections(v: DObject) -> SectionSpace:
    return pitchfork(v, 1, fixed=True)


# ---------------------------------------------------------------- adjoint functors


def zero_d() -> DObject:
    return DObject(Germ({}, WChainCx.zero()), _zero_cx())


def i_k(k: int, r: WChainCx) -> DObject:
    """The skyscraper at index k."""
    return DObject(Germ({k: r}, WChainCx.zero()), _zero_cx())


def p_k(v: DObject, k: int) -> WChainCx:
    return v.stalk(k)


def i_inf(m: ChainCx) -> DObject:
    return DObject(Germ({}, WChainCx.zero()), m)


def p_inf(v: DObject) -> ChainCx:
    return v.infty


def constant(m: ChainCx) -> DObject:
    """The constant sheaf: every stalk M with trivial action, sigma the identity."""
    return DObject(Germ({}, WChainCx.trivial(m)), m, {n: Mat.identity(m.dims[n]) for n in m.dims.degrees()})


def cq() -> DObject:
    return constant(ChainCx.graded({0: 1}))


def regular_stalk(i: int) -> WChainCx:
    """Q[W]^(x) i in degree 0."""
    w = regular_power(i)
    return WChainCx(ChainCx(w.plus), ChainCx(w.minus))


# ---------------------------------------------------------------- tensor and internal hom


def _tensor_sigma(a: DObject, b: DObject) -> dict:
    """sigma_a (x) sigma_b into the (+)(x)(+) block, which comes first in the generic stalk."""
    layout_inf, dims_inf = tensor_layout(a.infty.dims, b.infty.dims)
    layout_gen, dims_gen = tensor_layout(a.generic.plus.dims, b.generic.plus.dims)
    out = {}
    for n in dims_inf.degrees():
        rows = a.generic.plus.tensor(b.generic.plus).dims[n] + a.generic.minus.tensor(b.generic.minus).dims[n]
        m = [[Fraction(0)] * dims_inf[n] for _ in range(rows)]
        for (p, q), col_off in layout_inf.items():
            if p + q != n or (p, q) not in layout_gen:
                continue
            block = kron(a.sigma_at(p), b.sigma_at(q))
            row_off = layout_gen[(p, q)]
            for i in range(block.nrows):
                for j in range(block.ncols):
                    m[row_off + i][col_off + j] = block[i, j]
        out[n] = Mat(m, dims_inf[n])
    return out


def tensor_d(a: DObject, b: DObject) -> DObject:
    """Stalkwise tensor product with the diagonal action."""
    stalks = combine(lambda x, y: x.tensor(y), a.stalks, b.stalks)
    return DObject(stalks, a.infty.tensor(b.infty), _tensor_sigma(a, b))


def hom_complex(a: ChainCx, b: ChainCx) -> tuple[ChainCx, dict]:
    """Hom_Q(a, b) with (Df) = d f - (-1)^n f d.

    Returns the complex and the layout {(n, p): offset}: the block Hom(a_p, b_{p+n})
    sits at that offset of degree n, entry (r, s) at offset + r * dim a_p + s.
    """
    layout, fill = {}, {}
    for p in a.dims.degrees():
        for q in b.dims.degrees():
            n = q - p
            layout[(n, p)] = fill.get(n, 0)
            fill[n] = fill.get(n, 0) + a.dims[p] * b.dims[q]
    dims = GradedVec(fill)
    diffs = {}
    for n in dims.degrees():
        if not dims[n - 1]:
            continue
        cols = []
        for (nn, p), off in sorted(layout.items(), key=lambda t: t[1]):
            if nn != n:
                continue
            ap, bq = a.dims[p], b.dims[p + n]
            for r in range(bq):
                for s in range(ap):
                    f = Mat([[Fraction(int(i == r and j == s)) for j in range(ap)] for i in range(bq)], ap)
                    col = [Fraction(0)] * dims[n - 1]
                    # d_b f lands in Hom(a_p, b_{p+n-1})
                    if (n - 1, p) in layout:
                        g = b.d(p + n) @ f
                        o = layout[(n - 1, p)]
                        for i in range(g.nrows):
                            for j in range(g.ncols):
                                col[o + i * ap + j] += g[i, j]
                    # f d_a lands in Hom(a_{p+1}, b_{p+n})
                    if (n - 1, p + 1) in layout:
                        g = f @ a.d(p + 1)
                        o = layout[(n - 1, p + 1)]
                        sign = -1 if n % 2 else 1
                        for i in range(g.nrows):
                            for j in range(g.ncols):
                                col[o + i * a.dims[p + 1] + j] -= sign * g[i, j]
                    cols.append(col)
        diffs[n] = Mat.from_columns(cols, dims[n - 1])
    return ChainCx(dims, diffs), layout


def _whom(b: WChainCx, c: WChainCx) -> WChainCx:
    """Hom of Q[W]-complexes with the conjugation action, blocks (++), (--) then (+-), (-+)."""
    return WChainCx(hom_complex(b.plus, c.plus)[0] + hom_complex(b.minus, c.minus)[0],
                    hom_complex(b.plus, c.minus)[0] + hom_complex(b.minus, c.plus)[0])


def cx_kernel(src: ChainCx, tgt: ChainCx, f: Mapping[int, Mat]) -> tuple[ChainCx, dict]:
    """Kernel subcomplex and its inclusion."""
    basis = {n: nullspace(_map_at(f, n, tgt.dims[n], src.dims[n])) for n in src.dims.degrees()}
    dims = GradedVec({n: m.ncols for n, m in basis.items()})
    diffs = {}
    for n, kb in basis.items():
        if kb.ncols and dims[n - 1]:
            sol = solve(basis[n - 1], src.d(n) @ kb)
            if sol is None:
                raise AssertionError("kernel is not a subcomplex")
            diffs[n] = sol
    return ChainCx(dims, diffs), {n: m for n, m in basis.items() if m.ncols}


def cx_cokernel(src: ChainCx, tgt: ChainCx, f: Mapping[int, Mat]) -> tuple[ChainCx, dict]:
    """Cokernel complex and the projection."""
    quot = {n: Quotient(tgt.dims[n], _map_at(f, n, tgt.dims[n], src.dims[n])) for n in tgt.dims.degrees()}
    dims = GradedVec({n: q.dim for n, q in quot.items()})
    diffs = {}
    for n, q in quot.items():
        if q.dim and dims[n - 1]:
            diffs[n] = q.induced(quot[n - 1], tgt.d(n))
    proj = {n: q.coords(Mat.identity(tgt.dims[n])) for n, q in quot.items() if q.dim}
    return ChainCx(dims, diffs), proj


def internal_hom_d(b: DObject, c: DObject) -> DObject:
    """Stalkwise hom with conjugation; at infinity the pairs (f_inf, f_gen) with f_gen fixed by W
    and f_gen sigma_b = sigma_c f_inf."""
    stalks = combine(_whom, b.stalks, c.stalks)
    h_inf, lay_inf = hom_complex(b.infty, c.infty)
    h_pp, lay_pp = hom_complex(b.generic.plus, c.generic.plus)
    h_mm, _ = hom_complex(b.generic.minus, c.generic.minus)
    h_tgt, lay_tgt = hom_complex(b.infty, c.generic.plus)
    both = h_inf + (h_pp + h_mm)
    constraint = {}
    for n in both.dims.degrees():
        rows = h_tgt.dims[n]
        m = [[Fraction(0)] * both.dims[n] for _ in range(rows)]
        # columns: Hom(b_inf, c_inf)_n, then Hom(b+, c+)_n, then Hom(b-, c-)_n
        for p in b.infty.dims.degrees():
            if (n, p) not in lay_tgt:
                continue
            out_off = lay_tgt[(n, p)]
            ap = b.infty.dims[p]
            sig_b, sig_c = b.sigma_at(p), c.sigma_at(p + n)
            if (n, p) in lay_inf:
                off = lay_inf[(n, p)]
                for r in range(c.infty.dims[p + n]):
                    for s in range(ap):
                        for i in range(c.generic.plus.dims[p + n]):
                            if sig_c[i, r]:
                                m[out_off + i * ap + s][off + r * ap + s] -= sig_c[i, r]
            if (n, p) in lay_pp:
                off = h_inf.dims[n] + lay_pp[(n, p)]
                bp = b.generic.plus.dims[p]
                for r in range(c.generic.plus.dims[p + n]):
                    for t in range(bp):
                        for s in range(ap):
                            if sig_b[t, s]:
                                m[out_off + r * ap + s][off + r * bp + t] += sig_b[t, s]
        constraint[n] = Mat(m, both.dims[n])
    infty, incl = cx_kernel(both, h_tgt, constraint)
    sigma = {}
    gen_plus = stalks.generic.plus
    for n, inc in incl.items():
        start = h_inf.dims[n]
        sigma[n] = inc.submatrix(range(start, start + gen_plus.dims[n]), range(inc.ncols))
    return DObject(stalks, infty, sigma)


# ---------------------------------------------------------------- limits and colimits


def _stalk_kernel(f: WChainMap, src: WChainCx, tgt: WChainCx):
    kp, ip = cx_kernel(src.plus, tgt.plus, f.plus)
    km, im = cx_kernel(src.minus, tgt.minus, f.minus)
    return WChainCx(kp, km), WChainMap(ip, im)


def _stalk_cokernel(f: WChainMap, src: WChainCx, tgt: WChainCx):
    qp, pp = cx_cokernel(src.plus, tgt.plus, f.plus)
    qm, pm = cx_cokernel(src.minus, tgt.minus, f.minus)
    return WChainCx(qp, qm), WChainMap(pp, pm)


def kernel_d(f: DMap) -> tuple[DObject, DMap]:
    a, b = f.src, f.tgt
    keys = f.indices()
    parts = {k: _stalk_kernel(f.at(k), a.stalk(k), b.stalk(k)) for k in keys}
    gen, gincl = _stalk_kernel(f.at(None), a.generic, b.generic)
    infty, iincl = cx_kernel(a.infty, b.infty, f.f_infty)
    sigma = {}
    for n, inc in iincl.items():
        image = a.sigma_at(n) @ inc
        basis = gincl.plus.get(n, Mat.zeros(a.generic.plus.dims[n], 0))
        sol = solve(basis, image) if image.nrows else Mat.zeros(0, image.ncols)
        if sol is None:
            raise AssertionError("sigma leaves the kernel")
        sigma[n] = sol
    obj = DObject(Germ({k: p[0] for k, p in parts.items()}, gen), infty, sigma)
    return obj, DMap(obj, a, iincl, Germ({k: p[1] for k, p in parts.items()}, gincl))


def cokernel_d(f: DMap) -> tuple[DObject, DMap]:
    a, b = f.src, f.tgt
    keys = f.indices()
    parts = {k: _stalk_cokernel(f.at(k), a.stalk(k), b.stalk(k)) for k in keys}
    gen, gproj = _stalk_cokernel(f.at(None), a.generic, b.generic)
    infty, iproj = cx_cokernel(a.infty, b.infty, f.f_infty)
    sigma = {}
    for n in infty.dims.degrees():
        # sigma of b pushed down, on the chosen complement basis
        q = Quotient(b.infty.dims[n], _map_at(f.f_infty, n, b.infty.dims[n], a.infty.dims[n]))
        image = _map_at(gproj.plus, n, gen.plus.dims[n], b.generic.plus.dims[n]) @ b.sigma_at(n) @ q.basis
        sigma[n] = image
    obj = DObject(Germ({k: p[0] for k, p in parts.items()}, gen), infty, sigma)
    return obj, DMap(b, obj, iproj, Germ({k: p[1] for k, p in parts.items()}, gproj))


def coproduct_d(a: DObject, b: DObject) -> DObject:
    """Direct sum, which is both the product and the coproduct."""
    stalks = combine(lambda x, y: x + y, a.stalks, b.stalks)
    sigma = {}
    for n in _degrees(a.infty, b.infty):
        sp = block_diag([a.sigma_at(n), b.sigma_at(n)])
        sigma[n] = sp
    return DObject(stalks, a.infty + b.infty, sigma)


product_d = coproduct_d


def _sum_map(f: DMap, g: DMap, sign: int) -> DMap:
    """[f, sign*g]: f.src + g.src -> common target."""
    src = coproduct_d(f.src, g.src)

    def side(x: Mapping[int, Mat], y: Mapping[int, Mat], s1: ChainCx, s2: ChainCx, t: ChainCx) -> dict:
        out = {}
        for n in _degrees(s1, s2):
            out[n] = hstack([_map_at(x, n, t.dims[n], s1.dims[n]),
                             _map_at(y, n, t.dims[n], s2.dims[n]).scale(sign)], nrows=t.dims[n])
        return out

    keys = joint_indices(f.f_stalks, g.f_stalks, f.src.stalks, g.src.stalks, f.tgt.stalks)

    def stalk(k):
        a, b, t = f.src.stalk(k), g.src.stalk(k), f.tgt.stalk(k)
        return WChainMap(side(f.at(k).plus, g.at(k).plus, a.plus, b.plus, t.plus),
                         side(f.at(k).minus, g.at(k).minus, a.minus, b.minus, t.minus))

    return DMap(src, f.tgt, side(f.f_infty, g.f_infty, f.src.infty, g.src.infty, f.tgt.infty),
                Germ({k: stalk(k) for k in keys}, stalk(None)))


def _diag_map(f: DMap, g: DMap, sign: int) -> DMap:
    """(f, sign*g): common source -> f.tgt + g.tgt."""
    tgt = coproduct_d(f.tgt, g.tgt)

    def side(x, y, s: ChainCx, t1: ChainCx, t2: ChainCx) -> dict:
        out = {}
        for n in s.dims.degrees():
            out[n] = vstack([_map_at(x, n, t1.dims[n], s.dims[n]),
                             _map_at(y, n, t2.dims[n], s.dims[n]).scale(sign)], ncols=s.dims[n])
        return out

    keys = joint_indices(f.f_stalks, g.f_stalks, f.src.stalks, f.tgt.stalks, g.tgt.stalks)

    def stalk(k):
        s, a, b = f.src.stalk(k), f.tgt.stalk(k), g.tgt.stalk(k)
        return WChainMap(side(f.at(k).plus, g.at(k).plus, s.plus, a.plus, b.plus),
                         side(f.at(k).minus, g.at(k).minus, s.minus, a.minus, b.minus))

    return DMap(f.src, tgt, side(f.f_infty, g.f_infty, f.src.infty, f.tgt.infty, g.tgt.infty),
                Germ({k: stalk(k) for k in keys}, stalk(None)))


def pullback_d(f: DMap, g: DMap) -> DObject:
    """Limit of f.src -> C <- g.src, computed termwise."""
    return kernel_d(_sum_map(f, g, -1))[0]


def pushout_d(f: DMap, g: DMap) -> DObject:
    """Colimit of f.tgt <- A -> g.tgt, computed termwise."""
    return cokernel_d(_diag_map(f, g, -1))[0]


def limit_d(f: DMap, g: DMap) -> DObject:
    return pullback_d(f, g)


def colimit_d(f: DMap, g: DMap) -> DObject:
    return pushout_d(f, g)


# ---------------------------------------------------------------- homology


def _cx_homology(cx: ChainCx) -> ChainCx:
    return ChainCx(homology_cx_dims(cx))


def homology_cx_dims(cx: ChainCx) -> GradedVec:
    return GradedVec({n: homology_basis(cx, n).reps.ncols for n in cx.dims.degrees()})


def homology_d(v: DObject) -> DObject:
    """Stalkwise and limit-point homology with the induced structure map."""
    stalks = v.stalks.map(lambda s: WChainCx(_cx_homology(s.plus), _cx_homology(s.minus)))
    sigma = induced_on_homology(v.infty, v.generic.plus, v.sigma)
    return DObject(stalks, _cx_homology(v.infty), sigma)


# ---------------------------------------------------------------- Hom and Ext


@dataclass(frozen=True)
class HomExt:
    """Hom as a section space and Ext^1 (finite in germ form), both graded by map degree."""

    hom: SectionSpace
    ext: GradedVec


def _entry_index(src: GradedVec, tgt: GradedVec, n: int) -> dict:
    """Positions of the entries (m, r, s) of maps src_m -> tgt_{m+n}."""
    idx = {}
    for m in src.degrees():
        for r in range(tgt[m + n]):
            for s in range(src[m]):
                idx[(m, r, s)] = len(idx)
    return idx


def structure_constraint(v: DObject, w: DObject, n: int) -> tuple[Mat, int, int, int]:
    """The map L(f_inf, f_gen) = f_gen sigma_v - sigma_w f_inf in degree n.

    Columns are Hom(V_inf, W_inf)_n, Hom(V+, W+)_n and Hom(V-, W-)_n; rows are
    Hom(V_inf, W_gen+)_n.  Returns (L, dim of each of the three column blocks).
    """
    vi, wi = v.infty.dims, w.infty.dims
    vp, wp = v.generic.plus.dims, w.generic.plus.dims
    vm, wm = v.generic.minus.dims, w.generic.minus.dims
    col_inf = _entry_index(vi, wi, n)
    col_pp = _entry_index(vp, wp, n)
    col_mm = _entry_index(vm, wm, n)
    rows = _entry_index(vi, wp, n)
    ncols = len(col_inf) + len(col_pp) + len(col_mm)
    m = [[Fraction(0)] * ncols for _ in range(len(rows))]
    for (deg, r, s), row in rows.items():
        sig_v, sig_w = v.sigma_at(deg), w.sigma_at(deg + n)
        for t in range(vp[deg]):
            if sig_v[t, s]:
                m[row][len(col_inf) + col_pp[(deg, r, t)]] += sig_v[t, s]
        for t in range(wi[deg + n]):
            if sig_w[r, t]:
                m[row][col_inf[(deg, t, s)]] -= sig_w[r, t]
    return Mat(m, ncols), len(col_inf), len(col_pp), len(col_mm)


def _whom_fixed_dim(a: WChainCx, b: WChainCx, n: int) -> int:
    return WVec(a.plus.dims, a.minus.dims).hom(WVec(b.plus.dims, b.minus.dims)).plus[n]


def hom_ext(v: DObject, w: DObject, degrees: Iterable[int] = (0,)) -> HomExt:
    """Hom and Ext^1 between objects with zero differentials.

    Hom is the kernel and Ext^1 the cokernel of
    delta(f_inf, (f_k)) = tails(f) sigma_v - sigma_w f_inf, in germ form.
    """
    if not (v.is_graded and w.is_graded):
        raise UnsupportedInput("Hom and Ext are computed for objects with zero differentials; take homology first")
    keys = joint_indices(v.stalks, w.stalks)
    per_index: dict[int, dict] = {k: {} for k in keys}
    generic, infinity, ext = {}, {}, {}
    for n in degrees:
        for k in keys:
            per_index[k][n] = _whom_fixed_dim(v.stalk(k), w.stalk(k), n)
        generic[n] = _whom_fixed_dim(v.generic, w.generic, n)
        lmat, _, _, n_mm = structure_constraint(v, w, n)
        r = rank(lmat)
        infinity[n] = lmat.ncols - r
        ext[n] = lmat.nrows - r
    hom = SectionSpace(1, {k: GradedVec(d) for k, d in per_index.items()}, GradedVec(generic), GradedVec(infinity))
    return HomExt(hom, GradedVec(ext))


def hom_pairs_basis(v: DObject, w: DObject, n: int) -> list[tuple[dict, WChainMap]]:
    """A basis of the pairs (f_inf, f_gen) solving the structure constraint in degree n."""
    lmat, ni, npp, nmm = structure_constraint(v, w, n)
    out = []
    vi, wi = v.infty.dims, w.infty.dims
    vp, wp = v.generic.plus.dims, w.generic.plus.dims
    vm, wm = v.generic.minus.dims, w.generic.minus.dims
    for col in nullspace(lmat).columns():
        out.append((_unvec(col[:ni], vi, wi, n), WChainMap(_unvec(col[ni:ni + npp], vp, wp, n),
                                                           _unvec(col[ni + npp:], vm, wm, n))))
    return out


def _unvec(vec, src: GradedVec, tgt: GradedVec, n: int) -> dict:
    idx = _entry_index(src, tgt, n)
    out = {}
    for m in src.degrees():
        rows = [[Fraction(0)] * src[m] for _ in range(tgt[m + n])]
        for r in range(tgt[m + n]):
            for s in range(src[m]):
                rows[r][s] = vec[idx[(m, r, s)]]
        out[m] = Mat(rows, src[m])
    return out


def shift_d(v: DObject, k: int) -> DObject:
    """Suspension by k (degrees move up by k)."""
    return DObject(v.stalks.map(lambda s: s.shift(k)), v.infty.shift(k),
                   {n + k: m for n, m in v.sigma.items()})


# ---------------------------------------------------------------- assembling homotopy data


def assemble_pi(stalks: Germ, corner: GradedVec, corner_map: Mapping[int, Mat]) -> DObject:
    """Build the object with stalks P_k (a germ of WVec) and V_inf the corner.

    ``corner_map`` sends the corner into the generic stalk (rows +1 part then
    -1 part); it must land in the W-fixed part.
    """
    def cx(w: WVec) -> WChainCx:
        return WChainCx(ChainCx(w.plus), ChainCx(w.minus))

    germ = stalks.map(cx)
    try:
        return make_d(dict(germ.items()), germ.generic, ChainCx(corner), corner_map)
    except ValidationError as exc:
        raise ValidationError(f"incompatible corner data: {exc}") from exc


def sphere_datum() -> tuple[Germ, GradedVec, dict]:
    """Homotopy data of the dihedral part of the sphere, read off from the Burnside ring.

    At index k the stalk is spanned by the idempotent of D_2k in the restriction
    of e_D; the corner is the value at O(2), mapped to the generic stalk by the
    germ of the restricted idempotents.
    """
    e = e_dihedral()

    def stalk_dim(k: int) -> int:
        return 1 if restrict(e, k).coord("D", k) else 0

    bound = e.dihedral.bound
    exc = {k: WVec(GradedVec({0: stalk_dim(k)})) for k in range(1, bound)}
    gen_dim = stalk_dim(bound)
    corner = GradedVec({0: 1 if e.at_o2 else 0})
    cmap = {0: Mat([[e.at_o2]] * gen_dim, corner[0])} if corner[0] and gen_dim else {}
    return Germ(exc, WVec(GradedVec({0: gen_dim}))), corner, cmap


def subgroup_datum(k: int, i: int) -> tuple[Germ, GradedVec, dict]:
    """Data concentrated at index k with stalk Q[W]^(x) i."""
    return Germ({k: regular_power(i)}, WVec()), GradedVec(), {}


def isomorphic_d(a: DObject, b: DObject) -> bool:
    """Isomorphism test for objects with zero differentials.

    Such objects are classified by the stalk dimensions and, at infinity, by
    the ranks of sigma and the dimension of V_inf, degreewise.
    """
    if not (a.is_graded and b.is_graded):
        a, b = homology_d(a), homology_d(b)
    if a.stalks.map(lambda s: s.spaces) != b.stalks.map(lambda s: s.spaces):
        return False
    if a.infty.dims != b.infty.dims:
        return False
    return all(rank(a.sigma_at(n)) == rank(b.sigma_at(n)) for n in _degrees(a.infty))


__all__ = [
    "WChainMap", "DObject", "graded_d", "make_d", "DMap", "identity_d", "SectionSpace", "pitchfork",
    "global_sections", "zero_d", "i_k", "p_k", "i_inf", "p_inf", "constant", "cq", "regular_stalk",
    "tensor_d", "hom_complex", "internal_hom_d", "cx_kernel", "cx_cokernel", "kernel_d", "cokernel_d",
    "coproduct_d", "product_d", "pullback_d", "pushout_d", "limit_d", "colimit_d", "homology_d",
    "homology_cx_dims", "HomExt", "structure_constraint", "hom_ext", "hom_pairs_basis", "shift_d",
    "assemble_pi", "sphere_datum", "subgroup_datum", "isomorphic_d",
]
