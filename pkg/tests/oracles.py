"""Independent reference computations, written with sympy and plain loops.

Nothing here calls the linear algebra of the package, so agreement with it
is evidence rather than a restatement.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, reduce

import sympy

from o2models.exactlin import Mat


def to_sympy(m: Mat) -> sympy.Matrix:
    return sympy.Matrix(m.nrows, m.ncols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


def sym_rank(m: sympy.Matrix) -> int:
    if m.rows == 0 or m.cols == 0:
        return 0
    return m.rank()


def zeros(r: int, c: int) -> sympy.Matrix:
    return sympy.zeros(r, c)


def block_diag(*ms) -> sympy.Matrix:
    ms = [m for m in ms]
    r = sum(m.rows for m in ms)
    c = sum(m.cols for m in ms)
    out = sympy.zeros(r, c)
    i = j = 0
    for m in ms:
        if m.rows and m.cols:
            out[i:i + m.rows, j:j + m.cols] = m
        i += m.rows
        j += m.cols
    return out


def hstack(ms, rows: int) -> sympy.Matrix:
    ms = [m for m in ms if m.cols]
    return sympy.Matrix.hstack(*ms) if ms else sympy.zeros(rows, 0)


def vstack(ms, cols: int) -> sympy.Matrix:
    ms = [m for m in ms if m.rows]
    return sympy.Matrix.vstack(*ms) if ms else sympy.zeros(0, cols)


# ---------------------------------------------------------------- graded pieces of presentations


def presentation_dim(gens, rel_degrees, rels: Mat, degree: int, laurent: bool = False) -> int:
    """Dimension of a graded piece of Q[c]^n / relations, c of degree -2.

    A generator of degree g contributes c^e g in degree g - 2e for e >= 0 (any
    integer e over the Laurent ring).
    """
    def active(deg):
        if (deg - degree) % 2:
            return False
        return laurent or deg >= degree

    rows = [j for j, g in enumerate(gens) if active(g)]
    cols = [i for i, r in enumerate(rel_degrees) if active(r)]
    sub = sympy.Matrix(len(rows), len(cols), lambda a, b: sympy.Rational(str(rels[rows[a], cols[b]])))
    return len(rows) - sym_rank(sub)


@lru_cache(maxsize=None)
def _pres_dim(pres, deg: int, laurent: bool) -> int:
    return presentation_dim(pres.gens, pres.rel_degrees, pres.rels, deg, laurent)


def g_piece_dim(module, k: int, d: int, truncation: int, window) -> int:
    """dim of the nub of g(N) at (k, d): dim N + dim Y - dim L, the pullback along a surjection."""
    lo, hi = window
    nub = _pres_dim(module.at(k), d, False)
    loc = _pres_dim(module.at(k), d, True)
    y = sum(_pres_dim(module.at(kk), e, True) for kk in range(1, truncation + 1) for e in range(lo, hi + 1)
            if (e - d) % 2 == 0)
    own_copies = sum(1 for e in range(lo, hi + 1) if (e - d) % 2 == 0)
    return nub + y - (loc if own_copies else 0)


# ---------------------------------------------------------------- Hom and Ext in the dihedral model


class _HomSpace:
    """Degree-n linear maps between graded spaces, flattened entry by entry."""

    def __init__(self, src: dict, tgt: dict, n: int):
        self.src, self.tgt, self.n = src, tgt, n
        self.index = {}
        for m in sorted(src):
            for r in range(tgt.get(m + n, 0)):
                for s in range(src[m]):
                    self.index[(m, r, s)] = len(self.index)

    @property
    def dim(self) -> int:
        return len(self.index)

    def precompose(self, new_src: dict, f: dict) -> sympy.Matrix:
        """Matrix of g -> g o f, with f: new_src -> src given per degree."""
        other = _HomSpace(new_src, self.tgt, self.n)
        out = sympy.zeros(other.dim, self.dim)
        for (m, r, s), col in self.index.items():
            fm = f.get(m)
            if fm is None:
                continue
            for t in range(new_src.get(m, 0)):
                if fm[s, t]:
                    out[other.index[(m, r, t)], col] += sympy.Rational(str(fm[s, t]))
        return out


def _dims(g) -> dict:
    return {n: d for n, d in g.dims.items() if d}


def _w_parts(cx):
    return _dims(cx.plus.dims), _dims(cx.minus.dims)


class TwoTerm:
    """The complex C0 -> C1 whose kernel is Hom(V, W) and cokernel Ext(V, W), truncated at K."""

    def __init__(self, v, w, n: int, truncation: int):
        self.v, self.w, self.n, self.K = v, w, n, truncation
        self.blocks = []
        for k in range(1, truncation + 1):
            vp, vm = _w_parts(v.stalk(k))
            wp, wm = _w_parts(w.stalk(k))
            self.blocks.append(("stalk", k, "+", _HomSpace(vp, wp, n)))
            self.blocks.append(("stalk", k, "-", _HomSpace(vm, wm, n)))
        vi, wi = _dims(v.infty.dims), _dims(w.infty.dims)
        vp, vm = _w_parts(v.generic)
        wp, wm = _w_parts(w.generic)
        self.inf = _HomSpace(vi, wi, n)
        self.gen_p = _HomSpace(vp, wp, n)
        self.gen_m = _HomSpace(vm, wm, n)
        self.target = _HomSpace(vi, wp, n)
        self.d = self._differential()

    @property
    def c0(self) -> int:
        return sum(b[3].dim for b in self.blocks) + self.inf.dim + self.gen_p.dim + self.gen_m.dim

    @property
    def c1(self) -> int:
        return self.target.dim

    def _differential(self) -> sympy.Matrix:
        """(f_inf, f_gen) -> f_gen+ sigma_v - sigma_w f_inf; the stalk blocks map to zero."""
        v, w, n = self.v, self.w, self.n
        stalk = sum(b[3].dim for b in self.blocks)
        out = sympy.zeros(self.c1, self.c0)
        off_inf = stalk
        off_p = off_inf + self.inf.dim
        for (m, r, s), row in self.target.index.items():
            sv = v.sigma_at(m)
            sw = w.sigma_at(m + n)
            for t in range(sv.nrows):
                if sv[t, s]:
                    out[row, off_p + self.gen_p.index[(m, r, t)]] += sympy.Rational(str(sv[t, s]))
            for t in range(sw.ncols):
                if sw[r, t]:
                    out[row, off_inf + self.inf.index[(m, t, s)]] -= sympy.Rational(str(sw[r, t]))
        return out

    def pull(self, other: "TwoTerm", f) -> tuple[sympy.Matrix, sympy.Matrix]:
        """Precomposition with a map f: other.v -> self.v, as maps C(self) -> C(other) on C0 and C1."""
        parts = []
        for (kind, k, sign, space), (_, _, _, ospace) in zip(self.blocks, other.blocks):
            wm = f.at(k)
            parts.append(space.precompose(ospace.src, wm.plus if sign == "+" else wm.minus))
        parts.append(self.inf.precompose(other.inf.src, f.f_infty))
        gen = f.at(None)
        parts.append(self.gen_p.precompose(other.gen_p.src, gen.plus))
        parts.append(self.gen_m.precompose(other.gen_m.src, gen.minus))
        return block_diag(*parts), self.target.precompose(other.target.src, f.f_infty)


def _ker(m: sympy.Matrix, ncols: int) -> sympy.Matrix:
    if m.rows == 0:
        return sympy.eye(ncols)
    basis = m.nullspace()
    return sympy.Matrix.hstack(*basis) if basis else sympy.zeros(ncols, 0)


def six_term(sub_v, mid_v, quo_v, incl, proj, w, n: int, truncation: int) -> dict:
    """Dimensions and exactness defects of

    0 -> Hom(V'') -> Hom(V) -> Hom(V') -> Ext(V'') -> Ext(V) -> Ext(V') -> 0

    for 0 -> V' -> V -> V'' -> 0, computed from the truncated two-term complexes.
    """
    cs, cm, cq = (TwoTerm(x, w, n, truncation) for x in (sub_v, mid_v, quo_v))
    a0, a1 = cq.pull(cm, proj)   # C(V'') -> C(V)
    b0, b1 = cm.pull(cs, incl)   # C(V) -> C(V')
    assert a0.shape == (cm.c0, cq.c0) and b0.shape == (cs.c0, cm.c0)

    z = {name: _ker(c.d, c.c0) for name, c in (("s", cs), ("m", cm), ("q", cq))}
    bnd = {name: c.d for name, c in (("s", cs), ("m", cm), ("q", cq))}
    c1 = {"s": cs.c1, "m": cm.c1, "q": cq.c1}
    h0 = {name: z[name].cols for name in z}
    h1 = {name: c1[name] - sym_rank(bnd[name]) for name in z}

    def rank_on_h0(f, src):
        return sym_rank(f * z[src]) if z[src].cols else 0

    def rank_on_h1(f, src, tgt):
        # rank of the induced map C1(src)/B(src) -> C1(tgt)/B(tgt)
        both = hstack([f, bnd[tgt]], c1[tgt])
        return sym_rank(both) - sym_rank(bnd[tgt])

    r_a0 = rank_on_h0(a0, "q")
    r_b0 = rank_on_h0(b0, "m")
    r_a1 = rank_on_h1(a1, "q", "m")
    r_b1 = rank_on_h1(b1, "m", "s")

    # connecting map: x in Z(V') lifts through the split b0, apply d_V, pull back along a1
    lift = _right_inverse(b0)
    delta_cols = []
    for j in range(z["s"].cols):
        y = cm.d * (lift * z["s"][:, j])
        sol = _solve(a1, y)
        delta_cols.append(sol)
    delta = hstack(delta_cols, cq.c1) if delta_cols else sympy.zeros(cq.c1, 0)
    r_delta = rank_on_h1(delta, "s", "q") if delta.cols else 0

    dims = [0, h0["q"], h0["m"], h0["s"], h1["q"], h1["m"], h1["s"], 0]
    ranks = [0, r_a0, r_b0, r_delta, r_a1, r_b1, 0]
    # exactness at each term: dim = rank(incoming) + rank(outgoing)
    defects = [dims[i] - ranks[i - 1] - ranks[i] for i in range(1, 7)]
    return {"hom": (h0["s"], h0["m"], h0["q"]), "ext": (h1["s"], h1["m"], h1["q"]), "defects": defects}


def _right_inverse(b: sympy.Matrix) -> sympy.Matrix:
    """A matrix s with b s = identity (b is onto)."""
    if b.rows == 0:
        return sympy.zeros(b.cols, 0)
    return b.T * (b * b.T).inv()


def _solve(a: sympy.Matrix, y: sympy.Matrix) -> sympy.Matrix:
    if a.cols == 0:
        assert all(x == 0 for x in y)
        return sympy.zeros(0, 1)
    sol, params = a.gauss_jordan_solve(y)
    return sol.subs({p: 0 for p in params})


# ---------------------------------------------------------------- Burnside restriction


def restriction_table(terms: dict, n: int) -> dict:
    """Image of a combination of e_C, e_D and e_k in A(D_2n), from the four rules of the table.

    ``terms`` maps "C", "D" or an integer k to a coefficient.
    """
    out: dict = {}
    divisors = [k for k in range(1, n + 1) if n % k == 0]
    for name, q in terms.items():
        if name == "C":
            images = [("C", k) for k in divisors]
        elif name == "D":
            images = [("D", k) for k in divisors]
        else:
            images = [("D", name)] if n % name == 0 else []
        for key in images:
            out[key] = out.get(key, Fraction(0)) + Fraction(q)
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------- equivariant maps by brute force


def regular_action(i: int) -> sympy.Matrix:
    """The generator of W acting on Q[W]^(x)i as a permutation matrix."""
    swap = sympy.Matrix([[0, 1], [1, 0]])
    return reduce(sympy.kronecker_product, [swap] * i, sympy.eye(1))


def commuting_dim(a: sympy.Matrix, b: sympy.Matrix) -> int:
    """dim of {X : X a = b X}, solving for the entries of X."""
    rows, cols = b.rows, a.rows
    xs = sympy.symbols(f"x0:{rows * cols}")
    x = sympy.Matrix(rows, cols, xs)
    eqs = list(x * a - b * x)
    system = sympy.Matrix([[sympy.diff(e, v) for v in xs] for e in eqs])
    return rows * cols - system.rank()
