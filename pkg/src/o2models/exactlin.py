"""Exact linear algebra over Q and graded Smith forms over Q[c] and Q[c, 1/c].

Everything here works with :class:`fractions.Fraction` entries.  The graded
engine rests on one observation: a homogeneous matrix between free graded
modules over Q[c] (c in degree -2) is determined by its scalar coefficients,
because the power of c in each entry is forced by the row and column degrees.
So composition is scalar matrix multiplication, and Smith reduction is
Gaussian elimination with pivots chosen by smallest c-exponent.

>>> m = GradedMatrix(Ring.POLY, src=(0, 2), tgt=(4, 2), mat=Mat([[1, 1], [0, 1]]))
>>> [m.exponent(t, s) for t in range(2) for s in range(2)]
[2, 1, 1, 0]
>>> smith(m).factors
(0, 2)
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rat = Fraction


def parse_rat(text) -> Fraction:
    """Read a rational written as ``"p/q"``, ``"p"`` or an int."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    body = text.strip()
    if not body:
        raise ValueError("empty rational")
    try:
        num, _, den = body.partition("/")
        value = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc
    return value


def format_rat(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------- matrices


class Mat:
    """Dense immutable matrix of Fractions.  Shape is kept even when empty."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(x if type(x) is Fraction else Fraction(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(data[0])
        for row in data:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
        object.__setattr__(self, "nrows", len(data))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", data)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Mat":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "Mat":
        return cls([[col[i] for col in cols] for i in range(nrows)], len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, Mat) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.rows)
        return f"Mat([{body}], ncols={self.ncols})"

    def column(self, j: int) -> list[Fraction]:
        return [row[j] for row in self.rows]

    def columns(self) -> list[list[Fraction]]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Mat":
        return Mat(self.columns(), self.nrows)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        other_nz = [[(j, b) for j, b in enumerate(r) if b] for r in other.rows]
        zero = Fraction(0)
        out = []
        for row in self.rows:
            acc = [zero] * other.ncols
            for k, a in enumerate(row):
                if a:
                    for j, b in other_nz[k]:
                        acc[j] += a * b
            out.append(acc)
        return Mat(out, other.ncols)

    def __add__(self, other: "Mat") -> "Mat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return Mat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Mat") -> "Mat":
        return self + other.scale(-1)

    def scale(self, k) -> "Mat":
        k = Fraction(k)
        return Mat([[k * a for a in row] for row in self.rows], self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def is_zero(self) -> bool:
        return all(not a for row in self.rows for a in row)

    def apply(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [sum((a * Fraction(v) for a, v in zip(row, vec) if a), Fraction(0)) for row in self.rows]

    def rank(self) -> int:
        return len(rref(self)[1])

    def nullspace(self) -> "Mat":
        return nullspace(self)


def hstack(mats: Sequence[Mat], nrows: int | None = None) -> Mat:
    if not mats:
        if nrows is None:
            raise ValueError("hstack of nothing needs nrows")
        return Mat.zeros(nrows, 0)
    n = mats[0].nrows
    if any(m.nrows != n for m in mats):
        raise ValueError("hstack row mismatch")
    return Mat([sum((list(m.rows[i]) for m in mats), []) for i in range(n)], sum(m.ncols for m in mats))


def vstack(mats: Sequence[Mat], ncols: int | None = None) -> Mat:
    if not mats:
        if ncols is None:
            raise ValueError("vstack of nothing needs ncols")
        return Mat.zeros(0, ncols)
    n = mats[0].ncols
    if any(m.ncols != n for m in mats):
        raise ValueError("vstack column mismatch")
    return Mat([row for m in mats for row in m.rows], n)


def block_diag(mats: Sequence[Mat]) -> Mat:
    nr = sum(m.nrows for m in mats)
    nc = sum(m.ncols for m in mats)
    out = [[Fraction(0)] * nc for _ in range(nr)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.rows):
            out[r0 + i][c0:c0 + m.ncols] = row
        r0 += m.nrows
        c0 += m.ncols
    return Mat(out, nc)


def kron(a: Mat, b: Mat) -> Mat:
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append([x * y for x in ra for y in rb])
    return Mat(rows, a.ncols * b.ncols)


def rref(m: Mat) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in m.rows]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        if r >= len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        nz = [(j, x) for j, x in enumerate(rows[r]) if x]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                row = rows[i]
                for j, x in nz:
                    row[j] -= f * x
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(m: Mat) -> int:
    return len(rref(m)[1])


def nullspace(m: Mat) -> Mat:
    """Columns form a basis of {x : m x = 0}."""
    red, pivots = rref(m)
    pset = set(pivots)
    free = [c for c in range(m.ncols) if c not in pset]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return Mat.from_columns(basis, m.ncols)


def column_space(m: Mat) -> Mat:
    """A basis of the column space, chosen among the columns of m."""
    _, pivots = rref(m)
    return m.submatrix(range(m.nrows), pivots)


def solve(a: Mat, b: Mat) -> Mat | None:
    """Some X with a X = b, or None when the system is inconsistent."""
    if a.nrows != b.nrows:
        raise ValueError("solve: row mismatch")
    aug = hstack([a, b])
    red, pivots = rref(aug)
    if any(p >= a.ncols for p in pivots):
        return None
    x = [[Fraction(0)] * b.ncols for _ in range(a.ncols)]
    for row, pc in zip(red, pivots):
        x[pc] = row[a.ncols:]
    return Mat(x, b.ncols)


def inverse(a: Mat) -> Mat:
    if a.nrows != a.ncols:
        raise ValueError("inverse of a non-square matrix")
    x = solve(a, Mat.identity(a.nrows))
    if x is None or rank(a) != a.nrows:
        raise ValueError("matrix is singular")
    return x


def complement_basis(sub: Mat, ambient: Mat) -> Mat:
    """Columns of ``ambient`` extending a basis of span(sub) to span(sub + ambient)."""
    _, pivots = rref(hstack([sub, ambient], nrows=ambient.nrows))
    chosen = [p - sub.ncols for p in pivots if p >= sub.ncols]
    return ambient.submatrix(range(ambient.nrows), chosen)


class Quotient:
    """The space Q^n / span(sub), with coordinates in a fixed complement basis."""

    def __init__(self, n: int, sub: Mat | None = None):
        self.n = n
        sub = sub if sub is not None else Mat.zeros(n, 0)
        self.sub = column_space(sub) if sub.ncols else sub
        self.basis = complement_basis(self.sub, Mat.identity(n))
        self._proj = None

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def coords(self, vecs: Mat) -> Mat:
        """Coordinates of the classes of the columns of ``vecs``."""
        if vecs.nrows != self.n:
            raise ValueError("vector outside the ambient space")
        if self._proj is None:
            # basis and sub together form a basis of Q^n
            inv = inverse(hstack([self.basis, self.sub], nrows=self.n))
            self._proj = inv.submatrix(range(self.dim), range(self.n))
        return self._proj @ vecs

    def contains_zero_class(self, vec: Sequence) -> bool:
        return not any(self.coords(Mat.from_columns([list(vec)], self.n)).columns()[0])

    def induced(self, target: "Quotient", f: Mat) -> Mat:
        """Matrix of the map induced by ``f`` (assumed to respect the subspaces)."""
        return target.coords(f @ self.basis)


def in_span(vec: Sequence, basis: Mat) -> bool:
    return solve(basis, Mat.from_columns([list(vec)], basis.nrows)) is not None


def linear_pullback(f: Mat, g: Mat) -> tuple[int, Mat, Mat]:
    """Pullback of ``f: A -> C`` and ``g: B -> C``.

    Returns ``(dim P, p_A, p_B)`` where the columns of p_A, p_B are the
    two coordinates of a basis of P = {(a, b) : f a = g b}.
    """
    if f.nrows != g.nrows:
        raise ValueError("linear_pullback: codomains differ")
    ker = nullspace(hstack([f, g.scale(-1)]))
    pa = ker.submatrix(range(f.ncols), range(ker.ncols))
    pb = ker.submatrix(range(f.ncols, f.ncols + g.ncols), range(ker.ncols))
    return ker.ncols, pa, pb


def exact_at(incoming: Mat, outgoing: Mat) -> bool:
    """Whether ``ker(outgoing) == im(incoming)`` at the middle space."""
    if incoming.nrows != outgoing.ncols:
        raise ValueError("exact_at: composable maps required")
    if not (outgoing @ incoming).is_zero():
        return False
    return rank(incoming) == outgoing.ncols - rank(outgoing)


# ---------------------------------------------------------------- graded spaces


def _clean(dims: Mapping[int, int]) -> dict[int, int]:
    out = {}
    for d, n in dims.items():
        if int(n) < 0:
            raise ValueError(f"negative dimension in degree {d}")
        if n:
            out[int(d)] = int(n)
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class GradedVec:
    """Finite graded rational vector space, recorded by its dimensions."""

    dims: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dims", _clean(self.dims))

    def __getitem__(self, d: int) -> int:
        return self.dims.get(d, 0)

    def __eq__(self, other):
        return isinstance(other, GradedVec) and self.dims == other.dims

    def __hash__(self):
        return hash(tuple(self.dims.items()))

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    def degrees(self) -> list[int]:
        return list(self.dims)

    def basis_degrees(self) -> list[int]:
        return [d for d, n in self.dims.items() for _ in range(n)]

    def __add__(self, other: "GradedVec") -> "GradedVec":
        keys = set(self.dims) | set(other.dims)
        return GradedVec({d: self[d] + other[d] for d in keys})

    def tensor(self, other: "GradedVec") -> "GradedVec":
        out: dict[int, int] = {}
        for a, m in self.dims.items():
            for b, n in other.dims.items():
                out[a + b] = out.get(a + b, 0) + m * n
        return GradedVec(out)

    def hom(self, other: "GradedVec") -> "GradedVec":
        out: dict[int, int] = {}
        for a, m in self.dims.items():
            for b, n in other.dims.items():
                out[b - a] = out.get(b - a, 0) + m * n
        return GradedVec(out)

    def shift(self, n: int) -> "GradedVec":
        return GradedVec({d + n: k for d, k in self.dims.items()})


@dataclass(frozen=True)
class WVec:
    """Graded representation of W = C2, split into (+1) and (-1) eigenspaces."""

    plus: GradedVec = field(default_factory=GradedVec)
    minus: GradedVec = field(default_factory=GradedVec)

    @property
    def total(self) -> GradedVec:
        return self.plus + self.minus

    def __add__(self, other: "WVec") -> "WVec":
        return WVec(self.plus + other.plus, self.minus + other.minus)

    def tensor(self, other: "WVec") -> "WVec":
        plus = self.plus.tensor(other.plus) + self.minus.tensor(other.minus)
        minus = self.plus.tensor(other.minus) + self.minus.tensor(other.plus)
        return WVec(plus, minus)

    def hom(self, other: "WVec") -> "WVec":
        """Hom_Q with W acting by conjugation."""
        plus = self.plus.hom(other.plus) + self.minus.hom(other.minus)
        minus = self.plus.hom(other.minus) + self.minus.hom(other.plus)
        return WVec(plus, minus)

    def shift(self, n: int) -> "WVec":
        return WVec(self.plus.shift(n), self.minus.shift(n))


def trivial_rep(dims: Mapping[int, int]) -> WVec:
    return WVec(GradedVec(dims), GradedVec())


def regular_rep(degree: int = 0) -> WVec:
    """Q[W] in one degree."""
    return WVec(GradedVec({degree: 1}), GradedVec({degree: 1}))


def regular_power(i: int) -> WVec:
    """Q[W] tensored with itself i times (diagonal action)."""
    out = trivial_rep({0: 1})
    for _ in range(i):
        out = out.tensor(regular_rep())
    return out


def w_fixed(v):
    """W-fixed part of a WVec, or of a W-map given as a ``WMap``."""
    if isinstance(v, WVec):
        return v.plus
    if isinstance(v, WMap):
        return v.plus
    raise TypeError(f"w_fixed: unsupported {type(v).__name__}")


@dataclass(frozen=True)
class WMap:
    """A W-equivariant linear map stored as its two eigenspace blocks."""

    plus: Mat
    minus: Mat


def eigensplit(w: Mat) -> tuple[Mat, Mat]:
    """Bases (as columns) of the +1 and -1 eigenspaces of an involution."""
    n = w.nrows
    if not (w @ w == Mat.identity(n)):
        raise ValueError("matrix is not an involution")
    plus = column_space(w + Mat.identity(n))
    minus = column_space(w - Mat.identity(n))
    return plus, minus


def wvec_from_involution(action: Mapping[int, Mat]) -> WVec:
    """Eigenspace dimensions of a graded involution given degreewise."""
    plus, minus = {}, {}
    for d, w in action.items():
        p, m = eigensplit(w)
        plus[d], minus[d] = p.ncols, m.ncols
    return WVec(GradedVec(plus), GradedVec(minus))


# ---------------------------------------------------------------- chain complexes


@dataclass(frozen=True)
class ChainCx:
    """Chain complex of finite rational vector spaces, d: degree n -> n-1."""

    dims: GradedVec
    diffs: Mapping[int, Mat] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, m in self.diffs.items():
            if m.shape != (self.dims[n - 1], self.dims[n]):
                raise ValueError(f"differential in degree {n} has shape {m.shape}, "
                                 f"expected {(self.dims[n - 1], self.dims[n])}")
            if not m.is_zero():
                clean[int(n)] = m
        object.__setattr__(self, "diffs", dict(sorted(clean.items())))
        for n, m in self.diffs.items():
            nxt = self.diffs.get(n - 1)
            if nxt is not None and not (nxt @ m).is_zero():
                raise ValueError(f"d o d is nonzero leaving degree {n}")

    def d(self, n: int) -> Mat:
        return self.diffs.get(n, Mat.zeros(self.dims[n - 1], self.dims[n]))

    @classmethod
    def graded(cls, dims: Mapping[int, int]) -> "ChainCx":
        return cls(GradedVec(dims))

    @property
    def is_graded(self) -> bool:
        return not self.diffs

    def degrees(self) -> list[int]:
        return self.dims.degrees()

    def __add__(self, other: "ChainCx") -> "ChainCx":
        dims = self.dims + other.dims
        diffs = {n: block_diag([self.d(n), other.d(n)]) for n in set(self.diffs) | set(other.diffs)}
        return ChainCx(dims, diffs)

    def tensor(self, other: "ChainCx") -> "ChainCx":
        """Tensor product with the Koszul sign on the second differential."""
        layout, dims = tensor_layout(self.dims, other.dims)
        diffs = {}
        for n in dims.degrees():
            if not dims[n - 1]:
                continue
            m = [[Fraction(0)] * dims[n] for _ in range(dims[n - 1])]
            for (p, q), off in layout.items():
                if p + q != n:
                    continue
                nb = other.dims[q]
                if (p - 1, q) in layout:
                    da, off2 = self.d(p), layout[(p - 1, q)]
                    for i in range(self.dims[p - 1]):
                        for j in range(self.dims[p]):
                            if da[i, j]:
                                for y in range(nb):
                                    m[off2 + i * nb + y][off + j * nb + y] += da[i, j]
                if (p, q - 1) in layout:
                    db, off2 = other.d(q), layout[(p, q - 1)]
                    sign = -1 if p % 2 else 1
                    nb1 = other.dims[q - 1]
                    for x in range(self.dims[p]):
                        for i in range(nb1):
                            for j in range(nb):
                                if db[i, j]:
                                    m[off2 + x * nb1 + i][off + x * nb + j] += sign * db[i, j]
            diffs[n] = Mat(m, dims[n])
        return ChainCx(dims, diffs)

    def shift(self, k: int) -> "ChainCx":
        sign = -1 if k % 2 else 1
        return ChainCx(self.dims.shift(k), {n + k: m.scale(sign) for n, m in self.diffs.items()})


def tensor_layout(a: GradedVec, b: GradedVec) -> tuple[dict[tuple[int, int], int], GradedVec]:
    """Offsets of the blocks A_p (x) B_q inside (A (x) B)_{p+q}, and the total dims."""
    layout = {}
    fill: dict[int, int] = {}
    for p in a.degrees():
        for q in b.degrees():
            layout[(p, q)] = fill.get(p + q, 0)
            fill[p + q] = fill.get(p + q, 0) + a[p] * b[q]
    return layout, GradedVec(fill)


@dataclass(frozen=True)
class WChainCx:
    """Chain complex of Q[W]-modules as a pair of eigen-complexes."""

    plus: ChainCx
    minus: ChainCx

    @classmethod
    def graded(cls, plus: Mapping[int, int], minus: Mapping[int, int] | None = None) -> "WChainCx":
        return cls(ChainCx.graded(plus), ChainCx.graded(minus or {}))

    @classmethod
    def trivial(cls, cx: ChainCx) -> "WChainCx":
        return cls(cx, ChainCx(GradedVec()))

    @classmethod
    def zero(cls) -> "WChainCx":
        return cls.graded({})

    @property
    def spaces(self) -> WVec:
        return WVec(self.plus.dims, self.minus.dims)

    @property
    def is_graded(self) -> bool:
        return self.plus.is_graded and self.minus.is_graded

    def __add__(self, other: "WChainCx") -> "WChainCx":
        return WChainCx(self.plus + other.plus, self.minus + other.minus)

    def tensor(self, other: "WChainCx") -> "WChainCx":
        return WChainCx(self.plus.tensor(other.plus) + self.minus.tensor(other.minus),
                        self.plus.tensor(other.minus) + self.minus.tensor(other.plus))

    def shift(self, k: int) -> "WChainCx":
        return WChainCx(self.plus.shift(k), self.minus.shift(k))


def homology(x):
    """Homology of a ChainCx (a GradedVec) or of a WChainCx (a WVec)."""
    if isinstance(x, WChainCx):
        return WVec(homology(x.plus), homology(x.minus))
    out = {}
    for n in x.dims.degrees():
        out[n] = x.dims[n] - rank(x.d(n)) - rank(x.d(n + 1))
    return GradedVec(out)


@dataclass(frozen=True)
class HomologyBasis:
    """Cycle representatives of H_n and the projection from cycles to H_n."""

    reps: Mat        # dims[n] x h
    boundaries: Mat  # dims[n] x b

    def coords(self, cycle: Sequence) -> list[Fraction]:
        basis = hstack([self.boundaries, self.reps])
        sol = solve(basis, Mat.from_columns([list(cycle)], basis.nrows))
        if sol is None:
            raise ValueError("vector is not a cycle")
        return [sol[self.boundaries.ncols + i, 0] for i in range(self.reps.ncols)]


def homology_basis(x: ChainCx, n: int) -> HomologyBasis:
    z = nullspace(x.d(n))
    b = column_space(x.d(n + 1))
    reps = complement_basis(b, z)
    return HomologyBasis(reps, b)


def induced_on_homology(src: ChainCx, tgt: ChainCx, maps: Mapping[int, Mat], shift: int = 0) -> dict[int, Mat]:
    """Matrices of H(f) for a chain map f: src_n -> tgt_{n+shift}."""
    out = {}
    for n in src.dims.degrees():
        hs = homology_basis(src, n)
        ht = homology_basis(tgt, n + shift)
        if hs.reps.ncols == 0 or ht.reps.ncols == 0:
            out[n] = Mat.zeros(ht.reps.ncols, hs.reps.ncols)
            continue
        f = maps.get(n, Mat.zeros(tgt.dims[n + shift], src.dims[n]))
        cols = [ht.coords(f.apply(c)) for c in hs.reps.columns()]
        out[n] = Mat.from_columns(cols, ht.reps.ncols)
    return out


# ---------------------------------------------------------------- graded rings


class Ring(enum.Enum):
    """Coefficient rings; the polynomial generator c always has degree -2."""

    Q = "Q"
    POLY = "Q[c]"
    LAURENT = "Q[c,c^-1]"


C_DEGREE = -2


class DegreeError(ValueError):
    """A matrix entry that is not homogeneous for the assigned degrees."""

    def __init__(self, row: int, col: int, message: str):
        super().__init__(f"entry ({row}, {col}): {message}")
        self.row = row
        self.col = col


def allowed_exponent(ring: Ring, tgt_degree: int, src_degree: int) -> int | None:
    """Power of c carried by an entry from a generator of src_degree to one of tgt_degree."""
    diff = tgt_degree - src_degree
    if diff % 2:
        return None
    e = diff // 2
    if ring is Ring.Q and e != 0:
        return None
    if ring is Ring.POLY and e < 0:
        return None
    return e


@dataclass(frozen=True)
class GradedMatrix:
    """Homogeneous map between free graded modules.

    Generator s of the source (degree src[s]) goes to
    sum_t mat[t, s] * c**exponent(t, s) * e_t.
    """

    ring: Ring
    src: tuple[int, ...]
    tgt: tuple[int, ...]
    mat: Mat

    def __post_init__(self):
        object.__setattr__(self, "src", tuple(int(d) for d in self.src))
        object.__setattr__(self, "tgt", tuple(int(d) for d in self.tgt))
        if self.mat.shape != (len(self.tgt), len(self.src)):
            raise ValueError(f"matrix shape {self.mat.shape} does not match degrees "
                             f"({len(self.tgt)}, {len(self.src)})")
        for t in range(len(self.tgt)):
            for s in range(len(self.src)):
                if self.mat[t, s] and allowed_exponent(self.ring, self.tgt[t], self.src[s]) is None:
                    raise DegreeError(t, s, f"degree {self.src[s]} -> {self.tgt[t]} "
                                            f"is not a valid power of c over {self.ring.value}")

    def exponent(self, t: int, s: int) -> int | None:
        return allowed_exponent(self.ring, self.tgt[t], self.src[s])

    def __matmul__(self, other: "GradedMatrix") -> "GradedMatrix":
        if self.src != other.tgt:
            raise ValueError("graded composition: degrees do not match")
        ring = self.ring if self.ring is other.ring else Ring.LAURENT
        return GradedMatrix(ring, other.src, self.tgt, self.mat @ other.mat)


@dataclass(frozen=True)
class SmithForm:
    """P @ M @ Q = D with D diagonal; factors are the c-exponents of the pivots.

    ``src``/``tgt`` are the degrees of the new bases.  Columns of ``Pinv`` are the
    new target basis in old coordinates; columns of ``Q`` are the new source basis.
    """

    ring: Ring
    factors: tuple[int, ...]
    P: Mat
    Pinv: Mat
    Q: Mat
    D: Mat
    src: tuple[int, ...]
    tgt: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.factors)

    def kernel(self) -> GradedMatrix:
        """Inclusion of the (free) kernel of M into its source."""
        r = self.rank
        cols = list(range(r, self.Q.ncols))
        return GradedMatrix(self.ring, tuple(self.src[c] for c in cols), self.orig_src,
                            self.Q.submatrix(range(self.Q.nrows), cols))

    orig_src: tuple[int, ...] = ()
    orig_tgt: tuple[int, ...] = ()


def smith(m: GradedMatrix) -> SmithForm:
    """Graded Smith normal form over Q, Q[c] or Q[c, 1/c]."""
    nt, ns = len(m.tgt), len(m.src)
    a = [list(r) for r in m.mat.rows]
    p = [[Fraction(int(i == j)) for j in range(nt)] for i in range(nt)]
    pinv = [[Fraction(int(i == j)) for j in range(nt)] for i in range(nt)]
    q = [[Fraction(int(i == j)) for j in range(ns)] for i in range(ns)]
    tdeg, sdeg = list(m.tgt), list(m.src)
    factors = []

    def expo(t, s):
        return allowed_exponent(m.ring, tdeg[t], sdeg[s])

    r = 0
    while r < min(nt, ns):
        best = None
        for t in range(r, nt):
            row = a[t]
            for s in range(r, ns):
                if row[s]:
                    key = (expo(t, s) if m.ring is Ring.POLY else 0, t, s)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        e, t0, s0 = best
        if t0 != r:
            a[r], a[t0] = a[t0], a[r]
            p[r], p[t0] = p[t0], p[r]
            for row in pinv:
                row[r], row[t0] = row[t0], row[r]
            tdeg[r], tdeg[t0] = tdeg[t0], tdeg[r]
        if s0 != r:
            for row in a:
                row[r], row[s0] = row[s0], row[r]
            for row in q:
                row[r], row[s0] = row[s0], row[r]
            sdeg[r], sdeg[s0] = sdeg[s0], sdeg[r]
        piv = a[r][r]
        for t in range(nt):
            if t != r and a[t][r]:
                f = a[t][r] / piv
                if m.ring is Ring.POLY and tdeg[t] < tdeg[r]:
                    raise AssertionError("smith: illegal row operation")
                a[t] = [x - f * y for x, y in zip(a[t], a[r])]
                p[t] = [x - f * y for x, y in zip(p[t], p[r])]
                for row in pinv:
                    row[r] += f * row[t]
        for s in range(ns):
            if s != r and a[r][s]:
                f = a[r][s] / piv
                if m.ring is Ring.POLY and sdeg[s] > sdeg[r]:
                    raise AssertionError("smith: illegal column operation")
                for row in a:
                    row[s] -= f * row[r]
                for row in q:
                    row[s] -= f * row[r]
        factors.append(e if m.ring is Ring.POLY else 0)
        r += 1
    return SmithForm(m.ring, tuple(factors), Mat(p, nt), Mat(pinv, nt), Mat(q, ns), Mat(a, ns),
                     tuple(sdeg), tuple(tdeg), orig_src=m.src, orig_tgt=m.tgt)


def graded_kernel(m: GradedMatrix) -> GradedMatrix:
    return smith(m).kernel()
