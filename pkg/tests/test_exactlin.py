import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from o2models.exactlin import (
    ChainCx, GradedMatrix, GradedVec, Mat, Quotient, Ring, WVec, column_space, format_rat, homology,
    homology_basis, inverse, kron, linear_pullback, nullspace, parse_rat, rank, regular_power, smith, solve,
)
from oracles import sym_rank, to_sympy

entries = st.integers(-3, 3).map(Fraction)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(entries) for _ in range(c)] for _ in range(r)]
    return Mat(rows, c)


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sym_rank(to_sympy(m))


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(m):
    k = nullspace(m)
    assert k.ncols == m.ncols - rank(m)
    assert (m @ k).is_zero()


@given(matrices(4, 4), matrices(4, 4))
def test_matmul_matches_sympy(a, b):
    if a.ncols != b.nrows:
        b = Mat.zeros(a.ncols, b.ncols)
    assert to_sympy(a @ b) == to_sympy(a) * to_sympy(b)


@given(matrices(4, 4))
def test_solve_finds_preimage_of_image(m):
    x = Mat([[Fraction(i - j) for j in range(2)] for i in range(m.ncols)], 2)
    y = m @ x
    sol = solve(m, y)
    assert sol is not None and m @ sol == y


def test_solve_reports_inconsistent_system():
    assert solve(Mat([[1], [1]]), Mat([[1], [2]])) is None


def test_inverse_and_kron():
    a = Mat([[2, 1], [1, 1]])
    assert a @ inverse(a) == Mat.identity(2)
    assert to_sympy(kron(a, Mat([[0, 1], [1, 0]]))) == sympy.kronecker_product(to_sympy(a), sympy.Matrix([[0, 1], [1, 0]]))


def test_rationals_round_trip():
    for text in ("3/4", "-2/1", "0/1"):
        assert format_rat(parse_rat(text)) == text
    assert parse_rat("6/8") == Fraction(3, 4)
    with pytest.raises(ValueError):
        parse_rat(True)


@given(matrices(4, 4), matrices(4, 4))
def test_linear_pullback_dimension(f, g):
    g = Mat([list(r) for r in g.rows][: f.nrows] + [[0] * g.ncols] * max(0, f.nrows - g.nrows), g.ncols)
    dim, pa, pb = linear_pullback(f, g)
    both = sympy.Matrix.hstack(to_sympy(f), -to_sympy(g)) if f.ncols + g.ncols else sympy.zeros(f.nrows, 0)
    assert dim == f.ncols + g.ncols - sym_rank(both)
    assert f @ pa == g @ pb


def test_quotient_coordinates():
    q = Quotient(3, Mat([[1], [1], [0]]))
    assert q.dim == 2
    coords = q.coords(Mat([[1], [1], [0]]))
    assert coords.is_zero()


# ---------------------------------------------------------------- chain complexes


@st.composite
def chain_complexes(draw):
    """A complex built as a direct sum of shifted two-term pieces mixed by an invertible change of basis."""
    rng = random.Random(draw(st.integers(0, 10_000)))
    dims = {n: rng.randint(0, 3) for n in range(0, 3)}
    diffs = {}
    d1 = Mat([[Fraction(rng.randint(-2, 2)) for _ in range(dims[1])] for _ in range(dims[0])], dims[1])
    # d2 must land in the kernel of d1
    ker = nullspace(d1)
    if ker.ncols and dims[2]:
        coeffs = Mat([[Fraction(rng.randint(-2, 2)) for _ in range(dims[2])] for _ in range(ker.ncols)], dims[2])
        diffs[2] = ker @ coeffs
    diffs[1] = d1
    return ChainCx(GradedVec(dims), diffs)


@given(chain_complexes())
def test_homology_matches_rank_formula(cx):
    h = homology(cx)
    for n in range(-1, 4):
        expected = cx.dims[n] - sym_rank(to_sympy(cx.d(n))) - sym_rank(to_sympy(cx.d(n + 1)))
        assert h[n] == expected


@given(chain_complexes())
def test_homology_basis_spans_cycles_mod_boundaries(cx):
    for n in range(0, 3):
        hb = homology_basis(cx, n)
        assert hb.reps.ncols == homology(cx)[n]
        assert (cx.d(n) @ hb.reps).is_zero()


def test_d_squared_nonzero_rejected():
    with pytest.raises(ValueError):
        ChainCx(GradedVec({0: 1, 1: 1, 2: 1}), {1: Mat([[1]]), 2: Mat([[1]])})


def test_regular_power_character():
    for i in range(1, 6):
        w = regular_power(i)
        assert w.plus[0] == w.minus[0] == 2 ** (i - 1)
    assert regular_power(0) == WVec(GradedVec({0: 1}))


# ---------------------------------------------------------------- Smith form over Q[c]


def _graded_matrix(rng: random.Random, ring: Ring) -> GradedMatrix:
    tgt = tuple(rng.choice((0, 2, 4, -2)) for _ in range(rng.randint(1, 3)))
    src = tuple(rng.choice((-2, -4, 0, 2)) for _ in range(rng.randint(1, 3)))
    rows = []
    for t in tgt:
        row = []
        for s in src:
            diff = t - s
            ok = diff % 2 == 0 and (ring is Ring.LAURENT or diff >= 0)
            row.append(Fraction(rng.randint(-2, 2)) if ok and rng.random() < 0.7 else Fraction(0))
        rows.append(row)
    return GradedMatrix(ring, src, tgt, Mat(rows, len(src)))


def _valuation(p) -> int:
    p = sympy.Poly(p, sympy.Symbol("c"))
    return min(m[0] for m in p.monoms())


def _smith_oracle(m: GradedMatrix) -> list[int]:
    """c-exponents of the invariant factors from determinantal divisors."""
    c = sympy.Symbol("c")
    big = sympy.Matrix(len(m.tgt), len(m.src),
                       lambda t, s: sympy.Rational(str(m.mat[t, s])) * c ** ((m.tgt[t] - m.src[s]) // 2)
                       if m.mat[t, s] else 0)
    out, prev = [], 0
    for k in range(1, min(big.shape) + 1):
        minors = [big.extract(list(r), list(s)).det()
                  for r in itertools.combinations(range(big.rows), k)
                  for s in itertools.combinations(range(big.cols), k)]
        minors = [sympy.expand(x) for x in minors if sympy.expand(x) != 0]
        if not minors:
            break
        total = min(_valuation(x) for x in minors)
        out.append(total - prev)
        prev = total
    return out


@settings(max_examples=60)
@given(st.integers(0, 100_000))
def test_smith_factors_match_determinantal_divisors(seed):
    m = _graded_matrix(random.Random(seed), Ring.POLY)
    sf = smith(m)
    assert sorted(sf.factors) == sorted(_smith_oracle(m))
    assert sf.P @ m.mat @ sf.Q == sf.D


def test_column_space_has_rank_columns():
    m = Mat([[1, 2, 3], [2, 4, 6]])
    assert column_space(m).ncols == 1
