import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from o2models.euler_of import (
    LOCALIZED, AdmissibleRep, EulerClass, FpModule, ModuleElement, ModuleError, ModuleMap, OFElement,
    Presentation, Support, cokernel, dimension_function, direct_sum, e_phi, euler_mul, euler_sphere_module,
    hom, is_euler_torsion, is_fg_projective, kernel, localize, module_kernel, rep_sphere_module, shift_by_euler,
    sigma, tensor,
)
from o2models.exactlin import Mat, Ring
from o2models.germ import Germ
from generators import euler_classes, rat
from oracles import presentation_dim

WINDOW = range(-10, 9)


def random_presentation(rng: random.Random, ring: Ring = Ring.POLY) -> Presentation:
    gens = tuple(rng.randint(-4, 3) for _ in range(rng.randint(0, 3)))
    rel_degrees = tuple(rng.randint(-8, 2) for _ in range(rng.randint(0, 3)))
    cols = []
    for r in rel_degrees:
        col = []
        for g in gens:
            ok = (g - r) % 2 == 0 and (ring is Ring.LAURENT or g >= r)
            col.append(rat(rng) if ok and rng.random() < 0.8 else Fraction(0))
        cols.append(col)
    return Presentation(ring, gens, rel_degrees, Mat.from_columns(cols, len(gens)))


def cyclic_torsion(gen: int, power: int) -> Presentation:
    return Presentation(Ring.POLY, (gen,), (gen - 2 * power,), Mat([[1]]))


def fixed_dims_oracle(chars, k: int) -> int:
    return sum(1 for n in chars if n % k == 0)


# ---------------------------------------------------------------- Euler classes


@settings(max_examples=200)
@given(st.lists(st.integers(1, 12), max_size=4), st.lists(st.integers(1, 12), max_size=4))
def test_euler_class_of_sum_is_product(v, w):
    cv, cw = dimension_function(AdmissibleRep(v)), dimension_function(AdmissibleRep(w))
    both = dimension_function(AdmissibleRep(v) + AdmissibleRep(w))
    assert euler_mul(cv, cw) == both
    for k in range(1, 13):
        assert both.at(k) == fixed_dims_oracle(v + w, k)


def test_dimension_function_examples():
    assert dimension_function(AdmissibleRep((1,))).as_dict() == {1: 1}
    assert dimension_function(AdmissibleRep((2,))).as_dict() == {1: 1, 2: 1}
    assert dimension_function(AdmissibleRep()) == EulerClass()
    with pytest.raises(ValueError):
        AdmissibleRep((0,))
    with pytest.raises(ValueError):
        EulerClass.of({1: -1})


@given(euler_classes(), euler_classes(), euler_classes())
def test_euler_multiplication_is_commutative_monoid(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * EulerClass() == a
    assert (a ** 2) == a * a


def test_of_element_arithmetic():
    x = OFElement.homogeneous(-2, Germ({1: Fraction(2)}, Fraction(1)))
    y = OFElement.scalar(3)
    assert (x * y).coefficient(1, -2) == 6
    assert (x + x).coefficient(None, -2) == 2
    assert x.degree == -2


# ---------------------------------------------------------------- presentations


@settings(max_examples=80)
@given(st.integers(0, 100_000), st.sampled_from([Ring.POLY, Ring.LAURENT]))
def test_piece_dimensions_match_rank_oracle(seed, ring):
    p = random_presentation(random.Random(seed), ring)
    for d in WINDOW:
        assert p.dim(d) == presentation_dim(p.gens, p.rel_degrees, p.rels, d, ring is Ring.LAURENT)


@settings(max_examples=80)
@given(st.integers(0, 100_000))
def test_simplification_preserves_pieces(seed):
    p = random_presentation(random.Random(seed))
    s = p.simplified()
    assert [p.dim(d) for d in WINDOW] == [s.dim(d) for d in WINDOW]


@given(st.integers(-4, 4), st.integers(1, 4), st.integers(-4, 4), st.integers(1, 4))
def test_tensor_and_hom_of_cyclic_torsion(g, a, h, b):
    m = min(a, b)
    assert tensor(cyclic_torsion(g, a), cyclic_torsion(h, b)).invariants() == ((), ((g + h, m),))
    hm, _ = hom(cyclic_torsion(g, a), cyclic_torsion(h, b))
    assert hm.invariants() == ((), ((h - g - 2 * max(0, b - a), m),))


@settings(max_examples=60)
@given(st.integers(0, 100_000))
def test_kernel_and_cokernel_fit_in_exact_sequence(seed):
    rng = random.Random(seed)
    tgt = random_presentation(rng)
    src = Presentation.free(tuple(rng.randint(-4, 3) for _ in range(rng.randint(0, 3))))
    cols = []
    for g in src.gens:
        cols.append([rat(rng) if h >= g and (h - g) % 2 == 0 else 0 for h in tgt.gens])
    mat = Mat.from_columns(cols, tgt.ngens)
    ker, incl = kernel(src, tgt, mat)
    coker = cokernel(src, tgt, mat)
    for d in WINDOW:
        alternating = ker.dim(d) - presentation_dim(src.gens, (), Mat.zeros(src.ngens, 0), d) + \
            presentation_dim(tgt.gens, tgt.rel_degrees, tgt.rels, d) - \
            presentation_dim(coker.gens, coker.rel_degrees, coker.rels, d)
        assert alternating == 0


def test_double_suspension_of_polynomial_ring_is_negative_power_lattice():
    for n in range(0, 5):
        shifted = Presentation.free((0,)).shift(2 * n)
        # Q<c^-n> inside Q[c, 1/c] is spanned by c^j for j >= -n, and c^j has degree -2j
        lattice = [sum(1 for j in range(-n, 20) if -2 * j == d) for d in WINDOW]
        assert [shifted.dim(d) for d in WINDOW] == lattice


def test_polynomial_suspension_matches_negative_power_lattice():
    for n in range(0, 5):
        sphere_part = euler_sphere_module(EulerClass.of({1: n})).at(1)
        shifted = Presentation.free((0,)).shift(2 * n)
        assert sphere_part.invariants() == shifted.invariants() == ((2 * n,), ())


# ---------------------------------------------------------------- O_F-modules


def test_sigma_shifts_components_by_fixed_dimension():
    m = FpModule.free((0,))
    out = sigma(m, AdmissibleRep((6,)))
    for k in range(1, 9):
        assert out.at(k).gens == ((2,) if 6 % k == 0 else (0,))
    assert sigma(m, AdmissibleRep()) == m


@given(st.lists(st.integers(1, 8), max_size=3))
def test_sigma_inverse(chars):
    m = FpModule.at_indices({2: cyclic_torsion(0, 2)}, Presentation.free((0, 2)))
    rep = AdmissibleRep(chars)
    back = sigma(sigma(m, rep, 1), rep, -1)
    for k in range(1, 10):
        assert back.at(k).invariants() == m.at(k).invariants()


def test_rep_sphere_module_components():
    s = rep_sphere_module(AdmissibleRep((3,)))
    assert s.at(3).gens == (2,) and s.at(1).gens == (2,) and s.at(2).gens == (0,)
    assert rep_sphere_module(AdmissibleRep()) == FpModule.free((0,))


def test_localization():
    tors = FpModule.at_indices({1: cyclic_torsion(0, 1)}, Presentation.zero())
    assert localize(tors).at(1).is_zero()
    assert localize(tors).ring == LOCALIZED
    loc = localize(rep_sphere_module(AdmissibleRep((2,))))
    assert all(loc.at(k).torsion_free_rank() == 1 for k in (1, 2, 3))


def test_projectivity_and_torsion_predicates():
    assert is_fg_projective(FpModule.free((0, 2)))[0]
    assert is_fg_projective(rep_sphere_module(AdmissibleRep((1, 2))))[0]
    bad = FpModule.at_indices({1: cyclic_torsion(0, 1)}, Presentation.free((0,)))
    ok, where = is_fg_projective(bad)
    assert not ok and where == 1
    assert is_euler_torsion(FpModule.at_indices({1: cyclic_torsion(0, 1)}, Presentation.zero()))
    assert not is_euler_torsion(bad)


def test_e_phi_keeps_selected_components():
    m = FpModule.free((0,))
    kept = e_phi(m, Support.finite({2}))
    assert kept.at(2).ngens == 1 and kept.at(3).is_zero()
    rest = e_phi(m, Support.all_but({2}))
    assert rest.at(2).is_zero() and rest.at(7).ngens == 1


def test_shift_by_euler_matches_sigma():
    m = FpModule.free((0,))
    rep = AdmissibleRep((2, 3))
    assert shift_by_euler(m, dimension_function(rep)) == sigma(m, rep)


def test_element_degree_is_checked():
    m = FpModule.free((0,))
    ModuleElement(m, -2, Germ({}, (1,)))
    with pytest.raises(ModuleError):
        ModuleElement(m, 2, Germ({}, (1,)))
    with pytest.raises(ModuleError):
        ModuleElement(m, 0, Germ({}, (1, 1)))


def test_module_map_checks_relations():
    t = FpModule.at_indices({1: cyclic_torsion(0, 1)}, Presentation.zero())
    f = FpModule.at_indices({1: Presentation.free((0,))}, Presentation.zero())
    good = ModuleMap(f, t, Germ({1: Mat([[1]])}, Mat.zeros(0, 0)))
    good.check()
    with pytest.raises(ModuleError):
        ModuleMap(t, f, Germ({1: Mat([[1]])}, Mat.zeros(0, 0))).check()
    ker, incl = module_kernel(good)
    assert ker.at(1).invariants() == ((-2,), ())


def test_direct_sum_pieces_add():
    a, b = cyclic_torsion(0, 2), Presentation.free((1,))
    s = direct_sum(a, b)
    assert all(s.dim(d) == a.dim(d) + b.dim(d) for d in WINDOW)
