import random

import pytest

from o2models.exactlin import ChainCx, GradedVec, Mat, WChainCx, WVec
from o2models.germ import Germ
from o2models.model_d import (
    DObject, ValidationError, assemble_pi, cokernel_d, coproduct_d, constant, cq, global_sections, graded_d, hom_ext,
    homology_d, i_inf, i_k, identity_d, internal_hom_d, isomorphic_d, kernel_d, make_d, p_inf, p_k, pullback_d,
    pushout_d, regular_stalk, sphere_datum, subgroup_datum, tensor_d,
)
from generators import d_extension, d_object
from oracles import six_term

DEGREES = (-1, 0, 1)


def w_hom_dim(src: WChainCx, tgt: WChainCx, n: int) -> int:
    """Equivariant maps of degree n: the +1 and -1 isotypic parts map separately."""
    return sum(src.plus.dims[m] * tgt.plus.dims[m + n] + src.minus.dims[m] * tgt.minus.dims[m + n]
               for m in range(-4, 5))


def test_sigma_must_be_chain_map():
    cx = ChainCx(GradedVec({0: 1, 1: 1}), {1: Mat([[1]])})
    with pytest.raises(ValidationError, match="chain map"):
        DObject(Germ({}, WChainCx.trivial(ChainCx.graded({0: 1}))), cx, {1: Mat.zeros(0, 1), 0: Mat([[1]])})


def test_make_d_rejects_sigma_into_minus_part():
    gen = WChainCx.graded({0: 1}, {0: 1})
    with pytest.raises(ValidationError, match="fixed part"):
        make_d({}, gen, ChainCx.graded({0: 1}), {0: Mat([[0], [1]])})
    with pytest.raises(ValidationError, match="beyond the bound"):
        make_d({5: WChainCx.zero()}, gen, ChainCx.graded({}), {}, bound=3)


# ---------------------------------------------------------------- adjunctions


@pytest.mark.parametrize("k", [1, 3, 7])
def test_units_of_skyscraper_and_infinity(k):
    r = regular_stalk(2)
    assert p_k(i_k(k, r), k) == r
    assert p_inf(constant(ChainCx.graded({0: 2, 1: 1}))) == ChainCx.graded({0: 2, 1: 1})
    assert p_inf(i_inf(ChainCx.graded({0: 1}))).dims == GradedVec({0: 1})


@pytest.mark.parametrize("seed", range(15))
def test_skyscraper_is_both_adjoint_to_stalk(seed):
    rng = random.Random(seed)
    v = d_object(rng)
    k = rng.randint(1, 8)
    r = WChainCx.graded({0: rng.randint(0, 2), 1: rng.randint(0, 1)}, {0: rng.randint(0, 2)})
    left = hom_ext(i_k(k, r), v, DEGREES)
    right = hom_ext(v, i_k(k, r), DEGREES)
    for n in DEGREES:
        assert left.hom.truncated(8)[n] == w_hom_dim(r, v.stalk(k), n)
        assert right.hom.truncated(8)[n] == w_hom_dim(v.stalk(k), r, n)


@pytest.mark.parametrize("seed", range(10))
def test_constant_sheaf_maps_are_global_sections(seed):
    v = d_object(random.Random(seed))
    hom = hom_ext(cq(), v, DEGREES).hom
    sections = global_sections(v)
    for n in DEGREES:
        assert hom.infinity[n] == sections.infinity[n]
        for k in range(1, 10):
            assert hom.at(k)[n] == sections.at(k)[n]


def test_cross_index_homs_vanish():
    r = regular_stalk(1)
    assert hom_ext(i_k(3, r), i_k(4, r)).hom.is_zero()


# ---------------------------------------------------------------- Ext


@pytest.mark.parametrize("seed", range(5))
def test_six_term_sequence_against_oracle(seed):
    rng = random.Random(200 + seed)
    s, q, w = d_object(rng), d_object(rng), d_object(rng)
    m, inc, pr = d_extension(rng, s, q)
    for n in DEGREES:
        res = six_term(s, m, q, inc, pr, w, n, 8)
        assert res["defects"] == [0] * 6
        impl = [hom_ext(x, w, (n,)) for x in (s, m, q)]
        assert res["hom"] == tuple(h.hom.truncated(8)[n] for h in impl)
        assert res["ext"] == tuple(h.ext[n] for h in impl)


@pytest.mark.parametrize("seed", range(10))
def test_ext_vanishes_for_injective_sigma_or_no_infinity(seed):
    rng = random.Random(300 + seed)
    w = d_object(rng)
    # V_inf = 0
    v = graded_d({1: WVec(GradedVec({0: 1}))}, WVec(GradedVec({0: 2})))
    assert hom_ext(v, w, DEGREES).ext.total == 0
    # sigma injective
    inj = graded_d(generic=WVec(GradedVec({0: 2, 1: 1})), infty={0: 2, 1: 1},
                   sigma={0: Mat([[1, 1], [0, 1]]), 1: Mat([[3]])})
    assert hom_ext(inj, w, DEGREES).ext.total == 0


def test_nonzero_ext_example():
    v = i_inf(ChainCx.graded({0: 1}))
    w = graded_d(generic=WVec(GradedVec({0: 1})))
    assert hom_ext(v, w).ext[0] == 1


# ---------------------------------------------------------------- structure


def test_constant_sheaf_is_tensor_unit():
    rng = random.Random(4)
    for _ in range(5):
        v = d_object(rng)
        assert isomorphic_d(tensor_d(cq(), v), v)


def test_internal_hom_of_skyscrapers():
    ik = i_k(3, regular_stalk(1))
    h = internal_hom_d(ik, ik)
    assert h.stalk(3).spaces == WVec(GradedVec({0: 2}), GradedVec({0: 2}))
    assert h.generic.spaces.total.total == 0


def test_limits_of_identity():
    c = cq()
    idc = identity_d(c)
    assert isomorphic_d(pullback_d(idc, idc), c)
    assert isomorphic_d(pushout_d(idc, idc), c)
    assert isomorphic_d(kernel_d(idc)[0], graded_d())
    assert isomorphic_d(cokernel_d(idc)[0], graded_d())


def test_homology_of_contractible_constant_sheaf():
    disk = ChainCx(GradedVec({0: 1, 1: 1}), {1: Mat([[1]])})
    h = homology_d(constant(disk))
    assert h.infty.dims.total == 0 and h.generic.spaces.total.total == 0
    assert isomorphic_d(homology_d(cq()), cq())


# ---------------------------------------------------------------- assembling homotopy data


def test_sphere_datum_assembles_to_constant_sheaf():
    assert isomorphic_d(assemble_pi(*sphere_datum()), cq())


@pytest.mark.parametrize("k,i", [(1, 1), (2, 2), (5, 3)])
def test_subgroup_datum_assembles_to_skyscraper(k, i):
    assert isomorphic_d(assemble_pi(*subgroup_datum(k, i)), i_k(k, regular_stalk(i)))


def test_incompatible_corner_is_rejected():
    stalks = Germ({}, WVec(GradedVec({0: 1}), GradedVec({0: 1})))
    with pytest.raises(ValidationError, match="incompatible"):
        assemble_pi(stalks, GradedVec({0: 1}), {0: Mat([[0], [1]])})


def test_product_with_infinity_object():
    line = ChainCx(GradedVec({0: 1}))
    prod = coproduct_d(cq(), i_inf(line))
    assert prod.infty.dims[0] == 2
    assert all(prod.stalk(k).plus.dims[0] == 1 for k in (None, 1, 2, 7))
    both = hom_ext(cq(), prod).hom
    assert both.infinity[0] == hom_ext(cq(), cq()).hom.infinity[0] + hom_ext(cq(), i_inf(line)).hom.infinity[0]
    assert both.generic[0] == 1


def test_internal_hom_into_infinity_object_has_no_stalks():
    rng = random.Random(3)
    target = i_inf(ChainCx(GradedVec({0: 2})))
    for v in (cq(), d_object(rng), i_k(2, regular_stalk(2))):
        h = internal_hom_d(v, target)
        assert all(h.stalk(k).plus.dims.total == h.stalk(k).minus.dims.total == 0 for k in (None,) + h.indices())
